// Copyright 2026 The qsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qsplit/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>

#include "qsplit/rng.hpp"

namespace qsplit {

namespace {

std::vector<std::uint8_t> read_file_maybe_gzip(const std::filesystem::path &path) {
    std::filesystem::path actual = path;
    if (!std::filesystem::exists(actual)) {
        std::filesystem::path gz = path;
        gz += ".gz";
        if (!std::filesystem::exists(gz)) throw DataError("missing data file " + path.string());
        actual = gz;
    }
    // gzread passes uncompressed files through unchanged.
    std::unique_ptr<gzFile_s, decltype(&gzclose)> f(gzopen(actual.c_str(), "rb"), &gzclose);
    if (!f) throw DataError("cannot open " + actual.string());
    std::vector<std::uint8_t> out;
    std::array<std::uint8_t, 1 << 16> buf{};
    for (;;) {
        const int n = gzread(f.get(), buf.data(), static_cast<unsigned>(buf.size()));
        if (n < 0) throw DataError("read error in " + actual.string());
        if (n == 0) break;
        out.insert(out.end(), buf.begin(), buf.begin() + n);
    }
    return out;
}

std::uint32_t read_be32(const std::vector<std::uint8_t> &b, std::size_t off) {
    return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) | (std::uint32_t{b[off + 2]} << 8) |
           std::uint32_t{b[off + 3]};
}

double catmull_rom(double d) {
    constexpr double a = -0.5;
    d = std::abs(d);
    if (d <= 1.0) return ((a + 2.0) * d - (a + 3.0)) * d * d + 1.0;
    if (d < 2.0) return ((a * d - 5.0 * a) * d + 8.0 * a) * d - 4.0 * a;
    return 0.0;
}

struct Taps {
    std::array<std::size_t, 4> index;
    std::array<double, 4> weight;
};

std::vector<Taps> make_taps(std::size_t in, std::size_t out) {
    std::vector<Taps> taps(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    const auto last = static_cast<std::ptrdiff_t>(in) - 1;
    for (std::size_t o = 0; o < out; ++o) {
        const double src = (static_cast<double>(o) + 0.5) * scale - 0.5;
        const double base = std::floor(src);
        const double t = src - base;
        for (int k = 0; k < 4; ++k) {
            const auto i = static_cast<std::ptrdiff_t>(base) - 1 + k;
            taps[o].index[k] = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, last));
            taps[o].weight[k] = catmull_rom(t - static_cast<double>(k - 1));
        }
    }
    return taps;
}

}  // namespace

IdxArray load_idx(const std::filesystem::path &path) {
    const auto bytes = read_file_maybe_gzip(path);
    if (bytes.size() < 4) throw DataError(path.string() + ": truncated IDX header");
    const std::uint32_t magic = read_be32(bytes, 0);
    if ((magic >> 8) != 0x08) {
        throw DataError(path.string() + ": bad IDX magic (only unsigned-byte tensors are supported)");
    }
    const std::uint32_t ndims = magic & 0xFF;
    if (ndims != 1 && ndims != 3) throw DataError(path.string() + ": bad IDX magic, unexpected rank");
    if (bytes.size() < 4 + 4 * std::size_t{ndims}) throw DataError(path.string() + ": truncated IDX header");
    IdxArray arr;
    std::size_t total = 1;
    for (std::uint32_t d = 0; d < ndims; ++d) {
        arr.dims.push_back(read_be32(bytes, 4 + 4 * d));
        total *= arr.dims.back();
    }
    const std::size_t off = 4 + 4 * std::size_t{ndims};
    if (bytes.size() - off < total) {
        throw DataError(path.string() + ": truncated IDX payload (" + std::to_string(bytes.size() - off) + " of " +
                        std::to_string(total) + " bytes)");
    }
    arr.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(off),
                    bytes.begin() + static_cast<std::ptrdiff_t>(off + total));
    return arr;
}

std::vector<Image> load_idx_images(const std::filesystem::path &path) {
    const IdxArray arr = load_idx(path);
    if (arr.dims.size() != 3) throw DataError(path.string() + ": expected an image file (magic 0x00000803)");
    const std::size_t n = arr.dims[0], rows = arr.dims[1], cols = arr.dims[2];
    std::vector<Image> images;
    images.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Image img(rows, cols, 1);
        for (std::size_t k = 0; k < rows * cols; ++k) img.values[k] = arr.data[i * rows * cols + k] / 255.0;
        images.push_back(std::move(img));
    }
    return images;
}

std::vector<int> load_idx_labels(const std::filesystem::path &path) {
    const IdxArray arr = load_idx(path);
    if (arr.dims.size() != 1) throw DataError(path.string() + ": expected a label file (magic 0x00000801)");
    return {arr.data.begin(), arr.data.end()};
}

std::vector<Sample> load_cifar10_batch(const std::filesystem::path &path) {
    constexpr std::size_t kRecord = 1 + 3 * 1024;
    const auto bytes = read_file_maybe_gzip(path);
    if (bytes.empty() || bytes.size() % kRecord != 0) {
        throw DataError(path.string() + ": size is not a whole number of CIFAR-10 records");
    }
    std::vector<Sample> out;
    out.reserve(bytes.size() / kRecord);
    for (std::size_t off = 0; off < bytes.size(); off += kRecord) {
        Sample s{Image(32, 32, 3), bytes[off]};
        if (s.label > 9) throw DataError(path.string() + ": label out of range");
        for (std::size_t ch = 0; ch < 3; ++ch)
            for (std::size_t p = 0; p < 1024; ++p) s.image.at(p / 32, p % 32, ch) = bytes[off + 1 + ch * 1024 + p] / 255.0;
        out.push_back(std::move(s));
    }
    return out;
}

Image bicubic_resize(const Image &src, std::size_t out_height, std::size_t out_width) {
    if (src.height == 0 || src.width == 0 || out_height == 0 || out_width == 0) {
        throw DataError("bicubic_resize: empty image");
    }
    const auto tx = make_taps(src.width, out_width);
    const auto ty = make_taps(src.height, out_height);
    // Horizontal pass, then vertical.
    Image mid(src.height, out_width, src.channels);
    for (std::size_t r = 0; r < src.height; ++r)
        for (std::size_t c = 0; c < out_width; ++c)
            for (std::size_t ch = 0; ch < src.channels; ++ch) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k) acc += tx[c].weight[k] * src.at(r, tx[c].index[k], ch);
                mid.at(r, c, ch) = acc;
            }
    Image out(out_height, out_width, src.channels);
    for (std::size_t r = 0; r < out_height; ++r)
        for (std::size_t c = 0; c < out_width; ++c)
            for (std::size_t ch = 0; ch < src.channels; ++ch) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k) acc += ty[r].weight[k] * mid.at(ty[r].index[k], c, ch);
                out.at(r, c, ch) = std::clamp(acc, 0.0, 1.0);
            }
    return out;
}

DatasetKind parse_dataset_kind(std::string_view s) {
    if (s == "mnist") return DatasetKind::Mnist;
    if (s == "fashion_mnist" || s == "fashionmnist") return DatasetKind::FashionMnist;
    if (s == "cifar10") return DatasetKind::Cifar10;
    if (s == "synthetic") return DatasetKind::Synthetic;
    throw DataError("unknown dataset '" + std::string(s) + "'");
}

std::string_view to_string(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::Mnist: return "mnist";
        case DatasetKind::FashionMnist: return "fashion_mnist";
        case DatasetKind::Cifar10: return "cifar10";
        case DatasetKind::Synthetic: return "synthetic";
    }
    return "?";
}

Dataset load_dataset(DatasetKind kind, const std::filesystem::path &data_dir, bool train, std::size_t side) {
    Dataset out;
    out.num_classes = 10;
    if (kind == DatasetKind::Synthetic) {
        return make_synthetic(train ? 4096 : 1024, side, 1, 10, train ? 1 : 2);
    }
    if (kind == DatasetKind::Cifar10) {
        const auto dir = data_dir / "cifar-10-batches-bin";
        std::vector<std::string> files;
        if (train) {
            for (int b = 1; b <= 5; ++b) files.push_back("data_batch_" + std::to_string(b) + ".bin");
        } else {
            files.push_back("test_batch.bin");
        }
        for (const auto &f : files) {
            for (auto &s : load_cifar10_batch(dir / f)) {
                s.image = bicubic_resize(s.image, side, side);
                out.samples.push_back(std::move(s));
            }
        }
        return out;
    }
    const auto dir = data_dir / (kind == DatasetKind::Mnist ? "mnist" : "fashion_mnist");
    const std::string prefix = train ? "train" : "t10k";
    auto images = load_idx_images(dir / (prefix + "-images-idx3-ubyte"));
    const auto labels = load_idx_labels(dir / (prefix + "-labels-idx1-ubyte"));
    if (images.size() != labels.size()) {
        throw DataError("image/label count mismatch in " + dir.string() + ": " + std::to_string(images.size()) +
                        " vs " + std::to_string(labels.size()));
    }
    out.samples.reserve(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (labels[i] < 0 || labels[i] > 9) throw DataError("label out of range in " + dir.string());
        out.samples.push_back({bicubic_resize(images[i], side, side), labels[i]});
    }
    return out;
}

Dataset select_classes(const Dataset &data, const std::vector<int> &classes) {
    if (classes.empty()) return data;
    Dataset out;
    out.num_classes = classes.size();
    for (const auto &s : data.samples) {
        const auto it = std::find(classes.begin(), classes.end(), s.label);
        if (it != classes.end()) out.samples.push_back({s.image, static_cast<int>(it - classes.begin())});
    }
    return out;
}

Dataset make_synthetic(std::size_t count, std::size_t side, std::size_t channels, std::size_t num_classes,
                       std::uint64_t seed) {
    Dataset out;
    out.num_classes = num_classes;
    Rng rng = Rng(seed).split("synthetic");
    for (std::size_t i = 0; i < count; ++i) {
        const int label = static_cast<int>(rng.below(num_classes));
        Image img(side, side, channels);
        for (std::size_t r = 0; r < side; ++r)
            for (std::size_t c = 0; c < side; ++c) {
                const bool lit = (r * num_classes / side) == static_cast<std::size_t>(label);
                for (std::size_t ch = 0; ch < channels; ++ch)
                    img.at(r, c, ch) = std::clamp((lit ? 0.7 : 0.1) + 0.2 * rng.uniform(), 0.0, 1.0);
            }
        out.samples.push_back({std::move(img), label});
    }
    return out;
}

std::vector<Shard> shard_iid(const Dataset &data, std::size_t num_clients, std::size_t per_client,
                             std::uint64_t seed) {
    if (num_clients == 0) throw DataError("need at least one client");
    if (per_client == 0) throw DataError("need at least one sample per client");
    if (num_clients * per_client > data.size()) {
        throw DataError("insufficient data: " + std::to_string(num_clients) + " clients x " +
                        std::to_string(per_client) + " samples > " + std::to_string(data.size()));
    }
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = Rng(seed).split("shard");
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    std::vector<Shard> shards(num_clients);
    for (std::size_t k = 0; k < num_clients; ++k) {
        shards[k].client_id = k;
        shards[k].indices.assign(order.begin() + static_cast<std::ptrdiff_t>(k * per_client),
                                 order.begin() + static_cast<std::ptrdiff_t>((k + 1) * per_client));
    }
    return shards;
}

}  // namespace qsplit
