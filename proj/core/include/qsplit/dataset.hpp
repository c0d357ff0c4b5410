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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qsplit/image.hpp"

namespace qsplit {

class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raw IDX tensor: big-endian dimension list plus unsigned-byte payload.
struct IdxArray {
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> data;
};

/// Reads an IDX file of unsigned bytes (magic 0x00000801 labels,
/// 0x00000803 images). Gzip-compressed files are read transparently.
IdxArray load_idx(const std::filesystem::path &path);

/// IDX image file as count images of rows x cols x 1, pixels / 255.
std::vector<Image> load_idx_images(const std::filesystem::path &path);
std::vector<int> load_idx_labels(const std::filesystem::path &path);

struct Sample {
    Image image;
    int label = 0;
};

/// One CIFAR-10 binary batch: records of 1 label byte + 3072 pixel bytes
/// (1024 R, 1024 G, 1024 B). Images are 32 x 32 x 3 in [0, 1].
std::vector<Sample> load_cifar10_batch(const std::filesystem::path &path);

/// Catmull-Rom (a = -0.5) bicubic resampling with edge-clamped taps and
/// pixel-center alignment; output clamped to [0, 1]. Channels are resized
/// independently.
Image bicubic_resize(const Image &src, std::size_t out_height, std::size_t out_width);

struct Dataset {
    std::vector<Sample> samples;
    std::size_t num_classes = 10;

    std::size_t size() const { return samples.size(); }
};

enum class DatasetKind { Mnist, FashionMnist, Cifar10, Synthetic };

DatasetKind parse_dataset_kind(std::string_view s);
std::string_view to_string(DatasetKind kind);

/// Loads the train or test split from data_dir and resizes every image to
/// side x side. Layout under data_dir: mnist/, fashion_mnist/ (standard
/// IDX names, optionally .gz) and cifar-10-batches-bin/.
Dataset load_dataset(DatasetKind kind, const std::filesystem::path &data_dir, bool train, std::size_t side = 14);

/// Keeps only the listed classes and relabels them 0..n-1 in list order.
Dataset select_classes(const Dataset &data, const std::vector<int> &classes);

/// Deterministic class-dependent images for tests and cost accounting runs:
/// each class lights a distinct band of the image, plus uniform noise.
Dataset make_synthetic(std::size_t count, std::size_t side, std::size_t channels, std::size_t num_classes,
                       std::uint64_t seed);

struct Shard {
    std::size_t client_id = 0;
    std::vector<std::size_t> indices;  // into the shared dataset
};

/// Seeded uniform shuffle of the dataset indices, sliced into K contiguous
/// disjoint shards of per_client samples.
std::vector<Shard> shard_iid(const Dataset &data, std::size_t num_clients, std::size_t per_client,
                             std::uint64_t seed);

}  // namespace qsplit
