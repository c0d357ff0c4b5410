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

#include "qsplit/quanv.hpp"

#include <bit>
#include <string>

namespace qsplit {

void PatchGrid::validate() const {
    if (width == 0 || height == 0 || channels == 0) throw QuanvError("image dimensions must be positive");
    if (kernel == 0 || kernel > width || kernel > height) {
        throw QuanvError("kernel " + std::to_string(kernel) + " does not fit a " + std::to_string(height) + "x" +
                         std::to_string(width) + " image");
    }
    if (stride == 0) throw QuanvError("stride must be >= 1");
}

std::vector<std::vector<double>> extract_patches(const Image &image, const PatchGrid &grid) {
    grid.validate();
    if (image.width != grid.width || image.height != grid.height || image.channels != grid.channels) {
        throw QuanvError("image is " + std::to_string(image.height) + "x" + std::to_string(image.width) + "x" +
                         std::to_string(image.channels) + ", grid expects " + std::to_string(grid.height) + "x" +
                         std::to_string(grid.width) + "x" + std::to_string(grid.channels));
    }
    std::vector<std::vector<double>> patches;
    patches.reserve(grid.num_patches());
    for (std::size_t pr = 0; pr < grid.out_height(); ++pr) {
        for (std::size_t pc = 0; pc < grid.out_width(); ++pc) {
            std::vector<double> patch;
            patch.reserve(grid.patch_length());
            for (std::size_t r = 0; r < grid.kernel; ++r)
                for (std::size_t c = 0; c < grid.kernel; ++c)
                    for (std::size_t ch = 0; ch < grid.channels; ++ch)
                        patch.push_back(image.at(pr * grid.stride + r, pc * grid.stride + c, ch));
            patches.push_back(std::move(patch));
        }
    }
    return patches;
}

PoolingMode parse_pooling_mode(std::string_view s) {
    if (s == "c2pool") return PoolingMode::C2Pool;
    if (s == "avg") return PoolingMode::Average;
    if (s == "none") return PoolingMode::None;
    throw QuanvError("unknown pooling mode '" + std::string(s) + "' (expected c2pool, avg or none)");
}

std::string_view to_string(PoolingMode mode) {
    switch (mode) {
        case PoolingMode::C2Pool: return "c2pool";
        case PoolingMode::Average: return "avg";
        case PoolingMode::None: return "none";
    }
    return "?";
}

FilterBank::FilterBank(Circuit filter, std::size_t num_filters, std::optional<Circuit> pooling)
    : filter_(std::move(filter)), num_filters_(num_filters), pooling_(std::move(pooling)) {
    params.assign(param_count(), 0.0);
}

FilterBank FilterBank::build(const FilterBankSpec &spec) {
    if (spec.num_filters == 0) throw QuanvError("filter bank needs at least one filter");
    Circuit filter =
        decompose_trainable_controlled(build_reuploading_encoder(spec.input_len, spec.qubits, spec.filter_depth, spec.scaling));
    std::optional<Circuit> pooling;
    if (spec.with_pooling) {
        const std::size_t c_out = spec.num_filters * spec.qubits;
        if (!std::has_single_bit(c_out)) {
            throw QuanvError("cross-channel pooling needs a power-of-two channel count, got " + std::to_string(c_out));
        }
        const auto qp = static_cast<std::size_t>(std::countr_zero(c_out));
        if (qp == 0) throw QuanvError("cross-channel pooling over a single channel");
        pooling = decompose_trainable_controlled(
            build_reuploading_encoder(spec.input_len, qp, spec.pooling_depth, spec.scaling));
    }
    return FilterBank(std::move(filter), spec.num_filters, std::move(pooling));
}

const Circuit &FilterBank::pooling_circuit() const {
    if (!pooling_) throw QuanvError("filter bank has no pooling circuit");
    return *pooling_;
}

void FilterBank::init_params(Rng &rng) {
    for (auto &p : params) p = rng.angle();
}

std::vector<double> filter_features(std::span<const double> patch, const FilterBank &bank) {
    if (patch.size() != bank.input_len()) {
        throw QuanvError("patch length " + std::to_string(patch.size()) + " != filter input length " +
                         std::to_string(bank.input_len()));
    }
    std::vector<double> f;
    f.reserve(bank.c_out());
    for (std::size_t j = 0; j < bank.num_filters(); ++j) {
        const StateVector s = bank.filter_circuit().evaluate(bank.filter_params(j), patch);
        const auto z = pauli_z_expectations(s);
        f.insert(f.end(), z.begin(), z.end());
    }
    return f;
}

std::vector<double> pooling_weights(std::span<const double> patch, const FilterBank &bank, PoolingWeights weights) {
    const StateVector s = bank.pooling_circuit().evaluate(bank.pooling_params(), patch);
    if (weights == PoolingWeights::Probability) return pvm_probabilities(s);
    std::vector<double> w(s.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = s[i].real();
    return w;
}

namespace {

double weighted_sum(std::span<const double> f, std::span<const double> w) {
    double acc = 0.0;
    for (std::size_t c = 0; c < f.size(); ++c) acc += w[c] * f[c];
    return acc;
}

}  // namespace

double c2pool(std::span<const double> features, std::span<const double> patch, const FilterBank &bank,
              PoolingWeights weights) {
    if (!std::has_single_bit(features.size()) || features.size() < 2) {
        throw QuanvError("C2Pool needs a power-of-two channel count, got " + std::to_string(features.size()));
    }
    if (!bank.has_pooling() || (std::size_t{1} << bank.pooling_circuit().num_qubits()) != features.size()) {
        throw QuanvError("pooling circuit does not match " + std::to_string(features.size()) + " channels");
    }
    return weighted_sum(features, pooling_weights(patch, bank, weights));
}

double avg_pool(std::span<const double> features) {
    if (features.empty()) throw QuanvError("average pooling of an empty feature vector");
    double acc = 0.0;
    for (double v : features) acc += v;
    return acc / static_cast<double>(features.size());
}

LocalForward forward_local_cached(const Image &image, const PatchGrid &grid, const FilterBank &bank, PoolingMode mode,
                                  PoolingWeights weights) {
    LocalForward out;
    out.patches = extract_patches(image, grid);
    const std::size_t channels = mode == PoolingMode::None ? bank.c_out() : 1;
    out.map = FeatureMap(grid.out_height(), grid.out_width(), channels);
    out.features.reserve(out.patches.size());
    for (std::size_t p = 0; p < out.patches.size(); ++p) {
        const auto &patch = out.patches[p];
        auto f = filter_features(patch, bank);
        const std::size_t row = p / grid.out_width();
        const std::size_t col = p % grid.out_width();
        switch (mode) {
            case PoolingMode::C2Pool: {
                if (!bank.has_pooling()) throw QuanvError("C2Pool mode needs a pooling circuit");
                auto w = pooling_weights(patch, bank, weights);
                out.map.at(row, col) = weighted_sum(f, w);
                out.weights.push_back(std::move(w));
                break;
            }
            case PoolingMode::Average:
                out.map.at(row, col) = avg_pool(f);
                break;
            case PoolingMode::None:
                for (std::size_t c = 0; c < f.size(); ++c) out.map.at(row, col, c) = f[c];
                break;
        }
        out.features.push_back(std::move(f));
    }
    return out;
}

FeatureMap forward_local(const Image &image, const PatchGrid &grid, const FilterBank &bank, PoolingMode mode,
                         PoolingWeights weights) {
    return forward_local_cached(image, grid, bank, mode, weights).map;
}

GradVector backprop_local(const LocalForward &forward, const FeatureMap &upstream, const FilterBank &bank,
                          PoolingMode mode, PoolingWeights weights) {
    if (!upstream.same_shape(forward.map)) throw QuanvError("upstream gradient shape does not match the feature map");
    GradVector grad(bank.param_count(), 0.0);
    const std::size_t q = bank.qubits();
    const std::size_t c_out = bank.c_out();
    const std::size_t out_w = forward.map.width;
    std::vector<double> coef(c_out);

    for (std::size_t p = 0; p < forward.patches.size(); ++p) {
        const auto &patch = forward.patches[p];
        const std::size_t row = p / out_w;
        const std::size_t col = p % out_w;

        // d(loss)/d(f_c) for this patch.
        for (std::size_t c = 0; c < c_out; ++c) {
            switch (mode) {
                case PoolingMode::C2Pool:
                    coef[c] = upstream.at(row, col) * forward.weights[p][c];
                    break;
                case PoolingMode::Average:
                    coef[c] = upstream.at(row, col) / static_cast<double>(c_out);
                    break;
                case PoolingMode::None:
                    coef[c] = upstream.at(row, col, c);
                    break;
            }
        }

        for (std::size_t j = 0; j < bank.num_filters(); ++j) {
            const std::span<const double> cj(coef.data() + j * q, q);
            bool any = false;
            for (double v : cj) any = any || v != 0.0;
            if (!any) continue;
            const ScalarHead head = [cj](const StateVector &s) {
                const auto z = pauli_z_expectations(s);
                double acc = 0.0;
                for (std::size_t n = 0; n < z.size(); ++n) acc += cj[n] * z[n];
                return acc;
            };
            const GradVector g = param_shift_grad(bank.filter_circuit(), bank.filter_params(j), patch, head);
            const std::size_t off = bank.filter_offset(j);
            for (std::size_t i = 0; i < g.size(); ++i) grad[off + i] += g[i];
        }

        if (mode == PoolingMode::C2Pool && bank.pooling_param_count() > 0) {
            const double up = upstream.at(row, col);
            if (up == 0.0) continue;
            const auto &f = forward.features[p];
            GradVector g;
            if (weights == PoolingWeights::Probability) {
                const ScalarHead head = [&f, up](const StateVector &s) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < f.size(); ++c) acc += std::norm(s[c]) * f[c];
                    return up * acc;
                };
                g = param_shift_grad(bank.pooling_circuit(), bank.pooling_params(), patch, head);
            } else {
                const ScalarHead head = [&f, up](const StateVector &s) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < f.size(); ++c) acc += s[c].real() * f[c];
                    return up * acc;
                };
                g = finite_diff_grad(bank.pooling_circuit(), bank.pooling_params(), patch, head, 1e-6);
            }
            const std::size_t off = bank.pooling_offset();
            for (std::size_t i = 0; i < g.size(); ++i) grad[off + i] += g[i];
        }
    }
    return grad;
}

}  // namespace qsplit
