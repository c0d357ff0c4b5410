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
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "qsplit/circuit.hpp"
#include "qsplit/gradient.hpp"
#include "qsplit/image.hpp"
#include "qsplit/rng.hpp"

namespace qsplit {

class QuanvError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Sliding-window geometry: kernel x kernel windows at the given stride.
struct PatchGrid {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 1;
    std::size_t kernel = 1;
    std::size_t stride = 1;

    std::size_t out_width() const { return (width - kernel) / stride + 1; }
    std::size_t out_height() const { return (height - kernel) / stride + 1; }
    std::size_t num_patches() const { return out_width() * out_height(); }
    std::size_t patch_length() const { return kernel * kernel * channels; }

    void validate() const;
};

/// Windows in row-major scan order, each flattened as (row, col, channel).
std::vector<std::vector<double>> extract_patches(const Image &image, const PatchGrid &grid);

enum class PoolingMode { C2Pool, Average, None };

/// How C2Pool turns the pooling circuit's state into channel weights:
/// basis probabilities |alpha_c|^2 (a convex combination), or the real
/// part of the amplitudes (Re<alpha, f>, kept for comparison).
enum class PoolingWeights { Probability, Amplitude };

PoolingMode parse_pooling_mode(std::string_view s);
std::string_view to_string(PoolingMode mode);

struct FilterBankSpec {
    std::size_t input_len = 4;
    std::size_t qubits = 4;
    std::size_t num_filters = 4;
    std::size_t filter_depth = 1;
    bool with_pooling = true;
    std::size_t pooling_depth = 1;
    EncoderScaling scaling{};
};

/// A bank of identical-structure reuploading filter circuits, each emitting
/// <Z_n> per qubit, plus an optional cross-channel pooling circuit over
/// log2(c_out) qubits. All parameters live in one table laid out as
/// [filter 0 | filter 1 | ... | pooling].
class FilterBank {
  public:
    static FilterBank build(const FilterBankSpec &spec);

    std::size_t input_len() const { return filter_.input_len(); }
    std::size_t qubits() const { return filter_.num_qubits(); }
    std::size_t num_filters() const { return num_filters_; }
    std::size_t c_out() const { return num_filters_ * qubits(); }
    bool has_pooling() const { return pooling_.has_value(); }

    /// Circuits with trainable controlled gates already lowered.
    const Circuit &filter_circuit() const { return filter_; }
    const Circuit &pooling_circuit() const;

    std::size_t filter_param_count() const { return filter_.param_count(); }
    std::size_t pooling_param_count() const { return pooling_ ? pooling_->param_count() : 0; }
    std::size_t param_count() const { return num_filters_ * filter_param_count() + pooling_param_count(); }

    std::size_t filter_offset(std::size_t j) const { return j * filter_param_count(); }
    std::size_t pooling_offset() const { return num_filters_ * filter_param_count(); }

    std::span<const double> filter_params(std::size_t j) const {
        return std::span<const double>(params).subspan(filter_offset(j), filter_param_count());
    }
    std::span<const double> pooling_params() const {
        return std::span<const double>(params).subspan(pooling_offset(), pooling_param_count());
    }

    /// Uniform angles in [-pi, pi).
    void init_params(Rng &rng);

    ParamVector params;

  private:
    FilterBank(Circuit filter, std::size_t num_filters, std::optional<Circuit> pooling);

    Circuit filter_;
    std::size_t num_filters_;
    std::optional<Circuit> pooling_;
};

/// Concatenated <Z_n> of every filter on the patch; c_out values in [-1, 1].
std::vector<double> filter_features(std::span<const double> patch, const FilterBank &bank);

/// Channel weights from the pooling circuit evaluated on the patch.
std::vector<double> pooling_weights(std::span<const double> patch, const FilterBank &bank,
                                    PoolingWeights weights = PoolingWeights::Probability);

/// sum_c w_c f_c with w = pooling_weights(patch).
double c2pool(std::span<const double> features, std::span<const double> patch, const FilterBank &bank,
              PoolingWeights weights = PoolingWeights::Probability);

double avg_pool(std::span<const double> features);

/// Per-patch intermediates of one forward pass, kept for backprop.
struct LocalForward {
    std::vector<std::vector<double>> patches;
    std::vector<std::vector<double>> features;
    std::vector<std::vector<double>> weights;  // C2Pool only
    FeatureMap map;
};

LocalForward forward_local_cached(const Image &image, const PatchGrid &grid, const FilterBank &bank,
                                  PoolingMode mode, PoolingWeights weights = PoolingWeights::Probability);

/// Out_height x out_width x 1 for C2Pool/Average, x c_out for None.
FeatureMap forward_local(const Image &image, const PatchGrid &grid, const FilterBank &bank, PoolingMode mode,
                         PoolingWeights weights = PoolingWeights::Probability);

/// d(sum upstream . map) / d(bank.params), chaining the upstream map
/// gradient through the pooling rule into parameter-shift gradients of
/// every filter and the pooling circuit. Amplitude-weight pooling is not an
/// expectation value, so its pooling-circuit gradient uses central
/// differences instead.
GradVector backprop_local(const LocalForward &forward, const FeatureMap &upstream, const FilterBank &bank,
                          PoolingMode mode, PoolingWeights weights = PoolingWeights::Probability);

}  // namespace qsplit
