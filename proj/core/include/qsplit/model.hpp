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
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "qsplit/circuit.hpp"
#include "qsplit/gradient.hpp"
#include "qsplit/image.hpp"
#include "qsplit/quanv.hpp"
#include "qsplit/rng.hpp"

namespace qsplit {

class ModelError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kLogClamp = 1e-12;
inline constexpr double kAdagradEps = 1e-10;

struct LossBreakdown {
    double bce = 0.0;
    double par = 0.0;
    double total() const { return bce + par; }
};

std::vector<double> one_hot(int label, std::size_t num_classes);

/// Binary cross-entropy over the first |y| outputs plus the parasitic
/// penalty -sum log(1 - p) over the remaining basis states. Probabilities
/// are clamped to [kLogClamp, 1 - kLogClamp] before taking logs.
LossBreakdown loss(std::span<const double> probs, std::span<const double> y);
LossBreakdown loss(std::span<const double> probs, int label, std::size_t num_classes);

/// d loss.total() / d probs, zero where the clamp is active.
std::vector<double> loss_grad_probs(std::span<const double> probs, int label, std::size_t num_classes);

/// Argmax over the first num_classes entries, lowest index on ties.
std::size_t top1(std::span<const double> probs, std::size_t num_classes);

/// Per-parameter Adagrad: acc += g^2; theta -= lr * g / (sqrt(acc) + eps).
class Adagrad {
  public:
    Adagrad(std::size_t size, double learning_rate, double eps = kAdagradEps);

    void step(ParamVector &params, std::span<const double> grad);

    std::span<const double> accumulators() const { return acc_; }
    double learning_rate() const { return lr_; }

  private:
    std::vector<double> acc_;
    double lr_;
    double eps_;
};

/// Arithmetic mean of equal-length parameter vectors, in client order.
ParamVector fedavg_average(std::span<const ParamVector> client_params);

/// Local and server architecture. Defaults give 312 trainable parameters
/// on each side: 4 filters x 3 layers x 24 + 24 pooling parameters
/// locally, and 24 (server filter) + 4 blocks x 3 layers x 24
/// (classifier) on the server.
struct ArchitectureSpec {
    std::size_t image_side = 14;
    std::size_t channels_in = 1;
    std::size_t kernel = 2;
    std::size_t stride = 4;
    std::size_t qubits = 4;
    std::size_t filters = 4;
    std::size_t filter_depth = 3;
    std::size_t pooling_depth = 1;
    PoolingMode pooling = PoolingMode::C2Pool;
    PoolingWeights weights = PoolingWeights::Probability;

    std::size_t server_kernel = 2;
    std::size_t server_stride = 2;
    std::size_t server_qubits = 4;
    std::size_t server_filters = 1;
    std::size_t server_filter_depth = 1;
    std::size_t classifier_qubits = 4;
    std::size_t classifier_depth = 3;
    std::size_t num_classes = 10;
};

/// Angle map for values in [-1, 1] (features): pi * x in [-pi, pi], so a
/// zero feature leaves its qubit untouched.
inline constexpr EncoderScaling kFeatureScaling{std::numbers::pi, 0.0};

/// Client side: quanvolution filter bank and pooling over one image.
struct LocalModel {
    PatchGrid grid;
    FilterBank bank;
    PoolingMode mode;
    PoolingWeights weights;

    static LocalModel build(const ArchitectureSpec &spec);

    std::size_t param_count() const { return bank.param_count(); }
    std::size_t map_height() const { return grid.out_height(); }
    std::size_t map_width() const { return grid.out_width(); }
    std::size_t map_channels() const { return mode == PoolingMode::None ? bank.c_out() : 1; }

    FeatureMap forward(const Image &image) const { return forward_local(image, grid, bank, mode, weights); }
    LocalForward forward_cached(const Image &image) const {
        return forward_local_cached(image, grid, bank, mode, weights);
    }
    GradVector backprop(const LocalForward &fwd, const FeatureMap &upstream) const {
        return backprop_local(fwd, upstream, bank, mode, weights);
    }
};

/// Server-side gradients of one sample's weighted loss.
struct ServerSampleGrad {
    GradVector qcnn;
    GradVector classifier;
    FeatureMap feature_grad;
    LossBreakdown loss;
    std::vector<double> probs;
};

/// Server side: one QCNN stage over the received map, then a PVM
/// classifier that reuploads the flattened QCNN outputs.
class ServerModel {
  public:
    static ServerModel build(const ArchitectureSpec &spec, std::size_t map_height, std::size_t map_width,
                             std::size_t map_channels);

    std::size_t num_classes() const { return num_classes_; }
    std::size_t param_count() const { return qcnn.param_count() + classifier_params.size(); }
    const PatchGrid &grid() const { return grid_; }
    const Circuit &classifier() const { return classifier_; }

    void init_params(Rng &rng);

    /// Server-QCNN outputs, patch-major: the classifier input vector.
    std::vector<double> hidden(const FeatureMap &map) const;

    /// PVM distribution over all 2^q_cls basis states; the first
    /// num_classes entries are the class scores. No softmax.
    std::vector<double> classify(const FeatureMap &map) const;

    LossBreakdown sample_loss(const FeatureMap &map, int label) const;

    /// Gradients of weight * loss(map, label). Classifier and QCNN
    /// parameters use parameter shift on heads linearized at the current
    /// probabilities; classical inputs (the QCNN outputs and the received
    /// map) use central differences with step fd_epsilon.
    ServerSampleGrad backprop(const FeatureMap &map, int label, double weight, double fd_epsilon = 1e-4) const;

    /// Flat views [qcnn | classifier] for averaging and serialization.
    ParamVector flat_params() const;
    void set_flat_params(std::span<const double> flat);

    FilterBank qcnn;
    ParamVector classifier_params;

  private:
    ServerModel(PatchGrid grid, FilterBank qcnn, Circuit classifier, std::size_t num_classes);

    PatchGrid grid_;
    Circuit classifier_;
    std::size_t num_classes_;
};

}  // namespace qsplit
