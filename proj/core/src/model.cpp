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

#include "qsplit/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qsplit {

std::vector<double> one_hot(int label, std::size_t num_classes) {
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
        throw ModelError("label " + std::to_string(label) + " out of range for " + std::to_string(num_classes) +
                         " classes");
    }
    std::vector<double> y(num_classes, 0.0);
    y[static_cast<std::size_t>(label)] = 1.0;
    return y;
}

namespace {

double clamp_prob(double p) { return std::clamp(p, kLogClamp, 1.0 - kLogClamp); }

bool clamped(double p) { return p < kLogClamp || p > 1.0 - kLogClamp; }

}  // namespace

LossBreakdown loss(std::span<const double> probs, std::span<const double> y) {
    if (y.empty() || y.size() > probs.size()) throw ModelError("label vector longer than the prediction");
    std::size_t ones = 0;
    for (double v : y) {
        if (v == 1.0) {
            ++ones;
        } else if (v != 0.0) {
            throw ModelError("label vector is not one-hot");
        }
    }
    if (ones != 1) throw ModelError("label vector is not one-hot");
    LossBreakdown out;
    for (std::size_t n = 0; n < y.size(); ++n) {
        const double p = clamp_prob(probs[n]);
        out.bce -= y[n] * std::log(p) + (1.0 - y[n]) * std::log(1.0 - p);
    }
    for (std::size_t n = y.size(); n < probs.size(); ++n) out.par -= std::log(1.0 - clamp_prob(probs[n]));
    return out;
}

LossBreakdown loss(std::span<const double> probs, int label, std::size_t num_classes) {
    return loss(probs, one_hot(label, num_classes));
}

std::vector<double> loss_grad_probs(std::span<const double> probs, int label, std::size_t num_classes) {
    const auto y = one_hot(label, num_classes);
    std::vector<double> g(probs.size(), 0.0);
    for (std::size_t n = 0; n < probs.size(); ++n) {
        const double p = probs[n];
        if (clamped(p)) continue;
        if (n < num_classes && y[n] == 1.0) {
            g[n] = -1.0 / p;
        } else {
            g[n] = 1.0 / (1.0 - p);
        }
    }
    return g;
}

std::size_t top1(std::span<const double> probs, std::size_t num_classes) {
    if (num_classes == 0 || num_classes > probs.size()) throw ModelError("bad class count for top-1");
    std::size_t best = 0;
    for (std::size_t n = 1; n < num_classes; ++n)
        if (probs[n] > probs[best]) best = n;
    return best;
}

Adagrad::Adagrad(std::size_t size, double learning_rate, double eps)
    : acc_(size, 0.0), lr_(learning_rate), eps_(eps) {
    if (!(learning_rate > 0.0)) throw ModelError("learning rate must be positive");
}

void Adagrad::step(ParamVector &params, std::span<const double> grad) {
    if (params.size() != acc_.size() || grad.size() != acc_.size()) {
        throw ModelError("Adagrad: expected " + std::to_string(acc_.size()) + " entries, got params " +
                         std::to_string(params.size()) + " / grad " + std::to_string(grad.size()));
    }
    for (std::size_t i = 0; i < acc_.size(); ++i) {
        acc_[i] += grad[i] * grad[i];
        params[i] -= lr_ * grad[i] / (std::sqrt(acc_[i]) + eps_);
    }
}

ParamVector fedavg_average(std::span<const ParamVector> client_params) {
    if (client_params.empty()) throw ModelError("averaging over zero clients");
    const std::size_t n = client_params.front().size();
    ParamVector mean(n, 0.0);
    for (const auto &p : client_params) {
        if (p.size() != n) throw ModelError("clients disagree on parameter count");
        for (std::size_t i = 0; i < n; ++i) mean[i] += p[i];
    }
    for (auto &v : mean) v /= static_cast<double>(client_params.size());
    return mean;
}

LocalModel LocalModel::build(const ArchitectureSpec &spec) {
    PatchGrid grid{spec.image_side, spec.image_side, spec.channels_in, spec.kernel, spec.stride};
    grid.validate();
    FilterBankSpec bs;
    bs.input_len = grid.patch_length();
    bs.qubits = spec.qubits;
    bs.num_filters = spec.filters;
    bs.filter_depth = spec.filter_depth;
    bs.with_pooling = spec.pooling == PoolingMode::C2Pool;
    bs.pooling_depth = spec.pooling_depth;
    return LocalModel{grid, FilterBank::build(bs), spec.pooling, spec.weights};
}

ServerModel::ServerModel(PatchGrid grid, FilterBank qcnn_bank, Circuit classifier, std::size_t num_classes)
    : qcnn(std::move(qcnn_bank)),
      classifier_params(classifier.param_count(), 0.0),
      grid_(grid),
      classifier_(std::move(classifier)),
      num_classes_(num_classes) {}

ServerModel ServerModel::build(const ArchitectureSpec &spec, std::size_t map_height, std::size_t map_width,
                               std::size_t map_channels) {
    if ((std::size_t{1} << spec.classifier_qubits) < spec.num_classes) {
        throw ModelError("classifier with " + std::to_string(spec.classifier_qubits) + " qubits cannot score " +
                         std::to_string(spec.num_classes) + " classes");
    }
    if (spec.num_classes < 2) throw ModelError("need at least two classes");
    PatchGrid grid{map_width, map_height, map_channels, spec.server_kernel, spec.server_stride};
    grid.validate();
    FilterBankSpec bs;
    bs.input_len = grid.patch_length();
    bs.qubits = spec.server_qubits;
    bs.num_filters = spec.server_filters;
    bs.filter_depth = spec.server_filter_depth;
    bs.with_pooling = false;
    bs.scaling = kFeatureScaling;
    FilterBank bank = FilterBank::build(bs);
    const std::size_t hidden_len = grid.num_patches() * bank.c_out();
    Circuit cls = decompose_trainable_controlled(
        build_reuploading_encoder(hidden_len, spec.classifier_qubits, spec.classifier_depth, kFeatureScaling));
    return ServerModel(grid, std::move(bank), std::move(cls), spec.num_classes);
}

void ServerModel::init_params(Rng &rng) {
    qcnn.init_params(rng);
    for (auto &p : classifier_params) p = rng.angle();
}

std::vector<double> ServerModel::hidden(const FeatureMap &map) const {
    const auto fwd = forward_local_cached(map, grid_, qcnn, PoolingMode::None);
    return fwd.map.values;
}

std::vector<double> ServerModel::classify(const FeatureMap &map) const {
    const auto h = hidden(map);
    return pvm_probabilities(classifier_.evaluate(classifier_params, h));
}

LossBreakdown ServerModel::sample_loss(const FeatureMap &map, int label) const {
    return loss(classify(map), label, num_classes_);
}

ServerSampleGrad ServerModel::backprop(const FeatureMap &map, int label, double weight, double fd_epsilon) const {
    ServerSampleGrad out;
    const LocalForward fwd = forward_local_cached(map, grid_, qcnn, PoolingMode::None);
    const std::vector<double> &h = fwd.map.values;
    out.probs = pvm_probabilities(classifier_.evaluate(classifier_params, h));
    out.loss = loss(out.probs, label, num_classes_);

    // Classifier parameters: the head is the loss linearized in the basis
    // probabilities, which parameter shift differentiates exactly.
    std::vector<double> dp = loss_grad_probs(out.probs, label, num_classes_);
    for (auto &v : dp) v *= weight;
    const ScalarHead head = [&dp](const StateVector &s) {
        double acc = 0.0;
        for (std::size_t n = 0; n < dp.size(); ++n) acc += dp[n] * std::norm(s[n]);
        return acc;
    };
    out.classifier = param_shift_grad(classifier_, classifier_params, h, head);

    // Classifier inputs are classical: central differences.
    const auto class_loss = [&](std::span<const double> x) {
        return weight * loss(pvm_probabilities(classifier_.evaluate(classifier_params, x)), label, num_classes_).total();
    };
    FeatureMap dh = fwd.map;
    dh.values = finite_diff_input_grad(class_loss, h, fd_epsilon);
    out.qcnn = backprop_local(fwd, dh, qcnn, PoolingMode::None);

    const auto full_loss = [&](std::span<const double> x) {
        FeatureMap m = map;
        m.values.assign(x.begin(), x.end());
        return weight * sample_loss(m, label).total();
    };
    out.feature_grad = map;
    out.feature_grad.values = finite_diff_input_grad(full_loss, map.values, fd_epsilon);
    return out;
}

ParamVector ServerModel::flat_params() const {
    ParamVector flat = qcnn.params;
    flat.insert(flat.end(), classifier_params.begin(), classifier_params.end());
    return flat;
}

void ServerModel::set_flat_params(std::span<const double> flat) {
    if (flat.size() != param_count()) throw ModelError("server parameter vector has the wrong length");
    const std::size_t nq = qcnn.param_count();
    std::copy(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(nq), qcnn.params.begin());
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(nq), flat.end(), classifier_params.begin());
}

}  // namespace qsplit
