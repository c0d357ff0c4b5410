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

#include "qsplit/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace qsplit {

namespace {

constexpr GateKind kFixedSingle[] = {GateKind::X, GateKind::Y, GateKind::Z, GateKind::RX, GateKind::RY, GateKind::U3};
constexpr GateKind kFixedPair[] = {GateKind::CX, GateKind::CY, GateKind::CZ, GateKind::CRX, GateKind::CU3};
constexpr GateKind kTrainSingle[] = {GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::U3};
constexpr GateKind kTrainPair[] = {GateKind::CRX, GateKind::CRY, GateKind::CRZ, GateKind::CU3};

template <typename T, std::size_t N>
T pick(Rng &rng, const T (&items)[N]) {
    return items[rng.below(N)];
}

std::array<std::size_t, 2> pick_pair(Rng &rng, std::size_t nq) {
    const std::size_t a = rng.below(nq);
    std::size_t b = rng.below(nq - 1);
    if (b >= a) ++b;
    return {a, b};
}

}  // namespace

Circuit random_circuit(Rng &rng, std::size_t max_qubits, std::size_t max_params) {
    const std::size_t nq = 1 + rng.below(std::max<std::size_t>(1, max_qubits));
    Circuit c(nq, nq);
    for (std::size_t q = 0; q < nq; ++q) c.add_data(GateKind::RY, q, q, std::numbers::pi);
    const std::size_t target = max_params == 0 ? 0 : 1 + rng.below(max_params);
    const std::size_t max_ops = 4 * target + 4;
    for (std::size_t n = 0; n < max_ops && c.param_count() < target; ++n) {
        const std::size_t room = target - c.param_count();
        const auto choice = rng.below(6);
        if (choice == 0) {
            const GateKind k = (nq >= 2 && rng.below(2)) ? pick(rng, kFixedPair) : pick(rng, kFixedSingle);
            std::array<double, 3> angles{rng.angle(), rng.angle(), rng.angle()};
            if (is_controlled(k)) {
                const auto [a, b] = pick_pair(rng, nq);
                c.add_gate(Gate::controlled(k, a, b, angles));
            } else {
                c.add_gate(Gate::single(k, rng.below(nq), angles));
            }
        } else if (choice == 1) {
            c.add_data(GateKind::RZ, rng.below(nq), rng.below(nq), rng.uniform(0.5, 2.0), rng.angle());
        } else if (choice == 2 && c.param_count() > 0) {
            // Reuse an existing parameter with a random affine map.
            CircuitOp op;
            op.kind = (nq >= 2 && rng.below(2)) ? pick(rng, kTrainPair) : pick(rng, kTrainSingle);
            if (is_controlled(op.kind)) {
                const auto [a, b] = pick_pair(rng, nq);
                op.qubits = {a, b};
            } else {
                op.qubits = {rng.below(nq), 0};
            }
            for (std::size_t i = 0; i < gate_angle_count(op.kind); ++i) {
                op.angles[i] = AngleSource::param(rng.below(c.param_count()), rng.uniform(-2.0, 2.0), rng.angle());
            }
            c.add_op(op);
        } else {
            GateKind k = (nq >= 2 && choice >= 4) ? pick(rng, kTrainPair) : pick(rng, kTrainSingle);
            if (gate_angle_count(k) > room) k = is_controlled(k) ? GateKind::CRY : GateKind::RY;
            if (is_controlled(k)) {
                const auto [a, b] = pick_pair(rng, nq);
                c.add_trainable(k, a, b);
            } else {
                c.add_trainable(k, rng.below(nq));
            }
        }
    }
    return c;
}

ScalarHead random_linear_head(Rng &rng, std::size_t num_qubits) {
    std::vector<double> z(num_qubits), p(std::size_t{1} << num_qubits);
    for (auto &v : z) v = rng.uniform(-1.0, 1.0);
    for (auto &v : p) v = rng.uniform(-1.0, 1.0);
    return [z, p](const StateVector &s) {
        double acc = 0.0;
        const auto ez = pauli_z_expectations(s);
        for (std::size_t q = 0; q < z.size(); ++q) acc += z[q] * ez[q];
        const auto probs = pvm_probabilities(s);
        for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * probs[i];
        return acc;
    };
}

GradCheckReport run_grad_check(const GradCheckOptions &options) {
    GradCheckReport report;
    Rng root = Rng(options.seed).split("grad-check");
    for (std::size_t n = 0; n < options.circuits; ++n) {
        Rng rng = root.split(n);
        const Circuit circuit = random_circuit(rng, options.max_qubits, options.max_params);
        const Circuit lowered = decompose_trainable_controlled(circuit);
        ParamVector params(circuit.param_count());
        for (auto &v : params) v = rng.angle();
        std::vector<double> input(circuit.input_len());
        for (auto &v : input) v = rng.uniform();
        const ScalarHead head = random_linear_head(rng, circuit.num_qubits());
        const GradVector ps = param_shift_grad(lowered, params, input, head, options.shift);
        const GradVector fd = finite_diff_grad(circuit, params, input, head, options.epsilon);
        for (std::size_t i = 0; i < ps.size(); ++i) {
            report.max_abs_error = std::max(report.max_abs_error, std::abs(ps[i] - fd[i]));
        }
        ++report.circuits;
        report.params_checked += ps.size();
    }
    return report;
}

}  // namespace qsplit
