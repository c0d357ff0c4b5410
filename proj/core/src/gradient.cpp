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

#include "qsplit/gradient.hpp"

#include <string>

namespace qsplit {

GradVector param_shift_grad(const Circuit &circuit, std::span<const double> params, std::span<const double> input,
                            const ScalarHead &head, const ParamShiftOptions &options) {
    circuit.check_lengths(params, input);
    const auto ops = circuit.ops();
    for (std::size_t j = 0; j < ops.size(); ++j) {
        if (ops[j].is_trainable() && !is_plain_rotation(ops[j].kind)) {
            throw GradientError("op " + std::to_string(j) + " (" + std::string(gate_name(ops[j].kind)) +
                                ") is trainable but not a plain rotation; decompose it first");
        }
    }

    GradVector grad(circuit.param_count(), 0.0);
    const std::vector<PreparedGate> prepared = circuit.prepare(params, input);
    const std::span<const PreparedGate> all(prepared);
    StateVector prefix(circuit.num_qubits());
    StateVector work = prefix;
    for (std::size_t j = 0; j < ops.size(); ++j) {
        const CircuitOp &op = ops[j];
        if (op.is_trainable()) {
            const std::size_t n = gate_angle_count(op.kind);
            std::array<double, 3> base{};
            for (std::size_t k = 0; k < n; ++k) base[k] = op.angles[k].resolve(params, input);
            for (std::size_t k = 0; k < n; ++k) {
                const AngleSource &src = op.angles[k];
                if (src.kind != AngleSource::Kind::Param) continue;
                double f[2];
                for (int side = 0; side < 2; ++side) {
                    std::array<double, 3> a = base;
                    a[k] += side == 0 ? options.shift : -options.shift;
                    work = prefix;
                    work.apply_unchecked(op.kind, op.qubits[0], op.qubits[1], a);
                    run_prepared(work, all.subspan(j + 1));
                    f[side] = head(work);
                }
                grad[src.index] += src.scale * options.prefactor * (f[0] - f[1]);
            }
        }
        prefix.apply_prepared(prepared[j]);
    }
    return grad;
}

GradVector finite_diff_grad(const Circuit &circuit, std::span<const double> params, std::span<const double> input,
                            const ScalarHead &head, double epsilon) {
    if (!(epsilon > 0.0)) throw GradientError("finite-difference step must be positive");
    circuit.check_lengths(params, input);
    ParamVector p(params.begin(), params.end());
    GradVector grad(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double saved = p[i];
        p[i] = saved + epsilon;
        const double up = head(circuit.evaluate(p, input));
        p[i] = saved - epsilon;
        const double down = head(circuit.evaluate(p, input));
        p[i] = saved;
        grad[i] = (up - down) / (2.0 * epsilon);
    }
    return grad;
}

std::vector<double> finite_diff_input_grad(const std::function<double(std::span<const double>)> &f,
                                           std::span<const double> x, double epsilon) {
    if (!(epsilon > 0.0)) throw GradientError("finite-difference step must be positive");
    std::vector<double> v(x.begin(), x.end());
    std::vector<double> grad(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double saved = v[i];
        v[i] = saved + epsilon;
        const double up = f(v);
        v[i] = saved - epsilon;
        const double down = f(v);
        v[i] = saved;
        grad[i] = (up - down) / (2.0 * epsilon);
    }
    return grad;
}

namespace {

CircuitOp rotation(GateKind kind, std::size_t qubit, const AngleSource &angle) {
    CircuitOp op{kind, {qubit, qubit}, {}};
    op.angles[0] = angle;
    return op;
}

CircuitOp entangler(GateKind kind, std::size_t control, std::size_t target) {
    return CircuitOp{kind, {control, target}, {}};
}

// C-R(a) = R(a/2)_t . E . R(-a/2)_t . E, where E flips the sign of the
// rotation generator when the control is set (CX for Y/Z, CZ for X).
void lower_controlled_rotation(Circuit &out, GateKind rot, std::size_t c, std::size_t t, const AngleSource &a) {
    const GateKind flip = rot == GateKind::RX ? GateKind::CZ : GateKind::CX;
    out.add_op(rotation(rot, t, a.scaled(0.5)));
    out.add_op(entangler(flip, c, t));
    out.add_op(rotation(rot, t, a.scaled(-0.5)));
    out.add_op(entangler(flip, c, t));
}

}  // namespace

Circuit decompose_trainable_controlled(const Circuit &circuit) {
    Circuit out(circuit.num_qubits(), circuit.input_len());
    for (const CircuitOp &op : circuit.ops()) {
        if (!is_controlled(op.kind) || !op.is_trainable()) {
            out.add_op(op);
            continue;
        }
        const std::size_t c = op.qubits[0];
        const std::size_t t = op.qubits[1];
        switch (op.kind) {
            case GateKind::CRX:
                lower_controlled_rotation(out, GateKind::RX, c, t, op.angles[0]);
                break;
            case GateKind::CRY:
                lower_controlled_rotation(out, GateKind::RY, c, t, op.angles[0]);
                break;
            case GateKind::CRZ:
                lower_controlled_rotation(out, GateKind::RZ, c, t, op.angles[0]);
                break;
            case GateKind::CU3: {
                // U3(theta, phi, lambda) = e^{i(phi+lambda)/2} RZ(phi) RY(theta) RZ(lambda);
                // the controlled phase becomes RZ((phi+lambda)/2) on the control.
                const AngleSource &theta = op.angles[0];
                const AngleSource &phi = op.angles[1];
                const AngleSource &lambda = op.angles[2];
                lower_controlled_rotation(out, GateKind::RZ, c, t, lambda);
                lower_controlled_rotation(out, GateKind::RY, c, t, theta);
                lower_controlled_rotation(out, GateKind::RZ, c, t, phi);
                out.add_op(rotation(GateKind::RZ, c, phi.scaled(0.5)));
                out.add_op(rotation(GateKind::RZ, c, lambda.scaled(0.5)));
                break;
            }
            default:
                out.add_op(op);
                break;
        }
    }
    return out;
}

}  // namespace qsplit
