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

#include "qsplit/circuit.hpp"

#include <algorithm>
#include <sstream>

namespace qsplit {

bool CircuitOp::is_trainable() const {
    const std::size_t n = gate_angle_count(kind);
    for (std::size_t i = 0; i < n; ++i)
        if (angles[i].kind == AngleSource::Kind::Param) return true;
    return false;
}

bool CircuitOp::is_data() const {
    const std::size_t n = gate_angle_count(kind);
    for (std::size_t i = 0; i < n; ++i)
        if (angles[i].kind == AngleSource::Kind::Input) return true;
    return false;
}

Circuit::Circuit(std::size_t num_qubits, std::size_t input_len) : num_qubits_(num_qubits), input_len_(input_len) {
    if (num_qubits == 0) throw CircuitError("circuit needs at least one qubit");
}

void Circuit::add_op(const CircuitOp &op) {
    Gate{op.kind, op.qubits, {}}.validate(num_qubits_);
    const std::size_t n = gate_angle_count(op.kind);
    for (std::size_t i = 0; i < n; ++i) {
        const auto &src = op.angles[i];
        if (src.kind == AngleSource::Kind::Input && src.index != AngleSource::kPadding && src.index >= input_len_) {
            throw CircuitError("input index " + std::to_string(src.index) + " >= declared input length " +
                               std::to_string(input_len_));
        }
        if (src.kind == AngleSource::Kind::Param) param_count_ = std::max(param_count_, src.index + 1);
    }
    ops_.push_back(op);
}

void Circuit::add_gate(const Gate &gate) {
    CircuitOp op{gate.kind, gate.qubits, {}};
    for (std::size_t i = 0; i < 3; ++i) op.angles[i] = AngleSource::fixed(gate.angles[i]);
    add_op(op);
}

std::size_t Circuit::add_trainable(GateKind kind, std::size_t q0, std::size_t q1) {
    const std::size_t n = gate_angle_count(kind);
    if (n == 0) throw CircuitError(std::string(gate_name(kind)) + " has no angle to train");
    if (!is_controlled(kind)) q1 = q0;
    const std::size_t first = param_count_;
    CircuitOp op{kind, {q0, q1}, {}};
    for (std::size_t i = 0; i < n; ++i) op.angles[i] = AngleSource::param(first + i);
    add_op(op);
    return first;
}

void Circuit::add_data(GateKind kind, std::size_t qubit, std::size_t input_index, double scale, double offset) {
    if (gate_angle_count(kind) != 1 || is_controlled(kind)) {
        throw CircuitError("data slots must be single-angle single-qubit rotations");
    }
    CircuitOp op{kind, {qubit, qubit}, {}};
    op.angles[0] = AngleSource::input(input_index, scale, offset);
    add_op(op);
}

void Circuit::append(const Circuit &other, std::size_t input_offset) {
    if (other.num_qubits_ != num_qubits_) throw CircuitError("appending circuit over a different register");
    set_input_len(std::max(input_len_, other.input_len_ + input_offset));
    const std::size_t base = param_count_;
    for (CircuitOp op : other.ops_) {
        for (auto &src : op.angles) {
            if (src.kind == AngleSource::Kind::Param) src.index += base;
            if (src.kind == AngleSource::Kind::Input && src.index != AngleSource::kPadding)
                src.index += input_offset;
        }
        add_op(op);
    }
    param_count_ = std::max(param_count_, base + other.param_count_);
}

void Circuit::set_input_len(std::size_t n) {
    if (n < input_len_) throw CircuitError("input length may only grow");
    input_len_ = n;
}

std::size_t Circuit::data_slot_count() const {
    return static_cast<std::size_t>(std::count_if(ops_.begin(), ops_.end(), [](const CircuitOp &op) {
        return op.is_data() && op.angles[0].index != AngleSource::kPadding;
    }));
}

std::size_t Circuit::padding_slot_count() const {
    return static_cast<std::size_t>(std::count_if(ops_.begin(), ops_.end(), [](const CircuitOp &op) {
        return op.is_data() && op.angles[0].index == AngleSource::kPadding;
    }));
}

std::size_t Circuit::referenced_param_count() const {
    std::vector<bool> seen(param_count_, false);
    for (const auto &op : ops_) {
        const std::size_t n = gate_angle_count(op.kind);
        for (std::size_t i = 0; i < n; ++i)
            if (op.angles[i].kind == AngleSource::Kind::Param) seen[op.angles[i].index] = true;
    }
    return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
}

void Circuit::check_lengths(std::span<const double> params, std::span<const double> input) const {
    if (params.size() != param_count_) {
        throw CircuitError("expected " + std::to_string(param_count_) + " parameters, got " +
                           std::to_string(params.size()));
    }
    if (input.size() != input_len_) {
        throw CircuitError("expected input of length " + std::to_string(input_len_) + ", got " +
                           std::to_string(input.size()));
    }
}

void apply_op(StateVector &state, const CircuitOp &op, std::span<const double> params,
              std::span<const double> input) {
    std::array<double, 3> a{};
    const std::size_t n = gate_angle_count(op.kind);
    for (std::size_t i = 0; i < n; ++i) a[i] = op.angles[i].resolve(params, input);
    state.apply_unchecked(op.kind, op.qubits[0], op.qubits[1], a);
}

PreparedGate prepare_op(const CircuitOp &op, std::span<const double> params, std::span<const double> input) {
    std::array<double, 3> a{};
    const std::size_t n = gate_angle_count(op.kind);
    for (std::size_t i = 0; i < n; ++i) a[i] = op.angles[i].resolve(params, input);
    return prepare_gate(op.kind, op.qubits[0], op.qubits[1], a);
}

void run_prepared(StateVector &state, std::span<const PreparedGate> gates) {
    for (const auto &g : gates) state.apply_prepared(g);
}

std::vector<PreparedGate> Circuit::prepare(std::span<const double> params, std::span<const double> input) const {
    std::vector<PreparedGate> out;
    out.reserve(ops_.size());
    for (const auto &op : ops_) out.push_back(prepare_op(op, params, input));
    return out;
}

StateVector Circuit::evaluate(std::span<const double> params, std::span<const double> input) const {
    check_lengths(params, input);
    StateVector state(num_qubits_);
    run(state, params, input, 0, ops_.size());
    return state;
}

void Circuit::run(StateVector &state, std::span<const double> params, std::span<const double> input,
                  std::size_t first, std::size_t last) const {
    for (std::size_t i = first; i < last; ++i) apply_op(state, ops_[i], params, input);
}

std::string Circuit::dump() const {
    std::ostringstream out;
    out << "circuit qubits=" << num_qubits_ << " inputs=" << input_len_ << " params=" << param_count_
        << " ops=" << ops_.size() << '\n';
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        const auto &op = ops_[i];
        out << i << ' ' << gate_name(op.kind) << " q" << op.qubits[0];
        if (is_controlled(op.kind)) out << ",q" << op.qubits[1];
        const std::size_t n = gate_angle_count(op.kind);
        for (std::size_t k = 0; k < n; ++k) {
            const auto &src = op.angles[k];
            out << ' ';
            switch (src.kind) {
                case AngleSource::Kind::Fixed:
                    out << src.offset;
                    break;
                case AngleSource::Kind::Param:
                    out << src.scale << "*p" << src.index << '+' << src.offset;
                    break;
                case AngleSource::Kind::Input:
                    if (src.index == AngleSource::kPadding)
                        out << "pad(" << src.offset << ')';
                    else
                        out << src.scale << "*x" << src.index << '+' << src.offset;
                    break;
            }
        }
        out << '\n';
    }
    return out.str();
}

Circuit build_ansatz_layer(std::size_t num_qubits) {
    Circuit c(num_qubits);
    for (std::size_t q = 0; q < num_qubits; ++q) c.add_trainable(GateKind::U3, q);
    if (num_qubits >= 2) {
        for (std::size_t q = 0; q < num_qubits; ++q) c.add_trainable(GateKind::CU3, q, (q + 1) % num_qubits);
    }
    return c;
}

Circuit build_reuploading_encoder(std::size_t input_len, std::size_t num_qubits, std::size_t ansatz_depth_per_block,
                                  EncoderScaling scaling) {
    if (input_len == 0) throw CircuitError("encoder input must be non-empty");
    if (num_qubits == 0) throw CircuitError("encoder needs at least one qubit");
    const std::size_t blocks = (input_len + num_qubits - 1) / num_qubits;
    Circuit c(num_qubits, input_len);
    const Circuit layer = build_ansatz_layer(num_qubits);
    for (std::size_t l = 0; l < blocks; ++l) {
        for (std::size_t q = 0; q < num_qubits; ++q) {
            const std::size_t idx = l * num_qubits + q;
            c.add_data(GateKind::RY, q, idx < input_len ? idx : AngleSource::kPadding, scaling.scale, scaling.offset);
        }
        for (std::size_t d = 0; d < ansatz_depth_per_block; ++d) c.append(layer);
    }
    return c;
}

}  // namespace qsplit
