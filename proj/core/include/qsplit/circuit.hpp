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

#include <array>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsplit/state.hpp"

namespace qsplit {

using ParamVector = std::vector<double>;

class CircuitError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Where one gate angle comes from. Trainable and data angles are affine in
/// the referenced value: angle = scale * value + offset.
struct AngleSource {
    enum class Kind : std::uint8_t { Fixed, Param, Input };

    static constexpr std::size_t kPadding = std::numeric_limits<std::size_t>::max();

    Kind kind = Kind::Fixed;
    std::size_t index = 0;  // into params or input; kPadding for a zero-padded input
    double scale = 1.0;
    double offset = 0.0;  // the angle itself for Fixed

    static AngleSource fixed(double angle) { return {Kind::Fixed, 0, 0.0, angle}; }
    static AngleSource param(std::size_t index, double scale = 1.0, double offset = 0.0) {
        return {Kind::Param, index, scale, offset};
    }
    static AngleSource input(std::size_t index, double scale = 1.0, double offset = 0.0) {
        return {Kind::Input, index, scale, offset};
    }

    double resolve(std::span<const double> params, std::span<const double> input) const {
        switch (kind) {
            case Kind::Param:
                return scale * params[index] + offset;
            case Kind::Input:
                return index == kPadding ? offset : scale * input[index] + offset;
            case Kind::Fixed:
                break;
        }
        return offset;
    }

    /// The source of (factor * this angle).
    AngleSource scaled(double factor) const { return {kind, index, scale * factor, offset * factor}; }
};

struct CircuitOp {
    GateKind kind = GateKind::I;
    std::array<std::size_t, 2> qubits{0, 0};
    std::array<AngleSource, 3> angles{};

    bool is_trainable() const;
    bool is_data() const;
};

/// Ordered gate sequence over a fixed register, with angles bound to a
/// trainable parameter table and to a classical input vector at
/// evaluation time. Circuits are immutable values once built; evaluation
/// never mutates them.
class Circuit {
  public:
    Circuit(std::size_t num_qubits, std::size_t input_len = 0);

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t input_len() const { return input_len_; }
    std::size_t param_count() const { return param_count_; }
    std::span<const CircuitOp> ops() const { return ops_; }
    std::size_t size() const { return ops_.size(); }

    void add_gate(const Gate &gate);
    /// Every angle of the gate bound to a fresh parameter; returns the first
    /// new parameter index.
    std::size_t add_trainable(GateKind kind, std::size_t q0, std::size_t q1 = 0);
    void add_data(GateKind kind, std::size_t qubit, std::size_t input_index, double scale = 1.0,
                  double offset = 0.0);
    /// Appends a raw op after validating its qubits and sources.
    void add_op(const CircuitOp &op);

    /// Appends `other`, renumbering its parameters after this circuit's and
    /// shifting its input indices by `input_offset`.
    void append(const Circuit &other, std::size_t input_offset = 0);

    /// Declared input length may only grow.
    void set_input_len(std::size_t n);

    /// Counts over the ops: data slots bound to a real input entry, and
    /// zero-padded data slots.
    std::size_t data_slot_count() const;
    std::size_t padding_slot_count() const;
    /// Distinct parameter indices referenced by the ops.
    std::size_t referenced_param_count() const;

    /// |psi> = U(params, input) |0...0>. Throws CircuitError on length
    /// mismatch. Pure: identical arguments give bit-identical states.
    StateVector evaluate(std::span<const double> params, std::span<const double> input) const;

    /// Runs ops [first, last) on `state`. `state` must already hold the
    /// prefix result; lengths are not rechecked.
    void run(StateVector &state, std::span<const double> params, std::span<const double> input,
             std::size_t first, std::size_t last) const;

    void check_lengths(std::span<const double> params, std::span<const double> input) const;

    /// Every op with its angles resolved, in order. Lengths are not rechecked.
    std::vector<PreparedGate> prepare(std::span<const double> params, std::span<const double> input) const;

    /// Human-readable listing, one op per line. Not a stable format.
    std::string dump() const;

  private:
    std::size_t num_qubits_;
    std::size_t input_len_;
    std::size_t param_count_ = 0;
    std::vector<CircuitOp> ops_;
};

void apply_op(StateVector &state, const CircuitOp &op, std::span<const double> params,
              std::span<const double> input);

PreparedGate prepare_op(const CircuitOp &op, std::span<const double> params, std::span<const double> input);

void run_prepared(StateVector &state, std::span<const PreparedGate> gates);

/// Data-rotation angle map. Pixels in [0, 1] use the default scale pi.
struct EncoderScaling {
    double scale = std::numbers::pi;
    double offset = 0.0;
};

/// One U3 per qubit followed by a ring of CU3 entanglers q -> (q + 1) mod Q.
/// 6Q parameters for Q >= 2 (a 2-qubit ring is 0->1, 1->0); 3 for Q = 1.
Circuit build_ansatz_layer(std::size_t num_qubits);

/// Data-reuploading encoder: ceil(input_len / Q) blocks, block l applying
/// RY data rotations for elements [Q*l, Q*(l+1)) (zero-padded past the
/// end) and then `ansatz_depth_per_block` ansatz layers.
Circuit build_reuploading_encoder(std::size_t input_len, std::size_t num_qubits,
                                  std::size_t ansatz_depth_per_block, EncoderScaling scaling = {});

}  // namespace qsplit
