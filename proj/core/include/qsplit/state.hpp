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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qsplit {

using Complex = std::complex<double>;

enum class GateKind : std::uint8_t {
    I,
    X,
    Y,
    Z,
    RX,
    RY,
    RZ,
    U3,
    CX,
    CY,
    CZ,
    CRX,
    CRY,
    CRZ,
    CU3,
};

std::string_view gate_name(GateKind kind);

/// Number of qubits the gate acts on (1 or 2).
std::size_t gate_arity(GateKind kind);

/// Number of angles the gate consumes (0, 1 or 3).
std::size_t gate_angle_count(GateKind kind);

/// True for the controlled kinds. The first listed qubit is the control.
inline bool is_controlled(GateKind kind) { return gate_arity(kind) == 2; }

/// True for RX, RY, RZ and U3: gates whose every angle enters through a
/// single exp(-i a G / 2) factor up to global phase.
bool is_plain_rotation(GateKind kind);

class GateError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct Gate {
    GateKind kind = GateKind::I;
    std::array<std::size_t, 2> qubits{0, 0};
    std::array<double, 3> angles{0.0, 0.0, 0.0};

    static Gate single(GateKind kind, std::size_t qubit, std::array<double, 3> angles = {});
    static Gate controlled(GateKind kind, std::size_t control, std::size_t target,
                           std::array<double, 3> angles = {});

    /// Throws GateError when an index is >= num_qubits or a controlled gate
    /// names the same qubit twice.
    void validate(std::size_t num_qubits) const;
};

/// Dense row-major complex matrix. Used for gate realizations and test
/// oracles; the simulator hot path never builds one.
class Matrix {
  public:
    Matrix() = default;
    explicit Matrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

    static Matrix identity(std::size_t dim);

    std::size_t dim() const { return dim_; }
    Complex &operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const Complex &operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

    Matrix adjoint() const;
    Matrix operator*(const Matrix &rhs) const;
    std::vector<Complex> apply(std::span<const Complex> v) const;

    /// max_{r,c} |a(r,c) - b(r,c)|
    static double max_abs_diff(const Matrix &a, const Matrix &b);

  private:
    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

/// 2x2 for single-qubit kinds, 4x4 for controlled kinds in the basis
/// |control target>, control as the high bit.
Matrix gate_matrix(const Gate &gate);
Matrix gate_matrix(GateKind kind, std::array<double, 3> angles);

/// A gate with its 2x2 block already evaluated, for applying the same
/// angles many times.
struct PreparedGate {
    GateKind kind = GateKind::I;
    std::array<std::size_t, 2> qubits{0, 0};
    std::array<Complex, 4> block{};
};

PreparedGate prepare_gate(GateKind kind, std::size_t q0, std::size_t q1, const std::array<double, 3> &angles);

/// Pure state of a Q-qubit register. Qubit 0 is the most significant bit
/// of the basis index.
class StateVector {
  public:
    /// |0...0>
    explicit StateVector(std::size_t num_qubits);
    /// Takes the amplitudes as given; the length must be 2^num_qubits.
    StateVector(std::size_t num_qubits, std::vector<Complex> amplitudes);

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t size() const { return amps_.size(); }
    std::span<const Complex> amplitudes() const { return amps_; }
    const Complex &operator[](std::size_t i) const { return amps_[i]; }

    double norm_squared() const;

    /// In-place U|psi>. Validates the gate against the register.
    void apply(const Gate &gate);
    void apply(GateKind kind, std::size_t q0, std::size_t q1, std::array<double, 3> angles);

    /// Same as apply() without validation, for callers that validated the
    /// gate sequence once up front.
    void apply_unchecked(GateKind kind, std::size_t q0, std::size_t q1,
                         const std::array<double, 3> &angles);
    void apply_prepared(const PreparedGate &gate);

    void reset();

  private:
    void apply_1q(std::size_t qubit, const std::array<Complex, 4> &m);
    void apply_diag_1q(std::size_t qubit, Complex d0, Complex d1);
    void apply_controlled_1q(std::size_t control, std::size_t target, const std::array<Complex, 4> &m);

    std::size_t bit(std::size_t qubit) const { return std::size_t{1} << (num_qubits_ - 1 - qubit); }

    std::size_t num_qubits_;
    std::vector<Complex> amps_;
};

StateVector apply_gate(StateVector state, const Gate &gate);

/// {|alpha_n|^2} over all 2^Q basis states.
std::vector<double> pvm_probabilities(const StateVector &state);

/// <psi| Z_qubit |psi>, clamped to [-1, 1].
double pauli_z_expectation(const StateVector &state, std::size_t qubit);

/// <Z_n> for every qubit n, in qubit order. One pass over the amplitudes.
std::vector<double> pauli_z_expectations(const StateVector &state);

}  // namespace qsplit
