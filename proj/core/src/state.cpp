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

#include "qsplit/state.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace qsplit {

namespace {

constexpr Complex kI{0.0, 1.0};

using Mat2 = std::array<Complex, 4>;

// Plain complex product; std::complex's operator* carries NaN/Inf recovery
// that costs a library call in the inner loops.
inline Complex cmul(Complex a, Complex b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// Base (target-side) 2x2 block of a gate; controlled kinds return the block
// applied when the control is set.
Mat2 base_block(GateKind kind, const std::array<double, 3> &a) {
    const double c = std::cos(a[0] / 2.0);
    const double s = std::sin(a[0] / 2.0);
    switch (kind) {
        case GateKind::I:
            return {1.0, 0.0, 0.0, 1.0};
        case GateKind::X:
        case GateKind::CX:
            return {0.0, 1.0, 1.0, 0.0};
        case GateKind::Y:
        case GateKind::CY:
            return {0.0, -kI, kI, 0.0};
        case GateKind::Z:
        case GateKind::CZ:
            return {1.0, 0.0, 0.0, -1.0};
        case GateKind::RX:
        case GateKind::CRX:
            return {c, -kI * s, -kI * s, c};
        case GateKind::RY:
        case GateKind::CRY:
            return {c, -s, s, c};
        case GateKind::RZ:
        case GateKind::CRZ:
            return {std::polar(1.0, -a[0] / 2.0), 0.0, 0.0, std::polar(1.0, a[0] / 2.0)};
        case GateKind::U3:
        case GateKind::CU3:
            return {c, -std::polar(s, a[2]), std::polar(s, a[1]), std::polar(c, a[1] + a[2])};
    }
    throw GateError("unknown gate kind");
}

}  // namespace

std::string_view gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::I: return "I";
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::RX: return "RX";
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::U3: return "U3";
        case GateKind::CX: return "CX";
        case GateKind::CY: return "CY";
        case GateKind::CZ: return "CZ";
        case GateKind::CRX: return "CRX";
        case GateKind::CRY: return "CRY";
        case GateKind::CRZ: return "CRZ";
        case GateKind::CU3: return "CU3";
    }
    return "?";
}

std::size_t gate_arity(GateKind kind) {
    switch (kind) {
        case GateKind::CX:
        case GateKind::CY:
        case GateKind::CZ:
        case GateKind::CRX:
        case GateKind::CRY:
        case GateKind::CRZ:
        case GateKind::CU3:
            return 2;
        default:
            return 1;
    }
}

std::size_t gate_angle_count(GateKind kind) {
    switch (kind) {
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ:
        case GateKind::CRX:
        case GateKind::CRY:
        case GateKind::CRZ:
            return 1;
        case GateKind::U3:
        case GateKind::CU3:
            return 3;
        default:
            return 0;
    }
}

bool is_plain_rotation(GateKind kind) {
    return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ || kind == GateKind::U3;
}

Gate Gate::single(GateKind kind, std::size_t qubit, std::array<double, 3> angles) {
    if (is_controlled(kind)) {
        throw GateError(std::string(gate_name(kind)) + " needs a control and a target");
    }
    return Gate{kind, {qubit, qubit}, angles};
}

Gate Gate::controlled(GateKind kind, std::size_t control, std::size_t target, std::array<double, 3> angles) {
    if (!is_controlled(kind)) {
        throw GateError(std::string(gate_name(kind)) + " is not a controlled gate");
    }
    Gate g{kind, {control, target}, angles};
    if (control == target) {
        throw GateError("controlled gate with duplicate qubit " + std::to_string(control));
    }
    return g;
}

void Gate::validate(std::size_t num_qubits) const {
    const std::size_t arity = gate_arity(kind);
    for (std::size_t i = 0; i < arity; ++i) {
        if (qubits[i] >= num_qubits) {
            throw GateError(std::string(gate_name(kind)) + ": qubit " + std::to_string(qubits[i]) +
                            " out of range for " + std::to_string(num_qubits) + " qubits");
        }
    }
    if (arity == 2 && qubits[0] == qubits[1]) {
        throw GateError(std::string(gate_name(kind)) + ": duplicate qubit " + std::to_string(qubits[0]));
    }
}

Matrix Matrix::identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::adjoint() const {
    Matrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

Matrix Matrix::operator*(const Matrix &rhs) const {
    if (rhs.dim_ != dim_) throw std::invalid_argument("matrix dimension mismatch");
    Matrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t k = 0; k < dim_; ++k) {
            const Complex a = (*this)(r, k);
            if (a == Complex{}) continue;
            for (std::size_t c = 0; c < dim_; ++c) out(r, c) += a * rhs(k, c);
        }
    return out;
}

std::vector<Complex> Matrix::apply(std::span<const Complex> v) const {
    if (v.size() != dim_) throw std::invalid_argument("vector dimension mismatch");
    std::vector<Complex> out(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
        Complex acc{};
        for (std::size_t c = 0; c < dim_; ++c) acc += (*this)(r, c) * v[c];
        out[r] = acc;
    }
    return out;
}

double Matrix::max_abs_diff(const Matrix &a, const Matrix &b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("matrix dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data_.size(); ++i) m = std::max(m, std::abs(a.data_[i] - b.data_[i]));
    return m;
}

Matrix gate_matrix(GateKind kind, std::array<double, 3> angles) {
    const Mat2 b = base_block(kind, angles);
    if (!is_controlled(kind)) {
        Matrix m(2);
        m(0, 0) = b[0];
        m(0, 1) = b[1];
        m(1, 0) = b[2];
        m(1, 1) = b[3];
        return m;
    }
    Matrix m = Matrix::identity(4);
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;
    m(2, 2) = b[0];
    m(2, 3) = b[1];
    m(3, 2) = b[2];
    m(3, 3) = b[3];
    return m;
}

Matrix gate_matrix(const Gate &gate) { return gate_matrix(gate.kind, gate.angles); }

StateVector::StateVector(std::size_t num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits == 0 || num_qubits > 30) {
        throw std::invalid_argument("qubit count must be in [1, 30], got " + std::to_string(num_qubits));
    }
    amps_.assign(std::size_t{1} << num_qubits, Complex{});
    amps_[0] = 1.0;
}

StateVector::StateVector(std::size_t num_qubits, std::vector<Complex> amplitudes)
    : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    if (num_qubits == 0 || num_qubits > 30 || amps_.size() != (std::size_t{1} << num_qubits)) {
        throw std::invalid_argument("amplitude count must equal 2^num_qubits");
    }
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const auto &a : amps_) s += std::norm(a);
    return s;
}

void StateVector::reset() {
    std::fill(amps_.begin(), amps_.end(), Complex{});
    amps_[0] = 1.0;
}

void StateVector::apply(const Gate &gate) {
    gate.validate(num_qubits_);
    apply_unchecked(gate.kind, gate.qubits[0], gate.qubits[1], gate.angles);
}

void StateVector::apply(GateKind kind, std::size_t q0, std::size_t q1, std::array<double, 3> angles) {
    Gate{kind, {q0, q1}, angles}.validate(num_qubits_);
    apply_unchecked(kind, q0, q1, angles);
}

void StateVector::apply_unchecked(GateKind kind, std::size_t q0, std::size_t q1,
                                  const std::array<double, 3> &angles) {
    apply_prepared(prepare_gate(kind, q0, q1, angles));
}

PreparedGate prepare_gate(GateKind kind, std::size_t q0, std::size_t q1, const std::array<double, 3> &angles) {
    return PreparedGate{kind, {q0, q1}, base_block(kind, angles)};
}

void StateVector::apply_prepared(const PreparedGate &g) {
    switch (g.kind) {
        case GateKind::I:
            return;
        case GateKind::Z:
        case GateKind::RZ:
            apply_diag_1q(g.qubits[0], g.block[0], g.block[3]);
            return;
        case GateKind::CX: {
            const std::size_t cb = bit(g.qubits[0]);
            const std::size_t tb = bit(g.qubits[1]);
            for (std::size_t i = 0; i < amps_.size(); ++i) {
                if ((i & cb) && !(i & tb)) std::swap(amps_[i], amps_[i | tb]);
            }
            return;
        }
        case GateKind::CZ: {
            const std::size_t mask = bit(g.qubits[0]) | bit(g.qubits[1]);
            for (std::size_t i = 0; i < amps_.size(); ++i)
                if ((i & mask) == mask) amps_[i] = -amps_[i];
            return;
        }
        default:
            break;
    }
    if (is_controlled(g.kind)) {
        apply_controlled_1q(g.qubits[0], g.qubits[1], g.block);
    } else {
        apply_1q(g.qubits[0], g.block);
    }
}

void StateVector::apply_1q(std::size_t qubit, const Mat2 &m) {
    const std::size_t stride = bit(qubit);
    const std::size_t n = amps_.size();
    for (std::size_t base = 0; base < n; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const Complex a0 = amps_[i];
            const Complex a1 = amps_[i + stride];
            amps_[i] = cmul(m[0], a0) + cmul(m[1], a1);
            amps_[i + stride] = cmul(m[2], a0) + cmul(m[3], a1);
        }
    }
}

void StateVector::apply_diag_1q(std::size_t qubit, Complex d0, Complex d1) {
    const std::size_t b = bit(qubit);
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] = cmul(amps_[i], (i & b) ? d1 : d0);
}

void StateVector::apply_controlled_1q(std::size_t control, std::size_t target, const Mat2 &m) {
    const std::size_t cb = bit(control);
    const std::size_t tb = bit(target);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (!(i & cb) || (i & tb)) continue;
        const Complex a0 = amps_[i];
        const Complex a1 = amps_[i | tb];
        amps_[i] = cmul(m[0], a0) + cmul(m[1], a1);
        amps_[i | tb] = cmul(m[2], a0) + cmul(m[3], a1);
    }
}

StateVector apply_gate(StateVector state, const Gate &gate) {
    state.apply(gate);
    return state;
}

std::vector<double> pvm_probabilities(const StateVector &state) {
    std::vector<double> p(state.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(state[i]);
    return p;
}

double pauli_z_expectation(const StateVector &state, std::size_t qubit) {
    if (qubit >= state.num_qubits()) {
        throw GateError("qubit " + std::to_string(qubit) + " out of range for " +
                        std::to_string(state.num_qubits()) + " qubits");
    }
    const std::size_t b = std::size_t{1} << (state.num_qubits() - 1 - qubit);
    double z = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double p = std::norm(state[i]);
        z += (i & b) ? -p : p;
    }
    return std::clamp(z, -1.0, 1.0);
}

std::vector<double> pauli_z_expectations(const StateVector &state) {
    const std::size_t q = state.num_qubits();
    std::vector<double> z(q, 0.0);
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double p = std::norm(state[i]);
        for (std::size_t n = 0; n < q; ++n) {
            z[n] += ((i >> (q - 1 - n)) & 1U) ? -p : p;
        }
    }
    for (auto &v : z) v = std::clamp(v, -1.0, 1.0);
    return z;
}

}  // namespace qsplit
