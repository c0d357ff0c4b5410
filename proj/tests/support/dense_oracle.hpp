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

// Test-only reference simulator: full 2^Q x 2^Q unitaries assembled from
// Kronecker products, with gate matrices written out independently of the
// library.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qsplit/circuit.hpp"

namespace oracle {

using C = std::complex<double>;

struct Dense {
    std::size_t n = 0;
    std::vector<C> a;

    explicit Dense(std::size_t dim = 0) : n(dim), a(dim * dim) {}
    C &operator()(std::size_t r, std::size_t c) { return a[r * n + c]; }
    C operator()(std::size_t r, std::size_t c) const { return a[r * n + c]; }

    static Dense eye(std::size_t dim) {
        Dense m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Dense mul(const Dense &x, const Dense &y) {
    Dense out(x.n);
    for (std::size_t r = 0; r < x.n; ++r)
        for (std::size_t k = 0; k < x.n; ++k)
            for (std::size_t c = 0; c < x.n; ++c) out(r, c) += x(r, k) * y(k, c);
    return out;
}

inline Dense kron(const Dense &x, const Dense &y) {
    Dense out(x.n * y.n);
    for (std::size_t r1 = 0; r1 < x.n; ++r1)
        for (std::size_t c1 = 0; c1 < x.n; ++c1)
            for (std::size_t r2 = 0; r2 < y.n; ++r2)
                for (std::size_t c2 = 0; c2 < y.n; ++c2) out(r1 * y.n + r2, c1 * y.n + c2) = x(r1, c1) * y(r2, c2);
    return out;
}

inline Dense m2(C a, C b, C c, C d) {
    Dense m(2);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 0) = c;
    m(1, 1) = d;
    return m;
}

/// Textbook single-qubit matrices; controlled kinds map to their target block.
inline Dense single(qsplit::GateKind k, const double *t) {
    using qsplit::GateKind;
    const C i(0.0, 1.0);
    switch (k) {
        case GateKind::I: return Dense::eye(2);
        case GateKind::X: case GateKind::CX: return m2(0, 1, 1, 0);
        case GateKind::Y: case GateKind::CY: return m2(0, -i, i, 0);
        case GateKind::Z: case GateKind::CZ: return m2(1, 0, 0, -1);
        case GateKind::RX: case GateKind::CRX:
            return m2(std::cos(t[0] / 2), -i * std::sin(t[0] / 2), -i * std::sin(t[0] / 2), std::cos(t[0] / 2));
        case GateKind::RY: case GateKind::CRY:
            return m2(std::cos(t[0] / 2), -std::sin(t[0] / 2), std::sin(t[0] / 2), std::cos(t[0] / 2));
        case GateKind::RZ: case GateKind::CRZ:
            return m2(std::exp(-i * t[0] / 2.0), 0, 0, std::exp(i * t[0] / 2.0));
        case GateKind::U3: case GateKind::CU3:
            return m2(std::cos(t[0] / 2), -std::exp(i * t[2]) * std::sin(t[0] / 2),
                      std::exp(i * t[1]) * std::sin(t[0] / 2), std::exp(i * (t[1] + t[2])) * std::cos(t[0] / 2));
    }
    return Dense::eye(2);
}

/// I x ... x g x ... x I with qubit 0 as the leftmost factor.
inline Dense embed1(const Dense &g, std::size_t q, std::size_t nq) {
    Dense out = Dense::eye(1);
    for (std::size_t j = 0; j < nq; ++j) out = kron(out, j == q ? g : Dense::eye(2));
    return out;
}

/// |0><0|_c x I + |1><1|_c x g_t.
inline Dense embed_controlled(const Dense &g, std::size_t c, std::size_t t, std::size_t nq) {
    const Dense p0 = m2(1, 0, 0, 0), p1 = m2(0, 0, 0, 1);
    Dense a = Dense::eye(1), b = Dense::eye(1);
    for (std::size_t j = 0; j < nq; ++j) {
        a = kron(a, j == c ? p0 : Dense::eye(2));
        b = kron(b, j == c ? p1 : (j == t ? g : Dense::eye(2)));
    }
    for (std::size_t k = 0; k < a.a.size(); ++k) a.a[k] += b.a[k];
    return a;
}

inline Dense op_unitary(const qsplit::CircuitOp &op, std::size_t nq, std::span<const double> params,
                        std::span<const double> input) {
    double t[3] = {0, 0, 0};
    for (std::size_t k = 0; k < qsplit::gate_angle_count(op.kind); ++k) t[k] = op.angles[k].resolve(params, input);
    const Dense g = single(op.kind, t);
    return qsplit::is_controlled(op.kind) ? embed_controlled(g, op.qubits[0], op.qubits[1], nq)
                                          : embed1(g, op.qubits[0], nq);
}

inline Dense circuit_unitary(const qsplit::Circuit &c, std::span<const double> params, std::span<const double> input) {
    Dense u = Dense::eye(std::size_t{1} << c.num_qubits());
    for (const auto &op : c.ops()) u = mul(op_unitary(op, c.num_qubits(), params, input), u);
    return u;
}

/// First column of the circuit unitary: U|0...0>.
inline std::vector<C> circuit_state(const qsplit::Circuit &c, std::span<const double> params,
                                    std::span<const double> input) {
    const Dense u = circuit_unitary(c, params, input);
    std::vector<C> out(u.n);
    for (std::size_t r = 0; r < u.n; ++r) out[r] = u(r, 0);
    return out;
}

/// min over global phases of max |x - e^{i phi} y|, taking phi from the
/// largest entry of y.
inline double max_diff_up_to_phase(const Dense &x, const Dense &y) {
    std::size_t best = 0;
    for (std::size_t k = 0; k < y.a.size(); ++k)
        if (std::abs(y.a[k]) > std::abs(y.a[best])) best = k;
    const C phase = x.a[best] / y.a[best];
    const C unit = phase / std::abs(phase);
    double err = 0.0;
    for (std::size_t k = 0; k < x.a.size(); ++k) err = std::max(err, std::abs(x.a[k] - unit * y.a[k]));
    return err;
}

}  // namespace oracle
