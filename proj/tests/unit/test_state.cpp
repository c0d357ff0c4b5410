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

#include <cmath>
#include <numbers>

#include "dense_oracle.hpp"
#include "doctest.h"
#include "qsplit/rng.hpp"
#include "qsplit/state.hpp"

using namespace qsplit;

namespace {

constexpr double kPi = std::numbers::pi;

constexpr GateKind kAllKinds[] = {GateKind::I,  GateKind::X,   GateKind::Y,   GateKind::Z,   GateKind::RX,
                                  GateKind::RY, GateKind::RZ,  GateKind::U3,  GateKind::CX,  GateKind::CY,
                                  GateKind::CZ, GateKind::CRX, GateKind::CRY, GateKind::CRZ, GateKind::CU3};

StateVector random_state(Rng &rng, std::size_t nq) {
    std::vector<Complex> a(std::size_t{1} << nq);
    double norm = 0.0;
    for (auto &v : a) {
        v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        norm += std::norm(v);
    }
    for (auto &v : a) v /= std::sqrt(norm);
    return StateVector(nq, a);
}

}  // namespace

TEST_SUITE("qstate") {
    TEST_CASE("fresh register is |0...0>") {
        StateVector s(3);
        CHECK(s.size() == 8);
        CHECK(s[0] == Complex(1.0, 0.0));
        for (std::size_t i = 1; i < 8; ++i) CHECK(s[i] == Complex{});
    }

    TEST_CASE("X on qubit 0 of two sets the most significant bit") {
        StateVector s(2);
        s.apply(Gate::single(GateKind::X, 0));
        CHECK(std::abs(s[2] - Complex(1.0, 0.0)) < 1e-15);
        StateVector t(2);
        t.apply(Gate::single(GateKind::X, 1));
        CHECK(std::abs(t[1] - Complex(1.0, 0.0)) < 1e-15);
    }

    TEST_CASE("RY(pi/2)|0> is an equal superposition") {
        StateVector s(1);
        s.apply(Gate::single(GateKind::RY, 0, {kPi / 2}));
        const auto p = pvm_probabilities(s);
        CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
    }

    TEST_CASE("Bell state from H-equivalent RY and CX") {
        StateVector s(2);
        s.apply(Gate::single(GateKind::RY, 0, {kPi / 2}));
        s.apply(Gate::controlled(GateKind::CX, 0, 1));
        const auto p = pvm_probabilities(s);
        CHECK(p[0] == doctest::Approx(0.5));
        CHECK(p[3] == doctest::Approx(0.5));
        CHECK(p[1] < 1e-15);
        CHECK(p[2] < 1e-15);
    }

    TEST_CASE("controlled gate is inactive when the control is 0") {
        StateVector s(2);
        s.apply(Gate::single(GateKind::X, 1));
        s.apply(Gate::controlled(GateKind::CX, 0, 1));
        CHECK(std::abs(s[1] - Complex(1.0, 0.0)) < 1e-15);
        StateVector t(2);
        t.apply(Gate::single(GateKind::X, 1));
        t.apply(Gate::controlled(GateKind::CX, 1, 0));  // control is qubit 1 here
        CHECK(std::abs(t[3] - Complex(1.0, 0.0)) < 1e-15);
    }

    TEST_CASE("RY analytic probabilities and expectation") {
        for (int k = 0; k <= 100; ++k) {
            const double th = -kPi + 2 * kPi * k / 100.0;
            StateVector s(1);
            s.apply(Gate::single(GateKind::RY, 0, {th}));
            CHECK(std::abs(pvm_probabilities(s)[1] - std::pow(std::sin(th / 2), 2)) < 1e-12);
            CHECK(std::abs(pauli_z_expectation(s, 0) - std::cos(th)) < 1e-12);
        }
    }

    TEST_CASE("U3 reduces to RY when phi = lambda = 0") {
        const double th = 0.7;
        const Matrix a = gate_matrix(GateKind::U3, {th, 0.0, 0.0});
        const Matrix b = gate_matrix(GateKind::RY, {th, 0.0, 0.0});
        CHECK(Matrix::max_abs_diff(a, b) < 1e-15);
    }

    TEST_CASE("every gate matrix is unitary") {
        Rng rng(3);
        for (auto k : kAllKinds) {
            const Matrix m = gate_matrix(k, {rng.angle(), rng.angle(), rng.angle()});
            CHECK_MESSAGE(Matrix::max_abs_diff(m * m.adjoint(), Matrix::identity(m.dim())) < 1e-12, gate_name(k));
        }
    }

    TEST_CASE("gate matrices match the textbook forms") {
        Rng rng(4);
        for (auto k : kAllKinds) {
            const double t[3] = {rng.angle(), rng.angle(), rng.angle()};
            const Matrix m = gate_matrix(k, {t[0], t[1], t[2]});
            const oracle::Dense g = oracle::single(k, t);
            const oracle::Dense ref = is_controlled(k) ? oracle::embed_controlled(g, 0, 1, 2) : g;
            double err = 0.0;
            for (std::size_t r = 0; r < ref.n; ++r)
                for (std::size_t c = 0; c < ref.n; ++c) err = std::max(err, std::abs(m(r, c) - ref(r, c)));
            CHECK_MESSAGE(err < 1e-14, gate_name(k));
        }
    }

    TEST_CASE("stride updates agree with the embedded dense matrix on every qubit pair") {
        Rng rng(5);
        for (std::size_t nq = 1; nq <= 4; ++nq) {
            for (auto k : kAllKinds) {
                if (is_controlled(k) && nq < 2) continue;
                for (std::size_t q0 = 0; q0 < nq; ++q0) {
                    for (std::size_t q1 = 0; q1 < nq; ++q1) {
                        if (is_controlled(k) ? q1 == q0 : q1 != 0) continue;
                        const double t[3] = {rng.angle(), rng.angle(), rng.angle()};
                        StateVector s = random_state(rng, nq);
                        const auto before = std::vector<Complex>(s.amplitudes().begin(), s.amplitudes().end());
                        s.apply(k, q0, q1, {t[0], t[1], t[2]});
                        const oracle::Dense g = oracle::single(k, t);
                        const oracle::Dense u = is_controlled(k) ? oracle::embed_controlled(g, q0, q1, nq)
                                                                 : oracle::embed1(g, q0, nq);
                        double err = 0.0;
                        for (std::size_t r = 0; r < u.n; ++r) {
                            Complex acc{};
                            for (std::size_t c = 0; c < u.n; ++c) acc += u(r, c) * before[c];
                            err = std::max(err, std::abs(acc - s[r]));
                        }
                        CHECK(err < 1e-12);
                    }
                }
            }
        }
    }

    TEST_CASE("gates preserve the norm") {
        Rng rng(6);
        StateVector s = random_state(rng, 5);
        for (int n = 0; n < 200; ++n) {
            const auto k = kAllKinds[rng.below(std::size(kAllKinds))];
            const std::size_t q0 = rng.below(5);
            std::size_t q1 = (q0 + 1 + rng.below(4)) % 5;
            s.apply(k, q0, is_controlled(k) ? q1 : 0, {rng.angle(), rng.angle(), rng.angle()});
        }
        CHECK(std::abs(s.norm_squared() - 1.0) < 1e-12);
    }

    TEST_CASE("PVM sums to one and POVM lies in [-1, 1]") {
        Rng rng(7);
        for (int n = 0; n < 200; ++n) {
            const std::size_t nq = 1 + rng.below(6);
            const StateVector s = random_state(rng, nq);
            double sum = 0.0;
            for (double p : pvm_probabilities(s)) sum += p;
            CHECK(std::abs(sum - 1.0) < 1e-10);
            for (double z : pauli_z_expectations(s)) {
                CHECK(z >= -1.0);
                CHECK(z <= 1.0);
            }
        }
    }

    TEST_CASE("Z expectations of basis states") {
        StateVector s(3);
        s.apply(Gate::single(GateKind::X, 1));
        const auto z = pauli_z_expectations(s);
        CHECK(z[0] == doctest::Approx(1.0));
        CHECK(z[1] == doctest::Approx(-1.0));
        CHECK(z[2] == doctest::Approx(1.0));
        CHECK(pauli_z_expectation(s, 1) == doctest::Approx(-1.0));
    }

    TEST_CASE("invalid gates are rejected") {
        StateVector s(2);
        CHECK_THROWS_AS(s.apply(Gate::single(GateKind::X, 2)), GateError);
        CHECK_THROWS_AS(s.apply(Gate::controlled(GateKind::CX, 1, 1)), GateError);
        CHECK_THROWS_AS(s.apply(Gate::controlled(GateKind::CX, 0, 5)), GateError);
        CHECK_THROWS(StateVector(0));
        CHECK_THROWS(StateVector(2, std::vector<Complex>(3)));
    }

    TEST_CASE("gate metadata") {
        CHECK(gate_arity(GateKind::CU3) == 2);
        CHECK(gate_arity(GateKind::U3) == 1);
        CHECK(gate_angle_count(GateKind::CU3) == 3);
        CHECK(gate_angle_count(GateKind::CRY) == 1);
        CHECK(gate_angle_count(GateKind::CX) == 0);
        CHECK(is_plain_rotation(GateKind::U3));
        CHECK_FALSE(is_plain_rotation(GateKind::CRY));
    }
}
