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
#include "qsplit/gradcheck.hpp"
#include "qsplit/gradient.hpp"

using namespace qsplit;

namespace {

constexpr double kPi = std::numbers::pi;

double z0(const StateVector &s) { return pauli_z_expectation(s, 0); }

}  // namespace

TEST_SUITE("graddiff") {
    TEST_CASE("d<Z>/dtheta of RY(theta)|0> is -sin(theta)") {
        Circuit c(1);
        c.add_trainable(GateKind::RY, 0);
        for (int k = 0; k <= 20; ++k) {
            const double th = -kPi + 2 * kPi * k / 20.0;
            const ParamVector p{th};
            const GradVector g = param_shift_grad(c, p, {}, z0);
            CHECK(std::abs(g[0] + std::sin(th)) < 1e-12);
        }
    }

    TEST_CASE("RX and RZ analytic gradients") {
        Circuit c(1);
        c.add_trainable(GateKind::RX, 0);
        const GradVector g = param_shift_grad(c, ParamVector{0.4}, {}, z0);
        CHECK(g[0] == doctest::Approx(-std::sin(0.4)).epsilon(1e-12));

        // <X> after RY(pi/2) then RZ(phi) is cos(phi); read it through a final RY(-pi/2).
        Circuit d(1);
        d.add_gate(Gate::single(GateKind::RY, 0, {kPi / 2}));
        d.add_trainable(GateKind::RZ, 0);
        d.add_gate(Gate::single(GateKind::RY, 0, {-kPi / 2}));
        const GradVector h = param_shift_grad(d, ParamVector{0.9}, {}, z0);
        CHECK(h[0] == doctest::Approx(-std::sin(0.9)).epsilon(1e-12));
    }

    TEST_CASE("U3 angles are shifted directly") {
        Circuit c(1);
        c.add_trainable(GateKind::U3, 0);
        c.add_gate(Gate::single(GateKind::RY, 0, {0.3}));
        const ParamVector p{0.5, 1.1, -0.7};
        const ScalarHead head = [](const StateVector &s) { return pvm_probabilities(s)[1]; };
        const GradVector ps = param_shift_grad(c, p, {}, head);
        const GradVector fd = finite_diff_grad(c, p, {}, head, 1e-5);
        for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(ps[i] - fd[i]) < 1e-8);
    }

    TEST_CASE("shared parameter accumulates over occurrences with its scale") {
        Circuit c(1);
        CircuitOp a{GateKind::RY, {0, 0}, {}};
        a.angles[0] = AngleSource::param(0, 2.0);
        CircuitOp b{GateKind::RY, {0, 0}, {}};
        b.angles[0] = AngleSource::param(0, -0.5, 0.2);
        c.add_op(a);
        c.add_op(b);
        // total angle 1.5 t + 0.2, <Z> = cos(1.5 t + 0.2)
        const double t = 0.8;
        const GradVector g = param_shift_grad(c, ParamVector{t}, {}, z0);
        CHECK(g[0] == doctest::Approx(-1.5 * std::sin(1.5 * t + 0.2)).epsilon(1e-12));
    }

    TEST_CASE("lowering controlled rotations preserves the unitary up to phase") {
        Rng rng(21);
        for (auto k : {GateKind::CRX, GateKind::CRY, GateKind::CRZ, GateKind::CU3}) {
            for (int n = 0; n < 10; ++n) {
                Circuit c(3);
                c.add_trainable(k, rng.below(2) ? 0 : 2, 1);
                ParamVector p(c.param_count());
                for (auto &v : p) v = rng.angle();
                const Circuit low = decompose_trainable_controlled(c);
                CHECK(low.param_count() == c.param_count());
                for (const auto &op : low.ops()) {
                    if (op.is_trainable()) CHECK(is_plain_rotation(op.kind));
                }
                const auto u = oracle::circuit_unitary(c, p, {});
                const auto v = oracle::circuit_unitary(low, p, {});
                CHECK_MESSAGE(oracle::max_diff_up_to_phase(u, v) < 1e-12, gate_name(k));
            }
        }
    }

    TEST_CASE("lowering passes fixed controlled gates through") {
        Circuit c(2);
        c.add_gate(Gate::controlled(GateKind::CRY, 0, 1, {0.3}));
        c.add_trainable(GateKind::RX, 0);
        const Circuit low = decompose_trainable_controlled(c);
        CHECK(low.size() == c.size());
        CHECK(low.ops()[0].kind == GateKind::CRY);
    }

    TEST_CASE("parameter shift rejects trainable controlled gates") {
        Circuit c(2);
        c.add_trainable(GateKind::CRY, 0, 1);
        CHECK_THROWS_AS(param_shift_grad(c, ParamVector{0.1}, {}, z0), GradientError);
    }

    TEST_CASE("random circuits: parameter shift matches central differences") {
        GradCheckOptions o;
        o.circuits = 30;
        const GradCheckReport r = run_grad_check(o);
        CHECK(r.circuits == 30);
        CHECK(r.params_checked > 0);
        CHECK(r.max_abs_error < 1e-6);
    }

    TEST_CASE("a missing one-half prefactor is detected") {
        GradCheckOptions o;
        o.circuits = 10;
        o.shift.prefactor = 1.0;
        CHECK(run_grad_check(o).max_abs_error > 1e-3);
    }

    TEST_CASE("zero-parameter circuit gives an empty gradient") {
        Circuit c(2, 2);
        c.add_data(GateKind::RY, 0, 0);
        c.add_gate(Gate::controlled(GateKind::CX, 0, 1));
        const std::vector<double> x{0.2, 0.4};
        CHECK(param_shift_grad(c, {}, x, z0).empty());
        CHECK(finite_diff_grad(c, {}, x, z0, 1e-4).empty());
    }

    TEST_CASE("finite-difference input gradient") {
        const auto f = [](std::span<const double> x) { return x[0] * x[0] + 3 * x[1]; };
        const std::vector<double> x{1.5, -2.0};
        const auto g = finite_diff_input_grad(f, x, 1e-4);
        CHECK(g[0] == doctest::Approx(3.0).epsilon(1e-8));
        CHECK(g[1] == doctest::Approx(3.0).epsilon(1e-8));
        CHECK_THROWS(finite_diff_input_grad(f, x, 0.0));
    }
}
