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
#include "qsplit/circuit.hpp"
#include "qsplit/gradcheck.hpp"
#include "qsplit/rng.hpp"

using namespace qsplit;

namespace {

std::size_t count_kind(const Circuit &c, GateKind k) {
    std::size_t n = 0;
    for (const auto &op : c.ops()) n += op.kind == k;
    return n;
}

}  // namespace

TEST_SUITE("circuit") {
    TEST_CASE("ansatz layer parameter counts") {
        CHECK(build_ansatz_layer(1).param_count() == 3);
        CHECK(build_ansatz_layer(2).param_count() == 12);
        CHECK(build_ansatz_layer(4).param_count() == 24);
        CHECK(build_ansatz_layer(6).param_count() == 36);
        const Circuit l = build_ansatz_layer(4);
        CHECK(count_kind(l, GateKind::U3) == 4);
        CHECK(count_kind(l, GateKind::CU3) == 4);
    }

    TEST_CASE("ansatz ring connects q to q+1 mod Q") {
        const Circuit l = build_ansatz_layer(3);
        std::vector<std::array<std::size_t, 2>> pairs;
        for (const auto &op : l.ops())
            if (op.kind == GateKind::CU3) pairs.push_back(op.qubits);
        REQUIRE(pairs.size() == 3);
        CHECK(pairs[0] == std::array<std::size_t, 2>{0, 1});
        CHECK(pairs[1] == std::array<std::size_t, 2>{1, 2});
        CHECK(pairs[2] == std::array<std::size_t, 2>{2, 0});
    }

    TEST_CASE("encoder block structure for a 2x2 patch on 4 qubits") {
        const Circuit c = build_reuploading_encoder(4, 4, 1);
        CHECK(c.data_slot_count() == 4);
        CHECK(c.padding_slot_count() == 0);
        CHECK(c.param_count() == 24);
    }

    TEST_CASE("encoder pads the last block with zeros") {
        const Circuit c = build_reuploading_encoder(5, 4, 1);
        CHECK(c.data_slot_count() == 5);
        CHECK(c.padding_slot_count() == 3);
        CHECK(c.param_count() == 48);
    }

    TEST_CASE("encoder over 16 features on 4 qubits reuploads four times") {
        const Circuit c = build_reuploading_encoder(16, 4, 3);
        CHECK(c.data_slot_count() == 16);
        CHECK(c.param_count() == 4 * 3 * 24);
        CHECK(count_kind(c, GateKind::RY) == 16);
    }

    TEST_CASE("zero parameters and zero inputs leave |0...0>") {
        const Circuit c = build_reuploading_encoder(8, 4, 2);
        const ParamVector p(c.param_count(), 0.0);
        const std::vector<double> x(8, 0.0);
        const StateVector s = c.evaluate(p, x);
        CHECK(std::abs(std::norm(s[0]) - 1.0) < 1e-12);
    }

    TEST_CASE("data angle is scale * x + offset") {
        Circuit c(1, 1);
        c.add_data(GateKind::RY, 0, 0, 2.0, 0.5);
        const std::vector<double> x{0.3};
        const StateVector s = c.evaluate({}, x);
        const double angle = 2.0 * 0.3 + 0.5;
        CHECK(std::norm(s[1]) == doctest::Approx(std::pow(std::sin(angle / 2), 2)));
    }

    TEST_CASE("append renumbers parameters and shifts inputs") {
        Circuit a(2, 4);
        a.add_trainable(GateKind::RY, 0);
        Circuit b(2, 2);
        b.add_trainable(GateKind::U3, 1);
        b.add_data(GateKind::RY, 0, 1);
        a.append(b, 2);
        CHECK(a.param_count() == 4);
        const auto ops = a.ops();
        CHECK(ops[1].angles[0].index == 1);
        CHECK(ops[1].angles[2].index == 3);
        CHECK(ops[2].angles[0].index == 3);  // input 1 shifted by 2
    }

    TEST_CASE("evaluation matches the dense oracle on random circuits") {
        Rng rng(11);
        double worst = 0.0;
        for (int n = 0; n < 100; ++n) {
            const Circuit c = random_circuit(rng, 4, 20);
            ParamVector p(c.param_count());
            for (auto &v : p) v = rng.angle();
            std::vector<double> x(c.input_len());
            for (auto &v : x) v = rng.uniform();
            const StateVector s = c.evaluate(p, x);
            const auto ref = oracle::circuit_state(c, p, x);
            for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(ref[i] - s[i]));
        }
        CHECK(worst < 1e-10);
    }

    TEST_CASE("evaluation is deterministic") {
        const Circuit c = build_reuploading_encoder(6, 3, 2);
        Rng rng(2);
        ParamVector p(c.param_count());
        for (auto &v : p) v = rng.angle();
        const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
        const StateVector a = c.evaluate(p, x), b = c.evaluate(p, x);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }

    TEST_CASE("length mismatches are rejected") {
        const Circuit c = build_reuploading_encoder(4, 2, 1);
        const ParamVector p(c.param_count(), 0.0);
        CHECK_THROWS_AS(c.evaluate(p, std::vector<double>(3)), CircuitError);
        CHECK_THROWS_AS(c.evaluate(ParamVector(p.size() + 1), std::vector<double>(4)), CircuitError);
        CHECK_THROWS(build_reuploading_encoder(4, 0, 1));
        Circuit d(2, 1);
        CHECK_THROWS(d.add_data(GateKind::RY, 0, 3));
        CHECK_THROWS(d.add_gate(Gate::single(GateKind::X, 4)));
    }
}
