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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "qsplit/netio.hpp"
#include "qsplit/quanv.hpp"

using namespace qsplit;

namespace {

FilterBank make_bank(std::size_t input_len, std::size_t qubits, std::size_t filters, bool pooling,
                     std::uint64_t seed) {
    FilterBankSpec spec;
    spec.input_len = input_len;
    spec.qubits = qubits;
    spec.num_filters = filters;
    spec.with_pooling = pooling;
    FilterBank bank = FilterBank::build(spec);
    Rng rng(seed);
    bank.init_params(rng);
    return bank;
}

Image random_image(Rng &rng, std::size_t side, std::size_t channels = 1) {
    Image img(side, side, channels);
    for (auto &v : img.values) v = rng.uniform();
    return img;
}

}  // namespace

TEST_SUITE("quanv") {
    TEST_CASE("default geometry: 14x14, kernel 2, stride 4 gives 4x4 patches") {
        const PatchGrid g{14, 14, 1, 2, 4};
        CHECK(g.out_width() == 4);
        CHECK(g.out_height() == 4);
        CHECK(g.num_patches() == 16);
        CHECK(g.patch_length() == 4);
        const PatchGrid s{4, 4, 1, 2, 2};
        CHECK(s.num_patches() == 4);
    }

    TEST_CASE("invalid grids are rejected") {
        CHECK_THROWS_AS((PatchGrid{3, 3, 1, 4, 1}.validate()), QuanvError);
        CHECK_THROWS_AS((PatchGrid{4, 4, 1, 2, 0}.validate()), QuanvError);
        CHECK_THROWS_AS((PatchGrid{4, 4, 0, 2, 2}.validate()), QuanvError);
    }

    TEST_CASE("patches are scanned row-major and flattened as (row, col, channel)") {
        Image img(4, 4, 2);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c)
                for (std::size_t ch = 0; ch < 2; ++ch) img.at(r, c, ch) = 100.0 * r + 10.0 * c + ch;
        const auto p = extract_patches(img, PatchGrid{4, 4, 2, 2, 2});
        REQUIRE(p.size() == 4);
        CHECK(p[1] == std::vector<double>{20, 21, 30, 31, 120, 121, 130, 131});
        CHECK(p[2][0] == 200.0);
    }

    TEST_CASE("filter bank parameter layout") {
        const FilterBank bank = make_bank(4, 4, 4, true, 1);
        CHECK(bank.c_out() == 16);
        CHECK(bank.filter_param_count() == 24);
        CHECK(bank.pooling_param_count() == 24);
        CHECK(bank.param_count() == 4 * 24 + 24);
        CHECK(bank.pooling_offset() == 96);
        CHECK(bank.pooling_circuit().num_qubits() == 4);
        CHECK_THROWS_AS(make_bank(4, 3, 1, true, 1), QuanvError);
    }

    TEST_CASE("filter features are Pauli-Z expectations in [-1, 1]") {
        const FilterBank bank = make_bank(4, 4, 4, false, 2);
        Rng rng(9);
        for (int n = 0; n < 50; ++n) {
            std::vector<double> patch(4);
            for (auto &v : patch) v = rng.uniform();
            const auto f = filter_features(patch, bank);
            REQUIRE(f.size() == 16);
            for (double v : f) {
                CHECK(v >= -1.0);
                CHECK(v <= 1.0);
            }
        }
    }

    TEST_CASE("C2Pool equals the brute-force weighted sum and stays within [min f, max f]") {
        FilterBank bank = make_bank(4, 4, 4, true, 3);
        Rng rng(10);
        for (int n = 0; n < 10000; ++n) {
            if (n % 100 == 0) bank.init_params(rng);
            std::vector<double> patch(4), f(16);
            for (auto &v : patch) v = rng.uniform();
            for (auto &v : f) v = rng.uniform(-1.0, 1.0);
            const double y = c2pool(f, patch, bank);
            const StateVector s = bank.pooling_circuit().evaluate(bank.pooling_params(), patch);
            double ref = 0.0;
            for (std::size_t c = 0; c < 16; ++c) ref += std::norm(s[c]) * f[c];
            CHECK(std::abs(y - ref) < 1e-12);
            const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
            CHECK(y >= *lo - 1e-12);
            CHECK(y <= *hi + 1e-12);
        }
    }

    TEST_CASE("C2Pool with a uniform pooling state is the mean") {
        // Zero parameters with pi/2 data angles put the 2-qubit pooling circuit in |++>.
        FilterBankSpec spec;
        spec.input_len = 2;
        spec.qubits = 2;
        spec.num_filters = 2;
        spec.scaling = {1.0, 0.0};
        FilterBank bank = FilterBank::build(spec);
        std::fill(bank.params.begin(), bank.params.end(), 0.0);
        const std::vector<double> patch{std::numbers::pi / 2, std::numbers::pi / 2};
        const std::vector<double> f{0.2, -0.4, 0.6, 1.0};
        CHECK(c2pool(f, patch, bank) == doctest::Approx(avg_pool(f)).epsilon(1e-12));
    }

    TEST_CASE("constant features pool to the constant") {
        const FilterBank bank = make_bank(4, 4, 4, true, 4);
        const std::vector<double> patch{0.1, 0.5, 0.9, 0.3};
        const std::vector<double> f(16, 0.37);
        CHECK(c2pool(f, patch, bank) == doctest::Approx(0.37).epsilon(1e-12));
        CHECK(avg_pool(f) == doctest::Approx(0.37));
    }

    TEST_CASE("output map shapes and per-sample payloads") {
        Rng rng(5);
        const Image img = random_image(rng, 14);
        const PatchGrid g{14, 14, 1, 2, 4};
        const FilterBank pooled = make_bank(4, 4, 4, true, 6);
        const FilterBank plain = make_bank(4, 4, 4, false, 6);
        const FeatureMap a = forward_local(img, g, pooled, PoolingMode::C2Pool);
        const FeatureMap b = forward_local(img, g, plain, PoolingMode::Average);
        const FeatureMap c = forward_local(img, g, plain, PoolingMode::None);
        CHECK((a.height == 4 && a.width == 4 && a.channels == 1));
        CHECK((b.height == 4 && b.width == 4 && b.channels == 1));
        CHECK((c.height == 4 && c.width == 4 && c.channels == 16));
        CHECK(encode_feature_map(a).size() == 64);
        CHECK(encode_feature_map(b).size() == 64);
        CHECK(encode_feature_map(c).size() == 1024);
    }

    TEST_CASE("forward is deterministic") {
        Rng rng(6);
        const Image img = random_image(rng, 14);
        const PatchGrid g{14, 14, 1, 2, 4};
        const FilterBank bank = make_bank(4, 4, 4, true, 7);
        CHECK(forward_local(img, g, bank, PoolingMode::C2Pool) == forward_local(img, g, bank, PoolingMode::C2Pool));
    }

    TEST_CASE("backprop_local matches central differences for every pooling mode") {
        Rng rng(8);
        const PatchGrid g{6, 6, 1, 2, 2};
        const Image img = random_image(rng, 6);
        struct Case {
            PoolingMode mode;
            PoolingWeights weights;
            bool pooling;
        };
        for (const Case cs : {Case{PoolingMode::C2Pool, PoolingWeights::Probability, true},
                              Case{PoolingMode::C2Pool, PoolingWeights::Amplitude, true},
                              Case{PoolingMode::Average, PoolingWeights::Probability, false},
                              Case{PoolingMode::None, PoolingWeights::Probability, false}}) {
            FilterBank bank = make_bank(4, 2, 2, cs.pooling, 11);
            const LocalForward fwd = forward_local_cached(img, g, bank, cs.mode, cs.weights);
            FeatureMap up = fwd.map;
            for (auto &v : up.values) v = rng.uniform(-1.0, 1.0);
            const GradVector grad = backprop_local(fwd, up, bank, cs.mode, cs.weights);
            REQUIRE(grad.size() == bank.param_count());
            double err = 0.0;
            const double eps = 1e-5;
            for (std::size_t i = 0; i < bank.params.size(); ++i) {
                const double saved = bank.params[i];
                auto dot = [&] {
                    const FeatureMap m = forward_local(img, g, bank, cs.mode, cs.weights);
                    double acc = 0.0;
                    for (std::size_t k = 0; k < m.values.size(); ++k) acc += m.values[k] * up.values[k];
                    return acc;
                };
                bank.params[i] = saved + eps;
                const double fp = dot();
                bank.params[i] = saved - eps;
                const double fm = dot();
                bank.params[i] = saved;
                err = std::max(err, std::abs((fp - fm) / (2 * eps) - grad[i]));
            }
            CHECK_MESSAGE(err < 1e-6, to_string(cs.mode));
        }
    }

    TEST_CASE("pooling mode names") {
        CHECK(parse_pooling_mode("c2pool") == PoolingMode::C2Pool);
        CHECK(parse_pooling_mode("avg") == PoolingMode::Average);
        CHECK(parse_pooling_mode("none") == PoolingMode::None);
        CHECK_THROWS_AS(parse_pooling_mode("max"), QuanvError);
        CHECK(to_string(PoolingMode::Average) == "avg");
    }

    TEST_CASE("patch length mismatch is rejected") {
        const FilterBank bank = make_bank(4, 4, 1, false, 1);
        CHECK_THROWS_AS(filter_features(std::vector<double>(3), bank), QuanvError);
    }
}
