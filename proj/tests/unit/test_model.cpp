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
#include "qsplit/model.hpp"
#include "qsplit/train.hpp"

using namespace qsplit;

namespace {

ArchitectureSpec tiny_arch() {
    ArchitectureSpec a;
    a.image_side = 4;
    a.kernel = 2;
    a.stride = 2;
    a.qubits = 2;
    a.filters = 1;
    a.filter_depth = 1;
    a.server_kernel = 2;
    a.server_stride = 2;
    a.server_qubits = 2;
    a.classifier_qubits = 2;
    a.classifier_depth = 1;
    a.num_classes = 2;
    return a;
}

}  // namespace

TEST_SUITE("learn") {
    TEST_CASE("uniform prediction over 16 states with 10 classes") {
        const std::vector<double> p(16, 1.0 / 16);
        const LossBreakdown l = loss(p, 3, 10);
        const double bce = -(std::log(1.0 / 16) + 9 * std::log(15.0 / 16));
        const double par = -6 * std::log(15.0 / 16);
        CHECK(l.bce == doctest::Approx(bce).epsilon(1e-14));
        CHECK(l.par == doctest::Approx(par).epsilon(1e-14));
        CHECK(l.total() == l.bce + l.par);
    }

    TEST_CASE("perfect prediction has near-zero loss and stays finite") {
        std::vector<double> p(16, 0.0);
        p[2] = 1.0;
        const LossBreakdown l = loss(p, 2, 10);
        CHECK(std::isfinite(l.bce));
        CHECK(l.bce < 1e-10);
        CHECK(l.par < 1e-10);
    }

    TEST_CASE("no parasitic mass means no parasitic penalty") {
        std::vector<double> p(8, 0.0);
        p[0] = 0.3;
        p[1] = 0.7;
        CHECK(loss(p, 1, 2).par < 1e-10);  // only the clamp floor remains
    }

    TEST_CASE("completely wrong prediction is clamped, not infinite") {
        std::vector<double> p(4, 0.0);
        p[0] = 1.0;
        const LossBreakdown l = loss(p, 1, 2);
        CHECK(std::isfinite(l.total()));
        CHECK(l.bce > 27.0);  // two clamped logs of 1e-12
    }

    TEST_CASE("malformed labels are rejected") {
        const std::vector<double> p(4, 0.25);
        CHECK_THROWS_AS(loss(p, 2, 2), ModelError);
        CHECK_THROWS_AS(loss(p, -1, 2), ModelError);
        CHECK_THROWS_AS(loss(p, std::vector<double>{1.0, 1.0}), ModelError);
        CHECK_THROWS_AS(loss(p, std::vector<double>{0.5, 0.5}), ModelError);
        CHECK_THROWS_AS(loss(p, std::vector<double>(5, 0.0)), ModelError);
    }

    TEST_CASE("loss gradient matches central differences") {
        const std::vector<double> p{0.1, 0.35, 0.2, 0.05, 0.15, 0.15};
        const auto g = loss_grad_probs(p, 1, 3);
        for (std::size_t i = 0; i < p.size(); ++i) {
            auto q = p;
            q[i] += 1e-6;
            const double up = loss(q, 1, 3).total();
            q[i] -= 2e-6;
            const double dn = loss(q, 1, 3).total();
            CHECK(g[i] == doctest::Approx((up - dn) / 2e-6).epsilon(1e-6));
        }
    }

    TEST_CASE("top-1 uses the class entries only and breaks ties low") {
        const std::vector<double> p{0.2, 0.3, 0.3, 0.05, 0.9};
        CHECK(top1(p, 3) == 1);
        CHECK(top1(p, 2) == 1);
        CHECK(top1(std::vector<double>{0.5, 0.5}, 2) == 0);
    }

    TEST_CASE("Adagrad closed forms") {
        Adagrad opt(2, 1.0);
        ParamVector p{0.0, 5.0};
        opt.step(p, std::vector<double>{1.0, 0.0});
        CHECK(p[0] == doctest::Approx(-1.0 / (1.0 + kAdagradEps)).epsilon(1e-15));
        CHECK(p[1] == 5.0);
        const double first = 1.0 / (1.0 + kAdagradEps);
        const double before = p[0];
        opt.step(p, std::vector<double>{1.0, 0.0});
        CHECK(std::abs(p[0] - before) < first);
        CHECK(std::abs(p[0] - before) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
        CHECK(opt.accumulators()[0] == 2.0);
        CHECK_THROWS_AS(opt.step(p, std::vector<double>{1.0}), ModelError);
        CHECK_THROWS_AS(Adagrad(1, 0.0), ModelError);
    }

    TEST_CASE("Adagrad accumulators are monotone") {
        Adagrad opt(3, 0.5);
        ParamVector p(3, 0.0);
        Rng rng(1);
        std::vector<double> last(3, 0.0);
        for (int n = 0; n < 20; ++n) {
            std::vector<double> g{rng.uniform(-1, 1), rng.uniform(-1, 1), 0.0};
            opt.step(p, g);
            for (std::size_t i = 0; i < 3; ++i) {
                CHECK(opt.accumulators()[i] >= last[i]);
                last[i] = opt.accumulators()[i];
            }
        }
        CHECK(p[2] == 0.0);
    }

    TEST_CASE("parameter averaging") {
        const std::vector<ParamVector> two{{1.0, 2.0, -3.0}, {3.0, -2.0, 1.0}};
        CHECK(fedavg_average(two) == ParamVector{2.0, 0.0, -1.0});
        const std::vector<ParamVector> same{{0.1, 0.2}, {0.1, 0.2}, {0.1, 0.2}};
        const auto avg = fedavg_average(same);
        CHECK(avg[0] == doctest::Approx(0.1));
        CHECK(avg[1] == doctest::Approx(0.2));
        CHECK_THROWS_AS(fedavg_average(std::vector<ParamVector>{}), ModelError);
        CHECK_THROWS_AS(fedavg_average(std::vector<ParamVector>{{1.0}, {1.0, 2.0}}), ModelError);
    }

    TEST_CASE("parameter averaging is invariant to client order") {
        Rng rng(4);
        std::vector<ParamVector> ps(5, ParamVector(7));
        for (auto &p : ps)
            for (auto &v : p) v = rng.angle();
        const auto ref = fedavg_average(ps);
        std::vector<std::size_t> perm{0, 1, 2, 3, 4};
        while (std::next_permutation(perm.begin(), perm.end())) {
            std::vector<ParamVector> q;
            for (auto i : perm) q.push_back(ps[i]);
            const auto avg = fedavg_average(q);
            for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(avg[i] - ref[i]) < 1e-15);
        }
    }

    TEST_CASE("default architecture parameter budget") {
        const ArchitectureSpec a;
        const LocalModel local = LocalModel::build(a);
        CHECK(local.param_count() == 312);
        const ServerModel server = ServerModel::build(a, local.map_height(), local.map_width(), local.map_channels());
        CHECK(server.param_count() == 312);
        CHECK(server.grid().num_patches() == 4);
        CHECK(server.classifier().num_qubits() == 4);
    }

    TEST_CASE("classifier output covers all basis states and sums to one") {
        ArchitectureSpec a;
        a.filter_depth = 1;
        a.classifier_depth = 1;
        const LocalModel local = LocalModel::build(a);
        ServerModel server = ServerModel::build(a, 4, 4, 1);
        Rng rng(3);
        server.init_params(rng);
        for (int n = 0; n < 20; ++n) {
            FeatureMap m(4, 4, 1);
            for (auto &v : m.values) v = rng.uniform(-1, 1);
            const auto p = server.classify(m);
            REQUIRE(p.size() == 16);
            double s = 0.0;
            for (double v : p) s += v;
            CHECK(std::abs(s - 1.0) < 1e-10);
        }
        (void)local;
    }

    TEST_CASE("zero parameters and zero features classify as basis 0") {
        const ArchitectureSpec a;
        ServerModel server = ServerModel::build(a, 4, 4, 1);
        const FeatureMap m(4, 4, 1, 0.0);
        const auto p = server.classify(m);
        CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("too few classifier qubits are rejected") {
        ArchitectureSpec a;
        a.classifier_qubits = 3;
        a.num_classes = 10;
        CHECK_THROWS_AS(ServerModel::build(a, 4, 4, 1), ModelError);
    }

    TEST_CASE("server gradients match central differences") {
        const ArchitectureSpec a = tiny_arch();
        ServerModel server = ServerModel::build(a, 2, 2, 1);
        Rng rng(12);
        server.init_params(rng);
        FeatureMap m(2, 2, 1);
        for (auto &v : m.values) v = rng.uniform(-1, 1);
        const ServerSampleGrad g = server.backprop(m, 1, 0.5);
        const ParamVector flat = server.flat_params();
        GradVector analytic = g.qcnn;
        analytic.insert(analytic.end(), g.classifier.begin(), g.classifier.end());
        REQUIRE(analytic.size() == flat.size());
        double err = 0.0;
        for (std::size_t i = 0; i < flat.size(); ++i) {
            ParamVector p = flat;
            p[i] += 1e-5;
            server.set_flat_params(p);
            const double up = 0.5 * server.sample_loss(m, 1).total();
            p[i] -= 2e-5;
            server.set_flat_params(p);
            const double dn = 0.5 * server.sample_loss(m, 1).total();
            err = std::max(err, std::abs((up - dn) / 2e-5 - analytic[i]));
        }
        server.set_flat_params(flat);
        CHECK(err < 1e-6);
    }

    TEST_CASE("chained split gradient matches whole-pipeline differences") {
        const ArchitectureSpec a = tiny_arch();
        LocalModel local = LocalModel::build(a);
        ServerModel server = ServerModel::build(a, local.map_height(), local.map_width(), local.map_channels());
        CHECK(local.grid.num_patches() == 4);
        Rng rng(13);
        local.bank.init_params(rng);
        server.init_params(rng);
        Image img(4, 4, 1);
        for (auto &v : img.values) v = rng.uniform();
        for (int label = 0; label < 2; ++label) {
            const GradVector g = chained_client_gradient(local, server, img, label);
            double err = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                LocalModel p = local, q = local;
                p.bank.params[i] += 1e-4;
                q.bank.params[i] -= 1e-4;
                const double fd = (pipeline_loss(p, server, img, label) - pipeline_loss(q, server, img, label)) / 2e-4;
                err = std::max(err, std::abs(fd - g[i]));
            }
            CHECK(err < 1e-4);
        }
    }

    TEST_CASE("flat server parameters round-trip") {
        const ArchitectureSpec a = tiny_arch();
        ServerModel server = ServerModel::build(a, 2, 2, 1);
        Rng rng(2);
        server.init_params(rng);
        const ParamVector flat = server.flat_params();
        ServerModel other = ServerModel::build(a, 2, 2, 1);
        other.set_flat_params(flat);
        CHECK(other.flat_params() == flat);
        CHECK_THROWS_AS(other.set_flat_params(ParamVector(flat.size() - 1)), ModelError);
    }
}
