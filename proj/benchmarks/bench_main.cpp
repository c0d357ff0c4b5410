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

#include <benchmark/benchmark.h>

#include "qsplit/model.hpp"
#include "qsplit/netio.hpp"

using namespace qsplit;

namespace {

void BM_ApplyRY(benchmark::State &state) {
    const auto nq = static_cast<std::size_t>(state.range(0));
    StateVector s(nq);
    std::size_t q = 0;
    for (auto _ : state) {
        s.apply(GateKind::RY, q, 0, {0.3, 0.0, 0.0});
        q = (q + 1) % nq;
        benchmark::DoNotOptimize(s.amplitudes().data());
    }
}
BENCHMARK(BM_ApplyRY)->Arg(4)->Arg(8)->Arg(12);

void BM_ApplyCU3(benchmark::State &state) {
    const auto nq = static_cast<std::size_t>(state.range(0));
    StateVector s(nq);
    for (auto _ : state) {
        s.apply(GateKind::CU3, 0, nq - 1, {0.3, 0.2, 0.1});
        benchmark::DoNotOptimize(s.amplitudes().data());
    }
}
BENCHMARK(BM_ApplyCU3)->Arg(4)->Arg(8)->Arg(12);

void BM_ParamShiftEncoder(benchmark::State &state) {
    const Circuit c = decompose_trainable_controlled(build_reuploading_encoder(4, 4, static_cast<std::size_t>(state.range(0))));
    Rng rng(1);
    ParamVector p(c.param_count());
    for (auto &v : p) v = rng.angle();
    const std::vector<double> x{0.1, 0.5, 0.9, 0.3};
    const ScalarHead head = [](const StateVector &s) { return pauli_z_expectation(s, 0); };
    for (auto _ : state) benchmark::DoNotOptimize(param_shift_grad(c, p, x, head));
    state.counters["params"] = static_cast<double>(c.param_count());
}
BENCHMARK(BM_ParamShiftEncoder)->Arg(1)->Arg(3);

ArchitectureSpec desk_arch() {
    ArchitectureSpec a;
    a.filter_depth = 1;
    a.classifier_depth = 1;
    return a;
}

Image bench_image() {
    Rng rng(2);
    Image img(14, 14, 1);
    for (auto &v : img.values) v = rng.uniform();
    return img;
}

void BM_ForwardLocal(benchmark::State &state) {
    ArchitectureSpec a = desk_arch();
    a.pooling = static_cast<PoolingMode>(state.range(0));
    LocalModel m = LocalModel::build(a);
    Rng rng(3);
    m.bank.init_params(rng);
    const Image img = bench_image();
    for (auto _ : state) benchmark::DoNotOptimize(m.forward(img));
    state.SetLabel(std::string(to_string(a.pooling)));
}
BENCHMARK(BM_ForwardLocal)->Arg(0)->Arg(1)->Arg(2);

void BM_SampleStep(benchmark::State &state) {
    const ArchitectureSpec a = desk_arch();
    LocalModel local = LocalModel::build(a);
    ServerModel server = ServerModel::build(a, local.map_height(), local.map_width(), local.map_channels());
    Rng rng(4);
    local.bank.init_params(rng);
    server.init_params(rng);
    const Image img = bench_image();
    for (auto _ : state) {
        const LocalForward fwd = local.forward_cached(img);
        const ServerSampleGrad sg = server.backprop(fwd.map, 3, 1.0);
        benchmark::DoNotOptimize(local.backprop(fwd, sg.feature_grad));
    }
}
BENCHMARK(BM_SampleStep)->Unit(benchmark::kMillisecond);

void BM_ServerBackprop(benchmark::State &state) {
    const ArchitectureSpec a = desk_arch();
    ServerModel server = ServerModel::build(a, 4, 4, 1);
    Rng rng(5);
    server.init_params(rng);
    FeatureMap m(4, 4, 1);
    for (auto &v : m.values) v = rng.uniform(-1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(server.backprop(m, 2, 1.0));
}
BENCHMARK(BM_ServerBackprop)->Unit(benchmark::kMillisecond);

void BM_EncodeFeatureMap(benchmark::State &state) {
    FeatureMap m(4, 4, 16, 0.25);
    for (auto _ : state) benchmark::DoNotOptimize(encode_frame({MessageKind::FeatureUpload, 0, 0, encode_feature_map(m)}));
}
BENCHMARK(BM_EncodeFeatureMap);

}  // namespace

BENCHMARK_MAIN();
