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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "qsplit/model.hpp"
#include "qsplit/train.hpp"

namespace qsplit::cli {

namespace {

using nlohmann::ordered_json;

std::uint64_t ledger_sum(const RunResult &r, MessageKind kind) {
    std::uint64_t total = 0;
    for (const auto &[key, c] : r.ledger)
        if (std::get<2>(key) == kind) total += c.payload_bytes;
    return total;
}

std::uint64_t framing_sum(const RunResult &r, Direction dir) {
    std::uint64_t total = 0;
    for (const auto &[key, c] : r.ledger)
        if (std::get<1>(key) == dir) total += c.framing_bytes;
    return total;
}

std::string csv_number(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

std::vector<RunResult> run_seeds(const ExperimentConfig &config, const ExperimentData &data,
                                 const std::filesystem::path &dir) {
    const auto seeds = config.seed_list();
    std::vector<RunResult> results;
    std::string table = "seed,epochs_run,final_test_top1,best_test_top1\n";
    for (auto seed : seeds) {
        ExperimentConfig run = config;
        run.seed = seed;
        run.seeds.clear();
        run.output_dir = seeds.size() == 1 ? dir : dir / ("seed_" + std::to_string(seed));
        RunResult r = run_experiment(run, data);
        write_run_outputs(run.output_dir, run, r);
        std::cout << run_summary_json(run, r) << '\n';
        table += std::to_string(seed) + ',' + std::to_string(r.epochs_run) + ',' + csv_number(r.final_test_top1) +
                 ',' + csv_number(r.best_test_top1) + '\n';
        results.push_back(std::move(r));
    }
    if (seeds.size() > 1) write_file_atomic(dir / "seeds.csv", table);
    return results;
}

double mean_final(const std::vector<RunResult> &rs) {
    double s = 0.0;
    for (const auto &r : rs) s += r.final_test_top1;
    return rs.empty() ? 0.0 : s / static_cast<double>(rs.size());
}

void write_pgm(const std::filesystem::path &path, std::size_t h, std::size_t w, const std::vector<std::uint8_t> &px,
               bool color) {
    std::ostringstream out;
    out << (color ? "P6\n" : "P5\n") << w << ' ' << h << "\n255\n";
    out.write(reinterpret_cast<const char *>(px.data()), static_cast<std::streamsize>(px.size()));
    write_file_atomic(path, out.str());
}

std::uint8_t to_gray(double v, double lo, double hi) {
    const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(255.0 * t));
}

ParamVector load_local_params(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    const auto j = nlohmann::json::parse(in);
    return j.at("local").get<ParamVector>();
}

}  // namespace

int train(const ExperimentConfig &config) {
    const ExperimentData data = load_experiment_data(config);
    const auto results = run_seeds(config, data, config.output_dir);
    if (results.size() > 1) std::cout << "mean final test top-1: " << mean_final(results) << '\n';
    return 0;
}

int ablation(const ExperimentConfig &config, const std::vector<std::string> &modes, bool cost_only) {
    std::optional<ExperimentData> data;
    if (!cost_only) data = load_experiment_data(config);
    std::string table = "pooling,feature_payload_bytes,mean_final_test_top1,upload_payload_bytes,download_payload_bytes\n";
    ordered_json rows = ordered_json::array();
    for (const auto &m : modes) {
        ExperimentConfig run = config;
        run.arch.pooling = parse_pooling_mode(m);
        ordered_json row;
        row["pooling"] = m;
        if (cost_only) {
            ArchitectureSpec arch = run.arch;
            const LocalModel local = LocalModel::build(arch);
            const auto cost = ledger_cost_per_feature(local.map_width(), local.map_height(), local.map_channels());
            row["feature_payload_bytes"] = cost;
            table += m + ',' + std::to_string(cost) + ",,,\n";
        } else {
            const auto results = run_seeds(run, *data, config.output_dir / m);
            const auto &r = results.front();
            const std::uint64_t up = ledger_sum(r, MessageKind::FeatureUpload) + ledger_sum(r, MessageKind::LabelUpload) +
                                     ledger_sum(r, MessageKind::ParamUpload);
            const std::uint64_t down =
                ledger_sum(r, MessageKind::FeatureGradDownload) + ledger_sum(r, MessageKind::ParamBroadcast);
            row["feature_payload_bytes"] = r.feature_payload_bytes;
            row["mean_final_test_top1"] = mean_final(results);
            row["upload_payload_bytes"] = up;
            row["download_payload_bytes"] = down;
            table += m + ',' + std::to_string(r.feature_payload_bytes) + ',' + csv_number(mean_final(results)) + ',' +
                     std::to_string(up) + ',' + std::to_string(down) + '\n';
        }
        rows.push_back(row);
    }
    write_file_atomic(config.output_dir / "ablation.csv", table);
    std::cout << rows.dump(2) << '\n';
    return 0;
}

int sweep_k(const ExperimentConfig &config, const std::vector<std::size_t> &k_values) {
    const ExperimentData data = load_experiment_data(config);
    std::string table = "clients,mean_final_test_top1,upload_payload_bytes,download_payload_bytes\n";
    ordered_json rows = ordered_json::array();
    for (auto k : k_values) {
        ExperimentConfig run = config;
        run.clients = k;
        run.validate();
        const auto results = run_seeds(run, data, config.output_dir / ("k_" + std::to_string(k)));
        std::uint64_t up = 0, down = 0;
        for (const auto &[key, c] : results.front().ledger)
            (std::get<1>(key) == Direction::Upload ? up : down) += c.payload_bytes;
        ordered_json row;
        row["clients"] = k;
        row["mean_final_test_top1"] = mean_final(results);
        row["upload_payload_bytes"] = up;
        row["download_payload_bytes"] = down;
        rows.push_back(row);
        table += std::to_string(k) + ',' + csv_number(mean_final(results)) + ',' + std::to_string(up) + ',' +
                 std::to_string(down) + '\n';
    }
    write_file_atomic(config.output_dir / "sweep_k.csv", table);
    std::cout << rows.dump(2) << '\n';
    return 0;
}

int grad_check(const GradCheckOptions &options, double tolerance, bool split_check) {
    const GradCheckReport rep = run_grad_check(options);
    const bool ok = rep.max_abs_error <= tolerance;
    ordered_json j;
    j["circuits"] = rep.circuits;
    j["params_checked"] = rep.params_checked;
    j["max_abs_error"] = rep.max_abs_error;
    j["tolerance"] = tolerance;
    j["pass"] = ok;
    bool split_ok = true;
    if (split_check) {
        ArchitectureSpec arch;
        arch.image_side = 4;
        arch.kernel = 2;
        arch.stride = 2;
        arch.qubits = 2;
        arch.filters = 1;
        arch.filter_depth = 1;
        arch.server_kernel = 2;
        arch.server_stride = 2;
        arch.server_qubits = 2;
        arch.classifier_qubits = 2;
        arch.classifier_depth = 1;
        arch.num_classes = 2;
        LocalModel local = LocalModel::build(arch);
        ServerModel server = ServerModel::build(arch, local.map_height(), local.map_width(), local.map_channels());
        Rng rng = Rng(options.seed).split("split-check");
        local.bank.init_params(rng);
        server.init_params(rng);
        Image img(arch.image_side, arch.image_side, 1);
        for (auto &v : img.values) v = rng.uniform();
        const GradVector chained = chained_client_gradient(local, server, img, 1);
        double err = 0.0;
        for (std::size_t i = 0; i < chained.size(); ++i) {
            LocalModel plus = local, minus = local;
            plus.bank.params[i] += options.epsilon;
            minus.bank.params[i] -= options.epsilon;
            const double fd = (pipeline_loss(plus, server, img, 1) - pipeline_loss(minus, server, img, 1)) /
                              (2.0 * options.epsilon);
            err = std::max(err, std::abs(fd - chained[i]));
        }
        split_ok = err <= 1e-4;
        j["split_params_checked"] = chained.size();
        j["split_max_abs_error"] = err;
        j["split_pass"] = split_ok;
    }
    std::cout << j.dump(2) << '\n';
    return ok && split_ok ? 0 : 1;
}

int dump_features(const ExperimentConfig &config, const std::vector<std::size_t> &indices,
                  const std::vector<std::string> &modes, const std::filesystem::path &params_path) {
    const ExperimentData data = load_experiment_data(config);
    const ArchitectureSpec base = resolve_architecture(config, data.train);
    const ParamVector loaded = params_path.empty() ? ParamVector{} : load_local_params(params_path);
    for (auto idx : indices) {
        if (idx >= data.train.size()) {
            throw DataError("sample index " + std::to_string(idx) + " out of range for " +
                            std::to_string(data.train.size()) + " samples");
        }
    }
    for (auto idx : indices) {
        const Sample &s = data.train.samples[idx];
        const auto dir = config.output_dir / ("sample_" + std::to_string(idx));
        const Image &img = s.image;
        std::vector<std::uint8_t> px;
        for (double v : img.values) px.push_back(to_gray(v, 0.0, 1.0));
        if (img.channels == 3) {
            write_pgm(dir / "original.ppm", img.height, img.width, px, true);
        } else {
            std::vector<std::uint8_t> gray;
            for (std::size_t i = 0; i < img.values.size(); i += img.channels) gray.push_back(px[i]);
            write_pgm(dir / "original.pgm", img.height, img.width, gray, false);
        }
        for (const auto &m : modes) {
            ArchitectureSpec arch = base;
            arch.pooling = parse_pooling_mode(m);
            LocalModel local = LocalModel::build(arch);
            if (loaded.empty()) {
                Rng init = Rng(config.seed).split("client").split(0).split("init");
                local.bank.init_params(init);
            } else {
                if (loaded.size() < local.param_count()) {
                    throw ConfigError(params_path.string() + " holds " + std::to_string(loaded.size()) +
                                      " local parameters, mode " + m + " needs " +
                                      std::to_string(local.param_count()));
                }
                local.bank.params.assign(loaded.begin(), loaded.begin() + static_cast<std::ptrdiff_t>(local.param_count()));
            }
            const FeatureMap map = local.forward(img);
            std::ostringstream csv;
            csv << "row,col";
            for (std::size_t c = 0; c < map.channels; ++c) csv << ",ch" << c;
            csv << '\n' << std::setprecision(9);
            for (std::size_t r = 0; r < map.height; ++r)
                for (std::size_t c = 0; c < map.width; ++c) {
                    csv << r << ',' << c;
                    for (std::size_t ch = 0; ch < map.channels; ++ch) csv << ',' << map.at(r, c, ch);
                    csv << '\n';
                }
            write_file_atomic(dir / (m + ".csv"), csv.str());
            for (std::size_t ch = 0; ch < map.channels; ++ch) {
                std::vector<std::uint8_t> gray;
                for (std::size_t r = 0; r < map.height; ++r)
                    for (std::size_t c = 0; c < map.width; ++c) gray.push_back(to_gray(map.at(r, c, ch), -1.0, 1.0));
                const std::string name =
                    map.channels == 1 ? m + ".pgm" : m + "_ch" + std::to_string(ch) + ".pgm";
                write_pgm(dir / name, map.height, map.width, gray, false);
            }
        }
        std::cout << "wrote " << dir.string() << '\n';
    }
    return 0;
}

int ledger(const ExperimentConfig &config, bool verify) {
    ordered_json j;
    ordered_json costs;
    for (auto mode : {PoolingMode::C2Pool, PoolingMode::Average, PoolingMode::None}) {
        ArchitectureSpec arch = config.arch;
        arch.pooling = mode;
        const LocalModel local = LocalModel::build(arch);
        costs[std::string(to_string(mode))] =
            ledger_cost_per_feature(local.map_width(), local.map_height(), local.map_channels());
    }
    j["feature_payload_bytes"] = costs;

    std::optional<ExperimentData> data;
    ArchitectureSpec arch = config.arch;
    if (verify) {
        data = load_experiment_data(config);
        arch = resolve_architecture(config, data->train);
    }
    auto predicted_json = [](const LedgerPrediction &p) {
        ordered_json o;
        o["feature_upload"] = p.feature_upload;
        o["label_upload"] = p.label_upload;
        o["grad_download"] = p.grad_download;
        o["param_upload"] = p.param_upload;
        o["param_broadcast"] = p.param_broadcast;
        o["upload_framing"] = p.upload_framing;
        o["download_framing"] = p.download_framing;
        return o;
    };
    j["predicted"] = predicted_json(predict_ledger(config, arch, config.epochs));
    int status = 0;
    if (verify) {
        const RunResult r = run_experiment(config, *data);
        const LedgerPrediction p = predict_ledger(config, arch, r.epochs_run);
        LedgerPrediction got;
        got.feature_upload = ledger_sum(r, MessageKind::FeatureUpload);
        got.label_upload = ledger_sum(r, MessageKind::LabelUpload);
        got.grad_download = ledger_sum(r, MessageKind::FeatureGradDownload);
        got.param_upload = ledger_sum(r, MessageKind::ParamUpload);
        got.param_broadcast = ledger_sum(r, MessageKind::ParamBroadcast);
        got.upload_framing = framing_sum(r, Direction::Upload);
        got.download_framing = framing_sum(r, Direction::Download);
        const ordered_json pj = predicted_json(p), gj = predicted_json(got);
        j["predicted"] = pj;
        j["measured"] = gj;
        j["match"] = pj == gj;
        if (pj != gj) status = 1;
        write_file_atomic(config.output_dir / "ledger.csv", r.ledger_csv);
    }
    std::cout << j.dump(2) << '\n';
    return status;
}

}  // namespace qsplit::cli
