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
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

/// Config file, per-key flags and --set overrides for one subcommand,
/// applied in that order.
struct ConfigSources {
    std::string file;
    std::vector<std::string> sets;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option *> options;

    void attach(CLI::App *app) {
        app->add_option("-c,--config", file, "config file (key = value lines)");
        app->add_option("--set", sets, "override as key=value; repeatable");
        for (const auto &key : qsplit::config_keys()) {
            std::string flag = key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            options[key] = app->add_option("--" + flag, values[key], std::string(qsplit::config_key_help(key)))
                               ->group("Config keys");
        }
    }

    qsplit::ExperimentConfig resolve() const {
        qsplit::ExperimentConfig cfg = file.empty() ? qsplit::ExperimentConfig{} : qsplit::load_config(file);
        for (const auto &key : qsplit::config_keys()) {
            if (options.at(key)->count() > 0) qsplit::set_config_value(cfg, key, values.at(key));
        }
        for (const auto &kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw qsplit::ConfigError("--set expects key=value, got '" + kv + "'");
            qsplit::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        cfg.validate();
        return cfg;
    }
};

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qsplit: quantum split learning simulator and experiment driver"};
    app.require_subcommand(1);

    ConfigSources train_src, ablation_src, sweep_src, dump_src, ledger_src;

    auto *train = app.add_subcommand("train", "train one configuration for every listed seed");
    train_src.attach(train);

    auto *ablation = app.add_subcommand("ablation", "train once per pooling mode and compare cost and accuracy");
    ablation_src.attach(ablation);
    std::vector<std::string> modes{"c2pool", "avg", "none"};
    bool cost_only = false;
    ablation->add_option("--modes", modes, "pooling modes to compare")->delimiter(',');
    ablation->add_flag("--cost-only", cost_only, "report per-feature communication cost without training");

    auto *sweep = app.add_subcommand("sweep-k", "train once per client count");
    sweep_src.attach(sweep);
    std::vector<std::size_t> k_values{1, 2, 5, 10, 20};
    sweep->add_option("--k-values", k_values, "client counts")->delimiter(',');

    auto *grad = app.add_subcommand("grad-check", "compare parameter-shift and finite-difference gradients");
    qsplit::GradCheckOptions gopts;
    double tolerance = 1e-6;
    bool split_check = false;
    bool inject_missing_half = false;
    grad->add_option("--circuits", gopts.circuits, "random circuits to check")->capture_default_str();
    grad->add_option("--max-qubits", gopts.max_qubits, "qubit bound")->capture_default_str();
    grad->add_option("--max-params", gopts.max_params, "parameter bound")->capture_default_str();
    grad->add_option("--seed", gopts.seed, "generator seed")->capture_default_str();
    grad->add_option("--epsilon", gopts.epsilon, "finite-difference step")->capture_default_str();
    grad->add_option("--tolerance", tolerance, "maximum allowed deviation")->capture_default_str();
    grad->add_flag("--split", split_check, "also check the chained split gradient of a tiny model");
    grad->add_flag("--inject-missing-half", inject_missing_half)->group("");

    auto *dump = app.add_subcommand("dump-features", "write input images and transmitted feature maps");
    dump_src.attach(dump);
    std::vector<std::size_t> indices{0, 1, 2, 3};
    std::vector<std::string> dump_modes{"c2pool", "avg", "none"};
    std::string params_path;
    dump->add_option("--indices", indices, "training-sample indices")->delimiter(',');
    dump->add_option("--modes", dump_modes, "pooling modes")->delimiter(',');
    dump->add_option("--params", params_path, "params.json from a run (default: seeded initialization)");

    auto *ledger = app.add_subcommand("ledger", "closed-form communication cost of a configuration");
    ledger_src.attach(ledger);
    bool verify = false;
    ledger->add_flag("--verify", verify, "run the configuration and compare the ledger to the prediction");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) return qsplit::cli::train(train_src.resolve());
        if (*ablation) return qsplit::cli::ablation(ablation_src.resolve(), modes, cost_only);
        if (*sweep) return qsplit::cli::sweep_k(sweep_src.resolve(), k_values);
        if (*grad) {
            if (inject_missing_half) gopts.shift.prefactor = 1.0;
            return qsplit::cli::grad_check(gopts, tolerance, split_check);
        }
        if (*dump) return qsplit::cli::dump_features(dump_src.resolve(), indices, dump_modes, params_path);
        if (*ledger) return qsplit::cli::ledger(ledger_src.resolve(), verify);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
