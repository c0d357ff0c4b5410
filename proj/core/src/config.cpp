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

#include "qsplit/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <unordered_map>

namespace qsplit {

Framework parse_framework(std::string_view s) {
    if (s == "qsl") return Framework::Qsl;
    if (s == "qfedavg") return Framework::QFedAvg;
    if (s == "standalone") return Framework::Standalone;
    throw ConfigError("unknown framework '" + std::string(s) + "' (expected qsl, qfedavg or standalone)");
}

std::string_view to_string(Framework f) {
    switch (f) {
        case Framework::Qsl: return "qsl";
        case Framework::QFedAvg: return "qfedavg";
        case Framework::Standalone: return "standalone";
    }
    return "?";
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    s = trim(s);
    if (s.empty()) return out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view s) {
    s = trim(s);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ConfigError("bad value '" + std::string(s) + "' for " + std::string(key));
    }
    return value;
}

std::size_t parse_size(std::string_view key, std::string_view s) { return parse_number<std::size_t>(key, s); }

bool parse_bool(std::string_view key, std::string_view s) {
    s = trim(s);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("bad boolean '" + std::string(s) + "' for " + std::string(key));
}

PoolingWeights parse_weights(std::string_view s) {
    if (s == "probability") return PoolingWeights::Probability;
    if (s == "amplitude") return PoolingWeights::Amplitude;
    throw ConfigError("unknown pooling weights '" + std::string(s) + "' (expected probability or amplitude)");
}

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

template <typename T>
std::string join(const std::vector<T> &v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

struct KeySpec {
    std::string key;
    std::string help;
    std::function<void(ExperimentConfig &, std::string_view)> set;
    std::function<std::string(const ExperimentConfig &)> get;
};

KeySpec size_key(std::string key, std::string help, std::size_t ExperimentConfig::*field) {
    return {key, std::move(help),
            [key, field](ExperimentConfig &c, std::string_view v) { c.*field = parse_size(key, v); },
            [field](const ExperimentConfig &c) { return std::to_string(c.*field); }};
}

KeySpec arch_key(std::string key, std::string help, std::size_t ArchitectureSpec::*field) {
    return {key, std::move(help),
            [key, field](ExperimentConfig &c, std::string_view v) { c.arch.*field = parse_size(key, v); },
            [field](const ExperimentConfig &c) { return std::to_string(c.arch.*field); }};
}

const std::vector<KeySpec> &key_table() {
    static const std::vector<KeySpec> table = [] {
        std::vector<KeySpec> t;
        t.push_back({"dataset", "mnist, fashion_mnist, cifar10 or synthetic",
                     [](ExperimentConfig &c, std::string_view v) {
                         try {
                             c.dataset = parse_dataset_kind(trim(v));
                         } catch (const DataError &e) {
                             throw ConfigError(e.what());
                         }
                     },
                     [](const ExperimentConfig &c) { return std::string(to_string(c.dataset)); }});
        t.push_back({"data_dir", "dataset root directory",
                     [](ExperimentConfig &c, std::string_view v) { c.data_dir = std::string(trim(v)); },
                     [](const ExperimentConfig &c) { return c.data_dir.string(); }});
        t.push_back({"classes", "comma-separated class subset, relabeled in order (empty: all)",
                     [](ExperimentConfig &c, std::string_view v) {
                         c.classes.clear();
                         for (auto item : split_list(v)) c.classes.push_back(parse_number<int>("classes", item));
                     },
                     [](const ExperimentConfig &c) { return join(c.classes); }});
        t.push_back(size_key("synthetic_train", "synthetic training set size", &ExperimentConfig::synthetic_train));
        t.push_back(size_key("synthetic_test", "synthetic test set size", &ExperimentConfig::synthetic_test));
        t.push_back({"framework", "qsl, qfedavg or standalone",
                     [](ExperimentConfig &c, std::string_view v) { c.framework = parse_framework(trim(v)); },
                     [](const ExperimentConfig &c) { return std::string(to_string(c.framework)); }});
        t.push_back({"transport", "inproc or socket",
                     [](ExperimentConfig &c, std::string_view v) {
                         try {
                             c.transport = parse_transport_kind(trim(v));
                         } catch (const std::exception &e) {
                             throw ConfigError(e.what());
                         }
                     },
                     [](const ExperimentConfig &c) { return std::string(to_string(c.transport)); }});
        t.push_back({"pooling", "c2pool, avg or none",
                     [](ExperimentConfig &c, std::string_view v) {
                         try {
                             c.arch.pooling = parse_pooling_mode(trim(v));
                         } catch (const QuanvError &e) {
                             throw ConfigError(e.what());
                         }
                     },
                     [](const ExperimentConfig &c) { return std::string(to_string(c.arch.pooling)); }});
        t.push_back({"pooling_weights", "probability or amplitude",
                     [](ExperimentConfig &c, std::string_view v) { c.arch.weights = parse_weights(trim(v)); },
                     [](const ExperimentConfig &c) {
                         return std::string(c.arch.weights == PoolingWeights::Probability ? "probability"
                                                                                          : "amplitude");
                     }});
        t.push_back(arch_key("image_side", "images are resized to side x side", &ArchitectureSpec::image_side));
        t.push_back(arch_key("kernel", "local patch size", &ArchitectureSpec::kernel));
        t.push_back(arch_key("stride", "local patch stride", &ArchitectureSpec::stride));
        t.push_back(arch_key("qubits", "qubits per local filter", &ArchitectureSpec::qubits));
        t.push_back(arch_key("filters", "local filters", &ArchitectureSpec::filters));
        t.push_back(arch_key("filter_depth", "ansatz layers per local block", &ArchitectureSpec::filter_depth));
        t.push_back(arch_key("pooling_depth", "ansatz layers per pooling block", &ArchitectureSpec::pooling_depth));
        t.push_back(arch_key("server_kernel", "server patch size", &ArchitectureSpec::server_kernel));
        t.push_back(arch_key("server_stride", "server patch stride", &ArchitectureSpec::server_stride));
        t.push_back(arch_key("server_qubits", "qubits per server filter", &ArchitectureSpec::server_qubits));
        t.push_back(arch_key("server_filters", "server filters", &ArchitectureSpec::server_filters));
        t.push_back(arch_key("server_filter_depth", "ansatz layers per server block",
                             &ArchitectureSpec::server_filter_depth));
        t.push_back(arch_key("classifier_qubits", "classifier qubits", &ArchitectureSpec::classifier_qubits));
        t.push_back(arch_key("classifier_depth", "ansatz layers per classifier block",
                             &ArchitectureSpec::classifier_depth));
        t.push_back(size_key("clients", "number of clients K", &ExperimentConfig::clients));
        t.push_back(size_key("samples_per_client", "training samples per client",
                             &ExperimentConfig::samples_per_client));
        t.push_back(size_key("batch_size", "minibatch size", &ExperimentConfig::batch_size));
        t.push_back(size_key("epochs", "epochs (communication rounds for qfedavg)", &ExperimentConfig::epochs));
        t.push_back(size_key("local_iters", "qfedavg local iterations per round", &ExperimentConfig::local_iters));
        t.push_back({"learning_rate", "Adagrad learning rate",
                     [](ExperimentConfig &c, std::string_view v) {
                         c.learning_rate = parse_number<double>("learning_rate", v);
                     },
                     [](const ExperimentConfig &c) { return format_double(c.learning_rate); }});
        t.push_back({"seed", "root seed",
                     [](ExperimentConfig &c, std::string_view v) { c.seed = parse_number<std::uint64_t>("seed", v); },
                     [](const ExperimentConfig &c) { return std::to_string(c.seed); }});
        t.push_back({"seeds", "comma-separated seeds for repeated runs (empty: seed)",
                     [](ExperimentConfig &c, std::string_view v) {
                         c.seeds.clear();
                         for (auto item : split_list(v)) c.seeds.push_back(parse_number<std::uint64_t>("seeds", item));
                     },
                     [](const ExperimentConfig &c) { return join(c.seeds); }});
        t.push_back(size_key("test_samples", "test samples evaluated (0: all)", &ExperimentConfig::test_samples));
        t.push_back(size_key("eval_every", "evaluate on the test split every n epochs", &ExperimentConfig::eval_every));
        t.push_back({"target_accuracy", "stop once test top-1 reaches this (0: never)",
                     [](ExperimentConfig &c, std::string_view v) {
                         c.target_accuracy = parse_number<double>("target_accuracy", v);
                     },
                     [](const ExperimentConfig &c) { return format_double(c.target_accuracy); }});
        t.push_back({"record_wall_time", "write elapsed time to the metrics (false: 0)",
                     [](ExperimentConfig &c, std::string_view v) {
                         c.record_wall_time = parse_bool("record_wall_time", v);
                     },
                     [](const ExperimentConfig &c) { return std::string(c.record_wall_time ? "true" : "false"); }});
        t.push_back(size_key("threads", "worker threads", &ExperimentConfig::threads));
        t.push_back({"output_dir", "run output directory",
                     [](ExperimentConfig &c, std::string_view v) { c.output_dir = std::string(trim(v)); },
                     [](const ExperimentConfig &c) { return c.output_dir.string(); }});
        return t;
    }();
    return table;
}

const KeySpec &find_key(std::string_view key) {
    static const std::unordered_map<std::string, std::size_t> index = [] {
        std::unordered_map<std::string, std::size_t> m;
        const auto &t = key_table();
        for (std::size_t i = 0; i < t.size(); ++i) m.emplace(t[i].key, i);
        return m;
    }();
    const auto it = index.find(std::string(key));
    if (it == index.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
    return key_table()[it->second];
}

}  // namespace

void ExperimentConfig::validate() const {
    auto positive = [](std::size_t v, const char *name) {
        if (v == 0) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(clients, "clients");
    positive(samples_per_client, "samples_per_client");
    positive(batch_size, "batch_size");
    positive(epochs, "epochs");
    positive(local_iters, "local_iters");
    positive(eval_every, "eval_every");
    positive(threads, "threads");
    positive(arch.image_side, "image_side");
    positive(arch.kernel, "kernel");
    positive(arch.stride, "stride");
    positive(arch.qubits, "qubits");
    positive(arch.filters, "filters");
    positive(arch.filter_depth, "filter_depth");
    positive(arch.classifier_qubits, "classifier_qubits");
    positive(arch.classifier_depth, "classifier_depth");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (target_accuracy < 0.0 || target_accuracy > 1.0) throw ConfigError("target_accuracy must lie in [0, 1]");
    if (batch_size > samples_per_client) throw ConfigError("batch_size exceeds samples_per_client");
    if (framework == Framework::Standalone && clients != 1) {
        throw ConfigError("standalone training uses exactly one client");
    }
    if (classes.size() == 1) throw ConfigError("a class subset needs at least two classes");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j)
            if (classes[i] == classes[j]) throw ConfigError("duplicate class in subset");
    }
}

const std::vector<std::string> &config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto &spec : key_table()) k.push_back(spec.key);
        return k;
    }();
    return keys;
}

std::string_view config_key_help(std::string_view key) { return find_key(key).help; }

void set_config_value(ExperimentConfig &config, std::string_view key, std::string_view value) {
    find_key(trim(key)).set(config, value);
}

std::string get_config_value(const ExperimentConfig &config, std::string_view key) {
    return find_key(trim(key)).get(config);
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        try {
            set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError &e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

ExperimentConfig load_config(const std::filesystem::path &path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_config(text.str(), std::move(base));
    } catch (const ConfigError &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string to_text(const ExperimentConfig &config) {
    std::string out;
    for (const auto &spec : key_table()) out += spec.key + " = " + spec.get(config) + "\n";
    return out;
}

}  // namespace qsplit
