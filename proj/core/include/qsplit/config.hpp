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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qsplit/dataset.hpp"
#include "qsplit/model.hpp"
#include "qsplit/netio.hpp"

namespace qsplit {

class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class Framework { Qsl, QFedAvg, Standalone };

Framework parse_framework(std::string_view s);
std::string_view to_string(Framework f);

struct ExperimentConfig {
    DatasetKind dataset = DatasetKind::Mnist;
    std::filesystem::path data_dir = "data";
    std::vector<int> classes;  // empty: all classes
    std::size_t synthetic_train = 8192;
    std::size_t synthetic_test = 1024;

    Framework framework = Framework::Qsl;
    TransportKind transport = TransportKind::InProc;
    ArchitectureSpec arch{};

    std::size_t clients = 10;
    std::size_t samples_per_client = 512;
    std::size_t batch_size = 512;
    std::size_t epochs = 1;
    std::size_t local_iters = 10;
    double learning_rate = 1.0;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;  // empty: {seed}

    std::size_t test_samples = 0;  // 0: whole test split
    std::size_t eval_every = 1;
    double target_accuracy = 0.0;  // > 0: stop once test top-1 reaches it
    bool record_wall_time = true;
    std::size_t threads = 1;
    std::filesystem::path output_dir = "runs/default";

    /// Throws ConfigError on any non-positive count or inconsistent setting.
    void validate() const;

    std::vector<std::uint64_t> seed_list() const { return seeds.empty() ? std::vector<std::uint64_t>{seed} : seeds; }
};

/// Recognized keys, in the order to_text() writes them.
const std::vector<std::string> &config_keys();

/// Help text for one key.
std::string_view config_key_help(std::string_view key);

/// Sets one key from its text form. Throws ConfigError on unknown keys or
/// unparsable values.
void set_config_value(ExperimentConfig &config, std::string_view key, std::string_view value);
std::string get_config_value(const ExperimentConfig &config, std::string_view key);

/// Flat text format: one `key = value` per line; `#` starts a comment;
/// lists are comma separated. Later lines override earlier ones.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path &path, ExperimentConfig base = {});

/// Every key with its current value, parseable by parse_config.
std::string to_text(const ExperimentConfig &config);

}  // namespace qsplit
