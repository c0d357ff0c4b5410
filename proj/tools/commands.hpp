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
#include <filesystem>
#include <string>
#include <vector>

#include "qsplit/config.hpp"
#include "qsplit/gradcheck.hpp"

namespace qsplit::cli {

int train(const ExperimentConfig &config);
int ablation(const ExperimentConfig &config, const std::vector<std::string> &modes, bool cost_only);
int sweep_k(const ExperimentConfig &config, const std::vector<std::size_t> &k_values);
int grad_check(const GradCheckOptions &options, double tolerance, bool split_check);
int dump_features(const ExperimentConfig &config, const std::vector<std::size_t> &indices,
                  const std::vector<std::string> &modes, const std::filesystem::path &params_path);
int ledger(const ExperimentConfig &config, bool verify);

}  // namespace qsplit::cli
