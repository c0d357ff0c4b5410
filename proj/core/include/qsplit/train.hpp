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
#include <map>
#include <string>
#include <vector>

#include "qsplit/config.hpp"
#include "qsplit/dataset.hpp"
#include "qsplit/model.hpp"
#include "qsplit/netio.hpp"

namespace qsplit {

struct MetricsRow {
    std::size_t epoch = 0;
    std::string split;  // "train" or "test"
    double loss_bce = 0.0;
    double loss_par = 0.0;
    double top1 = 0.0;
    std::uint64_t upload_bytes = 0;
    std::uint64_t download_bytes = 0;
    std::uint64_t wall_ms = 0;
};

std::string metrics_csv_header();
std::string metrics_csv(const std::vector<MetricsRow> &rows);

struct RunResult {
    std::vector<MetricsRow> rows;
    std::size_t epochs_run = 0;
    double final_test_top1 = 0.0;
    double best_test_top1 = 0.0;
    std::size_t local_param_count = 0;
    std::size_t server_param_count = 0;
    std::size_t feature_payload_bytes = 0;  // one sample's cut-layer payload
    std::map<CommLedger::Key, CommLedger::Counter> ledger;
    std::string ledger_csv;
    ParamVector local_params;   // client 0
    ParamVector server_params;  // [server qcnn | classifier]
    std::uint64_t wall_ms = 0;
};

/// Training and test splits after class selection and resizing.
struct ExperimentData {
    Dataset train;
    Dataset test;
};

ExperimentData load_experiment_data(const ExperimentConfig &config);

/// Runs config.framework once with config.seed on already loaded data.
RunResult run_experiment(const ExperimentConfig &config, const ExperimentData &data);

RunResult train_qsl(const ExperimentConfig &config, const ExperimentData &data);
RunResult train_qfedavg(const ExperimentConfig &config, const ExperimentData &data);
RunResult train_standalone(const ExperimentConfig &config, const ExperimentData &data);

/// config.arch with the class count and input channels taken from the data.
ArchitectureSpec resolve_architecture(const ExperimentConfig &config, const Dataset &train);

/// Closed-form payload and framing bytes for `epochs` epochs (rounds) of
/// config.framework, summed over clients.
struct LedgerPrediction {
    std::uint64_t feature_upload = 0;
    std::uint64_t label_upload = 0;
    std::uint64_t grad_download = 0;
    std::uint64_t param_upload = 0;
    std::uint64_t param_broadcast = 0;
    std::uint64_t upload_framing = 0;
    std::uint64_t download_framing = 0;

    std::uint64_t upload_payload() const { return feature_upload + label_upload + param_upload; }
    std::uint64_t download_payload() const { return grad_download + param_broadcast; }
};

LedgerPrediction predict_ledger(const ExperimentConfig &config, const ArchitectureSpec &arch, std::size_t epochs);

/// Client gradient of one sample's loss assembled the split way: server
/// feature gradient chained through the client's parameter-shift
/// gradients. No wire quantization.
GradVector chained_client_gradient(const LocalModel &local, const ServerModel &server, const Image &image, int label);

/// Whole-pipeline loss of one sample as a function of the client
/// parameters.
double pipeline_loss(const LocalModel &local, const ServerModel &server, const Image &image, int label);

/// Writes metrics.csv, ledger.csv, summary.json, params.json and
/// config.txt into dir, each through a temporary file and rename.
void write_run_outputs(const std::filesystem::path &dir, const ExperimentConfig &config, const RunResult &result);

/// Summary of one run as a JSON object string.
std::string run_summary_json(const ExperimentConfig &config, const RunResult &result);

void write_file_atomic(const std::filesystem::path &path, const std::string &contents);

}  // namespace qsplit
