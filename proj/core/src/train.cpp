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

#include "qsplit/train.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "qsplit/parallel.hpp"

namespace qsplit {

std::string metrics_csv_header() { return "epoch,split,loss_bce,loss_par,top1,upload_bytes,download_bytes,wall_ms"; }

std::string metrics_csv(const std::vector<MetricsRow> &rows) {
    std::ostringstream out;
    out << metrics_csv_header() << '\n' << std::setprecision(17);
    for (const auto &r : rows) {
        out << r.epoch << ',' << r.split << ',' << r.loss_bce << ',' << r.loss_par << ',' << r.top1 << ','
            << r.upload_bytes << ',' << r.download_bytes << ',' << r.wall_ms << '\n';
    }
    return out.str();
}

ExperimentData load_experiment_data(const ExperimentConfig &config) {
    ExperimentData data;
    const std::size_t side = config.arch.image_side;
    if (config.dataset == DatasetKind::Synthetic) {
        data.train = make_synthetic(config.synthetic_train, side, 1, 10, 1);
        data.test = make_synthetic(config.synthetic_test, side, 1, 10, 2);
    } else {
        data.train = load_dataset(config.dataset, config.data_dir, true, side);
        data.test = load_dataset(config.dataset, config.data_dir, false, side);
    }
    if (!config.classes.empty()) {
        data.train = select_classes(data.train, config.classes);
        data.test = select_classes(data.test, config.classes);
    }
    return data;
}

ArchitectureSpec resolve_architecture(const ExperimentConfig &config, const Dataset &train) {
    ArchitectureSpec arch = config.arch;
    arch.num_classes = train.num_classes;
    if (!train.samples.empty()) arch.channels_in = train.samples.front().image.channels;
    return arch;
}

namespace {

using Clock = std::chrono::steady_clock;

/// Message delivery that goes through a transport when there is one and
/// through plain per-client queues otherwise. Either way the payload bytes
/// are identical, so runs with and without a transport compute the same
/// numbers.
class Wire {
  public:
    Wire(Transport *transport, std::size_t clients) : transport_(transport), up_(clients), down_(clients) {}

    void client_send(std::size_t k, TrainMessage msg) {
        if (transport_) {
            transport_->client_send(k, msg);
        } else {
            up_[k].push_back(std::move(msg));
        }
    }
    void server_send(std::size_t k, TrainMessage msg) {
        if (transport_) {
            transport_->server_send(k, msg);
        } else {
            down_[k].push_back(std::move(msg));
        }
    }
    TrainMessage server_receive(std::size_t k, MessageKind kind, std::uint32_t round) {
        return check(transport_ ? transport_->server_receive(k) : pop(up_[k]), k, kind, round);
    }
    TrainMessage client_receive(std::size_t k, MessageKind kind, std::uint32_t round) {
        return check(transport_ ? transport_->client_receive(k) : pop(down_[k]), k, kind, round);
    }

    std::uint64_t payload_total(Direction d) const { return transport_ ? transport_->ledger().payload_total(d) : 0; }

  private:
    static TrainMessage pop(std::deque<TrainMessage> &q) {
        if (q.empty()) throw ProtocolError("expected a message, queue is empty");
        TrainMessage m = std::move(q.front());
        q.pop_front();
        return m;
    }
    static TrainMessage check(TrainMessage m, std::size_t k, MessageKind kind, std::uint32_t round) {
        if (m.kind != kind || m.client_id != k || m.round != round) {
            throw ProtocolError("expected " + std::string(to_string(kind)) + " from client " + std::to_string(k) +
                                " round " + std::to_string(round) + ", got " + std::string(to_string(m.kind)) +
                                " from client " + std::to_string(m.client_id) + " round " +
                                std::to_string(m.round));
        }
        return m;
    }

    Transport *transport_;
    std::vector<std::deque<TrainMessage>> up_;
    std::vector<std::deque<TrainMessage>> down_;
};

struct Client {
    LocalModel model;
    Adagrad opt;
    std::vector<std::size_t> shard;
    Rng rng;
};

struct Server {
    ServerModel model;
    Adagrad opt;
};

std::vector<std::size_t> epoch_order(const std::vector<std::size_t> &shard, const Rng &rng, std::size_t epoch) {
    std::vector<std::size_t> order = shard;
    Rng r = rng.split("epoch").split(epoch);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[r.below(i)]);
    return order;
}

std::vector<std::size_t> batch_at(const std::vector<std::size_t> &order, std::size_t step, std::size_t batch) {
    const std::size_t begin = step * batch;
    const std::size_t end = std::min(order.size(), begin + batch);
    return {order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(end)};
}

std::size_t steps_per_epoch(const ExperimentConfig &config) {
    return (config.samples_per_client + config.batch_size - 1) / config.batch_size;
}

struct ClientBatch {
    std::vector<LocalForward> forwards;
    Bytes features;
    Bytes labels;
};

ClientBatch client_forward(const LocalModel &model, const Dataset &data, const std::vector<std::size_t> &batch) {
    ClientBatch out;
    std::vector<double> flat;
    std::vector<int> labels;
    for (std::size_t idx : batch) {
        out.forwards.push_back(model.forward_cached(data.samples[idx].image));
        const auto &v = out.forwards.back().map.values;
        flat.insert(flat.end(), v.begin(), v.end());
        labels.push_back(data.samples[idx].label);
    }
    out.features = encode_floats(flat);
    out.labels = encode_labels(labels);
    return out;
}

struct ServerBatch {
    GradVector grad;  // flat [qcnn | classifier]
    Bytes feature_grads;
    double bce = 0.0;
    double par = 0.0;
    std::size_t correct = 0;
    std::size_t count = 0;
};

ServerBatch server_process(const ServerModel &server, const LocalModel &shape, const Bytes &features,
                           const Bytes &label_bytes, std::size_t threads) {
    const std::vector<int> labels = decode_labels(label_bytes);
    const std::size_t b = labels.size();
    const std::size_t h = shape.map_height(), w = shape.map_width(), c = shape.map_channels();
    const std::size_t per = h * w * c;
    if (b == 0) throw ProtocolError("empty label upload");
    if (features.size() != 4 * per * b) {
        throw ProtocolError("feature upload of " + std::to_string(features.size()) + " bytes for " +
                            std::to_string(b) + " samples of " + std::to_string(4 * per) + " bytes");
    }
    const std::vector<double> flat = decode_floats(features, per * b);
    std::vector<ServerSampleGrad> grads(b);
    parallel_for(b, threads, [&](std::size_t i) {
        FeatureMap map(h, w, c);
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(i * per),
                  flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * per), map.values.begin());
        grads[i] = server.backprop(map, labels[i], 1.0 / static_cast<double>(b));
    });
    ServerBatch out;
    out.grad.assign(server.param_count(), 0.0);
    std::vector<double> fgrads;
    fgrads.reserve(per * b);
    for (std::size_t i = 0; i < b; ++i) {
        const auto &g = grads[i];
        for (std::size_t j = 0; j < g.qcnn.size(); ++j) out.grad[j] += g.qcnn[j];
        for (std::size_t j = 0; j < g.classifier.size(); ++j) out.grad[g.qcnn.size() + j] += g.classifier[j];
        fgrads.insert(fgrads.end(), g.feature_grad.values.begin(), g.feature_grad.values.end());
        out.bce += g.loss.bce;
        out.par += g.loss.par;
        if (top1(g.probs, server.num_classes()) == static_cast<std::size_t>(labels[i])) ++out.correct;
    }
    out.count = b;
    out.feature_grads = encode_floats(fgrads);
    return out;
}

GradVector client_backward(const LocalModel &model, const std::vector<LocalForward> &forwards, const Bytes &grads) {
    const std::size_t per = model.map_height() * model.map_width() * model.map_channels();
    if (grads.size() != 4 * per * forwards.size()) throw ProtocolError("feature gradient payload has the wrong size");
    const std::vector<double> flat = decode_floats(grads, per * forwards.size());
    GradVector total(model.param_count(), 0.0);
    for (std::size_t i = 0; i < forwards.size(); ++i) {
        FeatureMap up = forwards[i].map;
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(i * per),
                  flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * per), up.values.begin());
        const GradVector g = model.backprop(forwards[i], up);
        for (std::size_t j = 0; j < total.size(); ++j) total[j] += g[j];
    }
    return total;
}

void apply_server_step(Server &server, GradVector grad) {
    ParamVector flat = server.model.flat_params();
    server.opt.step(flat, grad);
    server.model.set_flat_params(flat);
}

struct EvalResult {
    double bce = 0.0;
    double par = 0.0;
    double top1 = 0.0;
};

EvalResult evaluate(const std::vector<const LocalModel *> &locals, const std::vector<const ServerModel *> &servers,
                    const Dataset &test, std::size_t limit, std::size_t threads) {
    const std::size_t n = limit == 0 ? test.size() : std::min(limit, test.size());
    if (n == 0) throw DataError("empty test split");
    EvalResult mean;
    for (std::size_t k = 0; k < locals.size(); ++k) {
        std::vector<LossBreakdown> losses(n);
        std::vector<char> hit(n, 0);
        parallel_for(n, threads, [&](std::size_t i) {
            FeatureMap map = locals[k]->forward(test.samples[i].image);
            map.values = quantize_f32(map.values);
            const auto probs = servers[k]->classify(map);
            losses[i] = loss(probs, test.samples[i].label, servers[k]->num_classes());
            hit[i] = top1(probs, servers[k]->num_classes()) == static_cast<std::size_t>(test.samples[i].label);
        });
        double bce = 0.0, par = 0.0, correct = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            bce += losses[i].bce;
            par += losses[i].par;
            correct += hit[i];
        }
        mean.bce += bce / static_cast<double>(n);
        mean.par += par / static_cast<double>(n);
        mean.top1 += correct / static_cast<double>(n);
    }
    const auto kk = static_cast<double>(locals.size());
    mean.bce /= kk;
    mean.par /= kk;
    mean.top1 /= kk;
    return mean;
}

class RunState {
  public:
    RunState(const ExperimentConfig &config, const ExperimentData &data, std::size_t clients, bool with_transport)
        : config_(config), data_(data), start_(Clock::now()) {
        config_.validate();
        if (data.train.num_classes != data.test.num_classes) throw DataError("train and test class counts differ");
        arch = resolve_architecture(config_, data.train);
        root = Rng(config_.seed);
        const auto shards = shard_iid(data.train, clients, config_.samples_per_client, root.split("shard")());
        for (std::size_t k = 0; k < clients; ++k) {
            Rng rng = root.split("client").split(k);
            LocalModel model = LocalModel::build(arch);
            Rng init = rng.split("init");
            model.bank.init_params(init);
            Adagrad opt(model.param_count(), config_.learning_rate);
            clients_.push_back(Client{std::move(model), std::move(opt), shards[k].indices, rng});
        }
        if (with_transport) transport_ = make_transport(config_.transport, clients);
        wire = std::make_unique<Wire>(transport_.get(), clients);
    }

    ServerModel new_server() const {
        const auto &m = clients_.front().model;
        ServerModel s = ServerModel::build(arch, m.map_height(), m.map_width(), m.map_channels());
        Rng init = root.split("server");
        s.init_params(init);
        return s;
    }

    std::vector<Client> &clients() { return clients_; }
    const ExperimentConfig &config() const { return config_; }
    const Dataset &train() const { return data_.train; }
    const Dataset &test() const { return data_.test; }

    std::uint64_t wall_ms() const {
        if (!config_.record_wall_time) return 0;
        return static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start_).count());
    }

    /// Appends the epoch's rows; returns true when training should stop.
    bool log_epoch(std::size_t epoch, double bce_sum, double par_sum, std::size_t correct, std::size_t count,
                   const std::vector<const LocalModel *> &locals, const std::vector<const ServerModel *> &servers) {
        MetricsRow train_row;
        train_row.epoch = epoch;
        train_row.split = "train";
        train_row.loss_bce = bce_sum / static_cast<double>(count);
        train_row.loss_par = par_sum / static_cast<double>(count);
        train_row.top1 = static_cast<double>(correct) / static_cast<double>(count);
        train_row.upload_bytes = wire->payload_total(Direction::Upload);
        train_row.download_bytes = wire->payload_total(Direction::Download);
        train_row.wall_ms = wall_ms();
        result.rows.push_back(train_row);
        result.epochs_run = epoch;

        const bool last = epoch == config_.epochs;
        if (epoch % config_.eval_every != 0 && !last) return false;
        const EvalResult ev = evaluate(locals, servers, data_.test, config_.test_samples, config_.threads);
        MetricsRow test_row = train_row;
        test_row.split = "test";
        test_row.loss_bce = ev.bce;
        test_row.loss_par = ev.par;
        test_row.top1 = ev.top1;
        test_row.wall_ms = wall_ms();
        result.rows.push_back(test_row);
        result.final_test_top1 = ev.top1;
        result.best_test_top1 = std::max(result.best_test_top1, ev.top1);
        return config_.target_accuracy > 0.0 && ev.top1 >= config_.target_accuracy;
    }

    RunResult finish(const ServerModel &server) {
        const auto &m = clients_.front().model;
        result.local_param_count = m.param_count();
        result.server_param_count = server.param_count();
        result.feature_payload_bytes = ledger_cost_per_feature(m.map_width(), m.map_height(), m.map_channels());
        if (transport_) {
            result.ledger = transport_->ledger().snapshot();
            result.ledger_csv = transport_->ledger().to_csv();
        } else {
            result.ledger_csv = CommLedger{}.to_csv();
        }
        result.local_params = m.bank.params;
        result.server_params = server.flat_params();
        result.wall_ms = wall_ms();
        return std::move(result);
    }

    ArchitectureSpec arch;
    Rng root{0};
    std::unique_ptr<Wire> wire;
    RunResult result;

  private:
    ExperimentConfig config_;
    const ExperimentData &data_;
    std::vector<Client> clients_;
    std::unique_ptr<Transport> transport_;
    Clock::time_point start_;
};

/// Split training over `clients` clients; no transport for standalone.
RunResult train_split(const ExperimentConfig &config, const ExperimentData &data, std::size_t num_clients,
                      bool with_transport) {
    RunState st(config, data, num_clients, with_transport);
    Server server{st.new_server(), Adagrad(1, config.learning_rate)};
    server.opt = Adagrad(server.model.param_count(), config.learning_rate);
    auto &clients = st.clients();
    const std::size_t steps = steps_per_epoch(config);
    const std::size_t threads = config.threads;
    std::uint32_t round = 0;

    std::vector<const LocalModel *> locals;
    std::vector<const ServerModel *> servers;
    for (const auto &c : clients) {
        locals.push_back(&c.model);
        servers.push_back(&server.model);
    }

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::vector<std::vector<std::size_t>> orders(num_clients);
        for (std::size_t k = 0; k < num_clients; ++k) orders[k] = epoch_order(clients[k].shard, clients[k].rng, epoch);
        double bce = 0.0, par = 0.0;
        std::size_t correct = 0, count = 0;
        for (std::size_t step = 0; step < steps; ++step, ++round) {
            std::vector<ClientBatch> batches(num_clients);
            parallel_for(num_clients, threads, [&](std::size_t k) {
                batches[k] = client_forward(clients[k].model, st.train(), batch_at(orders[k], step, config.batch_size));
                st.wire->client_send(k, {MessageKind::FeatureUpload, static_cast<std::uint32_t>(k), round,
                                         batches[k].features});
                st.wire->client_send(k, {MessageKind::LabelUpload, static_cast<std::uint32_t>(k), round,
                                         batches[k].labels});
            });

            GradVector server_grad(server.model.param_count(), 0.0);
            for (std::size_t k = 0; k < num_clients; ++k) {
                const auto feats = st.wire->server_receive(k, MessageKind::FeatureUpload, round);
                const auto labels = st.wire->server_receive(k, MessageKind::LabelUpload, round);
                ServerBatch sb = server_process(server.model, clients[k].model, feats.payload, labels.payload, threads);
                for (std::size_t j = 0; j < server_grad.size(); ++j) server_grad[j] += sb.grad[j];
                bce += sb.bce;
                par += sb.par;
                correct += sb.correct;
                count += sb.count;
                st.wire->server_send(k, {MessageKind::FeatureGradDownload, static_cast<std::uint32_t>(k), round,
                                         std::move(sb.feature_grads)});
            }
            for (auto &g : server_grad) g /= static_cast<double>(num_clients);
            apply_server_step(server, std::move(server_grad));

            parallel_for(num_clients, threads, [&](std::size_t k) {
                const auto msg = st.wire->client_receive(k, MessageKind::FeatureGradDownload, round);
                const GradVector g = client_backward(clients[k].model, batches[k].forwards, msg.payload);
                clients[k].opt.step(clients[k].model.bank.params, g);
            });
        }
        if (st.log_epoch(epoch, bce, par, correct, count, locals, servers)) break;
    }
    return st.finish(server.model);
}

}  // namespace

RunResult train_qsl(const ExperimentConfig &config, const ExperimentData &data) {
    if (config.clients == 0) throw ConfigError("clients must be positive");
    return train_split(config, data, config.clients, true);
}

RunResult train_standalone(const ExperimentConfig &config, const ExperimentData &data) {
    ExperimentConfig single = config;
    single.clients = 1;
    return train_split(single, data, 1, false);
}

RunResult train_qfedavg(const ExperimentConfig &config, const ExperimentData &data) {
    if (config.clients == 0) throw ConfigError("clients must be positive");
    const std::size_t num_clients = config.clients;
    RunState st(config, data, num_clients, true);
    auto &clients = st.clients();
    const ServerModel global_server = st.new_server();
    const ParamVector global_local = clients.front().model.bank.params;
    std::vector<Server> heads;
    for (auto &c : clients) {
        c.model.bank.params = global_local;
        heads.push_back(Server{global_server, Adagrad(global_server.param_count(), config.learning_rate)});
    }
    const std::size_t local_n = global_local.size();
    const std::size_t server_n = global_server.param_count();
    const std::size_t steps = steps_per_epoch(config);

    std::vector<const LocalModel *> locals{&clients.front().model};
    std::vector<const ServerModel *> servers{&heads.front().model};

    struct Tally {
        double bce = 0.0, par = 0.0;
        std::size_t correct = 0, count = 0;
    };
    // Local iteration counters persist across rounds so each client keeps
    // cycling through its shard.
    std::vector<std::size_t> iter(num_clients, 0);
    for (std::size_t round = 1; round <= config.epochs; ++round) {
        const auto r32 = static_cast<std::uint32_t>(round - 1);
        std::vector<Tally> tallies(num_clients);
        parallel_for(num_clients, config.threads, [&](std::size_t k) {
            Client &c = clients[k];
            Server &head = heads[k];
            for (std::size_t it = 0; it < config.local_iters; ++it, ++iter[k]) {
                const std::size_t epoch = iter[k] / steps + 1;
                const std::size_t step = iter[k] % steps;
                const auto order = epoch_order(c.shard, c.rng, epoch);
                ClientBatch cb = client_forward(c.model, st.train(), batch_at(order, step, config.batch_size));
                ServerBatch sb = server_process(head.model, c.model, cb.features, cb.labels, 1);
                const GradVector g = client_backward(c.model, cb.forwards, sb.feature_grads);
                apply_server_step(head, std::move(sb.grad));
                c.opt.step(c.model.bank.params, g);
                tallies[k].bce += sb.bce;
                tallies[k].par += sb.par;
                tallies[k].correct += sb.correct;
                tallies[k].count += sb.count;
            }
            ParamVector flat = c.model.bank.params;
            const ParamVector sflat = head.model.flat_params();
            flat.insert(flat.end(), sflat.begin(), sflat.end());
            st.wire->client_send(k, {MessageKind::ParamUpload, static_cast<std::uint32_t>(k), r32, encode_floats(flat)});
        });

        std::vector<ParamVector> uploaded;
        for (std::size_t k = 0; k < num_clients; ++k) {
            const auto msg = st.wire->server_receive(k, MessageKind::ParamUpload, r32);
            if (msg.payload.size() != 4 * (local_n + server_n)) {
                throw ProtocolError("parameter upload from client " + std::to_string(k) + " has the wrong size");
            }
            uploaded.push_back(decode_floats(msg.payload, local_n + server_n));
        }
        const Bytes broadcast = encode_floats(fedavg_average(uploaded));
        for (std::size_t k = 0; k < num_clients; ++k) {
            st.wire->server_send(k, {MessageKind::ParamBroadcast, static_cast<std::uint32_t>(k), r32, broadcast});
        }
        for (std::size_t k = 0; k < num_clients; ++k) {
            const auto msg = st.wire->client_receive(k, MessageKind::ParamBroadcast, r32);
            const ParamVector avg = decode_floats(msg.payload, local_n + server_n);
            clients[k].model.bank.params.assign(avg.begin(), avg.begin() + static_cast<std::ptrdiff_t>(local_n));
            heads[k].model.set_flat_params(std::span<const double>(avg).subspan(local_n));
        }

        Tally total;
        for (const auto &t : tallies) {
            total.bce += t.bce;
            total.par += t.par;
            total.correct += t.correct;
            total.count += t.count;
        }
        if (st.log_epoch(round, total.bce, total.par, total.correct, total.count, locals, servers)) break;
    }
    return st.finish(heads.front().model);
}

RunResult run_experiment(const ExperimentConfig &config, const ExperimentData &data) {
    switch (config.framework) {
        case Framework::Qsl: return train_qsl(config, data);
        case Framework::QFedAvg: return train_qfedavg(config, data);
        case Framework::Standalone: return train_standalone(config, data);
    }
    throw ConfigError("unknown framework");
}

LedgerPrediction predict_ledger(const ExperimentConfig &config, const ArchitectureSpec &arch, std::size_t epochs) {
    LedgerPrediction p;
    const LocalModel local = LocalModel::build(arch);
    const std::uint64_t k = config.clients;
    const std::uint64_t e = epochs;
    switch (config.framework) {
        case Framework::Standalone: break;
        case Framework::Qsl: {
            const std::uint64_t cost = ledger_cost_per_feature(local.map_width(), local.map_height(), local.map_channels());
            const std::uint64_t n = config.samples_per_client;
            const std::uint64_t steps = steps_per_epoch(config);
            p.feature_upload = e * k * n * cost;
            p.label_upload = e * k * n;
            p.grad_download = e * k * n * cost;
            p.upload_framing = e * k * steps * 2 * kFrameHeaderBytes;
            p.download_framing = e * k * steps * kFrameHeaderBytes;
            break;
        }
        case Framework::QFedAvg: {
            const ServerModel server =
                ServerModel::build(arch, local.map_height(), local.map_width(), local.map_channels());
            const std::uint64_t bytes = 4 * (local.param_count() + server.param_count());
            p.param_upload = e * k * bytes;
            p.param_broadcast = e * k * bytes;
            p.upload_framing = e * k * kFrameHeaderBytes;
            p.download_framing = e * k * kFrameHeaderBytes;
            break;
        }
    }
    return p;
}

GradVector chained_client_gradient(const LocalModel &local, const ServerModel &server, const Image &image, int label) {
    const LocalForward fwd = local.forward_cached(image);
    const ServerSampleGrad sg = server.backprop(fwd.map, label, 1.0);
    return local.backprop(fwd, sg.feature_grad);
}

double pipeline_loss(const LocalModel &local, const ServerModel &server, const Image &image, int label) {
    return server.sample_loss(local.forward(image), label).total();
}

void write_file_atomic(const std::filesystem::path &path, const std::string &contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << contents;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string run_summary_json(const ExperimentConfig &config, const RunResult &result) {
    std::uint64_t up = 0, down = 0, up_frame = 0, down_frame = 0;
    for (const auto &[key, counter] : result.ledger) {
        if (std::get<1>(key) == Direction::Upload) {
            up += counter.payload_bytes;
            up_frame += counter.framing_bytes;
        } else {
            down += counter.payload_bytes;
            down_frame += counter.framing_bytes;
        }
    }
    nlohmann::ordered_json j;
    j["framework"] = to_string(config.framework);
    j["dataset"] = to_string(config.dataset);
    j["pooling"] = to_string(config.arch.pooling);
    j["transport"] = to_string(config.transport);
    j["clients"] = config.framework == Framework::Standalone ? 1 : config.clients;
    j["samples_per_client"] = config.samples_per_client;
    j["batch_size"] = config.batch_size;
    j["seed"] = config.seed;
    j["epochs_run"] = result.epochs_run;
    j["final_test_top1"] = result.final_test_top1;
    j["best_test_top1"] = result.best_test_top1;
    j["local_param_count"] = result.local_param_count;
    j["server_param_count"] = result.server_param_count;
    j["feature_payload_bytes"] = result.feature_payload_bytes;
    j["upload_payload_bytes"] = up;
    j["download_payload_bytes"] = down;
    j["upload_framing_bytes"] = up_frame;
    j["download_framing_bytes"] = down_frame;
    j["wall_ms"] = result.wall_ms;
    return j.dump(2);
}

void write_run_outputs(const std::filesystem::path &dir, const ExperimentConfig &config, const RunResult &result) {
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / "config.txt", to_text(config));
    write_file_atomic(dir / "metrics.csv", metrics_csv(result.rows));
    write_file_atomic(dir / "ledger.csv", result.ledger_csv);
    write_file_atomic(dir / "summary.json", run_summary_json(config, result) + "\n");
    nlohmann::ordered_json params;
    params["local"] = result.local_params;
    params["server"] = result.server_params;
    write_file_atomic(dir / "params.json", params.dump() + "\n");
}

}  // namespace qsplit
