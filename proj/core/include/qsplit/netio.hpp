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

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "qsplit/image.hpp"

namespace qsplit {

using Bytes = std::vector<std::uint8_t>;

enum class MessageKind : std::uint32_t {
    FeatureUpload = 1,
    LabelUpload = 2,
    FeatureGradDownload = 3,
    ParamUpload = 4,
    ParamBroadcast = 5,
    Control = 6,
};

std::string_view to_string(MessageKind kind);

enum class Direction : std::uint8_t { Upload, Download };

std::string_view to_string(Direction d);

struct TrainMessage {
    MessageKind kind = MessageKind::Control;
    std::uint32_t client_id = 0;
    std::uint32_t round = 0;
    Bytes payload;

    friend bool operator==(const TrainMessage &, const TrainMessage &) = default;
};

/// Malformed frames and payloads. Not retriable.
class ProtocolError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Connection-level failures (peer gone, socket errors). Retriable.
class TransportError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
    bool retriable() const { return true; }
};

/// Frame layout, all fields little-endian uint32:
///   [0] kind  [4] client_id  [8] round  [12] payload length  [16] payload
inline constexpr std::size_t kFrameHeaderBytes = 16;
inline constexpr std::uint32_t kMaxPayloadBytes = 1U << 28;

struct FrameHeader {
    MessageKind kind;
    std::uint32_t client_id;
    std::uint32_t round;
    std::uint32_t payload_len;
};

Bytes encode_frame(const TrainMessage &msg);
FrameHeader decode_frame_header(std::span<const std::uint8_t> header);
TrainMessage decode_frame(std::span<const std::uint8_t> frame);

/// Little-endian IEEE-754 single precision, in order. Values are rounded to
/// float exactly once, here.
Bytes encode_floats(std::span<const double> values);
std::vector<double> decode_floats(std::span<const std::uint8_t> bytes, std::size_t count);

/// Row-major (row, col, channel) floats; 4 * H * W * C bytes.
Bytes encode_feature_map(const FeatureMap &map);
FeatureMap decode_feature_map(std::span<const std::uint8_t> bytes, std::size_t height, std::size_t width,
                              std::size_t channels);

/// One unsigned byte per label.
Bytes encode_labels(std::span<const int> labels);
std::vector<int> decode_labels(std::span<const std::uint8_t> bytes);

/// Round-trips values through single precision, as the wire does.
std::vector<double> quantize_f32(std::span<const double> values);

/// 4 bytes/float * W * H * c_out.
std::size_t ledger_cost_per_feature(std::size_t width, std::size_t height, std::size_t channels);

/// Cumulative per (client, direction, kind) byte counters. Payload and
/// frame-header bytes are tracked separately. Thread-safe.
class CommLedger {
  public:
    struct Counter {
        std::uint64_t messages = 0;
        std::uint64_t payload_bytes = 0;
        std::uint64_t framing_bytes = 0;
    };
    using Key = std::tuple<std::uint32_t, Direction, MessageKind>;

    void record(std::uint32_t client, Direction dir, MessageKind kind, std::uint64_t payload_bytes,
                std::uint64_t framing_bytes);

    Counter get(std::uint32_t client, Direction dir, MessageKind kind) const;
    std::uint64_t payload_total(Direction dir) const;
    std::uint64_t payload_total(Direction dir, MessageKind kind) const;
    std::uint64_t framing_total(Direction dir) const;
    std::map<Key, Counter> snapshot() const;

    /// client,direction,kind,messages,payload_bytes,framing_bytes
    std::string to_csv() const;

  private:
    mutable std::mutex mu_;
    std::map<Key, Counter> counters_;
};

/// Point-to-point links between one server and K clients, with a FIFO per
/// link and direction. Safe for one producer and one consumer per
/// direction. Every send is charged to the ledger.
class Transport {
  public:
    virtual ~Transport() = default;

    std::size_t num_clients() const { return num_clients_; }
    CommLedger &ledger() { return ledger_; }
    const CommLedger &ledger() const { return ledger_; }

    void client_send(std::size_t client, const TrainMessage &msg);
    TrainMessage server_receive(std::size_t client);
    void server_send(std::size_t client, const TrainMessage &msg);
    TrainMessage client_receive(std::size_t client);

  protected:
    explicit Transport(std::size_t num_clients) : num_clients_(num_clients) {}

    virtual void write_frame(std::size_t client, Direction dir, Bytes frame) = 0;
    virtual Bytes read_frame(std::size_t client, Direction dir) = 0;

  private:
    void check_client(std::size_t client) const;

    std::size_t num_clients_;
    CommLedger ledger_;
};

enum class TransportKind { InProc, Socket };

TransportKind parse_transport_kind(std::string_view s);
std::string_view to_string(TransportKind kind);

/// In-process queues carrying encoded frames.
std::unique_ptr<Transport> make_inproc_transport(std::size_t num_clients);

/// One loopback TCP connection per client. A reader thread per socket end
/// drains incoming frames into a queue, so sends never wait on the peer.
std::unique_ptr<Transport> make_socket_transport(std::size_t num_clients);

std::unique_ptr<Transport> make_transport(TransportKind kind, std::size_t num_clients);

/// Client-to-server delivery of one message.
TrainMessage transport_roundtrip(Transport &transport, std::size_t client, const TrainMessage &msg);

}  // namespace qsplit
