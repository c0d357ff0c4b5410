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

#include "qsplit/netio.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <sstream>
#include <thread>

namespace qsplit {

std::string_view to_string(MessageKind kind) {
    switch (kind) {
        case MessageKind::FeatureUpload: return "feature_upload";
        case MessageKind::LabelUpload: return "label_upload";
        case MessageKind::FeatureGradDownload: return "feature_grad_download";
        case MessageKind::ParamUpload: return "param_upload";
        case MessageKind::ParamBroadcast: return "param_broadcast";
        case MessageKind::Control: return "control";
    }
    return "?";
}

std::string_view to_string(Direction d) { return d == Direction::Upload ? "upload" : "download"; }

namespace {

void put_u32(Bytes &out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
    return std::uint32_t{b[off]} | (std::uint32_t{b[off + 1]} << 8) | (std::uint32_t{b[off + 2]} << 16) |
           (std::uint32_t{b[off + 3]} << 24);
}

bool valid_kind(std::uint32_t k) { return k >= 1 && k <= 6; }

}  // namespace

Bytes encode_frame(const TrainMessage &msg) {
    if (msg.payload.size() > kMaxPayloadBytes) throw ProtocolError("payload too large");
    Bytes out;
    out.reserve(kFrameHeaderBytes + msg.payload.size());
    put_u32(out, static_cast<std::uint32_t>(msg.kind));
    put_u32(out, msg.client_id);
    put_u32(out, msg.round);
    put_u32(out, static_cast<std::uint32_t>(msg.payload.size()));
    out.insert(out.end(), msg.payload.begin(), msg.payload.end());
    return out;
}

FrameHeader decode_frame_header(std::span<const std::uint8_t> header) {
    if (header.size() < kFrameHeaderBytes) throw ProtocolError("truncated frame header");
    const std::uint32_t kind = get_u32(header, 0);
    if (!valid_kind(kind)) throw ProtocolError("unknown message kind " + std::to_string(kind));
    FrameHeader h{static_cast<MessageKind>(kind), get_u32(header, 4), get_u32(header, 8), get_u32(header, 12)};
    if (h.payload_len > kMaxPayloadBytes) throw ProtocolError("declared payload length too large");
    return h;
}

TrainMessage decode_frame(std::span<const std::uint8_t> frame) {
    const FrameHeader h = decode_frame_header(frame);
    if (frame.size() != kFrameHeaderBytes + h.payload_len) {
        throw ProtocolError("frame length " + std::to_string(frame.size()) + " does not match header (" +
                            std::to_string(kFrameHeaderBytes + h.payload_len) + ")");
    }
    TrainMessage msg{h.kind, h.client_id, h.round, {}};
    msg.payload.assign(frame.begin() + kFrameHeaderBytes, frame.end());
    return msg;
}

Bytes encode_floats(std::span<const double> values) {
    Bytes out;
    out.reserve(4 * values.size());
    for (double v : values) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    return out;
}

std::vector<double> decode_floats(std::span<const std::uint8_t> bytes, std::size_t count) {
    if (bytes.size() != 4 * count) {
        throw ProtocolError("float payload is " + std::to_string(bytes.size()) + " bytes, expected " +
                            std::to_string(4 * count));
    }
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = std::bit_cast<float>(get_u32(bytes, 4 * i));
    return out;
}

Bytes encode_feature_map(const FeatureMap &map) { return encode_floats(map.values); }

FeatureMap decode_feature_map(std::span<const std::uint8_t> bytes, std::size_t height, std::size_t width,
                              std::size_t channels) {
    FeatureMap map(height, width, channels);
    map.values = decode_floats(bytes, height * width * channels);
    return map;
}

Bytes encode_labels(std::span<const int> labels) {
    Bytes out;
    out.reserve(labels.size());
    for (int l : labels) {
        if (l < 0 || l > 255) throw ProtocolError("label " + std::to_string(l) + " does not fit one byte");
        out.push_back(static_cast<std::uint8_t>(l));
    }
    return out;
}

std::vector<int> decode_labels(std::span<const std::uint8_t> bytes) { return {bytes.begin(), bytes.end()}; }

std::vector<double> quantize_f32(std::span<const double> values) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = static_cast<float>(values[i]);
    return out;
}

std::size_t ledger_cost_per_feature(std::size_t width, std::size_t height, std::size_t channels) {
    return 4 * width * height * channels;
}

void CommLedger::record(std::uint32_t client, Direction dir, MessageKind kind, std::uint64_t payload_bytes,
                        std::uint64_t framing_bytes) {
    std::lock_guard lock(mu_);
    auto &c = counters_[{client, dir, kind}];
    c.messages += 1;
    c.payload_bytes += payload_bytes;
    c.framing_bytes += framing_bytes;
}

CommLedger::Counter CommLedger::get(std::uint32_t client, Direction dir, MessageKind kind) const {
    std::lock_guard lock(mu_);
    const auto it = counters_.find({client, dir, kind});
    return it == counters_.end() ? Counter{} : it->second;
}

std::uint64_t CommLedger::payload_total(Direction dir) const {
    std::lock_guard lock(mu_);
    std::uint64_t t = 0;
    for (const auto &[key, c] : counters_)
        if (std::get<1>(key) == dir) t += c.payload_bytes;
    return t;
}

std::uint64_t CommLedger::payload_total(Direction dir, MessageKind kind) const {
    std::lock_guard lock(mu_);
    std::uint64_t t = 0;
    for (const auto &[key, c] : counters_)
        if (std::get<1>(key) == dir && std::get<2>(key) == kind) t += c.payload_bytes;
    return t;
}

std::uint64_t CommLedger::framing_total(Direction dir) const {
    std::lock_guard lock(mu_);
    std::uint64_t t = 0;
    for (const auto &[key, c] : counters_)
        if (std::get<1>(key) == dir) t += c.framing_bytes;
    return t;
}

std::map<CommLedger::Key, CommLedger::Counter> CommLedger::snapshot() const {
    std::lock_guard lock(mu_);
    return counters_;
}

std::string CommLedger::to_csv() const {
    std::ostringstream out;
    out << "client,direction,kind,messages,payload_bytes,framing_bytes\n";
    for (const auto &[key, c] : snapshot()) {
        out << std::get<0>(key) << ',' << to_string(std::get<1>(key)) << ',' << to_string(std::get<2>(key)) << ','
            << c.messages << ',' << c.payload_bytes << ',' << c.framing_bytes << '\n';
    }
    return out.str();
}

void Transport::check_client(std::size_t client) const {
    if (client >= num_clients_) {
        throw TransportError("client " + std::to_string(client) + " out of range (" + std::to_string(num_clients_) +
                             " links)");
    }
}

void Transport::client_send(std::size_t client, const TrainMessage &msg) {
    check_client(client);
    Bytes frame = encode_frame(msg);
    ledger_.record(static_cast<std::uint32_t>(client), Direction::Upload, msg.kind, msg.payload.size(),
                   kFrameHeaderBytes);
    write_frame(client, Direction::Upload, std::move(frame));
}

TrainMessage Transport::server_receive(std::size_t client) {
    check_client(client);
    return decode_frame(read_frame(client, Direction::Upload));
}

void Transport::server_send(std::size_t client, const TrainMessage &msg) {
    check_client(client);
    Bytes frame = encode_frame(msg);
    ledger_.record(static_cast<std::uint32_t>(client), Direction::Download, msg.kind, msg.payload.size(),
                   kFrameHeaderBytes);
    write_frame(client, Direction::Download, std::move(frame));
}

TrainMessage Transport::client_receive(std::size_t client) {
    check_client(client);
    return decode_frame(read_frame(client, Direction::Download));
}

TransportKind parse_transport_kind(std::string_view s) {
    if (s == "inproc") return TransportKind::InProc;
    if (s == "socket") return TransportKind::Socket;
    throw std::invalid_argument("unknown transport '" + std::string(s) + "' (expected inproc or socket)");
}

std::string_view to_string(TransportKind kind) { return kind == TransportKind::InProc ? "inproc" : "socket"; }

namespace {

struct QueueItem {
    enum class Status { Frame, Closed, Malformed } status = Status::Frame;
    Bytes frame;
    std::string error;
};

class FrameQueue {
  public:
    void push(QueueItem item) {
        {
            std::lock_guard lock(mu_);
            items_.push_back(std::move(item));
        }
        cv_.notify_one();
    }

    Bytes pop() {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [this] { return !items_.empty(); });
        QueueItem item = std::move(items_.front());
        switch (item.status) {
            case QueueItem::Status::Frame:
                items_.pop_front();
                return std::move(item.frame);
            case QueueItem::Status::Closed:
                // Leave the marker in place so later reads fail the same way.
                throw TransportError("connection closed: " + item.error);
            case QueueItem::Status::Malformed:
                throw ProtocolError(item.error);
        }
        throw ProtocolError("corrupt queue item");
    }

  private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<QueueItem> items_;
};

class InProcTransport final : public Transport {
  public:
    explicit InProcTransport(std::size_t n) : Transport(n), up_(n), down_(n) {}

  protected:
    void write_frame(std::size_t client, Direction dir, Bytes frame) override {
        (dir == Direction::Upload ? up_ : down_)[client].push({QueueItem::Status::Frame, std::move(frame), {}});
    }
    Bytes read_frame(std::size_t client, Direction dir) override {
        return (dir == Direction::Upload ? up_ : down_)[client].pop();
    }

  private:
    std::vector<FrameQueue> up_;
    std::vector<FrameQueue> down_;
};

std::string errno_text(const char *what) { return std::string(what) + ": " + std::strerror(errno); }

// Returns false on orderly EOF before any byte was read.
bool read_exact(int fd, std::uint8_t *dst, std::size_t n, bool allow_eof) {
    std::size_t got = 0;
    while (got < n) {
        const ssize_t r = ::recv(fd, dst + got, n - got, 0);
        if (r == 0) {
            if (got == 0 && allow_eof) return false;
            throw TransportError("peer closed mid-frame");
        }
        if (r < 0) {
            if (errno == EINTR) continue;
            throw TransportError(errno_text("recv"));
        }
        got += static_cast<std::size_t>(r);
    }
    return true;
}

class SocketEnd {
  public:
    explicit SocketEnd(int fd) : fd_(fd) {
        const int one = 1;
        ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        reader_ = std::jthread([this] { read_loop(); });
    }
    SocketEnd(const SocketEnd &) = delete;
    SocketEnd &operator=(const SocketEnd &) = delete;

    ~SocketEnd() {
        ::shutdown(fd_, SHUT_RDWR);
        if (reader_.joinable()) reader_.join();
        ::close(fd_);
    }

    void write(const Bytes &frame) {
        std::lock_guard lock(write_mu_);
        std::size_t sent = 0;
        while (sent < frame.size()) {
            const ssize_t r = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
            if (r < 0) {
                if (errno == EINTR) continue;
                throw TransportError(errno_text("send"));
            }
            sent += static_cast<std::size_t>(r);
        }
    }

    Bytes read() { return incoming_.pop(); }

  private:
    void read_loop() {
        try {
            for (;;) {
                Bytes frame(kFrameHeaderBytes);
                if (!read_exact(fd_, frame.data(), kFrameHeaderBytes, true)) {
                    incoming_.push({QueueItem::Status::Closed, {}, "end of stream"});
                    return;
                }
                FrameHeader h{};
                try {
                    h = decode_frame_header(frame);
                } catch (const ProtocolError &e) {
                    incoming_.push({QueueItem::Status::Malformed, {}, e.what()});
                    return;
                }
                frame.resize(kFrameHeaderBytes + h.payload_len);
                if (h.payload_len > 0) read_exact(fd_, frame.data() + kFrameHeaderBytes, h.payload_len, false);
                incoming_.push({QueueItem::Status::Frame, std::move(frame), {}});
            }
        } catch (const TransportError &e) {
            incoming_.push({QueueItem::Status::Closed, {}, e.what()});
        }
    }

    int fd_;
    std::mutex write_mu_;
    FrameQueue incoming_;
    std::jthread reader_;
};

class SocketTransport final : public Transport {
  public:
    explicit SocketTransport(std::size_t n) : Transport(n) {
        const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
        if (listener < 0) throw TransportError(errno_text("socket"));
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = 0;
        socklen_t len = sizeof(addr);
        if (::bind(listener, reinterpret_cast<sockaddr *>(&addr), sizeof(addr)) < 0 ||
            ::listen(listener, static_cast<int>(n) + 1) < 0 ||
            ::getsockname(listener, reinterpret_cast<sockaddr *>(&addr), &len) < 0) {
            const std::string err = errno_text("listen");
            ::close(listener);
            throw TransportError(err);
        }
        try {
            for (std::size_t k = 0; k < n; ++k) {
                const int c = ::socket(AF_INET, SOCK_STREAM, 0);
                if (c < 0) throw TransportError(errno_text("socket"));
                if (::connect(c, reinterpret_cast<sockaddr *>(&addr), sizeof(addr)) < 0) {
                    const std::string err = errno_text("connect");
                    ::close(c);
                    throw TransportError(err);
                }
                const int s = ::accept(listener, nullptr, nullptr);
                if (s < 0) {
                    const std::string err = errno_text("accept");
                    ::close(c);
                    throw TransportError(err);
                }
                client_ends_.push_back(std::make_unique<SocketEnd>(c));
                server_ends_.push_back(std::make_unique<SocketEnd>(s));
            }
        } catch (...) {
            ::close(listener);
            throw;
        }
        ::close(listener);
    }

  protected:
    void write_frame(std::size_t client, Direction dir, Bytes frame) override {
        (dir == Direction::Upload ? client_ends_ : server_ends_)[client]->write(frame);
    }
    Bytes read_frame(std::size_t client, Direction dir) override {
        return (dir == Direction::Upload ? server_ends_ : client_ends_)[client]->read();
    }

  private:
    std::vector<std::unique_ptr<SocketEnd>> client_ends_;
    std::vector<std::unique_ptr<SocketEnd>> server_ends_;
};

}  // namespace

std::unique_ptr<Transport> make_inproc_transport(std::size_t num_clients) {
    return std::make_unique<InProcTransport>(num_clients);
}

std::unique_ptr<Transport> make_socket_transport(std::size_t num_clients) {
    return std::make_unique<SocketTransport>(num_clients);
}

std::unique_ptr<Transport> make_transport(TransportKind kind, std::size_t num_clients) {
    return kind == TransportKind::InProc ? make_inproc_transport(num_clients) : make_socket_transport(num_clients);
}

TrainMessage transport_roundtrip(Transport &transport, std::size_t client, const TrainMessage &msg) {
    transport.client_send(client, msg);
    return transport.server_receive(client);
}

}  // namespace qsplit
