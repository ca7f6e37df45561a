#include "edist/proto.hpp"

#include "edist/approx.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstring>
#include <deque>
#include <stdexcept>

#include <json.hpp>

namespace edist {

std::string to_json_string(const NodeSummaryMessage& m) {
    nlohmann::json j;
    j["v"] = m.schema_version;
    j["node_id"] = m.node_id;
    j["summary"] = nlohmann::json::parse(to_json_string(m.summary));
    if (m.sample_digest) {
        j["digest"] = *m.sample_digest;
    }
    return j.dump();
}

NodeSummaryMessage message_from_json_string(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw std::runtime_error("malformed JSON");
    }
    NodeSummaryMessage m;
    if (!j.contains("v") || !j["v"].is_number_integer()) {
        throw std::runtime_error("missing schema version");
    }
    m.schema_version = j["v"].get<int>();
    if (!j.contains("node_id") || !j["node_id"].is_string() ||
        j["node_id"].get<std::string>().empty()) {
        throw std::runtime_error("missing node_id");
    }
    m.node_id = j["node_id"].get<std::string>();
    if (!j.contains("summary") || !j["summary"].is_object()) {
        throw std::runtime_error("missing summary");
    }
    m.summary = summary_from_json_string(j["summary"].dump());
    if (j.contains("digest")) {
        if (!j["digest"].is_string()) {
            throw std::runtime_error("digest must be a string");
        }
        m.sample_digest = j["digest"].get<std::string>();
    }
    return m;
}

std::string Coordinator::handle_line(const std::string& line) {
    auto reject = [](const std::string& error) {
        nlohmann::json j;
        j["ok"] = false;
        j["error"] = error;
        return j.dump();
    };
    NodeSummaryMessage m;
    try {
        m = message_from_json_string(line);
    } catch (const std::exception& e) {
        return reject(e.what());
    }
    if (m.schema_version != SCHEMA_VERSION) {
        return reject("schema mismatch: got " + std::to_string(m.schema_version) +
                      ", want " + std::to_string(SCHEMA_VERSION));
    }
    std::lock_guard<std::mutex> lock(mu_);
    if (!registry_.empty()) {
        const auto& [first_id, first_summary] = *registry_.begin();
        if (first_summary.d != m.summary.d) {
            return reject("dimension mismatch: node '" + m.node_id + "' has d=" +
                          std::to_string(m.summary.d) + ", node '" + first_id +
                          "' has d=" + std::to_string(first_summary.d));
        }
    }
    if (registry_.contains(m.node_id)) {
        return reject("duplicate node_id: " + m.node_id);
    }
    registry_.emplace(m.node_id, std::move(m.summary));
    return nlohmann::json{{"ok", true}}.dump();
}

std::size_t Coordinator::node_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return registry_.size();
}

Registry Coordinator::snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return registry_;
}

HMatrix h_matrix(const Registry& registry, Method method) {
    if (registry.size() < 2) {
        throw std::invalid_argument("need at least 2 nodes");
    }
    HMatrix h;
    h.method = method;
    h.ids.reserve(registry.size());
    std::vector<const MomentSummary*> summaries;
    summaries.reserve(registry.size());
    for (const auto& [id, s] : registry) {
        h.ids.push_back(id);
        summaries.push_back(&s);
    }
    const std::size_t k = h.ids.size();
    h.values.assign(k * k, 0.0);
    h.flags.assign(k * k, EstimateFlags{});
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const DistanceEstimate e = energy_from_summaries(*summaries[i], *summaries[j], method);
            const double v = *e.h;
            h.values[i * k + j] = v;
            h.values[j * k + i] = v;
            h.flags[i * k + j] = e.flags;
            h.flags[j * k + i] = e.flags;
            sum += v;
            sum_sq += v * v;
            ++count;
        }
    }
    h.upper_mean = sum / static_cast<double>(count);
    const double var = sum_sq / static_cast<double>(count) - h.upper_mean * h.upper_mean;
    h.upper_sd = var > 0.0 ? std::sqrt(var) : 0.0;
    return h;
}

std::vector<double> penalty_weights(const HMatrix& h, double lambda0,
                                    const std::function<double(double, double)>& map) {
    if (!(lambda0 > 0.0)) {
        throw std::invalid_argument("lambda0 must be positive");
    }
    std::vector<double> w(h.values.size(), 0.0);
    for (std::size_t i = 0; i < h.values.size(); ++i) {
        w[i] = map(h.values[i], lambda0);
    }
    return w;
}

std::vector<double> penalty_weights(const HMatrix& h, double lambda0) {
    return penalty_weights(h, lambda0,
                           [](double hij, double l0) { return l0 * (1.0 - hij); });
}

std::string to_json_string(const HMatrix& h) {
    nlohmann::json j;
    j["k"] = h.ids.size();
    j["ids"] = h.ids;
    j["method"] = to_string(h.method);
    const std::size_t k = h.ids.size();
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < k; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t jj = 0; jj < k; ++jj) {
            row.push_back(h.values[i * k + jj]);
        }
        rows.push_back(std::move(row));
    }
    j["values"] = std::move(rows);
    nlohmann::json flagged = nlohmann::json::array();
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t jj = i + 1; jj < k; ++jj) {
            const EstimateFlags& f = h.flags[i * k + jj];
            if (f.clamped_nonneg || f.clamped_unit || f.degenerate) {
                flagged.push_back({{"i", h.ids[i]},
                                   {"j", h.ids[jj]},
                                   {"clamped_nonneg", f.clamped_nonneg},
                                   {"clamped_unit", f.clamped_unit},
                                   {"degenerate", f.degenerate}});
            }
        }
    }
    j["flagged_pairs"] = std::move(flagged);
    j["upper_mean"] = h.upper_mean;
    j["upper_sd"] = h.upper_sd;
    return j.dump();
}

std::string registry_to_json_string(const Registry& r) {
    nlohmann::json nodes = nlohmann::json::object();
    for (const auto& [id, s] : r) {
        nodes[id] = nlohmann::json::parse(to_json_string(s));
    }
    return nlohmann::json{{"nodes", std::move(nodes)}}.dump();
}

// ---------------------------------------------------------------------------
// Transports
// ---------------------------------------------------------------------------

namespace {

/// One direction of an in-process connection.
struct LineQueue {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::string> lines;
    bool closed = false;

    void push(const std::string& line) {
        {
            std::lock_guard<std::mutex> lock(mu);
            if (closed) return;
            lines.push_back(line);
        }
        cv.notify_one();
    }

    std::optional<std::string> pop() {
        std::unique_lock<std::mutex> lock(mu);
        cv.wait(lock, [&] { return !lines.empty() || closed; });
        if (lines.empty()) {
            return std::nullopt;
        }
        std::string line = std::move(lines.front());
        lines.pop_front();
        return line;
    }

    void close() {
        {
            std::lock_guard<std::mutex> lock(mu);
            closed = true;
        }
        cv.notify_all();
    }
};

class ChannelStream final : public MessageStream {
public:
    ChannelStream(std::shared_ptr<LineQueue> out, std::shared_ptr<LineQueue> in)
        : out_(std::move(out)), in_(std::move(in)) {}
    ~ChannelStream() override { close(); }

    void send_line(const std::string& line) override { out_->push(line); }
    std::optional<std::string> recv_line() override { return in_->pop(); }
    void close() override {
        out_->close();
        in_->close();
    }

private:
    std::shared_ptr<LineQueue> out_;
    std::shared_ptr<LineQueue> in_;
};

class TcpStream final : public MessageStream {
public:
    explicit TcpStream(int fd) : fd_(fd) {}
    ~TcpStream() override { close(); }

    void send_line(const std::string& line) override {
        std::string framed = line;
        framed.push_back('\n');
        std::size_t off = 0;
        while (off < framed.size()) {
            const ssize_t k = ::send(fd_, framed.data() + off, framed.size() - off, 0);
            if (k <= 0) {
                throw std::runtime_error("socket send failed");
            }
            off += static_cast<std::size_t>(k);
        }
    }

    std::optional<std::string> recv_line() override {
        for (;;) {
            const auto pos = buffer_.find('\n');
            if (pos != std::string::npos) {
                std::string line = buffer_.substr(0, pos);
                buffer_.erase(0, pos + 1);
                if (!line.empty() && line.back() == '\r') {
                    line.pop_back();
                }
                return line;
            }
            char chunk[4096];
            const ssize_t k = ::recv(fd_, chunk, sizeof(chunk), 0);
            if (k == 0) {
                return std::nullopt; // peer closed
            }
            if (k < 0) {
                throw std::runtime_error("socket recv failed");
            }
            buffer_.append(chunk, static_cast<std::size_t>(k));
        }
    }

    void close() override {
        if (fd_ >= 0) {
            ::shutdown(fd_, SHUT_RDWR);
            ::close(fd_);
            fd_ = -1;
        }
    }

private:
    int fd_;
    std::string buffer_;
};

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        throw std::runtime_error("invalid host address: " + host);
    }
    return addr;
}

} // namespace

std::pair<std::unique_ptr<MessageStream>, std::unique_ptr<MessageStream>> make_channel_pair() {
    auto ab = std::make_shared<LineQueue>();
    auto ba = std::make_shared<LineQueue>();
    return {std::make_unique<ChannelStream>(ab, ba), std::make_unique<ChannelStream>(ba, ab)};
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) {
        throw std::runtime_error("cannot create socket");
    }
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr = make_addr(host, port);
    if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    }
    if (::listen(fd_, 64) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw std::runtime_error("cannot read bound port");
    }
    port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() { close(); }

void TcpListener::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

std::unique_ptr<MessageStream> TcpListener::accept() {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) {
        throw std::runtime_error("accept failed");
    }
    return std::make_unique<TcpStream>(fd);
}

std::unique_ptr<MessageStream> tcp_connect(const std::string& host, std::uint16_t port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) {
        throw std::runtime_error("cannot create socket");
    }
    sockaddr_in addr = make_addr(host, port);
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd);
        throw std::runtime_error("cannot connect to " + host + ":" + std::to_string(port));
    }
    return std::make_unique<TcpStream>(fd);
}

void serve_connection(Coordinator& c, MessageStream& stream) {
    for (;;) {
        const auto line = stream.recv_line();
        if (!line) {
            return;
        }
        if (line->empty()) {
            continue;
        }
        stream.send_line(c.handle_line(*line));
    }
}

std::string publish_summary(MessageStream& stream, const NodeSummaryMessage& msg) {
    stream.send_line(to_json_string(msg));
    const auto response = stream.recv_line();
    if (!response) {
        throw std::runtime_error("connection closed before response");
    }
    return *response;
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf, 16);
}

} // namespace edist
