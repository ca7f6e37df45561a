#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "edist/empirical.hpp"
#include "edist/moments.hpp"

namespace edist {

inline constexpr int SCHEMA_VERSION = 1;

/// One node's published payload: only summary statistics ever travel.
struct NodeSummaryMessage {
    std::string node_id;
    int schema_version = SCHEMA_VERSION;
    MomentSummary summary;
    std::optional<std::string> sample_digest;
};

/// Wire form: one JSON object per line,
/// {"v":1,"node_id":"...","summary":{...}[,"digest":"..."]}.
std::string to_json_string(const NodeSummaryMessage& m);
NodeSummaryMessage message_from_json_string(const std::string& line);

using Registry = std::map<std::string, MomentSummary>;

/// Symmetric k-by-k matrix of pairwise normalized coefficients with zero
/// diagonal; ids are sorted lexicographically, fixing the row order
/// independently of message arrival order.
struct HMatrix {
    std::vector<std::string> ids;
    std::vector<double> values;        // k*k row-major
    Method method = Method::taylor;
    std::vector<EstimateFlags> flags;  // per entry, k*k
    double upper_mean = 0.0;           // strict upper triangle statistics
    double upper_sd = 0.0;

    std::size_t k() const { return ids.size(); }
    double at(std::size_t i, std::size_t j) const { return values[i * ids.size() + j]; }
};

std::string to_json_string(const HMatrix& h);

/// Pairwise coefficient matrix over a registry snapshot; needs at least two
/// nodes. gaussian_exact and adjusted require d = 1 summaries.
HMatrix h_matrix(const Registry& registry, Method method);

/// Alignment weights w(i,j) = map(H(i,j)); the default mapping is
/// lambda0 * (1 - H), symmetric with w in [0, lambda0].
std::vector<double> penalty_weights(const HMatrix& h, double lambda0);
std::vector<double> penalty_weights(const HMatrix& h, double lambda0,
                                    const std::function<double(double, double)>& map);

/// Serialized registry dump {"nodes":{id: summary,...}} for optional persistence.
std::string registry_to_json_string(const Registry& r);

/// Accepts node messages, enforcing unique ids, matching schema version and
/// matching dimension; every update is serialized through one mutex.
class Coordinator {
public:
    /// Handles one raw message line; returns the response line:
    /// {"ok":true} or {"ok":false,"error":"..."}.
    std::string handle_line(const std::string& line);

    std::size_t node_count() const;
    Registry snapshot() const;

private:
    mutable std::mutex mu_;
    Registry registry_;
};

/// A reliable, ordered line transport.
class MessageStream {
public:
    virtual ~MessageStream() = default;
    virtual void send_line(const std::string& line) = 0;
    /// Blocks for the next line; std::nullopt once the peer closed.
    virtual std::optional<std::string> recv_line() = 0;
    virtual void close() = 0;
};

/// In-process transport: a connected pair of line queues.
std::pair<std::unique_ptr<MessageStream>, std::unique_ptr<MessageStream>> make_channel_pair();

/// TCP transport over the same interface.
class TcpListener {
public:
    /// Binds host:port; port 0 picks an ephemeral port.
    TcpListener(const std::string& host, std::uint16_t port);
    ~TcpListener();
    std::uint16_t port() const { return port_; }
    std::unique_ptr<MessageStream> accept();
    void close();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

std::unique_ptr<MessageStream> tcp_connect(const std::string& host, std::uint16_t port);

/// Runs the coordinator side of one connection: reads message lines, answers
/// each with the response line, returns when the peer closes.
void serve_connection(Coordinator& c, MessageStream& stream);

/// Node side: publishes one summary over a stream and returns the response.
std::string publish_summary(MessageStream& stream, const NodeSummaryMessage& msg);

/// FNV-1a 64-bit digest, lower-case hex, of a byte string (used as the
/// optional sample_digest of a source file's contents).
std::string fnv1a64_hex(const std::string& bytes);

} // namespace edist
