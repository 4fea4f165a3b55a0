#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tracesynth::wire {

constexpr int kProtocolVersion = 1;
// A frame above this size is a protocol violation; the connection is dropped
// because the stream cannot be resynchronized.
constexpr std::uint32_t kMaxFrame = 1u << 20;

/// Closes the descriptor on destruction. Move-only.
struct Socket {
    int fd = -1;

    Socket() = default;
    explicit Socket(int f) : fd(f) {}
    Socket(Socket&& o) noexcept : fd(o.fd) { o.fd = -1; }
    Socket& operator=(Socket&& o) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket();

    void close_now();
};

/// Frame = 4-byte big-endian payload length, then the payload bytes.
void write_frame(int fd, const std::string& payload);

/// Blocks for one full frame. Errors: connection closed (clean EOF before
/// the length prefix), timeout (via SO_RCVTIMEO), protocol (oversized or
/// truncated frame).
std::string read_frame(int fd);

struct EvalRequest {
    std::uint64_t id = 0;
    std::vector<std::string> trace;
};

struct Reply {
    enum class Kind { coverage, error } kind = Kind::coverage;
    std::uint64_t id = 0;
    std::vector<std::uint64_t> per_call;
    std::string msg;
};

std::string encode_eval_request(const EvalRequest& req);
std::string encode_coverage_reply(std::uint64_t id, const std::vector<std::uint64_t>& per_call);
std::string encode_error_reply(std::uint64_t id, const std::string& msg);

/// Throw ErrorCode::protocol on any shape violation (bad JSON, wrong
/// version, wrong field types).
EvalRequest parse_eval_request(const std::string& payload);
Reply parse_reply(const std::string& payload);

/// "host:port" with a mandatory numeric port.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint);

} // namespace tracesynth::wire
