#include "wire.hpp"

#include <cerrno>
#include <cstdlib>
#include <cstring>

#include <sys/socket.h>
#include <unistd.h>

#include <json.hpp>

#include "errors.hpp"

namespace tracesynth::wire {

Socket& Socket::operator=(Socket&& o) noexcept {
    if (this != &o) {
        close_now();
        fd = o.fd;
        o.fd = -1;
    }
    return *this;
}

Socket::~Socket() { close_now(); }

void Socket::close_now() {
    if (fd >= 0) {
        ::close(fd);
        fd = -1;
    }
}

namespace {

void write_all(int fd, const unsigned char* buf, std::size_t n) {
    while (n > 0) {
        // MSG_NOSIGNAL: a peer that hung up must surface as an error, not
        // SIGPIPE.
        const ssize_t rv = ::send(fd, buf, n, MSG_NOSIGNAL);
        if (rv <= 0) {
            if (rv < 0 && errno == EINTR)
                continue;
            if (rv < 0 && (errno == EAGAIN || errno == EWOULDBLOCK))
                fail(ErrorCode::timeout, "send timed out");
            fail(ErrorCode::connection, std::string("send failed: ") + std::strerror(errno));
        }
        buf += rv;
        n -= static_cast<std::size_t>(rv);
    }
}

/// Returns false on clean EOF before the first byte; throws on everything
/// else that is not a complete read.
bool read_full(int fd, unsigned char* buf, std::size_t n) {
    std::size_t got = 0;
    while (got < n) {
        const ssize_t rv = ::recv(fd, buf + got, n - got, 0);
        if (rv == 0) {
            if (got == 0)
                return false;
            fail(ErrorCode::protocol, "connection closed mid-frame");
        }
        if (rv < 0) {
            if (errno == EINTR)
                continue;
            if (errno == EAGAIN || errno == EWOULDBLOCK)
                fail(ErrorCode::timeout, "receive timed out");
            fail(ErrorCode::connection, std::string("recv failed: ") + std::strerror(errno));
        }
        got += static_cast<std::size_t>(rv);
    }
    return true;
}

} // namespace

void write_frame(int fd, const std::string& payload) {
    if (payload.size() > kMaxFrame)
        fail(ErrorCode::protocol,
             "outgoing frame of " + std::to_string(payload.size()) + " bytes exceeds the limit");
    const auto len = static_cast<std::uint32_t>(payload.size());
    unsigned char header[4] = {static_cast<unsigned char>(len >> 24),
                               static_cast<unsigned char>(len >> 16),
                               static_cast<unsigned char>(len >> 8),
                               static_cast<unsigned char>(len)};
    write_all(fd, header, 4);
    write_all(fd, reinterpret_cast<const unsigned char*>(payload.data()), payload.size());
}

std::string read_frame(int fd) {
    unsigned char header[4];
    if (!read_full(fd, header, 4))
        fail(ErrorCode::connection, "connection closed");
    const std::uint32_t len = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                              (std::uint32_t{header[2]} << 8) | std::uint32_t{header[3]};
    if (len > kMaxFrame)
        fail(ErrorCode::protocol,
             "incoming frame of " + std::to_string(len) + " bytes exceeds the limit");
    std::string payload(len, '\0');
    if (len > 0 && !read_full(fd, reinterpret_cast<unsigned char*>(payload.data()), len))
        fail(ErrorCode::protocol, "connection closed mid-frame");
    return payload;
}

std::string encode_eval_request(const EvalRequest& req) {
    nlohmann::ordered_json j;
    j["v"] = kProtocolVersion;
    j["type"] = "eval";
    j["id"] = req.id;
    j["trace"] = req.trace;
    return j.dump();
}

std::string encode_coverage_reply(std::uint64_t id, const std::vector<std::uint64_t>& per_call) {
    nlohmann::ordered_json j;
    j["v"] = kProtocolVersion;
    j["type"] = "coverage";
    j["id"] = id;
    j["per_call"] = per_call;
    return j.dump();
}

std::string encode_error_reply(std::uint64_t id, const std::string& msg) {
    nlohmann::ordered_json j;
    j["v"] = kProtocolVersion;
    j["type"] = "error";
    j["id"] = id;
    j["msg"] = msg;
    return j.dump();
}

namespace {

nlohmann::json parse_payload(const std::string& payload) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(payload);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::protocol, std::string("malformed message: ") + e.what());
    }
    if (!j.is_object())
        fail(ErrorCode::protocol, "message is not an object");
    if (!j.contains("v") || !j["v"].is_number_integer() || j["v"].get<int>() != kProtocolVersion)
        fail(ErrorCode::protocol, "unsupported protocol version");
    if (!j.contains("type") || !j["type"].is_string())
        fail(ErrorCode::protocol, "message lacks a type");
    if (!j.contains("id") || !j["id"].is_number_unsigned())
        fail(ErrorCode::protocol, "message lacks an unsigned id");
    return j;
}

} // namespace

EvalRequest parse_eval_request(const std::string& payload) {
    const nlohmann::json j = parse_payload(payload);
    if (j["type"].get<std::string>() != "eval")
        fail(ErrorCode::protocol, "expected an eval request, got '" +
                                      j["type"].get<std::string>() + "'");
    if (!j.contains("trace") || !j["trace"].is_array())
        fail(ErrorCode::protocol, "eval request lacks a trace array");
    EvalRequest req;
    req.id = j["id"].get<std::uint64_t>();
    for (const auto& e : j["trace"]) {
        if (!e.is_string())
            fail(ErrorCode::protocol, "trace entries must be syscall names");
        req.trace.push_back(e.get<std::string>());
    }
    return req;
}

Reply parse_reply(const std::string& payload) {
    const nlohmann::json j = parse_payload(payload);
    const std::string type = j["type"].get<std::string>();
    Reply r;
    r.id = j["id"].get<std::uint64_t>();
    if (type == "coverage") {
        r.kind = Reply::Kind::coverage;
        if (!j.contains("per_call") || !j["per_call"].is_array())
            fail(ErrorCode::protocol, "coverage reply lacks a per_call array");
        for (const auto& e : j["per_call"]) {
            if (!e.is_number_unsigned())
                fail(ErrorCode::protocol, "per_call entries must be nonnegative integers");
            r.per_call.push_back(e.get<std::uint64_t>());
        }
    } else if (type == "error") {
        r.kind = Reply::Kind::error;
        if (!j.contains("msg") || !j["msg"].is_string())
            fail(ErrorCode::protocol, "error reply lacks a msg string");
        r.msg = j["msg"].get<std::string>();
    } else {
        fail(ErrorCode::protocol, "unknown reply type '" + type + "'");
    }
    return r;
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint) {
    const std::size_t colon = endpoint.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == endpoint.size())
        fail(ErrorCode::invalid_argument,
             "endpoint '" + endpoint + "' is not of the form host:port");
    const std::string host = endpoint.substr(0, colon);
    const std::string port_str = endpoint.substr(colon + 1);
    char* end = nullptr;
    const unsigned long port = std::strtoul(port_str.c_str(), &end, 10);
    if (end == port_str.c_str() || *end != '\0' || port == 0 || port > 65535)
        fail(ErrorCode::invalid_argument, "endpoint '" + endpoint + "' has an invalid port");
    return {host, static_cast<std::uint16_t>(port)};
}

} // namespace tracesynth::wire
