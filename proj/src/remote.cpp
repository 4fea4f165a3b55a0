#include "remote.hpp"

#include <cerrno>
#include <cstring>

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include "errors.hpp"
#include "log.hpp"

namespace tracesynth {

namespace {

void set_timeout(int fd, int timeout_ms) {
    timeval tv{};
    tv.tv_sec = timeout_ms / 1000;
    tv.tv_usec = (timeout_ms % 1000) * 1000;
    if (setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv)) < 0 ||
        setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv)) < 0)
        fail(ErrorCode::connection,
             std::string("cannot set socket timeouts: ") + std::strerror(errno));
}

/// Non-blocking connect so an unroutable endpoint fails within the timeout
/// instead of hanging in the kernel default.
wire::Socket connect_with_timeout(const std::string& host, std::uint16_t port, int timeout_ms) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string port_str = std::to_string(port);
    const int gai = getaddrinfo(host.c_str(), port_str.c_str(), &hints, &res);
    if (gai != 0)
        fail(ErrorCode::connection,
             "cannot resolve " + host + ": " + gai_strerror(gai));

    std::string last_error = "no addresses";
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        wire::Socket sock(socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
        if (sock.fd < 0) {
            last_error = std::string("socket: ") + std::strerror(errno);
            continue;
        }
        const int flags = fcntl(sock.fd, F_GETFL, 0);
        fcntl(sock.fd, F_SETFL, flags | O_NONBLOCK);
        int rv = connect(sock.fd, ai->ai_addr, ai->ai_addrlen);
        if (rv < 0 && errno == EINPROGRESS) {
            pollfd pfd{sock.fd, POLLOUT, 0};
            rv = poll(&pfd, 1, timeout_ms);
            if (rv == 0) {
                last_error = "connect timed out";
                continue;
            }
            int err = 0;
            socklen_t len = sizeof(err);
            if (rv < 0 || getsockopt(sock.fd, SOL_SOCKET, SO_ERROR, &err, &len) < 0 || err != 0) {
                last_error = std::string("connect: ") + std::strerror(err ? err : errno);
                continue;
            }
        } else if (rv < 0) {
            last_error = std::string("connect: ") + std::strerror(errno);
            continue;
        }
        fcntl(sock.fd, F_SETFL, flags);
        freeaddrinfo(res);
        return sock;
    }
    freeaddrinfo(res);
    fail(ErrorCode::connection, "cannot connect to " + host + ":" + port_str + " (" +
                                    last_error + ")");
}

} // namespace

RemoteOracle::RemoteOracle(const SyscallUniverse& universe, const std::string& endpoint,
                           int timeout_ms)
    : universe_(universe) {
    if (timeout_ms <= 0)
        fail(ErrorCode::invalid_argument, "timeout must be positive");
    const auto [host, port] = wire::parse_endpoint(endpoint);
    sock_ = connect_with_timeout(host, port, timeout_ms);
    set_timeout(sock_.fd, timeout_ms);
    log::debug("connected to %s", endpoint.c_str());
}

CoverageReport RemoteOracle::evaluate(const Trace& trace) {
    wire::EvalRequest req;
    req.id = next_id_++;
    req.trace.reserve(trace.size());
    for (SyscallId id : trace)
        req.trace.push_back(universe_.name_of(id));

    wire::write_frame(sock_.fd, wire::encode_eval_request(req));
    const wire::Reply reply = wire::parse_reply(wire::read_frame(sock_.fd));
    if (reply.id != req.id)
        fail(ErrorCode::protocol, "reply id " + std::to_string(reply.id) +
                                      " does not match request id " + std::to_string(req.id));
    if (reply.kind == wire::Reply::Kind::error)
        fail(ErrorCode::remote, "remote evaluation failed: " + reply.msg);
    if (reply.per_call.size() != trace.size())
        fail(ErrorCode::protocol, "reply carries " + std::to_string(reply.per_call.size()) +
                                      " coverage entries for a trace of length " +
                                      std::to_string(trace.size()));
    CoverageReport report;
    report.per_call = reply.per_call;
    return report;
}

} // namespace tracesynth
