#include "mock_server.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "errors.hpp"
#include "log.hpp"

namespace tracesynth {

MockServer::MockServer(const SyscallUniverse& universe, OracleConfig config,
                       const std::string& bind_host, std::uint16_t port)
    : universe_(universe), oracle_(universe, config) {
    listener_ = wire::Socket(socket(AF_INET, SOCK_STREAM, 0));
    if (listener_.fd < 0)
        fail(ErrorCode::connection, std::string("socket: ") + std::strerror(errno));
    const int one = 1;
    setsockopt(listener_.fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (inet_pton(AF_INET, bind_host.c_str(), &addr.sin_addr) != 1)
        fail(ErrorCode::invalid_argument, "'" + bind_host + "' is not an IPv4 address");
    if (bind(listener_.fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0)
        fail(ErrorCode::connection, "cannot bind " + bind_host + ":" + std::to_string(port) +
                                        ": " + std::strerror(errno));
    if (listen(listener_.fd, 16) < 0)
        fail(ErrorCode::connection, std::string("listen: ") + std::strerror(errno));

    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    if (getsockname(listener_.fd, reinterpret_cast<sockaddr*>(&bound), &len) < 0)
        fail(ErrorCode::connection, std::string("getsockname: ") + std::strerror(errno));
    port_ = ntohs(bound.sin_port);

    accept_thread_ = std::thread(&MockServer::accept_loop, this);
    log::info("mock server listening on %s:%u", bind_host.c_str(), port_);
}

MockServer::~MockServer() { stop(); }

void MockServer::stop() {
    if (stopping_.exchange(true))
        return;
    // Closing the listener kicks accept() out of its blocking call; shutting
    // down the connections does the same for the per-connection reads.
    shutdown(listener_.fd, SHUT_RDWR);
    listener_.close_now();
    {
        std::lock_guard<std::mutex> lock(mu_);
        for (int fd : conn_fds_)
            shutdown(fd, SHUT_RDWR);
    }
    if (accept_thread_.joinable())
        accept_thread_.join();
    std::vector<std::thread> workers;
    {
        std::lock_guard<std::mutex> lock(mu_);
        workers.swap(workers_);
    }
    for (std::thread& t : workers)
        if (t.joinable())
            t.join();
    log::info("mock server stopped");
}

void MockServer::accept_loop() {
    while (!stopping_.load()) {
        const int fd = accept(listener_.fd, nullptr, nullptr);
        if (fd < 0) {
            if (stopping_.load())
                break;
            if (errno == EINTR)
                continue;
            log::warn("accept failed: %s", std::strerror(errno));
            break;
        }
        std::lock_guard<std::mutex> lock(mu_);
        if (stopping_.load()) {
            ::close(fd);
            break;
        }
        conn_fds_.push_back(fd);
        workers_.emplace_back(&MockServer::serve, this, fd);
    }
}

void MockServer::serve(int fd) {
    wire::Socket sock(fd);
    while (!stopping_.load()) {
        std::string payload;
        try {
            payload = wire::read_frame(sock.fd);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::connection)
                log::warn("dropping connection: %s", e.what());
            break;
        }
        wire::EvalRequest req;
        try {
            req = wire::parse_eval_request(payload);
        } catch (const Error& e) {
            // The frame itself was well delimited, so the stream is intact:
            // answer with an error and keep serving. A request whose id could
            // not be parsed is answered with id 0.
            log::info("rejecting request: %s", e.what());
            try {
                wire::write_frame(sock.fd, wire::encode_error_reply(0, e.what()));
            } catch (const Error&) {
                break;
            }
            continue;
        }

        std::string reply;
        try {
            Trace trace;
            trace.reserve(req.trace.size());
            for (const std::string& name : req.trace) {
                if (!universe_.has_name(name))
                    fail(ErrorCode::validation, "unknown syscall '" + name + "'");
                trace.push_back(universe_.id_of(name));
            }
            const CoverageReport report = oracle_.evaluate(trace);
            reply = wire::encode_coverage_reply(req.id, report.per_call);
            log::info("eval id=%llu len=%zu total=%llu",
                      static_cast<unsigned long long>(req.id), trace.size(),
                      static_cast<unsigned long long>(report.total()));
        } catch (const Error& e) {
            log::info("eval id=%llu failed: %s", static_cast<unsigned long long>(req.id),
                      e.what());
            reply = wire::encode_error_reply(req.id, e.what());
        }
        try {
            wire::write_frame(sock.fd, reply);
        } catch (const Error&) {
            break;
        }
    }
    std::lock_guard<std::mutex> lock(mu_);
    conn_fds_.erase(std::remove(conn_fds_.begin(), conn_fds_.end(), fd), conn_fds_.end());
}

} // namespace tracesynth
