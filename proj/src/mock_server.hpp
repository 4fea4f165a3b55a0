#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "oracle.hpp"
#include "wire.hpp"

namespace tracesynth {

/// Protocol-v1 server answering eval requests from the simulated kernel.
/// Stands in for the instrumented-fuzzer agent during integration tests.
/// One thread per connection, one request in flight per connection.
class MockServer {
public:
    /// Binds immediately; pass port 0 for an ephemeral port (see port()).
    MockServer(const SyscallUniverse& universe, OracleConfig config, const std::string& bind_host,
               std::uint16_t port);
    ~MockServer();

    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    std::uint16_t port() const { return port_; }

    /// Closes the listener and every live connection, then joins all
    /// threads. Idempotent; also run by the destructor.
    void stop();

private:
    void accept_loop();
    void serve(int fd);

    const SyscallUniverse& universe_;
    SimOracle oracle_;
    wire::Socket listener_;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::mutex mu_; // guards conn_fds_ and workers_
    std::vector<int> conn_fds_;
    std::vector<std::thread> workers_;
    std::thread accept_thread_;
};

} // namespace tracesynth
