#pragma once

#include <cstdint>
#include <string>

#include "oracle.hpp"
#include "wire.hpp"

namespace tracesynth {

/// Protocol-v1 client speaking to a remote fuzzer agent (or the bundled mock
/// server). Owns one persistent connection with one request in flight at a
/// time; open several clients for parallel evaluation.
class RemoteOracle final : public CoverageOracle {
public:
    RemoteOracle(const SyscallUniverse& universe, const std::string& endpoint, int timeout_ms);

    /// Sends the trace (as syscall names) and returns the reported per-call
    /// coverage. Enforces the reply contract: matching id, per_call length
    /// equal to the trace length. Violations are protocol errors; an error
    /// reply from the remote side is a remote error.
    CoverageReport evaluate(const Trace& trace) override;

private:
    const SyscallUniverse& universe_;
    wire::Socket sock_;
    std::uint64_t next_id_ = 1;
};

} // namespace tracesynth
