#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "trace.hpp"
#include "universe.hpp"

namespace tracesynth {

/// Per-call basic-block counts for one evaluated trace.
struct CoverageReport {
    std::vector<std::uint64_t> per_call;

    std::uint64_t total() const {
        return std::accumulate(per_call.begin(), per_call.end(), std::uint64_t{0});
    }
};

struct OracleConfig {
    std::uint64_t explicit_bonus = 30;
    std::uint64_t implicit_bonus = 30;
    std::uint64_t saturation_cap = 1'000'000;
    std::uint64_t noise_amplitude = 0;
    std::uint64_t rng_seed = 0;
};

/// Anything that can score a trace. Implementations: the simulated kernel
/// below and the remote fuzzer client in remote.hpp.
class CoverageOracle {
public:
    virtual ~CoverageOracle() = default;
    virtual CoverageReport evaluate(const Trace& trace) = 0;
};

/// Deterministic stand-in for an instrumented kernel. The coverage of call j
/// in a trace is
///
///   c_j = base(f_j) + explicit_bonus * |{i < j : f_i -> f_j}|
///                   + implicit_bonus * |{i != j : {f_i, f_j}}|
///
/// clamped to saturation_cap. With noise_amplitude > 0 a seeded uniform
/// integer in [-amp, +amp] is added and the result floored at 1. The noise is
/// a pure function of (rng_seed, trace, position), so evaluation stays
/// deterministic and thread-safe.
class SimOracle final : public CoverageOracle {
public:
    SimOracle(const SyscallUniverse& universe, OracleConfig config);

    CoverageReport evaluate(const Trace& trace) override;

    const OracleConfig& config() const { return config_; }

private:
    const SyscallUniverse& universe_;
    OracleConfig config_;
    std::uint32_t n_;
    // Flat n*n adjacency flags so the hot loop stays branch-cheap.
    std::vector<std::uint8_t> explicit_adj_;
    std::vector<std::uint8_t> implicit_adj_;
};

/// Exhaustive search over all universe.size()^length traces. Returns a trace
/// with maximal total simulated coverage; ties go to the lexicographically
/// smallest id sequence. Guarded against search spaces above 10^7.
std::pair<Trace, std::uint64_t> brute_force_best_trace(const SyscallUniverse& universe,
                                                       const OracleConfig& config,
                                                       std::uint32_t length);

} // namespace tracesynth
