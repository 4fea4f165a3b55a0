#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "universe.hpp"

namespace tracesynth {

struct BenchRow {
    std::uint32_t length = 0;
    std::uint64_t traces = 0; // floor(budget / length)
    std::uint64_t calls = 0;  // traces * length
    std::uint64_t total_coverage = 0;
};

/// For each length in [min_len, max_len], evaluates floor(budget / length)
/// random traces so every length spends roughly the same call budget, and
/// sums total simulated coverage. Each length uses its own rng stream derived
/// from the seed, so results per length are stable under range changes.
std::vector<BenchRow> bench_length_sweep(const SyscallUniverse& universe,
                                         const OracleConfig& config, std::uint32_t min_len,
                                         std::uint32_t max_len, std::uint64_t budget,
                                         std::uint64_t seed);

/// CSV with header length,traces,calls,total_coverage.
std::string bench_csv(const std::vector<BenchRow>& rows);

} // namespace tracesynth
