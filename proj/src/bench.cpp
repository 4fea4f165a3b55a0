#include "bench.hpp"

#include "errors.hpp"
#include "rng.hpp"
#include "trace.hpp"

namespace tracesynth {

std::vector<BenchRow> bench_length_sweep(const SyscallUniverse& universe,
                                         const OracleConfig& config, std::uint32_t min_len,
                                         std::uint32_t max_len, std::uint64_t budget,
                                         std::uint64_t seed) {
    if (min_len == 0 || min_len > max_len)
        fail(ErrorCode::invalid_argument, "invalid length range [" + std::to_string(min_len) +
                                              ", " + std::to_string(max_len) + "]");
    if (budget == 0)
        fail(ErrorCode::invalid_argument, "call budget must be positive");

    SimOracle oracle(universe, config);
    std::vector<BenchRow> rows;
    for (std::uint32_t l = min_len; l <= max_len; ++l) {
        BenchRow row;
        row.length = l;
        row.traces = budget / l;
        row.calls = row.traces * l;
        Rng rng(mix_u64(seed ^ (0x9e3779b97f4a7c15ull * l)));
        for (std::uint64_t t = 0; t < row.traces; ++t) {
            const Trace trace = random_trace(l, universe.size(), rng);
            row.total_coverage += oracle.evaluate(trace).total();
        }
        rows.push_back(row);
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::string out = "length,traces,calls,total_coverage\n";
    for (const BenchRow& row : rows) {
        out += std::to_string(row.length);
        out += ',';
        out += std::to_string(row.traces);
        out += ',';
        out += std::to_string(row.calls);
        out += ',';
        out += std::to_string(row.total_coverage);
        out += '\n';
    }
    return out;
}

} // namespace tracesynth
