#include "oracle.hpp"

#include <algorithm>

#include "errors.hpp"
#include "rng.hpp"

namespace tracesynth {

SimOracle::SimOracle(const SyscallUniverse& universe, OracleConfig config)
    : universe_(universe), config_(config), n_(universe.size()) {
    if (config_.explicit_bonus == 0 || config_.implicit_bonus == 0)
        fail(ErrorCode::invalid_argument, "dependency bonuses must be positive");
    if (config_.saturation_cap == 0)
        fail(ErrorCode::invalid_argument, "saturation cap must be positive");
    explicit_adj_.assign(static_cast<std::size_t>(n_) * n_, 0);
    implicit_adj_.assign(static_cast<std::size_t>(n_) * n_, 0);
    for (const auto& [p, c] : universe.deps().explicit_deps)
        explicit_adj_[static_cast<std::size_t>(p) * n_ + c] = 1;
    for (const auto& [a, b] : universe.deps().implicit_deps) {
        implicit_adj_[static_cast<std::size_t>(a) * n_ + b] = 1;
        implicit_adj_[static_cast<std::size_t>(b) * n_ + a] = 1;
    }
}

namespace {

std::uint64_t trace_hash(const Trace& trace) {
    return fnv1a64(trace.data(), trace.size() * sizeof(SyscallId));
}

} // namespace

CoverageReport SimOracle::evaluate(const Trace& trace) {
    for (SyscallId id : trace)
        if (id >= n_)
            fail(ErrorCode::validation, "trace contains syscall id " + std::to_string(id) +
                                            " outside universe of size " + std::to_string(n_));
    CoverageReport report;
    report.per_call.resize(trace.size());
    const std::uint64_t th =
        config_.noise_amplitude ? trace_hash(trace) : 0; // only needed for noise draws
    for (std::size_t j = 0; j < trace.size(); ++j) {
        const SyscallId fj = trace[j];
        const std::uint8_t* irow = implicit_adj_.data() + static_cast<std::size_t>(fj) * n_;
        std::uint64_t explicit_hits = 0, implicit_hits = 0;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const SyscallId fi = trace[i];
            // explicit needs the producer fi strictly before the consumer fj
            if (i < j)
                explicit_hits += explicit_adj_[static_cast<std::size_t>(fi) * n_ + fj];
            if (i != j)
                implicit_hits += irow[fi];
        }
        std::uint64_t c = universe_.spec(fj).base_coverage +
                          config_.explicit_bonus * explicit_hits +
                          config_.implicit_bonus * implicit_hits;
        c = std::min(c, config_.saturation_cap);
        if (config_.noise_amplitude) {
            const std::uint64_t span = 2 * config_.noise_amplitude + 1;
            const std::uint64_t draw =
                mix_u64(config_.rng_seed ^ th ^ (0x9e3779b97f4a7c15ull * (j + 1)));
            const std::int64_t noise = static_cast<std::int64_t>(draw % span) -
                                       static_cast<std::int64_t>(config_.noise_amplitude);
            std::int64_t v = static_cast<std::int64_t>(c) + noise;
            c = v < 1 ? 1 : static_cast<std::uint64_t>(v);
        }
        report.per_call[j] = std::max<std::uint64_t>(c, 1);
    }
    return report;
}

std::pair<Trace, std::uint64_t> brute_force_best_trace(const SyscallUniverse& universe,
                                                       const OracleConfig& config,
                                                       std::uint32_t length) {
    if (length == 0)
        fail(ErrorCode::invalid_argument, "trace length must be positive");
    const std::uint64_t n = universe.size();
    std::uint64_t space = 1;
    for (std::uint32_t i = 0; i < length; ++i) {
        if (space > 10'000'000 / n) {
            space = 10'000'001;
            break;
        }
        space *= n;
    }
    if (space > 10'000'000)
        fail(ErrorCode::limit, "search space " + std::to_string(n) + "^" +
                                   std::to_string(length) + " exceeds the 10^7 guard");

    SimOracle oracle(universe, config);
    Trace current(length, 0);
    Trace best = current;
    std::uint64_t best_total = oracle.evaluate(current).total();
    // Odometer enumeration is lexicographic, so keeping only strict
    // improvements leaves the lexicographically smallest optimum in `best`.
    while (true) {
        std::size_t pos = length;
        while (pos > 0) {
            --pos;
            if (current[pos] + 1 < n) {
                ++current[pos];
                std::fill(current.begin() + static_cast<std::ptrdiff_t>(pos) + 1, current.end(),
                          0);
                break;
            }
            if (pos == 0)
                return {best, best_total};
        }
        const std::uint64_t total = oracle.evaluate(current).total();
        if (total > best_total) {
            best_total = total;
            best = current;
        }
    }
}

} // namespace tracesynth
