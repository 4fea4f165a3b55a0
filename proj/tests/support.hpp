#pragma once

// Shared fixtures for the test binaries: hand-built universes, a scripted
// coverage oracle for episode tests, and naive recount implementations that
// serve as independent oracles for the library's optimized scans.

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "analysis.hpp"
#include "errors.hpp"
#include "oracle.hpp"
#include "rng.hpp"
#include "trace.hpp"
#include "universe.hpp"

namespace tracesynth::testing {

using NamePair = std::pair<std::string, std::string>;

inline SyscallUniverse make_universe(const std::vector<std::string>& names,
                                     const std::vector<NamePair>& explicit_deps = {},
                                     const std::vector<NamePair>& implicit_deps = {},
                                     std::uint64_t base = kDefaultBaseCoverage) {
    std::unordered_map<std::string, SyscallId> index;
    std::vector<SyscallSpec> specs;
    for (const auto& name : names) {
        index.emplace(name, static_cast<SyscallId>(specs.size()));
        specs.push_back({name, base});
    }
    DependencyGraph deps;
    for (const auto& [p, c] : explicit_deps) deps.add_explicit(index.at(p), index.at(c));
    for (const auto& [a, b] : implicit_deps) deps.add_implicit(index.at(a), index.at(b));
    return SyscallUniverse(std::move(specs), std::move(deps));
}

/// Replays a fixed sequence of per-call reports, ignoring the trace. Lets
/// episode tests drive the reward sequence by hand.
class ScriptedOracle final : public CoverageOracle {
public:
    explicit ScriptedOracle(std::vector<std::vector<std::uint64_t>> script,
                            bool repeat_last = false)
        : script_(std::move(script)), repeat_last_(repeat_last) {}

    CoverageReport evaluate(const Trace&) override {
        if (served_ < script_.size()) return {script_[served_++]};
        if (repeat_last_ && !script_.empty()) {
            ++served_;
            return {script_.back()};
        }
        fail(ErrorCode::internal, "scripted oracle exhausted");
    }

    std::size_t served() const { return served_; }

private:
    std::vector<std::vector<std::uint64_t>> script_;
    bool repeat_last_;
    std::size_t served_ = 0;
};

inline Corpus make_corpus(std::vector<Trace> traces, const SyscallUniverse& universe,
                          std::uint32_t trace_len) {
    CorpusMeta meta;
    meta.trace_len = trace_len;
    return pack_corpus(std::move(traces), meta, universe);
}

inline Corpus random_corpus(const SyscallUniverse& universe, std::uint32_t trace_count,
                            std::uint32_t trace_len, Rng& rng) {
    std::vector<Trace> traces;
    traces.reserve(trace_count);
    for (std::uint32_t i = 0; i < trace_count; ++i)
        traces.push_back(random_trace(trace_len, universe.size(), rng));
    return make_corpus(std::move(traces), universe, trace_len);
}

/// Direct transcription of the documented coverage model, evaluated pair by
/// pair through the DependencyGraph membership API. No adjacency tables, no
/// noise support; the counterpart for the optimized oracle at amplitude 0.
inline std::vector<std::uint64_t> naive_coverage(const Trace& trace,
                                                 const SyscallUniverse& universe,
                                                 const OracleConfig& config) {
    std::vector<std::uint64_t> out(trace.size());
    for (std::size_t j = 0; j < trace.size(); ++j) {
        std::uint64_t c = universe.spec(trace[j]).base_coverage;
        for (std::size_t i = 0; i < j; ++i)
            if (universe.deps().has_explicit(trace[i], trace[j])) c += config.explicit_bonus;
        for (std::size_t i = 0; i < trace.size(); ++i)
            if (i != j && universe.deps().has_implicit(trace[i], trace[j]))
                c += config.implicit_bonus;
        out[j] = std::min(c, config.saturation_cap);
    }
    return out;
}

// Pair-by-pair recounts of the seed metrics: for every ground-truth pair,
// scan every trace and every position pair.

inline std::uint32_t naive_explicit_satisfied(const Corpus& corpus,
                                              const SyscallUniverse& universe) {
    std::uint32_t count = 0;
    for (const auto& [p, c] : universe.deps().explicit_deps) {
        bool hit = false;
        for (const auto& t : corpus.traces)
            for (std::size_t i = 0; i < t.size() && !hit; ++i)
                for (std::size_t j = i + 1; j < t.size() && !hit; ++j)
                    if (t[i] == p && t[j] == c) hit = true;
        if (hit) ++count;
    }
    return count;
}

inline std::uint32_t naive_implicit_satisfied(const Corpus& corpus,
                                              const SyscallUniverse& universe) {
    std::uint32_t count = 0;
    for (const auto& [a, b] : universe.deps().implicit_deps) {
        bool hit = false;
        for (const auto& t : corpus.traces)
            for (std::size_t i = 0; i < t.size() && !hit; ++i)
                for (std::size_t j = 0; j < t.size() && !hit; ++j)
                    if (i != j && t[i] == a && t[j] == b) hit = true;
        if (hit) ++count;
    }
    return count;
}

inline std::vector<std::uint32_t> naive_histogram(const Corpus& corpus,
                                                  const SyscallUniverse& universe) {
    std::vector<std::uint32_t> hist(universe.size(), 0);
    for (SyscallId id = 0; id < universe.size(); ++id)
        for (const auto& t : corpus.traces)
            if (std::find(t.begin(), t.end(), id) != t.end()) ++hist[id];
    return hist;
}

inline std::uint32_t naive_unique_syscalls(const Corpus& corpus) {
    std::set<SyscallId> seen;
    for (const auto& t : corpus.traces) seen.insert(t.begin(), t.end());
    return static_cast<std::uint32_t>(seen.size());
}

inline bool naive_equivalent(const Trace& a, const Trace& b) {
    std::set<SyscallId> sa(a.begin(), a.end());
    std::set<SyscallId> sb(b.begin(), b.end());
    auto subset = [](const std::set<SyscallId>& x, const std::set<SyscallId>& y) {
        for (auto id : x)
            if (!y.count(id)) return false;
        return true;
    };
    return subset(sa, sb) || subset(sb, sa);
}

struct NaiveAgreement {
    std::uint64_t pairs = 0;
    std::uint32_t matched_a = 0;
    std::uint32_t matched_b = 0;
};

inline NaiveAgreement naive_agreement(const Corpus& a, const Corpus& b) {
    NaiveAgreement out;
    std::vector<bool> hit_b(b.traces.size(), false);
    for (const auto& t : a.traces) {
        bool hit = false;
        for (std::size_t j = 0; j < b.traces.size(); ++j)
            if (naive_equivalent(t, b.traces[j])) {
                ++out.pairs;
                hit = true;
                hit_b[j] = true;
            }
        if (hit) ++out.matched_a;
    }
    for (bool h : hit_b)
        if (h) ++out.matched_b;
    return out;
}

} // namespace tracesynth::testing
