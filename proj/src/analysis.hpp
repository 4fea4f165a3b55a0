#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trace.hpp"
#include "universe.hpp"

namespace tracesynth {

/// Seed-quality summary for one corpus: how much of the universe it touches
/// and how many ground-truth dependency pairs it realizes.
struct SeedReport {
    std::uint32_t unique_syscalls = 0;
    std::vector<std::uint32_t> usage_histogram; // per syscall id: traces containing it
    std::uint32_t explicit_satisfied = 0;
    std::uint32_t implicit_satisfied = 0;
    std::uint32_t trace_count = 0;
};

/// Overlap between two corpora under partial-order trace equivalence.
struct AgreementReport {
    std::uint64_t equivalent_pairs = 0; // (t in a, u in b) with equivalent(t, u)
    std::uint32_t matched_in_a = 0;     // traces in a equivalent to something in b
    std::uint32_t matched_in_b = 0;
    double pct_a = 0.0;                 // matched_in_a / |a| * 100, 0 for empty a
    double pct_b = 0.0;
};

/// Exhaustive scan of the corpus. An explicit pair (p -> c) is satisfied if
/// some trace contains p strictly before c; an implicit pair if some trace
/// contains both calls anywhere. Each ground-truth pair counts at most once.
SeedReport analyze(const Corpus& corpus, const SyscallUniverse& universe);

/// Number of distinct traces each syscall appears in (not total occurrences).
std::vector<std::uint32_t> usage_histogram(const Corpus& corpus, const SyscallUniverse& universe);

AgreementReport agreement(const Corpus& a, const Corpus& b);

/// Aligned plain-text table, one row per report.
std::string comparison_table(const std::vector<SeedReport>& reports,
                             const std::vector<std::string>& labels);

/// Same data as CSV: label,traces,unique_syscalls,explicit_satisfied,implicit_satisfied.
std::string comparison_csv(const std::vector<SeedReport>& reports,
                           const std::vector<std::string>& labels);

std::string histogram_csv(const std::vector<std::uint32_t>& histogram,
                          const SyscallUniverse& universe);

} // namespace tracesynth
