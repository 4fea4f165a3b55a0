#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rng.hpp"
#include "universe.hpp"

namespace tracesynth {

/// One fuzzing seed unit: a fixed-length sequence of syscall ids. Duplicates
/// allowed, order preserved.
using Trace = std::vector<SyscallId>;

/// Order-insensitive multi-hot encoding: entry i is the multiplicity of
/// syscall i in the trace. Sum of entries equals the trace length.
using StateEncoding = std::vector<std::uint32_t>;

StateEncoding encode(const Trace& trace, std::uint32_t universe_size);

/// New trace with `position` set to `new_call`; the input is left unchanged.
Trace replace_call(const Trace& trace, std::size_t position, SyscallId new_call,
                   std::uint32_t universe_size);

/// Partial-order equivalence: true iff one trace's call set is a subset of
/// the other's. Duplicates collapse, order is ignored. Reflexive and
/// symmetric but not transitive.
bool traces_equivalent(const Trace& a, const Trace& b);

/// Each position i.i.d. uniform over [0, universe_size).
Trace random_trace(std::uint32_t length, std::uint32_t universe_size, Rng& rng);

struct CorpusMeta {
    std::string universe_id;
    std::uint32_t trace_len = 5;
    std::string created;
    std::map<std::string, std::string> params;
};

/// An archive of traces plus metadata, serializable for fuzzer consumption.
/// `coverage` is either empty or holds one per-call vector per trace.
struct Corpus {
    CorpusMeta meta;
    std::vector<Trace> traces;
    std::vector<std::vector<std::uint64_t>> coverage;

    std::uint64_t total_calls() const {
        return static_cast<std::uint64_t>(traces.size()) * meta.trace_len;
    }
};

/// Validates traces against the universe and stamps the universe fingerprint
/// into the metadata. Empty `created` is filled with the current UTC time.
Corpus pack_corpus(std::vector<Trace> traces, CorpusMeta meta, const SyscallUniverse& universe,
                   std::vector<std::vector<std::uint64_t>> coverage = {});

/// Text format: `# universe:`, `# L:`, `# created:` header lines, then one
/// trace per line as comma-separated syscall names, \n line endings. Coverage
/// and params, when present, go to a sibling `<path>.meta.json`.
void write_corpus(const Corpus& corpus, const SyscallUniverse& universe, const std::string& path);
Corpus read_corpus(const std::string& path, const SyscallUniverse& universe);

/// ISO 8601 UTC timestamp. Honors SOURCE_DATE_EPOCH for reproducible output.
std::string now_iso8601();

} // namespace tracesynth
