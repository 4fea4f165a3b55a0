#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tracesynth {

using SyscallId = std::uint32_t;

inline constexpr std::uint64_t kDefaultBaseCoverage = 50;

struct SyscallSpec {
    std::string name;
    std::uint64_t base_coverage = kDefaultBaseCoverage;
};

/// Dependency relations between syscalls. Explicit pairs are directional
/// (producer before consumer); implicit pairs are symmetric and stored once
/// as (min, max).
struct DependencyGraph {
    std::set<std::pair<SyscallId, SyscallId>> explicit_deps;
    std::set<std::pair<SyscallId, SyscallId>> implicit_deps;

    void add_explicit(SyscallId producer, SyscallId consumer);
    void add_implicit(SyscallId a, SyscallId b);
    bool has_explicit(SyscallId producer, SyscallId consumer) const;
    bool has_implicit(SyscallId a, SyscallId b) const;
};

/// The syscall vocabulary plus its dependency ground truth. Immutable after
/// construction; safe to share across threads.
class SyscallUniverse {
public:
    SyscallUniverse(std::vector<SyscallSpec> specs, DependencyGraph deps);

    std::uint32_t size() const { return static_cast<std::uint32_t>(specs_.size()); }
    const std::vector<SyscallSpec>& specs() const { return specs_; }
    const SyscallSpec& spec(SyscallId id) const;
    const DependencyGraph& deps() const { return deps_; }

    const std::string& name_of(SyscallId id) const;
    bool has_name(const std::string& name) const;
    SyscallId id_of(const std::string& name) const;

    /// Canonical text form (see docs/formats in README): fields ordered,
    /// syscalls by id, dependency pairs sorted. Loading a canonical file and
    /// re-serializing it is byte-identical.
    std::string serialize() const;

    /// FNV-1a 64 over the canonical serialization, as 16 hex chars. Used as
    /// the universe identifier in corpus files.
    std::string fingerprint() const;

private:
    std::vector<SyscallSpec> specs_;
    DependencyGraph deps_;
    std::unordered_map<std::string, SyscallId> index_;
};

SyscallUniverse parse_universe(const std::string& text);
SyscallUniverse load_universe(const std::string& path);
void save_universe(const SyscallUniverse& universe, const std::string& path);

/// Deterministic random universe: n syscalls named sc0..sc{n-1} with default
/// base coverage, round(explicit_density * n * (n-1)) explicit pairs and
/// round(implicit_density * n * (n-1) / 2) implicit pairs, sampled without
/// replacement.
SyscallUniverse generate_synthetic_universe(std::uint32_t n, double explicit_density,
                                            double implicit_density, std::uint64_t rng_seed);

std::uint64_t fnv1a64(const void* data, std::size_t len);

} // namespace tracesynth
