#include "universe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"
#include "rng.hpp"

namespace tracesynth {

void DependencyGraph::add_explicit(SyscallId producer, SyscallId consumer) {
    explicit_deps.emplace(producer, consumer);
}

void DependencyGraph::add_implicit(SyscallId a, SyscallId b) {
    implicit_deps.emplace(std::min(a, b), std::max(a, b));
}

bool DependencyGraph::has_explicit(SyscallId producer, SyscallId consumer) const {
    return explicit_deps.count({producer, consumer}) != 0;
}

bool DependencyGraph::has_implicit(SyscallId a, SyscallId b) const {
    return implicit_deps.count({std::min(a, b), std::max(a, b)}) != 0;
}

SyscallUniverse::SyscallUniverse(std::vector<SyscallSpec> specs, DependencyGraph deps)
    : specs_(std::move(specs)), deps_(std::move(deps)) {
    if (specs_.empty()) fail(ErrorCode::validation, "universe has no syscalls");
    for (SyscallId id = 0; id < specs_.size(); ++id) {
        const auto& spec = specs_[id];
        if (spec.name.empty()) fail(ErrorCode::validation, "empty syscall name");
        if (spec.base_coverage < 1)
            fail(ErrorCode::validation, "base_coverage must be >= 1 for " + spec.name);
        if (!index_.emplace(spec.name, id).second)
            fail(ErrorCode::validation, "duplicate syscall name: " + spec.name);
    }
    auto check_pair = [&](SyscallId a, SyscallId b, const char* kind) {
        if (a >= specs_.size() || b >= specs_.size())
            fail(ErrorCode::validation, std::string(kind) + " dependency references unknown syscall id");
        if (a == b)
            fail(ErrorCode::validation,
                 std::string("self-") + kind + " dependency on " + specs_[a].name);
    };
    for (const auto& [p, c] : deps_.explicit_deps) check_pair(p, c, "explicit");
    for (const auto& [a, b] : deps_.implicit_deps) {
        check_pair(a, b, "implicit");
        if (a > b) fail(ErrorCode::internal, "implicit pair not stored canonically");
    }
}

const SyscallSpec& SyscallUniverse::spec(SyscallId id) const {
    if (id >= specs_.size()) fail(ErrorCode::invalid_argument, "syscall id out of range");
    return specs_[id];
}

const std::string& SyscallUniverse::name_of(SyscallId id) const {
    return spec(id).name;
}

bool SyscallUniverse::has_name(const std::string& name) const {
    return index_.count(name) != 0;
}

SyscallId SyscallUniverse::id_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) fail(ErrorCode::validation, "unknown syscall name: " + name);
    return it->second;
}

std::string SyscallUniverse::serialize() const {
    nlohmann::ordered_json doc;
    doc["version"] = 1;
    auto& calls = doc["syscalls"] = nlohmann::ordered_json::array();
    for (const auto& spec : specs_) {
        calls.push_back({{"name", spec.name}, {"base_coverage", spec.base_coverage}});
    }
    auto& exp = doc["explicit"] = nlohmann::ordered_json::array();
    for (const auto& [p, c] : deps_.explicit_deps) {
        exp.push_back({specs_[p].name, specs_[c].name});
    }
    auto& imp = doc["implicit"] = nlohmann::ordered_json::array();
    for (const auto& [a, b] : deps_.implicit_deps) {
        imp.push_back({specs_[a].name, specs_[b].name});
    }
    return doc.dump(2) + "\n";
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < len; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::string SyscallUniverse::fingerprint() const {
    std::string text = serialize();
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(text.data(), text.size())));
    return buf;
}

namespace {

const nlohmann::json& require_field(const nlohmann::json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) fail(ErrorCode::parse, std::string("universe file: missing field '") + key + "'");
    return *it;
}

} // namespace

SyscallUniverse parse_universe(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::parse, std::string("universe file: ") + e.what());
    }
    if (!doc.is_object()) fail(ErrorCode::parse, "universe file: top level must be an object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "version" && key != "syscalls" && key != "explicit" && key != "implicit")
            fail(ErrorCode::parse, "universe file: unknown field '" + key + "'");
    }
    const auto& version = require_field(doc, "version");
    if (!version.is_number_integer() || version.get<int>() != 1)
        fail(ErrorCode::parse, "universe file: unsupported version");

    std::vector<SyscallSpec> specs;
    const auto& calls = require_field(doc, "syscalls");
    if (!calls.is_array()) fail(ErrorCode::parse, "universe file: 'syscalls' must be an array");
    for (const auto& entry : calls) {
        if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string())
            fail(ErrorCode::parse, "universe file: each syscall needs a string 'name'");
        SyscallSpec spec;
        spec.name = entry["name"].get<std::string>();
        if (entry.contains("base_coverage")) {
            const auto& base = entry["base_coverage"];
            if (!base.is_number_unsigned() || base.get<std::uint64_t>() < 1)
                fail(ErrorCode::parse, "universe file: base_coverage must be a positive integer");
            spec.base_coverage = base.get<std::uint64_t>();
        }
        specs.push_back(std::move(spec));
    }

    std::unordered_map<std::string, SyscallId> index;
    for (SyscallId id = 0; id < specs.size(); ++id) {
        if (!index.emplace(specs[id].name, id).second)
            fail(ErrorCode::validation, "duplicate syscall name: " + specs[id].name);
    }
    auto resolve = [&](const nlohmann::json& name) -> SyscallId {
        if (!name.is_string()) fail(ErrorCode::parse, "universe file: dependency entries must be names");
        auto it = index.find(name.get<std::string>());
        if (it == index.end())
            fail(ErrorCode::validation,
                 "dependency references unknown syscall: " + name.get<std::string>());
        return it->second;
    };

    DependencyGraph deps;
    const auto& exp = require_field(doc, "explicit");
    if (!exp.is_array()) fail(ErrorCode::parse, "universe file: 'explicit' must be an array");
    for (const auto& pair : exp) {
        if (!pair.is_array() || pair.size() != 2)
            fail(ErrorCode::parse, "universe file: explicit entries must be [producer, consumer]");
        SyscallId p = resolve(pair[0]);
        SyscallId c = resolve(pair[1]);
        if (p == c) fail(ErrorCode::validation, "self-dependency on " + specs[p].name);
        deps.add_explicit(p, c);
    }
    const auto& imp = require_field(doc, "implicit");
    if (!imp.is_array()) fail(ErrorCode::parse, "universe file: 'implicit' must be an array");
    for (const auto& pair : imp) {
        if (!pair.is_array() || pair.size() != 2)
            fail(ErrorCode::parse, "universe file: implicit entries must be [name_a, name_b]");
        SyscallId a = resolve(pair[0]);
        SyscallId b = resolve(pair[1]);
        if (a == b) fail(ErrorCode::validation, "self-dependency on " + specs[a].name);
        deps.add_implicit(a, b);
    }
    return SyscallUniverse(std::move(specs), std::move(deps));
}

SyscallUniverse load_universe(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open universe file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_universe(buf.str());
}

void save_universe(const SyscallUniverse& universe, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write universe file: " + path);
    out << universe.serialize();
    if (!out) fail(ErrorCode::io, "write failed: " + path);
}

SyscallUniverse generate_synthetic_universe(std::uint32_t n, double explicit_density,
                                            double implicit_density, std::uint64_t rng_seed) {
    if (n < 2) fail(ErrorCode::invalid_argument, "synthetic universe needs n >= 2");
    if (explicit_density < 0.0 || explicit_density > 1.0 || implicit_density < 0.0 ||
        implicit_density > 1.0)
        fail(ErrorCode::invalid_argument, "densities must be within [0, 1]");

    std::vector<SyscallSpec> specs;
    specs.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        specs.push_back({"sc" + std::to_string(i), kDefaultBaseCoverage});
    }

    // Exact pair counts: materialize the candidate space, shuffle, take the
    // first k. Keeps the count at round(density * space) and stays
    // deterministic for a fixed seed.
    Rng rng(rng_seed);
    auto sample_pairs = [&rng](std::vector<std::pair<SyscallId, SyscallId>> space, double density) {
        auto k = static_cast<std::size_t>(std::llround(density * static_cast<double>(space.size())));
        for (std::size_t i = space.size(); i > 1; --i) {
            std::swap(space[i - 1], space[uniform_index(rng, i)]);
        }
        space.resize(k);
        return space;
    };

    std::vector<std::pair<SyscallId, SyscallId>> ordered;
    ordered.reserve(static_cast<std::size_t>(n) * (n - 1));
    std::vector<std::pair<SyscallId, SyscallId>> unordered;
    unordered.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (SyscallId a = 0; a < n; ++a) {
        for (SyscallId b = 0; b < n; ++b) {
            if (a == b) continue;
            ordered.emplace_back(a, b);
            if (a < b) unordered.emplace_back(a, b);
        }
    }

    DependencyGraph deps;
    for (const auto& [p, c] : sample_pairs(std::move(ordered), explicit_density)) {
        deps.add_explicit(p, c);
    }
    for (const auto& [a, b] : sample_pairs(std::move(unordered), implicit_density)) {
        deps.add_implicit(a, b);
    }
    return SyscallUniverse(std::move(specs), std::move(deps));
}

} // namespace tracesynth
