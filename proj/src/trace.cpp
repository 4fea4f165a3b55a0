#include "trace.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"
#include "log.hpp"

namespace tracesynth {

StateEncoding encode(const Trace& trace, std::uint32_t universe_size) {
    StateEncoding state(universe_size, 0);
    for (SyscallId id : trace) {
        if (id >= universe_size)
            fail(ErrorCode::validation,
                 "trace contains syscall id " + std::to_string(id) + " outside universe of size " +
                     std::to_string(universe_size));
        state[id] += 1;
    }
    return state;
}

Trace replace_call(const Trace& trace, std::size_t position, SyscallId new_call,
                   std::uint32_t universe_size) {
    if (position >= trace.size())
        fail(ErrorCode::invalid_argument, "replace position " + std::to_string(position) +
                                              " out of range for trace of length " +
                                              std::to_string(trace.size()));
    if (new_call >= universe_size)
        fail(ErrorCode::invalid_argument,
             "replacement syscall id " + std::to_string(new_call) + " outside universe of size " +
                 std::to_string(universe_size));
    Trace out = trace;
    out[position] = new_call;
    return out;
}

bool traces_equivalent(const Trace& a, const Trace& b) {
    std::set<SyscallId> sa(a.begin(), a.end());
    std::set<SyscallId> sb(b.begin(), b.end());
    auto subset = [](const std::set<SyscallId>& x, const std::set<SyscallId>& y) {
        return std::includes(y.begin(), y.end(), x.begin(), x.end());
    };
    return subset(sa, sb) || subset(sb, sa);
}

Trace random_trace(std::uint32_t length, std::uint32_t universe_size, Rng& rng) {
    if (universe_size == 0)
        fail(ErrorCode::invalid_argument, "cannot draw a trace from an empty universe");
    Trace t(length);
    for (auto& id : t)
        id = static_cast<SyscallId>(uniform_index(rng, universe_size));
    return t;
}

std::string now_iso8601() {
    std::time_t t;
    if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        long long v = std::strtoll(sde, &end, 10);
        if (end == sde || *end != '\0' || v < 0)
            fail(ErrorCode::invalid_argument, "SOURCE_DATE_EPOCH is not a non-negative integer");
        t = static_cast<std::time_t>(v);
    } else {
        t = std::time(nullptr);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

Corpus pack_corpus(std::vector<Trace> traces, CorpusMeta meta, const SyscallUniverse& universe,
                   std::vector<std::vector<std::uint64_t>> coverage) {
    for (std::size_t i = 0; i < traces.size(); ++i) {
        if (traces[i].size() != meta.trace_len)
            fail(ErrorCode::validation, "trace " + std::to_string(i) + " has length " +
                                            std::to_string(traces[i].size()) + ", expected " +
                                            std::to_string(meta.trace_len));
        for (SyscallId id : traces[i])
            if (id >= universe.size())
                fail(ErrorCode::validation, "trace " + std::to_string(i) +
                                                " references syscall id " + std::to_string(id) +
                                                " not present in the universe");
    }
    if (!coverage.empty()) {
        if (coverage.size() != traces.size())
            fail(ErrorCode::validation, "coverage entries (" + std::to_string(coverage.size()) +
                                            ") do not match trace count (" +
                                            std::to_string(traces.size()) + ")");
        for (std::size_t i = 0; i < coverage.size(); ++i)
            if (coverage[i].size() != meta.trace_len)
                fail(ErrorCode::validation,
                     "coverage for trace " + std::to_string(i) + " has " +
                         std::to_string(coverage[i].size()) + " entries, expected " +
                         std::to_string(meta.trace_len));
    }
    meta.universe_id = universe.fingerprint();
    if (meta.created.empty())
        meta.created = now_iso8601();
    Corpus c;
    c.meta = std::move(meta);
    c.traces = std::move(traces);
    c.coverage = std::move(coverage);
    return c;
}

namespace {

constexpr int kCorpusMetaVersion = 1;

void write_sidecar(const Corpus& corpus, const std::string& path) {
    nlohmann::ordered_json j;
    j["version"] = kCorpusMetaVersion;
    j["universe"] = corpus.meta.universe_id;
    j["trace_len"] = corpus.meta.trace_len;
    j["created"] = corpus.meta.created;
    j["params"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : corpus.meta.params)
        j["params"][k] = v;
    j["coverage"] = corpus.coverage;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorCode::io, "cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
    if (!out)
        fail(ErrorCode::io, "failed writing " + path);
}

void read_sidecar(Corpus& corpus, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return; // sidecar is optional
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::parse, path + ": " + e.what());
    }
    if (!j.contains("version") || !j["version"].is_number_integer() ||
        j["version"].get<int>() != kCorpusMetaVersion)
        fail(ErrorCode::parse, path + ": unsupported corpus metadata version");
    if (j.contains("params"))
        for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
            corpus.meta.params[it.key()] = it.value().get<std::string>();
    if (j.contains("coverage")) {
        corpus.coverage = j["coverage"].get<std::vector<std::vector<std::uint64_t>>>();
        if (corpus.coverage.size() != corpus.traces.size())
            fail(ErrorCode::validation, path + ": coverage entries do not match trace count");
        for (const auto& row : corpus.coverage)
            if (row.size() != corpus.meta.trace_len)
                fail(ErrorCode::validation, path + ": coverage row length mismatch");
    }
}

} // namespace

void write_corpus(const Corpus& corpus, const SyscallUniverse& universe, const std::string& path) {
    if (corpus.meta.universe_id != universe.fingerprint())
        fail(ErrorCode::validation, "corpus universe fingerprint " + corpus.meta.universe_id +
                                        " does not match the supplied universe");
    std::ostringstream body;
    body << "# universe: " << corpus.meta.universe_id << "\n";
    body << "# L: " << corpus.meta.trace_len << "\n";
    body << "# created: " << corpus.meta.created << "\n";
    for (const Trace& t : corpus.traces) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i)
                body << ",";
            body << universe.name_of(t[i]);
        }
        body << "\n";
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorCode::io, "cannot open " + path + " for writing");
    out << body.str();
    if (!out)
        fail(ErrorCode::io, "failed writing " + path);
    out.close();
    if (!corpus.coverage.empty() || !corpus.meta.params.empty())
        write_sidecar(corpus, path + ".meta.json");
}

Corpus read_corpus(const std::string& path, const SyscallUniverse& universe) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::io, "cannot open " + path + " for reading");

    Corpus corpus;
    std::string line;
    int header_lines = 0;
    bool have_universe = false, have_len = false, have_created = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (header_lines < 3) {
            auto expect_header = [&](const char* prefix) -> std::string {
                std::size_t n = std::strlen(prefix);
                if (line.compare(0, n, prefix) != 0)
                    fail(ErrorCode::parse, path + ":" + std::to_string(line_no) +
                                               ": expected header '" + prefix + "'");
                return line.substr(n);
            };
            switch (header_lines) {
            case 0:
                corpus.meta.universe_id = expect_header("# universe: ");
                have_universe = true;
                break;
            case 1: {
                std::string v = expect_header("# L: ");
                char* end = nullptr;
                unsigned long len = std::strtoul(v.c_str(), &end, 10);
                if (end == v.c_str() || *end != '\0' || len == 0)
                    fail(ErrorCode::parse,
                         path + ":" + std::to_string(line_no) + ": invalid trace length");
                corpus.meta.trace_len = static_cast<std::uint32_t>(len);
                have_len = true;
                break;
            }
            case 2:
                corpus.meta.created = expect_header("# created: ");
                have_created = true;
                break;
            }
            ++header_lines;
            continue;
        }
        if (line.empty())
            fail(ErrorCode::parse, path + ":" + std::to_string(line_no) + ": empty trace line");
        Trace t;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            std::string name = line.substr(start, comma == std::string::npos ? std::string::npos
                                                                             : comma - start);
            if (name.empty())
                fail(ErrorCode::parse,
                     path + ":" + std::to_string(line_no) + ": empty syscall name");
            if (!universe.has_name(name))
                fail(ErrorCode::validation, path + ":" + std::to_string(line_no) +
                                                ": unknown syscall '" + name + "'");
            t.push_back(universe.id_of(name));
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
        if (t.size() != corpus.meta.trace_len)
            fail(ErrorCode::parse, path + ":" + std::to_string(line_no) + ": trace has " +
                                       std::to_string(t.size()) + " calls, header says " +
                                       std::to_string(corpus.meta.trace_len));
        corpus.traces.push_back(std::move(t));
    }
    if (!have_universe || !have_len || !have_created)
        fail(ErrorCode::parse, path + ": truncated corpus header");
    if (corpus.meta.universe_id != universe.fingerprint())
        log::warn("corpus %s was built for universe %s, current universe is %s", path.c_str(),
                  corpus.meta.universe_id.c_str(), universe.fingerprint().c_str());
    read_sidecar(corpus, path + ".meta.json");
    return corpus;
}

} // namespace tracesynth
