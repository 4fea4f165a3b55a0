#include "tracesynth.h"

#include <cstdio>
#include <cstring>
#include <new>
#include <string>

#include "agent.hpp"
#include "analysis.hpp"
#include "bench.hpp"
#include "errors.hpp"
#include "mock_server.hpp"
#include "oracle.hpp"
#include "remote.hpp"
#include "trace.hpp"
#include "universe.hpp"

using namespace tracesynth;

namespace {

constexpr const char* kVersion = "0.1.0";

thread_local std::string g_last_error;

ts_status set_error(ErrorCode code, const char* what) {
    g_last_error = what;
    return static_cast<ts_status>(static_cast<int>(code));
}

/// Runs fn, translating exceptions into status codes. fn performs the side
/// effects (filling out-parameters) only on the success path.
template <typename Fn> ts_status guarded(Fn&& fn) {
    try {
        fn();
        return TS_OK;
    } catch (const Error& e) {
        return set_error(e.code(), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(ErrorCode::internal, "out of memory");
    } catch (const std::exception& e) {
        return set_error(ErrorCode::internal, e.what());
    }
}

ts_status require(bool ok, const char* what) {
    if (ok)
        return TS_OK;
    return set_error(ErrorCode::invalid_argument, what);
}

OracleConfig to_oracle_config(const ts_oracle_config* cfg) {
    OracleConfig c;
    if (cfg) {
        c.explicit_bonus = cfg->explicit_bonus;
        c.implicit_bonus = cfg->implicit_bonus;
        c.saturation_cap = cfg->saturation_cap;
        c.noise_amplitude = cfg->noise_amplitude;
        c.rng_seed = cfg->rng_seed;
    }
    return c;
}

TrainOptions to_train_options(const ts_train_options* o) {
    TrainOptions t;
    if (!o)
        return t;
    t.agent.discount = o->gamma;
    t.agent.learning_rate = o->lr;
    t.agent.epsilon_start = o->eps_start;
    t.agent.epsilon_end = o->eps_end;
    t.agent.epsilon_decay_steps = o->eps_decay_steps;
    t.agent.replay_capacity = o->replay_capacity;
    t.agent.batch_size = o->batch_size;
    t.agent.target_sync_interval = o->target_sync_interval;
    t.agent.hidden_width = o->hidden_width;
    t.episode.reward_high = o->t1;
    t.episode.reward_low = o->t2;
    t.episode.max_steps_per_episode = o->max_steps_per_episode;
    t.episode.episodes = o->episodes;
    t.episode.revert_on_decrease = o->revert_on_decrease != 0;
    t.trace_len = o->trace_len;
    t.seed = o->seed;
    t.export_count = o->export_count;
    return t;
}

void fill_summary(const TrainingSummary& s, ts_train_summary* out) {
    if (!out)
        return;
    out->episodes_run = s.episodes_run;
    out->archived = s.archived_count;
    out->total_steps = s.total_steps;
    out->train_updates = s.train_updates;
    out->wall_seconds = s.wall_seconds;
    out->final_loss = s.final_loss;
    out->best_total = s.best_total;
}

} // namespace

struct ts_universe {
    SyscallUniverse impl;
};

struct ts_corpus {
    Corpus impl;
};

struct ts_server {
    // The server borrows the universe, so keep a private copy alive for the
    // server's whole lifetime.
    SyscallUniverse universe;
    MockServer server;

    ts_server(SyscallUniverse u, const OracleConfig& cfg, const std::string& host,
              std::uint16_t port)
        : universe(std::move(u)), server(universe, cfg, host, port) {}
};

extern "C" {

const char* ts_version(void) { return kVersion; }

const char* ts_last_error(void) { return g_last_error.c_str(); }

ts_status ts_universe_load(const char* path, ts_universe** out) {
    if (ts_status s = require(path && out, "path and out must be non-null"))
        return s;
    return guarded([&] { *out = new ts_universe{load_universe(path)}; });
}

ts_status ts_universe_generate(uint32_t n, double explicit_density, double implicit_density,
                               uint64_t seed, ts_universe** out) {
    if (ts_status s = require(out != nullptr, "out must be non-null"))
        return s;
    return guarded([&] {
        *out = new ts_universe{
            generate_synthetic_universe(n, explicit_density, implicit_density, seed)};
    });
}

ts_status ts_universe_save(const ts_universe* u, const char* path) {
    if (ts_status s = require(u && path, "universe and path must be non-null"))
        return s;
    return guarded([&] { save_universe(u->impl, path); });
}

uint32_t ts_universe_size(const ts_universe* u) { return u ? u->impl.size() : 0; }

uint64_t ts_universe_explicit_count(const ts_universe* u) {
    return u ? u->impl.deps().explicit_deps.size() : 0;
}

uint64_t ts_universe_implicit_count(const ts_universe* u) {
    return u ? u->impl.deps().implicit_deps.size() : 0;
}

ts_status ts_universe_fingerprint(const ts_universe* u, char* buf, size_t buf_len) {
    if (ts_status s = require(u && buf, "universe and buf must be non-null"))
        return s;
    if (ts_status s = require(buf_len >= 17, "buf must hold at least 17 bytes"))
        return s;
    return guarded([&] {
        const std::string fp = u->impl.fingerprint();
        std::memcpy(buf, fp.c_str(), fp.size() + 1);
    });
}

void ts_universe_free(ts_universe* u) { delete u; }

void ts_oracle_config_default(ts_oracle_config* cfg) {
    if (!cfg)
        return;
    const OracleConfig d;
    cfg->explicit_bonus = d.explicit_bonus;
    cfg->implicit_bonus = d.implicit_bonus;
    cfg->saturation_cap = d.saturation_cap;
    cfg->noise_amplitude = d.noise_amplitude;
    cfg->rng_seed = d.rng_seed;
}

ts_status ts_eval_sim(const ts_universe* u, const ts_oracle_config* cfg, const uint32_t* trace,
                      uint32_t trace_len, uint64_t* per_call) {
    if (ts_status s = require(u && trace && per_call, "universe, trace and per_call required"))
        return s;
    return guarded([&] {
        SimOracle oracle(u->impl, to_oracle_config(cfg));
        const CoverageReport report = oracle.evaluate(Trace(trace, trace + trace_len));
        if (trace_len > 0)
            std::memcpy(per_call, report.per_call.data(), trace_len * sizeof(uint64_t));
    });
}

ts_status ts_eval_remote(const ts_universe* u, const char* endpoint, int timeout_ms,
                         const uint32_t* trace, uint32_t trace_len, uint64_t* per_call) {
    if (ts_status s =
            require(u && endpoint && trace && per_call, "universe, endpoint, trace and per_call required"))
        return s;
    return guarded([&] {
        RemoteOracle oracle(u->impl, endpoint, timeout_ms);
        const CoverageReport report = oracle.evaluate(Trace(trace, trace + trace_len));
        if (trace_len > 0)
            std::memcpy(per_call, report.per_call.data(), trace_len * sizeof(uint64_t));
    });
}

void ts_train_options_default(ts_train_options* opts) {
    if (!opts)
        return;
    const TrainOptions d;
    opts->gamma = d.agent.discount;
    opts->lr = d.agent.learning_rate;
    opts->eps_start = d.agent.epsilon_start;
    opts->eps_end = d.agent.epsilon_end;
    opts->eps_decay_steps = d.agent.epsilon_decay_steps;
    opts->replay_capacity = d.agent.replay_capacity;
    opts->batch_size = d.agent.batch_size;
    opts->target_sync_interval = d.agent.target_sync_interval;
    opts->hidden_width = d.agent.hidden_width;
    opts->t1 = d.episode.reward_high;
    opts->t2 = d.episode.reward_low;
    opts->max_steps_per_episode = d.episode.max_steps_per_episode;
    opts->episodes = d.episode.episodes;
    opts->revert_on_decrease = d.episode.revert_on_decrease ? 1 : 0;
    opts->trace_len = d.trace_len;
    opts->seed = d.seed;
    opts->export_count = d.export_count;
}

ts_status ts_train_sim(const ts_universe* u, const ts_oracle_config* cfg,
                       const ts_train_options* opts, const char* out_dir,
                       ts_train_summary* summary) {
    if (ts_status s = require(u && out_dir, "universe and out_dir must be non-null"))
        return s;
    return guarded([&] {
        SimOracle oracle(u->impl, to_oracle_config(cfg));
        const TrainingSummary result = train(u->impl, oracle, to_train_options(opts), out_dir);
        fill_summary(result, summary);
    });
}

ts_status ts_train_remote(const ts_universe* u, const char* endpoint, int timeout_ms,
                          const ts_train_options* opts, const char* out_dir,
                          ts_train_summary* summary) {
    if (ts_status s = require(u && endpoint && out_dir,
                              "universe, endpoint and out_dir must be non-null"))
        return s;
    return guarded([&] {
        RemoteOracle oracle(u->impl, endpoint, timeout_ms);
        const TrainingSummary result = train(u->impl, oracle, to_train_options(opts), out_dir);
        fill_summary(result, summary);
    });
}

ts_status ts_corpus_read(const char* path, const ts_universe* u, ts_corpus** out) {
    if (ts_status s = require(path && u && out, "path, universe and out must be non-null"))
        return s;
    return guarded([&] { *out = new ts_corpus{read_corpus(path, u->impl)}; });
}

uint32_t ts_corpus_len(const ts_corpus* c) {
    return c ? static_cast<uint32_t>(c->impl.traces.size()) : 0;
}

uint32_t ts_corpus_trace_len(const ts_corpus* c) { return c ? c->impl.meta.trace_len : 0; }

ts_status ts_corpus_trace(const ts_corpus* c, uint32_t index, uint32_t* out) {
    if (ts_status s = require(c && out, "corpus and out must be non-null"))
        return s;
    if (ts_status s = require(index < c->impl.traces.size(), "trace index out of range"))
        return s;
    const Trace& t = c->impl.traces[index];
    std::memcpy(out, t.data(), t.size() * sizeof(uint32_t));
    return TS_OK;
}

void ts_corpus_free(ts_corpus* c) { delete c; }

ts_status ts_analyze(const ts_corpus* c, const ts_universe* u, ts_seed_report* report) {
    if (ts_status s = require(c && u && report, "corpus, universe and report must be non-null"))
        return s;
    return guarded([&] {
        const SeedReport r = analyze(c->impl, u->impl);
        report->trace_count = r.trace_count;
        report->unique_syscalls = r.unique_syscalls;
        report->explicit_satisfied = r.explicit_satisfied;
        report->implicit_satisfied = r.implicit_satisfied;
    });
}

ts_status ts_usage_histogram(const ts_corpus* c, const ts_universe* u, uint32_t* hist) {
    if (ts_status s = require(c && u && hist, "corpus, universe and hist must be non-null"))
        return s;
    return guarded([&] {
        const std::vector<std::uint32_t> h = usage_histogram(c->impl, u->impl);
        std::memcpy(hist, h.data(), h.size() * sizeof(uint32_t));
    });
}

ts_status ts_histogram_csv(const ts_corpus* c, const ts_universe* u, char** out) {
    if (ts_status s = require(c && u && out, "corpus, universe and out must be non-null"))
        return s;
    return guarded([&] {
        const std::string csv = histogram_csv(usage_histogram(c->impl, u->impl), u->impl);
        char* buf = new char[csv.size() + 1];
        std::memcpy(buf, csv.c_str(), csv.size() + 1);
        *out = buf;
    });
}

ts_status ts_agreement_compute(const ts_corpus* a, const ts_corpus* b, ts_agreement* out) {
    if (ts_status s = require(a && b && out, "both corpora and out must be non-null"))
        return s;
    return guarded([&] {
        const AgreementReport r = agreement(a->impl, b->impl);
        out->equivalent_pairs = r.equivalent_pairs;
        out->matched_in_a = r.matched_in_a;
        out->matched_in_b = r.matched_in_b;
        out->pct_a = r.pct_a;
        out->pct_b = r.pct_b;
    });
}

ts_status ts_comparison_render(const ts_seed_report* reports, const char* const* labels,
                               uint32_t count, int csv, char** out) {
    if (ts_status s = require(reports && labels && out, "reports, labels and out required"))
        return s;
    return guarded([&] {
        std::vector<SeedReport> rs(count);
        std::vector<std::string> ls(count);
        for (uint32_t i = 0; i < count; ++i) {
            rs[i].trace_count = reports[i].trace_count;
            rs[i].unique_syscalls = reports[i].unique_syscalls;
            rs[i].explicit_satisfied = reports[i].explicit_satisfied;
            rs[i].implicit_satisfied = reports[i].implicit_satisfied;
            ls[i] = labels[i] ? labels[i] : "";
        }
        const std::string text = csv ? comparison_csv(rs, ls) : comparison_table(rs, ls);
        char* buf = new char[text.size() + 1];
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *out = buf;
    });
}

void ts_string_free(char* s) { delete[] s; }

ts_status ts_bench_length(const ts_universe* u, const ts_oracle_config* cfg, uint32_t min_len,
                          uint32_t max_len, uint64_t budget, uint64_t seed,
                          const char* csv_path) {
    if (ts_status s = require(u && csv_path, "universe and csv_path must be non-null"))
        return s;
    return guarded([&] {
        const auto rows =
            bench_length_sweep(u->impl, to_oracle_config(cfg), min_len, max_len, budget, seed);
        const std::string csv = bench_csv(rows);
        std::FILE* f = std::fopen(csv_path, "wb");
        if (!f)
            fail(ErrorCode::io, std::string("cannot open ") + csv_path + " for writing");
        const std::size_t written = std::fwrite(csv.data(), 1, csv.size(), f);
        const int rc = std::fclose(f);
        if (written != csv.size() || rc != 0)
            fail(ErrorCode::io, std::string("failed writing ") + csv_path);
    });
}

ts_status ts_server_start(const ts_universe* u, const ts_oracle_config* cfg,
                          const char* bind_host, uint16_t port, ts_server** out) {
    if (ts_status s = require(u && bind_host && out, "universe, bind_host and out required"))
        return s;
    return guarded([&] {
        *out = new ts_server(u->impl, to_oracle_config(cfg), bind_host, port);
    });
}

uint16_t ts_server_port(const ts_server* s) { return s ? s->server.port() : 0; }

void ts_server_stop(ts_server* s) {
    if (s)
        s->server.stop();
}

void ts_server_free(ts_server* s) { delete s; }

} // extern "C"
