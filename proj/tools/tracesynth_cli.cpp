// Command-line front end for the tracesynth shared library. Only talks to
// the C API so it doubles as a smoke test for embedders.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tracesynth.h"

namespace {

int fail_with(ts_status status) {
    std::fprintf(stderr, "tracesynth: error: %s\n", ts_last_error());
    return status == TS_OK ? 1 : static_cast<int>(status);
}

void write_file_or_die(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) {
        std::fprintf(stderr, "tracesynth: error: cannot write %s\n", path.c_str());
        std::exit(1);
    }
}

struct OracleFlags {
    std::uint64_t explicit_bonus;
    std::uint64_t implicit_bonus;
    std::uint64_t saturation_cap;
    std::uint64_t noise = 0;
    std::uint64_t oracle_seed = 0;

    OracleFlags() {
        ts_oracle_config cfg;
        ts_oracle_config_default(&cfg);
        explicit_bonus = cfg.explicit_bonus;
        implicit_bonus = cfg.implicit_bonus;
        saturation_cap = cfg.saturation_cap;
        noise = cfg.noise_amplitude;
        oracle_seed = cfg.rng_seed;
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--explicit-bonus", explicit_bonus,
                        "Coverage bonus per satisfied explicit dependency");
        cmd->add_option("--implicit-bonus", implicit_bonus,
                        "Coverage bonus per satisfied implicit dependency");
        cmd->add_option("--saturation-cap", saturation_cap, "Per-call coverage ceiling");
        cmd->add_option("--noise", noise, "Coverage noise amplitude (0 = deterministic)");
        cmd->add_option("--oracle-seed", oracle_seed, "Seed for the coverage noise");
    }

    ts_oracle_config to_config() const {
        ts_oracle_config cfg;
        cfg.explicit_bonus = explicit_bonus;
        cfg.implicit_bonus = implicit_bonus;
        cfg.saturation_cap = saturation_cap;
        cfg.noise_amplitude = noise;
        cfg.rng_seed = oracle_seed;
        return cfg;
    }

    void to_manifest(nlohmann::ordered_json& j) const {
        j["explicit_bonus"] = explicit_bonus;
        j["implicit_bonus"] = implicit_bonus;
        j["saturation_cap"] = saturation_cap;
        j["noise"] = noise;
        j["oracle_seed"] = oracle_seed;
    }
};

/// Every subcommand drops a manifest next to its outputs so a run can be
/// reproduced from flags alone.
void write_manifest(const std::string& path, const std::string& subcommand,
                    nlohmann::ordered_json flags) {
    nlohmann::ordered_json j;
    j["tool"] = "tracesynth";
    j["version"] = ts_version();
    j["subcommand"] = subcommand;
    j["flags"] = std::move(flags);
    write_file_or_die(path, j.dump(2) + "\n");
}

std::string label_for(const std::string& path) {
    std::string base = std::filesystem::path(path).filename().string();
    const std::size_t dot = base.rfind('.');
    if (dot != std::string::npos && dot > 0)
        base = base.substr(0, dot);
    return base.empty() ? path : base;
}

volatile std::sig_atomic_t g_interrupted = 0;

void handle_signal(int) { g_interrupted = 1; }

struct UniverseHandle {
    ts_universe* ptr = nullptr;
    ~UniverseHandle() { ts_universe_free(ptr); }
};

struct CorpusHandle {
    ts_corpus* ptr = nullptr;
    ~CorpusHandle() { ts_corpus_free(ptr); }
};

int cmd_gen_universe(std::uint32_t n, double explicit_density, double implicit_density,
                     std::uint64_t seed, const std::string& out) {
    UniverseHandle u;
    if (ts_status s = ts_universe_generate(n, explicit_density, implicit_density, seed, &u.ptr))
        return fail_with(s);
    if (ts_status s = ts_universe_save(u.ptr, out.c_str()))
        return fail_with(s);
    char fp[17];
    ts_universe_fingerprint(u.ptr, fp, sizeof(fp));

    nlohmann::ordered_json flags;
    flags["n"] = n;
    flags["explicit_density"] = explicit_density;
    flags["implicit_density"] = implicit_density;
    flags["seed"] = seed;
    flags["out"] = out;
    flags["fingerprint"] = fp;
    write_manifest(out + ".manifest.json", "gen-universe", std::move(flags));

    std::printf("wrote %s: %u syscalls, %llu explicit, %llu implicit, fingerprint %s\n",
                out.c_str(), ts_universe_size(u.ptr),
                static_cast<unsigned long long>(ts_universe_explicit_count(u.ptr)),
                static_cast<unsigned long long>(ts_universe_implicit_count(u.ptr)), fp);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tracesynth: DQN-synthesized syscall traces as fuzzer seeds"};
    app.require_subcommand(1);

    // ---- gen-universe ----
    auto* gen = app.add_subcommand("gen-universe", "Generate a synthetic syscall universe");
    std::uint32_t gen_n = 16;
    double gen_explicit = 0.1, gen_implicit = 0.1;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "universe.json";
    gen->add_option("--n", gen_n, "Number of syscalls (>= 2)");
    gen->add_option("--explicit-density", gen_explicit, "Fraction of ordered pairs made explicit deps");
    gen->add_option("--implicit-density", gen_implicit, "Fraction of unordered pairs made implicit deps");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--out", gen_out, "Output universe path");

    // ---- train ----
    auto* train = app.add_subcommand("train", "Train the agent and archive optimal traces");
    std::string train_universe, train_out = "run";
    std::string train_oracle = "sim", train_endpoint;
    int train_timeout_ms = 10'000;
    ts_train_options opts;
    ts_train_options_default(&opts);
    bool revert_flag = false;
    OracleFlags train_oracle_flags;
    train->add_option("--universe", train_universe, "Universe file")->required();
    train->add_option("--episodes", opts.episodes, "Training episodes");
    train->add_option("--trace-len", opts.trace_len, "Trace length L");
    train->add_option("--seed", opts.seed, "Training seed");
    train->add_option("--t1", opts.t1, "Archive threshold on cumulative reward");
    train->add_option("--t2", opts.t2, "Abort threshold on cumulative reward");
    train->add_option("--gamma", opts.gamma, "Discount rate");
    train->add_option("--lr", opts.lr, "Learning rate");
    train->add_option("--eps-start", opts.eps_start, "Initial exploration rate");
    train->add_option("--eps-end", opts.eps_end, "Final exploration rate");
    train->add_option("--eps-decay-steps", opts.eps_decay_steps,
                      "Steps over which epsilon decays linearly");
    train->add_option("--hidden-width", opts.hidden_width, "Hidden layer width");
    train->add_option("--replay-capacity", opts.replay_capacity, "Replay buffer capacity");
    train->add_option("--batch-size", opts.batch_size, "Replay batch size");
    train->add_option("--target-sync", opts.target_sync_interval,
                      "Updates between target network syncs");
    train->add_option("--max-steps", opts.max_steps_per_episode, "Step cap per episode");
    train->add_flag("--revert-on-decrease", revert_flag,
                    "Roll back replacements with negative reward");
    train->add_option("--export", opts.export_count,
                      "Also export a random sample of this many archived traces");
    train->add_option("--oracle", train_oracle, "Coverage oracle")
        ->check(CLI::IsMember({"sim", "remote"}));
    train->add_option("--endpoint", train_endpoint, "host:port of the remote oracle");
    train->add_option("--timeout-ms", train_timeout_ms, "Remote oracle timeout");
    train->add_option("--out", train_out, "Output directory");
    train_oracle_flags.attach(train);

    // ---- analyze ----
    auto* analyze = app.add_subcommand("analyze", "Seed-quality reports for one or more corpora");
    std::string analyze_universe, analyze_out = "analysis";
    std::vector<std::string> analyze_corpora;
    analyze->add_option("--universe", analyze_universe, "Universe file")->required();
    analyze->add_option("corpora", analyze_corpora, "Corpus files")->required()->expected(-1);
    analyze->add_option("--out", analyze_out, "Output directory");

    // ---- bench-length ----
    auto* bench = app.add_subcommand("bench-length", "Coverage vs trace length sweep");
    std::string bench_universe, bench_out = "bench.csv";
    std::uint32_t bench_min = 2, bench_max = 9;
    std::uint64_t bench_budget = 7'679, bench_seed = 0;
    OracleFlags bench_oracle_flags;
    bench->add_option("--universe", bench_universe, "Universe file")->required();
    bench->add_option("--min-len", bench_min, "Shortest trace length");
    bench->add_option("--max-len", bench_max, "Longest trace length");
    bench->add_option("--budget", bench_budget, "Call budget per length (traces = floor(budget/length))");
    bench->add_option("--seed", bench_seed, "Sweep seed");
    bench->add_option("--out", bench_out, "Output CSV path");
    bench_oracle_flags.attach(bench);

    // ---- mock-server ----
    auto* server = app.add_subcommand("mock-server", "Serve protocol v1 over the simulated kernel");
    std::string server_universe, server_bind = "127.0.0.1";
    std::uint16_t server_port = 0;
    OracleFlags server_oracle_flags;
    server->add_option("--universe", server_universe, "Universe file")->required();
    server->add_option("--bind", server_bind, "Bind address");
    server->add_option("--port", server_port, "Port (0 = ephemeral)");
    server_oracle_flags.attach(server);

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed())
        return cmd_gen_universe(gen_n, gen_explicit, gen_implicit, gen_seed, gen_out);

    if (train->parsed()) {
        opts.revert_on_decrease = revert_flag ? 1 : 0;
        UniverseHandle u;
        if (ts_status s = ts_universe_load(train_universe.c_str(), &u.ptr))
            return fail_with(s);
        std::error_code ec;
        std::filesystem::create_directories(train_out, ec);
        if (ec) {
            std::fprintf(stderr, "tracesynth: error: cannot create %s: %s\n", train_out.c_str(),
                         ec.message().c_str());
            return 1;
        }
        const ts_oracle_config oracle_cfg = train_oracle_flags.to_config();
        ts_train_summary summary{};
        ts_status s;
        if (train_oracle == "remote") {
            if (train_endpoint.empty()) {
                std::fprintf(stderr, "tracesynth: error: --oracle remote requires --endpoint\n");
                return 1;
            }
            s = ts_train_remote(u.ptr, train_endpoint.c_str(), train_timeout_ms, &opts,
                                train_out.c_str(), &summary);
        } else {
            s = ts_train_sim(u.ptr, &oracle_cfg, &opts, train_out.c_str(), &summary);
        }
        if (s != TS_OK)
            return fail_with(s);

        nlohmann::ordered_json flags;
        flags["universe"] = train_universe;
        flags["episodes"] = opts.episodes;
        flags["trace_len"] = opts.trace_len;
        flags["seed"] = opts.seed;
        flags["t1"] = opts.t1;
        flags["t2"] = opts.t2;
        flags["gamma"] = opts.gamma;
        flags["lr"] = opts.lr;
        flags["eps_start"] = opts.eps_start;
        flags["eps_end"] = opts.eps_end;
        flags["eps_decay_steps"] = opts.eps_decay_steps;
        flags["hidden_width"] = opts.hidden_width;
        flags["replay_capacity"] = opts.replay_capacity;
        flags["batch_size"] = opts.batch_size;
        flags["target_sync"] = opts.target_sync_interval;
        flags["max_steps"] = opts.max_steps_per_episode;
        flags["revert_on_decrease"] = opts.revert_on_decrease != 0;
        flags["export"] = opts.export_count;
        flags["oracle"] = train_oracle;
        if (train_oracle == "remote") {
            flags["endpoint"] = train_endpoint;
            flags["timeout_ms"] = train_timeout_ms;
        } else {
            train_oracle_flags.to_manifest(flags);
        }
        flags["out"] = train_out;
        write_manifest(train_out + "/manifest.json", "train", std::move(flags));

        std::printf("episodes=%u archived=%u steps=%llu updates=%llu best_total=%llu "
                    "final_loss=%.6g wall=%.1fs\n",
                    summary.episodes_run, summary.archived,
                    static_cast<unsigned long long>(summary.total_steps),
                    static_cast<unsigned long long>(summary.train_updates),
                    static_cast<unsigned long long>(summary.best_total), summary.final_loss,
                    summary.wall_seconds);
        return 0;
    }

    if (analyze->parsed()) {
        UniverseHandle u;
        if (ts_status s = ts_universe_load(analyze_universe.c_str(), &u.ptr))
            return fail_with(s);
        std::error_code ec;
        std::filesystem::create_directories(analyze_out, ec);
        if (ec) {
            std::fprintf(stderr, "tracesynth: error: cannot create %s: %s\n", analyze_out.c_str(),
                         ec.message().c_str());
            return 1;
        }

        std::vector<CorpusHandle> corpora(analyze_corpora.size());
        std::vector<ts_seed_report> reports(analyze_corpora.size());
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < analyze_corpora.size(); ++i) {
            if (ts_status s = ts_corpus_read(analyze_corpora[i].c_str(), u.ptr, &corpora[i].ptr))
                return fail_with(s);
            if (ts_status s = ts_analyze(corpora[i].ptr, u.ptr, &reports[i]))
                return fail_with(s);
            labels.push_back(label_for(analyze_corpora[i]));

            char* hist_csv = nullptr;
            if (ts_status s = ts_histogram_csv(corpora[i].ptr, u.ptr, &hist_csv))
                return fail_with(s);
            write_file_or_die(analyze_out + "/histogram_" + labels.back() + ".csv", hist_csv);
            ts_string_free(hist_csv);
        }

        std::vector<const char*> label_ptrs;
        for (const std::string& l : labels)
            label_ptrs.push_back(l.c_str());
        char* table = nullptr;
        if (ts_status s = ts_comparison_render(reports.data(), label_ptrs.data(),
                                               static_cast<std::uint32_t>(reports.size()), 0,
                                               &table))
            return fail_with(s);
        write_file_or_die(analyze_out + "/report.txt", table);
        std::fputs(table, stdout);
        ts_string_free(table);
        char* csv = nullptr;
        if (ts_status s = ts_comparison_render(reports.data(), label_ptrs.data(),
                                               static_cast<std::uint32_t>(reports.size()), 1,
                                               &csv))
            return fail_with(s);
        write_file_or_die(analyze_out + "/report.csv", csv);
        ts_string_free(csv);

        if (corpora.size() >= 2) {
            std::string agreement_csv =
                "a,b,equivalent_pairs,matched_in_a,matched_in_b,pct_a,pct_b\n";
            for (std::size_t i = 0; i < corpora.size(); ++i)
                for (std::size_t j = i + 1; j < corpora.size(); ++j) {
                    ts_agreement ag{};
                    if (ts_status s =
                            ts_agreement_compute(corpora[i].ptr, corpora[j].ptr, &ag))
                        return fail_with(s);
                    char row[256];
                    std::snprintf(row, sizeof(row), "%s,%s,%llu,%u,%u,%.2f,%.2f\n",
                                  labels[i].c_str(), labels[j].c_str(),
                                  static_cast<unsigned long long>(ag.equivalent_pairs),
                                  ag.matched_in_a, ag.matched_in_b, ag.pct_a, ag.pct_b);
                    agreement_csv += row;
                }
            write_file_or_die(analyze_out + "/agreement.csv", agreement_csv);
        }

        nlohmann::ordered_json flags;
        flags["universe"] = analyze_universe;
        flags["corpora"] = analyze_corpora;
        flags["out"] = analyze_out;
        write_manifest(analyze_out + "/manifest.json", "analyze", std::move(flags));
        return 0;
    }

    if (bench->parsed()) {
        UniverseHandle u;
        if (ts_status s = ts_universe_load(bench_universe.c_str(), &u.ptr))
            return fail_with(s);
        const ts_oracle_config cfg = bench_oracle_flags.to_config();
        if (ts_status s = ts_bench_length(u.ptr, &cfg, bench_min, bench_max, bench_budget,
                                          bench_seed, bench_out.c_str()))
            return fail_with(s);

        nlohmann::ordered_json flags;
        flags["universe"] = bench_universe;
        flags["min_len"] = bench_min;
        flags["max_len"] = bench_max;
        flags["budget"] = bench_budget;
        flags["seed"] = bench_seed;
        bench_oracle_flags.to_manifest(flags);
        flags["out"] = bench_out;
        write_manifest(bench_out + ".manifest.json", "bench-length", std::move(flags));
        std::printf("wrote %s\n", bench_out.c_str());
        return 0;
    }

    if (server->parsed()) {
        UniverseHandle u;
        if (ts_status s = ts_universe_load(server_universe.c_str(), &u.ptr))
            return fail_with(s);
        const ts_oracle_config cfg = server_oracle_flags.to_config();
        ts_server* srv = nullptr;
        if (ts_status s = ts_server_start(u.ptr, &cfg, server_bind.c_str(), server_port, &srv))
            return fail_with(s);
        std::printf("listening on %s:%u\n", server_bind.c_str(), ts_server_port(srv));
        std::fflush(stdout);

        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);
        while (!g_interrupted)
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
        std::fprintf(stderr, "shutting down\n");
        ts_server_stop(srv);
        ts_server_free(srv);
        return 0;
    }

    return 0;
}
