#include "agent.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "errors.hpp"
#include "log.hpp"

namespace tracesynth {

ReplayBuffer::ReplayBuffer(std::uint32_t capacity) : capacity_(capacity) {
    if (capacity == 0)
        fail(ErrorCode::invalid_argument, "replay capacity must be positive");
    buffer_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
    if (buffer_.size() < capacity_) {
        buffer_.push_back(std::move(t));
    } else {
        buffer_[next_] = std::move(t);
        next_ = (next_ + 1) % capacity_;
    }
}

std::vector<Transition> ReplayBuffer::sample(std::uint32_t batch_size, Rng& rng) const {
    if (buffer_.empty())
        fail(ErrorCode::invalid_argument, "cannot sample from an empty replay buffer");
    std::vector<Transition> batch;
    batch.reserve(batch_size);
    for (std::uint32_t i = 0; i < batch_size; ++i)
        batch.push_back(buffer_[uniform_index(rng, buffer_.size())]);
    return batch;
}

double reward(const CoverageReport& prev, const CoverageReport& next) {
    if (prev.per_call.size() != next.per_call.size())
        fail(ErrorCode::invalid_argument,
             "coverage reports have different lengths (" + std::to_string(prev.per_call.size()) +
                 " vs " + std::to_string(next.per_call.size()) + ")");
    if (prev.per_call.empty())
        fail(ErrorCode::invalid_argument, "cannot compute a reward over empty reports");
    double sum = 0.0;
    for (std::size_t i = 0; i < prev.per_call.size(); ++i) {
        if (prev.per_call[i] == 0 || next.per_call[i] == 0)
            fail(ErrorCode::validation, "coverage entries must be at least 1");
        sum += std::log(static_cast<double>(next.per_call[i]) /
                        static_cast<double>(prev.per_call[i]));
    }
    return sum / static_cast<double>(prev.per_call.size());
}

double epsilon_at(std::uint64_t step, const AgentConfig& config) {
    if (config.epsilon_decay_steps == 0 || step >= config.epsilon_decay_steps)
        return config.epsilon_end;
    const double frac =
        static_cast<double>(step) / static_cast<double>(config.epsilon_decay_steps);
    return config.epsilon_start + (config.epsilon_end - config.epsilon_start) * frac;
}

SyscallId select_action(const QNetwork& net, const StateEncoding& state, double epsilon,
                        Rng& rng) {
    const std::uint32_t n = net.input_size();
    const double u = uniform_real01(rng);
    if (u < epsilon)
        return static_cast<SyscallId>(uniform_index(rng, n));
    const Eigen::VectorXd q = net.forward(state);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < q.size(); ++i)
        if (q[i] > q[best])
            best = i;
    return static_cast<SyscallId>(best);
}

namespace {

Eigen::MatrixXd states_matrix(const std::vector<Transition>& batch, bool next) {
    const Eigen::Index n = static_cast<Eigen::Index>(
        (next ? batch.front().next_state : batch.front().state).size());
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(batch.size()));
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const StateEncoding& s = next ? batch[b].next_state : batch[b].state;
        if (static_cast<Eigen::Index>(s.size()) != n)
            fail(ErrorCode::invalid_argument, "batch mixes state dimensions");
        for (Eigen::Index i = 0; i < n; ++i)
            x(i, static_cast<Eigen::Index>(b)) = static_cast<double>(s[static_cast<std::size_t>(i)]);
    }
    return x;
}

} // namespace

Eigen::VectorXd td_targets(const QNetwork& target_net, const std::vector<Transition>& batch,
                           double discount) {
    if (batch.empty())
        fail(ErrorCode::invalid_argument, "empty batch");
    const Eigen::MatrixXd qn = target_net.forward_batch(states_matrix(batch, true));
    Eigen::VectorXd y(static_cast<Eigen::Index>(batch.size()));
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const auto col = static_cast<Eigen::Index>(b);
        y[col] = batch[b].reward;
        if (!batch[b].terminal)
            y[col] += discount * qn.col(col).maxCoeff();
    }
    return y;
}

double td_loss(const QNetwork& net, const std::vector<Transition>& batch,
               const Eigen::VectorXd& targets) {
    if (batch.empty())
        fail(ErrorCode::invalid_argument, "empty batch");
    const Eigen::MatrixXd q = net.forward_batch(states_matrix(batch, false));
    double loss = 0.0;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const auto col = static_cast<Eigen::Index>(b);
        const double diff = q(batch[b].action, col) - targets[col];
        loss += diff * diff;
    }
    return loss / static_cast<double>(batch.size());
}

double td_loss_and_gradients(const QNetwork& net, const std::vector<Transition>& batch,
                             const Eigen::VectorXd& targets, Gradients& out) {
    if (batch.empty())
        fail(ErrorCode::invalid_argument, "empty batch");
    const auto bsz = static_cast<Eigen::Index>(batch.size());
    QNetwork::Activations acts;
    net.forward_batch(states_matrix(batch, false), &acts);

    // dLoss/dQ is nonzero only at the taken actions.
    Eigen::MatrixXd g3 = Eigen::MatrixXd::Zero(acts.q.rows(), bsz);
    double loss = 0.0;
    for (Eigen::Index b = 0; b < bsz; ++b) {
        const double diff = acts.q(batch[static_cast<std::size_t>(b)].action, b) - targets[b];
        loss += diff * diff;
        g3(batch[static_cast<std::size_t>(b)].action, b) =
            2.0 * diff / static_cast<double>(batch.size());
    }
    loss /= static_cast<double>(batch.size());

    out.w3 = g3 * acts.a2.transpose();
    out.b3 = g3.rowwise().sum();
    Eigen::MatrixXd g2 = (net.w3.transpose() * g3)
                             .cwiseProduct(acts.z2.unaryExpr([](double z) {
                                 return z > 0.0 ? 1.0 : 0.0;
                             }));
    out.w2 = g2 * acts.a1.transpose();
    out.b2 = g2.rowwise().sum();
    Eigen::MatrixXd g1 = (net.w2.transpose() * g2)
                             .cwiseProduct(acts.z1.unaryExpr([](double z) {
                                 return z > 0.0 ? 1.0 : 0.0;
                             }));
    out.w1 = g1 * acts.x.transpose();
    out.b1 = g1.rowwise().sum();
    return loss;
}

double train_step(QNetwork& net, const QNetwork& target_net,
                  const std::vector<Transition>& batch, const AgentConfig& config) {
    const Eigen::VectorXd targets = td_targets(target_net, batch, config.discount);
    Gradients g;
    const double loss = td_loss_and_gradients(net, batch, targets, g);
    if (!std::isfinite(loss))
        fail(ErrorCode::diverged, "training loss is not finite; lower the learning rate");
    const double lr = config.learning_rate;
    net.w1 -= lr * g.w1;
    net.b1 -= lr * g.b1;
    net.w2 -= lr * g.w2;
    net.b2 -= lr * g.b2;
    net.w3 -= lr * g.w3;
    net.b3 -= lr * g.b3;
    if (!net.finite())
        fail(ErrorCode::diverged, "network parameters are not finite after an update");
    return loss;
}

const char* outcome_name(EpisodeOutcome o) {
    switch (o) {
    case EpisodeOutcome::reached_high: return "reached_high";
    case EpisodeOutcome::fell_low: return "fell_low";
    case EpisodeOutcome::step_cap: return "step_cap";
    }
    return "unknown";
}

Trainer::Trainer(const SyscallUniverse& universe, CoverageOracle& oracle, AgentConfig agent,
                 EpisodeConfig episode, std::uint32_t trace_len, std::uint64_t seed)
    : universe_(universe), oracle_(oracle), agent_(agent), episode_(episode),
      trace_len_(trace_len), rng_(seed), net_(), target_net_(),
      replay_(agent.replay_capacity) {
    if (trace_len == 0)
        fail(ErrorCode::invalid_argument, "trace length must be positive");
    if (agent_.discount <= 0.0 || agent_.discount >= 1.0)
        fail(ErrorCode::invalid_argument, "discount must lie in (0, 1)");
    if (agent_.epsilon_start < 0.0 || agent_.epsilon_start > 1.0 || agent_.epsilon_end < 0.0 ||
        agent_.epsilon_end > agent_.epsilon_start)
        fail(ErrorCode::invalid_argument, "epsilon schedule must decay within [0, 1]");
    if (agent_.batch_size == 0 || agent_.target_sync_interval == 0)
        fail(ErrorCode::invalid_argument, "batch size and target sync interval must be positive");
    if (episode_.reward_low >= 0.0 || episode_.reward_high <= 0.0)
        fail(ErrorCode::invalid_argument, "thresholds must satisfy T2 < 0 < T1");
    if (episode_.max_steps_per_episode == 0)
        fail(ErrorCode::invalid_argument, "step cap must be positive");
    net_ = QNetwork::init(universe.size(), agent_.hidden_width, rng_);
    target_net_ = net_;
}

EpisodeLog Trainer::run_episode() {
    EpisodeLog ep;
    Trace current = random_trace(trace_len_, universe_.size(), rng_);
    CoverageReport current_report = oracle_.evaluate(current);
    double cum = 0.0;
    std::uint32_t cursor = 0;

    for (std::uint32_t step = 1; step <= episode_.max_steps_per_episode; ++step) {
        const StateEncoding state = encode(current, universe_.size());
        const double eps = epsilon_at(global_step_, agent_);
        const SyscallId action = select_action(net_, state, eps, rng_);
        ++global_step_;

        const Trace candidate = replace_call(current, cursor, action, universe_.size());
        const CoverageReport cand_report = oracle_.evaluate(candidate);
        const double r = reward(current_report, cand_report);
        cum += r;

        const bool accept = !episode_.revert_on_decrease || r >= 0.0;
        if (accept) {
            current = candidate;
            current_report = cand_report;
        }

        bool done = false;
        if (cum > episode_.reward_high) {
            ep.outcome = EpisodeOutcome::reached_high;
            ep.archived = current;
            ep.archived_coverage = current_report;
            done = true;
        } else if (cum < episode_.reward_low) {
            ep.outcome = EpisodeOutcome::fell_low;
            done = true;
        } else if (step == episode_.max_steps_per_episode) {
            ep.outcome = EpisodeOutcome::step_cap;
            done = true;
        }

        Transition t;
        t.state = state;
        t.action = action;
        t.reward = r;
        t.next_state = encode(current, universe_.size());
        // The step cap truncates rather than terminates: the value of the
        // final state still bootstraps.
        t.terminal = done && ep.outcome != EpisodeOutcome::step_cap;
        replay_.push(std::move(t));

        ep.steps.push_back(StepRecord{cursor, action, r, cum, cand_report.per_call});

        if (replay_.size() >= agent_.batch_size) {
            const auto batch = replay_.sample(agent_.batch_size, rng_);
            const double loss = train_step(net_, target_net_, batch, agent_);
            ++updates_;
            ep.losses.emplace_back(global_step_, loss);
            if (updates_ % agent_.target_sync_interval == 0)
                target_net_ = net_;
        }

        cursor = (cursor + 1) % trace_len_;
        if (done)
            break;
    }
    ep.cum_reward = cum;
    return ep;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorCode::io, "cannot open " + path + " for writing");
    out << body;
    if (!out)
        fail(ErrorCode::io, "failed writing " + path);
}

} // namespace

TrainingSummary train(const SyscallUniverse& universe, CoverageOracle& oracle,
                      const TrainOptions& options, const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    Trainer trainer(universe, oracle, options.agent, options.episode, options.trace_len,
                    options.seed);

    TrainingSummary summary;
    std::vector<Trace> archived;
    std::vector<std::vector<std::uint64_t>> archived_cov;
    std::string loss_csv = "step,loss\n";
    std::string episodes_csv = "episode,steps,cum_reward,outcome\n";

    for (std::uint32_t e = 0; e < options.episode.episodes; ++e) {
        EpisodeLog ep = trainer.run_episode();
        ++summary.episodes_run;
        summary.total_steps += ep.steps.size();
        for (const auto& [step, loss] : ep.losses) {
            loss_csv += std::to_string(step);
            loss_csv += ',';
            loss_csv += format_double(loss);
            loss_csv += '\n';
            summary.final_loss = loss;
        }
        episodes_csv += std::to_string(e);
        episodes_csv += ',';
        episodes_csv += std::to_string(ep.steps.size());
        episodes_csv += ',';
        episodes_csv += format_double(ep.cum_reward);
        episodes_csv += ',';
        episodes_csv += outcome_name(ep.outcome);
        episodes_csv += '\n';
        if (ep.archived) {
            archived.push_back(*ep.archived);
            archived_cov.push_back(ep.archived_coverage->per_call);
            summary.best_total =
                std::max(summary.best_total, ep.archived_coverage->total());
            ++summary.archived_count;
        }
        log::debug("episode %u: %s after %zu steps, cumulative reward %.4f", e,
                   outcome_name(ep.outcome), ep.steps.size(), ep.cum_reward);
    }
    summary.train_updates = trainer.train_updates();
    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    CorpusMeta meta;
    meta.trace_len = options.trace_len;
    meta.params["seed"] = std::to_string(options.seed);
    meta.params["episodes"] = std::to_string(options.episode.episodes);
    meta.params["gamma"] = format_double(options.agent.discount);
    meta.params["lr"] = format_double(options.agent.learning_rate);
    meta.params["t1"] = format_double(options.episode.reward_high);
    meta.params["t2"] = format_double(options.episode.reward_low);
    Corpus archive = pack_corpus(archived, meta, universe, archived_cov);
    write_corpus(archive, universe, out_dir + "/archive.corpus");
    write_text_file(out_dir + "/loss.csv", loss_csv);
    write_text_file(out_dir + "/episodes.csv", episodes_csv);

    if (options.export_count > 0 && !archived.empty()) {
        // Seeded sample without replacement, mirroring how a fixed number of
        // archived traces gets handed to the fuzzer.
        Rng export_rng(mix_u64(options.seed ^ 0x5eedc0de5eedc0deull));
        std::vector<std::size_t> idx(archived.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        const std::size_t take = std::min<std::size_t>(options.export_count, idx.size());
        for (std::size_t i = 0; i < take; ++i) {
            const std::size_t j = i + uniform_index(export_rng, idx.size() - i);
            std::swap(idx[i], idx[j]);
        }
        std::vector<Trace> sel;
        std::vector<std::vector<std::uint64_t>> sel_cov;
        for (std::size_t i = 0; i < take; ++i) {
            sel.push_back(archived[idx[i]]);
            sel_cov.push_back(archived_cov[idx[i]]);
        }
        CorpusMeta export_meta = meta;
        export_meta.params["exported"] = std::to_string(take);
        Corpus exported = pack_corpus(sel, export_meta, universe, sel_cov);
        write_corpus(exported, universe, out_dir + "/export.corpus");
    }

    nlohmann::ordered_json js;
    js["episodes_run"] = summary.episodes_run;
    js["archived"] = summary.archived_count;
    js["total_steps"] = summary.total_steps;
    js["train_updates"] = summary.train_updates;
    js["wall_seconds"] = summary.wall_seconds;
    js["final_loss"] = summary.final_loss;
    js["best_total"] = summary.best_total;
    write_text_file(out_dir + "/summary.json", js.dump(2) + "\n");
    return summary;
}

} // namespace tracesynth
