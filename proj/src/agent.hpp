#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "qnet.hpp"
#include "rng.hpp"
#include "trace.hpp"
#include "universe.hpp"

namespace tracesynth {

struct AgentConfig {
    double discount = 0.9;
    double learning_rate = 0.01;
    double epsilon_start = 0.95;
    double epsilon_end = 0.0;
    std::uint64_t epsilon_decay_steps = 10'000;
    std::uint32_t replay_capacity = 10'000;
    std::uint32_t batch_size = 64;
    std::uint32_t target_sync_interval = 200;
    std::uint32_t hidden_width = 512;
};

struct EpisodeConfig {
    double reward_high = 10.0; // T1: archive and stop once cumulative reward exceeds this
    double reward_low = -5.0;  // T2: discard and stop once cumulative reward drops below this
    std::uint32_t max_steps_per_episode = 150;
    std::uint32_t episodes = 480;
    // When true, a replacement whose reward is negative is rolled back and
    // only the transition is kept for learning. Default keeps every
    // replacement; the negative reward itself is the learning signal.
    bool revert_on_decrease = false;
};

struct Transition {
    StateEncoding state;
    SyscallId action = 0;
    double reward = 0.0;
    StateEncoding next_state;
    bool terminal = false;
};

/// Fixed-capacity ring buffer with uniform sampling (with replacement, so a
/// batch is always exactly batch_size draws).
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::uint32_t capacity);

    void push(Transition t);
    std::vector<Transition> sample(std::uint32_t batch_size, Rng& rng) const;
    std::size_t size() const { return buffer_.size(); }
    std::uint32_t capacity() const { return capacity_; }

private:
    std::uint32_t capacity_;
    std::size_t next_ = 0;
    std::vector<Transition> buffer_;
};

/// R = (sum_i ln(next_i / prev_i)) / L. Positive iff the geometric mean rose.
double reward(const CoverageReport& prev, const CoverageReport& next);

/// Linear decay from epsilon_start at step 0 to epsilon_end at
/// epsilon_decay_steps, held at epsilon_end afterwards.
double epsilon_at(std::uint64_t step, const AgentConfig& config);

/// Epsilon-greedy over the Q-values for `state`: with probability epsilon a
/// uniform random id, otherwise the argmax (lowest id on ties). Always draws
/// the exploration coin first so the rng stream is schedule-independent.
SyscallId select_action(const QNetwork& net, const StateEncoding& state, double epsilon,
                        Rng& rng);

struct Gradients {
    Eigen::MatrixXd w1, w2, w3;
    Eigen::VectorXd b1, b2, b3;
};

/// TD targets y_b = r_b + discount * max_a Q_target(s'_b, a), or y_b = r_b
/// for terminal transitions. The targets do not depend on the online net.
Eigen::VectorXd td_targets(const QNetwork& target_net, const std::vector<Transition>& batch,
                           double discount);

/// Mean squared TD error: (1/B) * sum_b (Q(s_b, a_b) - y_b)^2.
double td_loss(const QNetwork& net, const std::vector<Transition>& batch,
               const Eigen::VectorXd& targets);

/// Same loss, plus its analytic gradient with respect to every parameter.
double td_loss_and_gradients(const QNetwork& net, const std::vector<Transition>& batch,
                             const Eigen::VectorXd& targets, Gradients& out);

/// One SGD step on the batch. Returns the pre-step loss. Fails with a
/// divergence error if the loss or any updated parameter is non-finite.
double train_step(QNetwork& net, const QNetwork& target_net,
                  const std::vector<Transition>& batch, const AgentConfig& config);

enum class EpisodeOutcome { reached_high, fell_low, step_cap };

const char* outcome_name(EpisodeOutcome o);

struct StepRecord {
    std::uint32_t cursor = 0;
    SyscallId action = 0;
    double reward = 0.0;
    double cum_reward = 0.0;
    std::vector<std::uint64_t> per_call; // coverage of the evaluated candidate
};

struct EpisodeLog {
    std::vector<StepRecord> steps;
    EpisodeOutcome outcome = EpisodeOutcome::step_cap;
    double cum_reward = 0.0;
    std::optional<Trace> archived;
    std::optional<CoverageReport> archived_coverage;
    std::vector<std::pair<std::uint64_t, double>> losses; // (global step, loss)
};

/// Owns the mutable training state: online and target networks, replay
/// buffer, step and update counters. Episodes mutate it in place.
class Trainer {
public:
    Trainer(const SyscallUniverse& universe, CoverageOracle& oracle, AgentConfig agent,
            EpisodeConfig episode, std::uint32_t trace_len, std::uint64_t seed);

    EpisodeLog run_episode();

    std::uint64_t global_step() const { return global_step_; }
    std::uint64_t train_updates() const { return updates_; }
    const QNetwork& net() const { return net_; }

private:
    const SyscallUniverse& universe_;
    CoverageOracle& oracle_;
    AgentConfig agent_;
    EpisodeConfig episode_;
    std::uint32_t trace_len_;
    Rng rng_;
    QNetwork net_;
    QNetwork target_net_;
    ReplayBuffer replay_;
    std::uint64_t global_step_ = 0;
    std::uint64_t updates_ = 0;
};

struct TrainOptions {
    AgentConfig agent;
    EpisodeConfig episode;
    std::uint32_t trace_len = 5;
    std::uint64_t seed = 0;
    // When positive, additionally writes export.corpus with a seeded random
    // sample of min(export_count, archived) traces.
    std::uint32_t export_count = 0;
};

struct TrainingSummary {
    std::uint32_t episodes_run = 0;
    std::uint32_t archived_count = 0;
    std::uint64_t total_steps = 0;
    std::uint64_t train_updates = 0;
    double wall_seconds = 0.0;
    double final_loss = 0.0;
    std::uint64_t best_total = 0; // highest total coverage among archived traces
};

/// Full training run. Writes archive.corpus (plus sidecar metadata),
/// loss.csv, episodes.csv, summary.json, and optionally export.corpus into
/// out_dir, which must already exist.
TrainingSummary train(const SyscallUniverse& universe, CoverageOracle& oracle,
                      const TrainOptions& options, const std::string& out_dir);

} // namespace tracesynth
