#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "uavris/env.hpp"
#include "uavris/rng.hpp"

namespace uavris {

// Fully-connected value network, rectifier hidden layers, identity output.
// Weights are plain double arrays; training is manual backprop so the
// gradients can be checked against finite differences.
class QNetwork {
 public:
  QNetwork() = default;
  // layer_sizes = {input, hidden..., output}
  QNetwork(std::vector<int> layer_sizes, Rng& rng);

  std::vector<double> forward(const std::vector<double>& input) const;

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }

  // Flat parameter view (weights then bias, layer by layer) for the
  // finite-difference harness and checkpoints.
  size_t param_count() const;
  double get_param(size_t i) const;
  void set_param(size_t i, double v);

  void serialize(std::ostream& out) const;
  static QNetwork deserialize(std::istream& in);

  // Leaves gradient_step's hands directly on the arrays.
  std::vector<std::vector<double>>& weights() { return weights_; }
  std::vector<std::vector<double>>& biases() { return biases_; }
  const std::vector<std::vector<double>>& weights() const { return weights_; }
  const std::vector<std::vector<double>>& biases() const { return biases_; }

 private:
  std::vector<int> sizes_;
  // weights_[l] is row-major (sizes_[l+1] x sizes_[l]).
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> biases_;
};

struct Transition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
};

// FIFO ring buffer.
class ReplayMemory {
 public:
  explicit ReplayMemory(size_t capacity) : capacity_(capacity) {}

  void push(Transition t);
  size_t size() const { return buffer_.size(); }
  size_t capacity() const { return capacity_; }
  const Transition& at(size_t i) const { return buffer_[i]; }

  // Uniform sample with replacement of `n` transition indices.
  std::vector<size_t> sample_indices(size_t n, Rng& rng) const;

 private:
  size_t capacity_;
  size_t cursor_ = 0;
  std::vector<Transition> buffer_;
};

struct TrainConfig {
  double alpha0 = 0.1;
  double eta = 0.001;
  double epsilon = 0.1;
  double gamma = 0.7;
  int episodes = 1000;
  int target_sync_period = 200;  // gradient steps between theta* <- theta
  int batch_size = 128;
  size_t replay_capacity = 10000;
  int hidden_units = 50;
  int hidden_layers = 2;

  static TrainConfig from_config(const KeyValueConfig& cfg);
  static const std::set<std::string>& known_keys();
};

// Greedy-with-exploration rule: the argmax with probability 1-epsilon,
// every other action with probability epsilon/(|A|-1). Ties break low.
int select_action(const std::vector<double>& q_values, double epsilon, Rng& rng);

int argmax_index(const std::vector<double>& q_values);

// alpha0 / (1 + eta * n_e)
double decayed_lr(double alpha0, double eta, int episode);

// y_i = r_i + gamma * max_a Q_target(s'_i, a); terminal transitions use r_i.
std::vector<double> td_targets(const ReplayMemory& memory,
                               const std::vector<size_t>& batch,
                               const QNetwork& target_net, double gamma);

// One descent step on L = 1/(2I) sum_i (y_i - Q(s_i, a_i))^2. Returns the
// loss evaluated before the update. Throws on non-finite gradients.
double gradient_step(QNetwork& net, const ReplayMemory& memory,
                     const std::vector<size_t>& batch,
                     const std::vector<double>& targets, double lr);

// Loss of the batch under the current parameters (finite-difference hook).
double td_loss(const QNetwork& net, const ReplayMemory& memory,
               const std::vector<size_t>& batch,
               const std::vector<double>& targets);

// Plain Q-table update: (1-alpha) q + alpha (r + gamma max_next).
double tabular_q_update(double q, double r, double max_next, double alpha,
                        double gamma);

struct EpisodeRecord {
  int episode = 0;
  double sum_reward = 0.0;
  double energy_j = 0.0;
  double mean_rate_bps = 0.0;  // per-slot sum rate, averaged over the episode
  double lr = 0.0;
  double epsilon = 0.0;
  double satisfied_frac = 0.0;  // fraction of (slot, user) pairs at rate >= r_min
};

struct TrainResult {
  QNetwork net;
  std::vector<EpisodeRecord> log;
};

// Algorithm-1-style loop: epsilon-greedy acting, replay storage, TD targets
// from the frozen target network, SGD with the decayed per-episode rate,
// periodic target sync.
TrainResult train(Environment& env, const TrainConfig& cfg, Rng& rng);

// Uniform-random policy rollouts; returns per-episode records (baseline for
// the convergence comparison).
std::vector<EpisodeRecord> random_policy_rollouts(Environment& env, int episodes,
                                                  Rng& rng);

// Greedy rollouts (epsilon = 0) of a fixed network. The optional out
// parameters collect per-slot traces (one inner vector per episode).
std::vector<EpisodeRecord> greedy_rollouts(
    Environment& env, const QNetwork& net, int episodes, Rng& rng,
    std::vector<std::vector<double>>* slot_sum_rates = nullptr,
    std::vector<std::vector<double>>* slot_energies = nullptr);

// Tabular Q-learning over hashed (quantized) state encodings. Exists as the
// comparison case that the value network is meant to beat.
class TabularQAgent {
 public:
  TabularQAgent(int n_actions, double quantization = 0.05)
      : n_actions_(n_actions), quant_(quantization) {}

  std::uint64_t key_of(const std::vector<double>& encoded) const;
  const std::vector<double>& q_values(std::uint64_t key) const;
  void update(std::uint64_t key, int action, double reward,
              std::uint64_t next_key, double alpha, double gamma);
  size_t table_size() const { return table_.size(); }

 private:
  int n_actions_;
  double quant_;
  mutable std::unordered_map<std::uint64_t, std::vector<double>> table_;
};

std::vector<EpisodeRecord> train_tabular(Environment& env, const TrainConfig& cfg,
                                         Rng& rng);

// Checkpoint bytes: "DDQN" magic, u32 format version, layer sizes, row-major
// f64 weight/bias arrays, rng state.
void save_checkpoint_stream(std::ostream& out, const QNetwork& net,
                            const Rng& rng);
struct Checkpoint {
  QNetwork net;
  std::array<std::uint64_t, 4> rng_state{};
};
Checkpoint load_checkpoint_stream(std::istream& in);

}  // namespace uavris
