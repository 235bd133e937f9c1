#include "uavris/ddqn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace uavris {

QNetwork::QNetwork(std::vector<int> layer_sizes, Rng& rng)
    : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2)
    throw std::invalid_argument("QNetwork needs at least input and output layers");
  for (int s : sizes_)
    if (s <= 0) throw std::invalid_argument("QNetwork layer sizes must be positive");
  const size_t n_layers = sizes_.size() - 1;
  weights_.resize(n_layers);
  biases_.resize(n_layers);
  for (size_t l = 0; l < n_layers; ++l) {
    const int fan_in = sizes_[l], fan_out = sizes_[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    weights_[l].resize(static_cast<size_t>(fan_out) * fan_in);
    for (auto& w : weights_[l]) w = rng.uniform(-bound, bound);
    biases_[l].assign(fan_out, 0.0);
  }
}

std::vector<double> QNetwork::forward(const std::vector<double>& input) const {
  if (static_cast<int>(input.size()) != sizes_.front())
    throw std::invalid_argument("QNetwork::forward: input dimension mismatch");
  std::vector<double> act = input;
  std::vector<double> next;
  for (size_t l = 0; l < weights_.size(); ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    next.assign(out, 0.0);
    const double* w = weights_[l].data();
    for (int o = 0; o < out; ++o) {
      double acc = biases_[l][o];
      const double* wrow = w + static_cast<size_t>(o) * in;
      for (int i = 0; i < in; ++i) acc += wrow[i] * act[i];
      next[o] = acc;
    }
    if (l + 1 < weights_.size())
      for (auto& v : next) v = v > 0.0 ? v : 0.0;  // rectifier on hidden
    act.swap(next);
  }
  return act;
}

size_t QNetwork::param_count() const {
  size_t n = 0;
  for (size_t l = 0; l < weights_.size(); ++l)
    n += weights_[l].size() + biases_[l].size();
  return n;
}

double QNetwork::get_param(size_t i) const {
  for (size_t l = 0; l < weights_.size(); ++l) {
    if (i < weights_[l].size()) return weights_[l][i];
    i -= weights_[l].size();
    if (i < biases_[l].size()) return biases_[l][i];
    i -= biases_[l].size();
  }
  throw std::out_of_range("QNetwork::get_param");
}

void QNetwork::set_param(size_t i, double v) {
  for (size_t l = 0; l < weights_.size(); ++l) {
    if (i < weights_[l].size()) {
      weights_[l][i] = v;
      return;
    }
    i -= weights_[l].size();
    if (i < biases_[l].size()) {
      biases_[l][i] = v;
      return;
    }
    i -= biases_[l].size();
  }
  throw std::out_of_range("QNetwork::set_param");
}

void ReplayMemory::push(Transition t) {
  if (capacity_ == 0) return;
  if (buffer_.size() < capacity_) {
    buffer_.push_back(std::move(t));
  } else {
    buffer_[cursor_] = std::move(t);  // strict FIFO eviction
    cursor_ = (cursor_ + 1) % capacity_;
  }
}

std::vector<size_t> ReplayMemory::sample_indices(size_t n, Rng& rng) const {
  if (buffer_.size() < n)
    throw std::logic_error("ReplayMemory: sampling before the buffer holds a minibatch");
  std::vector<size_t> idx(n);
  for (auto& i : idx) i = rng.uniform_index(buffer_.size());
  return idx;
}

TrainConfig TrainConfig::from_config(const KeyValueConfig& cfg) {
  TrainConfig t;
  t.alpha0 = cfg.get_double("alpha0", t.alpha0);
  t.eta = cfg.get_double("eta", t.eta);
  t.epsilon = cfg.get_double("epsilon", t.epsilon);
  t.gamma = cfg.get_double("gamma", t.gamma);
  t.episodes = static_cast<int>(cfg.get_int("episodes", t.episodes));
  t.target_sync_period =
      static_cast<int>(cfg.get_int("target_sync_period", t.target_sync_period));
  t.batch_size = static_cast<int>(cfg.get_int("batch_size", t.batch_size));
  t.replay_capacity = cfg.get_u64("replay_capacity", t.replay_capacity);
  t.hidden_units = static_cast<int>(cfg.get_int("hidden_units", t.hidden_units));
  t.hidden_layers = static_cast<int>(cfg.get_int("hidden_layers", t.hidden_layers));
  if (t.alpha0 <= 0.0 || t.alpha0 > 1.0) throw ConfigError("alpha0 must be in (0,1]");
  if (t.eta < 0.0) throw ConfigError("eta must be >= 0");
  if (t.epsilon < 0.0 || t.epsilon > 1.0) throw ConfigError("epsilon must be in [0,1]");
  if (t.gamma < 0.0 || t.gamma >= 1.0) throw ConfigError("gamma must be in [0,1)");
  if (t.episodes < 0) throw ConfigError("episodes must be >= 0");
  if (t.target_sync_period <= 0) throw ConfigError("target_sync_period must be > 0");
  if (t.batch_size <= 0) throw ConfigError("batch_size must be > 0");
  if (t.replay_capacity == 0) throw ConfigError("replay_capacity must be > 0");
  if (t.hidden_units <= 0 || t.hidden_layers < 0)
    throw ConfigError("hidden_units must be > 0 and hidden_layers >= 0");
  return t;
}

const std::set<std::string>& TrainConfig::known_keys() {
  static const std::set<std::string> keys = {
      "alpha0", "eta", "epsilon", "gamma", "episodes", "target_sync_period",
      "batch_size", "replay_capacity", "hidden_units", "hidden_layers"};
  return keys;
}

int argmax_index(const std::vector<double>& q_values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(q_values.size()); ++i)
    if (q_values[i] > q_values[best]) best = i;
  return best;
}

int select_action(const std::vector<double>& q_values, double epsilon, Rng& rng) {
  const int n = static_cast<int>(q_values.size());
  if (n < 2) throw std::invalid_argument("select_action: need at least 2 actions");
  const int greedy = argmax_index(q_values);
  if (rng.uniform01() < 1.0 - epsilon) return greedy;
  int other = static_cast<int>(rng.uniform_index(n - 1));
  if (other >= greedy) ++other;
  return other;
}

double decayed_lr(double alpha0, double eta, int episode) {
  return alpha0 / (1.0 + eta * episode);
}

std::vector<double> td_targets(const ReplayMemory& memory,
                               const std::vector<size_t>& batch,
                               const QNetwork& target_net, double gamma) {
  if (batch.empty()) throw std::invalid_argument("td_targets: empty batch");
  std::vector<double> y(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = memory.at(batch[i]);
    if (t.terminal) {
      y[i] = t.reward;
      continue;
    }
    const std::vector<double> q_next = target_net.forward(t.next_state);
    y[i] = t.reward + gamma * *std::max_element(q_next.begin(), q_next.end());
  }
  return y;
}

double td_loss(const QNetwork& net, const ReplayMemory& memory,
               const std::vector<size_t>& batch,
               const std::vector<double>& targets) {
  double loss = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = memory.at(batch[i]);
    const double q = net.forward(t.state)[t.action];
    const double diff = targets[i] - q;
    loss += diff * diff;
  }
  return loss / (2.0 * static_cast<double>(batch.size()));
}

double gradient_step(QNetwork& net, const ReplayMemory& memory,
                     const std::vector<size_t>& batch,
                     const std::vector<double>& targets, double lr) {
  if (batch.empty()) throw std::invalid_argument("gradient_step: empty batch");
  if (batch.size() != targets.size())
    throw std::invalid_argument("gradient_step: batch/target size mismatch");

  const auto& sizes = net.layer_sizes();
  const size_t n_layers = net.weights().size();

  std::vector<std::vector<double>> grad_w(n_layers), grad_b(n_layers);
  for (size_t l = 0; l < n_layers; ++l) {
    grad_w[l].assign(net.weights()[l].size(), 0.0);
    grad_b[l].assign(net.biases()[l].size(), 0.0);
  }

  // activations[0] = input, activations[l+1] = post-rectifier output of
  // layer l (identity on the last layer).
  std::vector<std::vector<double>> activations(n_layers + 1);
  std::vector<std::vector<double>> deltas(n_layers);
  double loss = 0.0;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  for (size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = memory.at(batch[i]);
    activations[0] = t.state;
    for (size_t l = 0; l < n_layers; ++l) {
      const int in = sizes[l], out = sizes[l + 1];
      auto& a_next = activations[l + 1];
      a_next.assign(out, 0.0);
      const double* w = net.weights()[l].data();
      const double* a_prev = activations[l].data();
      for (int o = 0; o < out; ++o) {
        double acc = net.biases()[l][o];
        const double* wrow = w + static_cast<size_t>(o) * in;
        for (int c = 0; c < in; ++c) acc += wrow[c] * a_prev[c];
        a_next[o] = (l + 1 < n_layers && acc < 0.0) ? 0.0 : acc;
      }
    }

    const double q = activations[n_layers][t.action];
    const double diff = targets[i] - q;
    loss += 0.5 * diff * diff * inv_batch;

    // dL/dq_a = -(y - q)/I, zero on the other outputs.
    deltas[n_layers - 1].assign(sizes[n_layers], 0.0);
    deltas[n_layers - 1][t.action] = -diff * inv_batch;

    for (size_t l = n_layers; l-- > 0;) {
      const int in = sizes[l], out = sizes[l + 1];
      const double* delta = deltas[l].data();
      const double* a_prev = activations[l].data();
      double* gw = grad_w[l].data();
      for (int o = 0; o < out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        grad_b[l][o] += d;
        double* gwrow = gw + static_cast<size_t>(o) * in;
        for (int c = 0; c < in; ++c) gwrow[c] += d * a_prev[c];
      }
      if (l == 0) break;
      auto& delta_prev = deltas[l - 1];
      delta_prev.assign(in, 0.0);
      const double* w = net.weights()[l].data();
      for (int o = 0; o < out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        const double* wrow = w + static_cast<size_t>(o) * in;
        for (int c = 0; c < in; ++c) delta_prev[c] += d * wrow[c];
      }
      // Rectifier gate: gradient flows only through active units.
      for (int c = 0; c < in; ++c)
        if (activations[l][c] <= 0.0) delta_prev[c] = 0.0;
    }
  }

  for (size_t l = 0; l < n_layers; ++l) {
    for (double g : grad_w[l])
      if (!std::isfinite(g))
        throw std::runtime_error("gradient_step: non-finite weight gradient");
    for (double g : grad_b[l])
      if (!std::isfinite(g))
        throw std::runtime_error("gradient_step: non-finite bias gradient");
    double* w = net.weights()[l].data();
    const double* gw = grad_w[l].data();
    for (size_t i = 0; i < grad_w[l].size(); ++i) w[i] -= lr * gw[i];
    double* b = net.biases()[l].data();
    const double* gb = grad_b[l].data();
    for (size_t i = 0; i < grad_b[l].size(); ++i) b[i] -= lr * gb[i];
  }
  return loss;
}

double tabular_q_update(double q, double r, double max_next, double alpha,
                        double gamma) {
  return (1.0 - alpha) * q + alpha * (r + gamma * max_next);
}

namespace {

std::vector<int> network_layout(const Environment& env, const TrainConfig& cfg) {
  std::vector<int> sizes;
  sizes.push_back(env.encoding_dim());
  for (int l = 0; l < cfg.hidden_layers; ++l) sizes.push_back(cfg.hidden_units);
  sizes.push_back(env.action_count());
  return sizes;
}

struct EpisodeStats {
  double sum_reward = 0.0;
  double energy_j = 0.0;
  double sum_rate_acc = 0.0;
  long long satisfied = 0;
  long long user_slots = 0;
  int slots = 0;

  void add(const StepOutcome& out) {
    sum_reward += out.reward;
    energy_j += out.slot_energy_j;
    double s = 0.0;
    for (double r : out.rates_bps) s += r;
    sum_rate_acc += s;
    for (bool ok : out.satisfied) satisfied += ok ? 1 : 0;
    user_slots += static_cast<long long>(out.satisfied.size());
    ++slots;
  }

  EpisodeRecord record(int episode, double lr, double epsilon) const {
    EpisodeRecord rec;
    rec.episode = episode;
    rec.sum_reward = sum_reward;
    rec.energy_j = energy_j;
    rec.mean_rate_bps = slots > 0 ? sum_rate_acc / slots : 0.0;
    rec.lr = lr;
    rec.epsilon = epsilon;
    rec.satisfied_frac =
        user_slots > 0 ? static_cast<double>(satisfied) / user_slots : 0.0;
    return rec;
  }
};

}  // namespace

TrainResult train(Environment& env, const TrainConfig& cfg, Rng& rng) {
  TrainResult result;
  result.net = QNetwork(network_layout(env, cfg), rng);
  QNetwork target = result.net;
  ReplayMemory memory(cfg.replay_capacity);
  long long grad_steps = 0;

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const double lr = decayed_lr(cfg.alpha0, cfg.eta, ep);
    NetworkState state = env.reset(rng);
    std::vector<double> enc = env.encode_state(state);
    EpisodeStats stats;

    while (true) {
      const std::vector<double> q = result.net.forward(enc);
      const int action = select_action(q, cfg.epsilon, rng);
      StepOutcome out = env.step(state, action, rng);
      std::vector<double> enc_next = env.encode_state(out.next_state);

      memory.push(Transition{enc, action, out.reward, enc_next, out.done});
      stats.add(out);
      state = std::move(out.next_state);
      enc = std::move(enc_next);

      if (memory.size() >= static_cast<size_t>(cfg.batch_size)) {
        const auto batch = memory.sample_indices(cfg.batch_size, rng);
        const auto targets = td_targets(memory, batch, target, cfg.gamma);
        gradient_step(result.net, memory, batch, targets, lr);
        if (++grad_steps % cfg.target_sync_period == 0) target = result.net;
      }
      if (out.done) break;
    }
    result.log.push_back(stats.record(ep, lr, cfg.epsilon));
  }
  return result;
}

std::vector<EpisodeRecord> random_policy_rollouts(Environment& env, int episodes,
                                                  Rng& rng) {
  std::vector<EpisodeRecord> log;
  for (int ep = 0; ep < episodes; ++ep) {
    NetworkState state = env.reset(rng);
    EpisodeStats stats;
    while (true) {
      const int action = static_cast<int>(rng.uniform_index(env.action_count()));
      StepOutcome out = env.step(state, action, rng);
      stats.add(out);
      state = std::move(out.next_state);
      if (out.done) break;
    }
    log.push_back(stats.record(ep, 0.0, 1.0));
  }
  return log;
}

std::vector<EpisodeRecord> greedy_rollouts(
    Environment& env, const QNetwork& net, int episodes, Rng& rng,
    std::vector<std::vector<double>>* slot_sum_rates,
    std::vector<std::vector<double>>* slot_energies) {
  std::vector<EpisodeRecord> log;
  for (int ep = 0; ep < episodes; ++ep) {
    NetworkState state = env.reset(rng);
    EpisodeStats stats;
    std::vector<double> rate_trace;
    std::vector<double> energy_trace;
    while (true) {
      const std::vector<double> q = net.forward(env.encode_state(state));
      const int action = argmax_index(q);
      StepOutcome out = env.step(state, action, rng);
      stats.add(out);
      if (slot_sum_rates) {
        double s = 0.0;
        for (double r : out.rates_bps) s += r;
        rate_trace.push_back(s);
      }
      if (slot_energies) energy_trace.push_back(out.slot_energy_j);
      state = std::move(out.next_state);
      if (out.done) break;
    }
    if (slot_sum_rates) slot_sum_rates->push_back(std::move(rate_trace));
    if (slot_energies) slot_energies->push_back(std::move(energy_trace));
    log.push_back(stats.record(ep, 0.0, 0.0));
  }
  return log;
}

std::uint64_t TabularQAgent::key_of(const std::vector<double>& encoded) const {
  // FNV-1a over the quantized coordinates.
  std::uint64_t h = 1469598103934665603ULL;
  for (double v : encoded) {
    const auto q = static_cast<std::int64_t>(std::llround(v / quant_));
    auto bytes = static_cast<std::uint64_t>(q);
    for (int b = 0; b < 8; ++b) {
      h ^= (bytes >> (8 * b)) & 0xffULL;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

const std::vector<double>& TabularQAgent::q_values(std::uint64_t key) const {
  auto it = table_.find(key);
  if (it == table_.end()) {
    // Tiny deterministic per-(state, action) init noise so the argmax over
    // a fresh entry is not degenerately action 0. Fresh entries dominate
    // when the hashed state space is effectively unbounded, and a constant
    // initial action would bias the whole baseline.
    std::vector<double> q(n_actions_);
    std::uint64_t h = key ^ 0x9e3779b97f4a7c15ULL;
    for (int a = 0; a < n_actions_; ++a) {
      h ^= h >> 33;
      h *= 0xff51afd7ed558ccdULL;
      h ^= h >> 29;
      q[a] = 1e-9 * static_cast<double>(h >> 11) * 0x1.0p-53;
    }
    it = table_.emplace(key, std::move(q)).first;
  }
  return it->second;
}

void TabularQAgent::update(std::uint64_t key, int action, double reward,
                           std::uint64_t next_key, double alpha, double gamma) {
  const std::vector<double>& next_q = q_values(next_key);
  const double max_next = *std::max_element(next_q.begin(), next_q.end());
  q_values(key);  // materialize with init noise before mutating
  auto& q = table_[key];
  q[action] = tabular_q_update(q[action], reward, max_next, alpha, gamma);
}

std::vector<EpisodeRecord> train_tabular(Environment& env, const TrainConfig& cfg,
                                         Rng& rng) {
  TabularQAgent agent(env.action_count());
  std::vector<EpisodeRecord> log;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const double lr = decayed_lr(cfg.alpha0, cfg.eta, ep);
    NetworkState state = env.reset(rng);
    std::uint64_t key = agent.key_of(env.encode_state(state));
    EpisodeStats stats;
    while (true) {
      const int action = select_action(agent.q_values(key), cfg.epsilon, rng);
      StepOutcome out = env.step(state, action, rng);
      const std::uint64_t next_key = agent.key_of(env.encode_state(out.next_state));
      agent.update(key, action, out.reward, next_key, lr, cfg.gamma);
      stats.add(out);
      state = std::move(out.next_state);
      key = next_key;
      if (out.done) break;
    }
    log.push_back(stats.record(ep, lr, cfg.epsilon));
  }
  return log;
}

namespace {

constexpr char kMagic[4] = {'D', 'D', 'Q', 'N'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated stream");
  return v;
}

}  // namespace

void QNetwork::serialize(std::ostream& out) const {
  write_raw(out, static_cast<std::uint32_t>(sizes_.size()));
  for (int s : sizes_) write_raw(out, static_cast<std::uint32_t>(s));
  for (size_t l = 0; l < weights_.size(); ++l) {
    out.write(reinterpret_cast<const char*>(weights_[l].data()),
              static_cast<std::streamsize>(weights_[l].size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(biases_[l].data()),
              static_cast<std::streamsize>(biases_[l].size() * sizeof(double)));
  }
}

QNetwork QNetwork::deserialize(std::istream& in) {
  const auto n_sizes = read_raw<std::uint32_t>(in);
  if (n_sizes < 2 || n_sizes > 64)
    throw std::runtime_error("checkpoint: corrupt layer count");
  QNetwork net;
  net.sizes_.resize(n_sizes);
  for (auto& s : net.sizes_) {
    s = static_cast<int>(read_raw<std::uint32_t>(in));
    if (s <= 0 || s > 1'000'000) throw std::runtime_error("checkpoint: corrupt layer size");
  }
  net.weights_.resize(n_sizes - 1);
  net.biases_.resize(n_sizes - 1);
  for (size_t l = 0; l + 1 < n_sizes; ++l) {
    net.weights_[l].resize(static_cast<size_t>(net.sizes_[l]) * net.sizes_[l + 1]);
    net.biases_[l].resize(net.sizes_[l + 1]);
    in.read(reinterpret_cast<char*>(net.weights_[l].data()),
            static_cast<std::streamsize>(net.weights_[l].size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(net.biases_[l].data()),
            static_cast<std::streamsize>(net.biases_[l].size() * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated weights");
  }
  return net;
}

void save_checkpoint_stream(std::ostream& out, const QNetwork& net,
                            const Rng& rng) {
  out.write(kMagic, 4);
  write_raw(out, kVersion);
  net.serialize(out);
  for (std::uint64_t w : rng.state()) write_raw(out, w);
}

Checkpoint load_checkpoint_stream(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic bytes");
  const auto version = read_raw<std::uint32_t>(in);
  if (version != kVersion)
    throw std::runtime_error("checkpoint: unsupported format version " +
                             std::to_string(version));
  Checkpoint cp;
  cp.net = QNetwork::deserialize(in);
  for (auto& w : cp.rng_state) w = read_raw<std::uint64_t>(in);
  return cp;
}

}  // namespace uavris
