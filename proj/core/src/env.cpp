#include "uavris/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace uavris {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPhaseStep = std::numbers::pi / 10.0;
constexpr int kPhaseLattice = 20;  // 2pi / (pi/10)

double wrap_phase(double theta) {
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  return theta;
}

}  // namespace

EnvConfig EnvConfig::from_config(const KeyValueConfig& cfg) {
  EnvConfig e;
  const std::string mode = cfg.get_string("mode", "noma");
  if (mode == "noma") e.mode = AccessMode::kNoma;
  else if (mode == "oma") e.mode = AccessMode::kOma;
  else throw ConfigError("mode must be 'noma' or 'oma', got '" + mode + "'");

  const std::string los = cfg.get_string("los_mode", "radio_map");
  if (los == "radio_map") e.los_mode = LosMode::kRadioMap;
  else if (los == "probabilistic") e.los_mode = LosMode::kProbabilistic;
  else throw ConfigError("los_mode must be 'radio_map' or 'probabilistic'");

  e.horizon = static_cast<int>(cfg.get_int("horizon", e.horizon));
  e.grid_step = cfg.get_double("grid_step", e.grid_step);
  e.p_tilde_mw = cfg.get_double("p_tilde", e.p_tilde_mw);
  e.r_min_bps = cfg.get_double("r_min", e.r_min_bps);
  e.reward_c = cfg.get_double("reward_C", e.reward_c);
  e.p_max_mw = cfg.get_double("P_max", e.p_max_mw);

  const std::string f = cfg.get_string("factorization", "single_subaction");
  if (f == "single_subaction") e.factorization = Factorization::kSingleSubaction;
  else if (f == "full_product") e.factorization = Factorization::kFullProduct;
  else throw ConfigError("factorization must be 'single_subaction' or 'full_product'");

  e.uav_speed = cfg.get_double("uav_speed", e.uav_speed);
  e.p_init_mw = cfg.get_double("p_init", e.p_init_mw);
  e.n_antennas = static_cast<int>(cfg.get_int("n_antennas", e.n_antennas));
  e.n_elements = static_cast<int>(cfg.get_int("n_elements", e.n_elements));
  e.zf_cond_cap = cfg.get_double("zf_cond_cap", e.zf_cond_cap);

  e.ris_enabled = cfg.get_int("ris_enabled", 1) != 0;
  e.random_phase = cfg.get_int("random_phase", 0) != 0;
  e.fixed_decoding_order = cfg.get_int("fixed_decoding_order", 0) != 0;
  e.fixed_power_alloc = cfg.get_int("fixed_power_alloc", 0) != 0;
  e.static_uav = cfg.get_int("static_uav", 0) != 0;

  const std::string rm = cfg.get_string("reward_mode", "standard");
  if (rm == "standard") e.reward_mode = RewardMode::kStandard;
  else if (rm == "max_ee") e.reward_mode = RewardMode::kMaxEnergyEfficiency;
  else throw ConfigError("reward_mode must be 'standard' or 'max_ee'");

  if (e.horizon <= 0) throw ConfigError("horizon must be positive");
  if (e.grid_step <= 0) throw ConfigError("grid_step must be positive");
  if (e.uav_speed <= 0) throw ConfigError("uav_speed must be positive");
  if (e.p_tilde_mw < 0) throw ConfigError("p_tilde must be >= 0");
  if (e.p_init_mw < 0) throw ConfigError("p_init must be >= 0");
  if (e.p_max_mw <= 0) throw ConfigError("P_max must be positive");
  if (e.n_antennas <= 0 || e.n_elements <= 0)
    throw ConfigError("n_antennas and n_elements must be positive");
  return e;
}

const std::set<std::string>& EnvConfig::known_keys() {
  static const std::set<std::string> keys = {
      "mode", "los_mode", "horizon", "grid_step", "p_tilde", "r_min",
      "reward_C", "P_max", "factorization", "uav_speed", "p_init",
      "n_antennas", "n_elements", "zf_cond_cap", "ris_enabled", "random_phase",
      "fixed_decoding_order", "fixed_power_alloc", "static_uav", "reward_mode"};
  return keys;
}

std::vector<EnvAction> enumerate_actions(int n_elements, int n_users,
                                         Factorization f) {
  static constexpr int kMoves[5][2] = {{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  std::vector<EnvAction> actions;
  const auto blank = [&] {
    EnvAction a;
    a.phase_delta.assign(n_elements, 0);
    a.power_delta.assign(n_users, 0);
    return a;
  };

  if (f == Factorization::kSingleSubaction) {
    actions.reserve(5 + 2 * n_elements + 2 * n_users);
    for (const auto& mv : kMoves) {
      EnvAction a = blank();
      a.dx = mv[0];
      a.dy = mv[1];
      actions.push_back(std::move(a));
    }
    for (int e = 0; e < n_elements; ++e)
      for (int sign : {-1, +1}) {
        EnvAction a = blank();
        a.phase_delta[e] = static_cast<int8_t>(sign);
        actions.push_back(std::move(a));
      }
    for (int k = 0; k < n_users; ++k)
      for (int sign : {-1, +1}) {
        EnvAction a = blank();
        a.power_delta[k] = static_cast<int8_t>(sign);
        actions.push_back(std::move(a));
      }
    return actions;
  }

  double combos = 5.0;
  for (int e = 0; e < n_elements; ++e) combos *= 3.0;
  for (int k = 0; k < n_users; ++k) combos *= 3.0;
  if (combos / 5.0 > 1e5)
    throw ConfigError("full_product action space 3^N*3^K exceeds 1e5; use single_subaction");
  const long long n_phase = static_cast<long long>(std::pow(3.0, n_elements) + 0.5);
  const long long n_power = static_cast<long long>(std::pow(3.0, n_users) + 0.5);
  actions.reserve(static_cast<size_t>(5 * n_phase * n_power));
  for (const auto& mv : kMoves)
    for (long long pc = 0; pc < n_phase; ++pc)
      for (long long qc = 0; qc < n_power; ++qc) {
        EnvAction a = blank();
        a.dx = mv[0];
        a.dy = mv[1];
        long long rest = pc;
        for (int e = 0; e < n_elements; ++e) {
          a.phase_delta[e] = static_cast<int8_t>(rest % 3 - 1);
          rest /= 3;
        }
        rest = qc;
        for (int k = 0; k < n_users; ++k) {
          a.power_delta[k] = static_cast<int8_t>(rest % 3 - 1);
          rest /= 3;
        }
        actions.push_back(std::move(a));
      }
  return actions;
}

std::vector<bool> satisfaction(const std::vector<double>& rates_bps,
                               const std::vector<double>& r_min_bps) {
  if (rates_bps.size() != r_min_bps.size())
    throw std::invalid_argument("satisfaction: size mismatch");
  std::vector<bool> xi(rates_bps.size());
  for (size_t k = 0; k < rates_bps.size(); ++k)
    xi[k] = rates_bps[k] >= r_min_bps[k];
  return xi;
}

int satisfaction_sum(const std::vector<bool>& xi) {
  return static_cast<int>(std::count(xi.begin(), xi.end(), true));
}

double reward(int xi_sum, double e_t, double e_t1, int n_users, double c) {
  const bool all_satisfied = xi_sum >= n_users;
  if (e_t1 > e_t)
    return all_satisfied ? -e_t1 : c * (xi_sum - n_users) * e_t1;
  // Energy unchanged; a decrease lands here as well.
  return all_satisfied ? e_t1 : (xi_sum - n_users) * e_t1;
}

Environment::Environment(Scenario scenario, ChannelParams channel,
                         RotorParams rotor, EnvConfig cfg)
    : scenario_(std::move(scenario)),
      channel_(channel),
      rotor_(rotor),
      cfg_(cfg) {
  const int k_users = static_cast<int>(scenario_.users.size());
  if (k_users == 0) throw ConfigError("environment needs at least one user");
  if (cfg_.mode == AccessMode::kNoma && k_users % 2 != 0)
    throw ConfigError("NOMA mode requires an even user count (two per cluster)");
  const int zf_rows = cfg_.mode == AccessMode::kNoma ? k_users / 2 : k_users;
  if (zf_rows > cfg_.n_antennas)
    throw ConfigError("ZF needs served-entity count <= n_antennas (" +
                      std::to_string(zf_rows) + " > " +
                      std::to_string(cfg_.n_antennas) + ")");
  actions_ = enumerate_actions(cfg_.n_elements, k_users, cfg_.factorization);
  const double t_r = cfg_.slot_duration_s();
  hover_energy_j_ = slot_energy(false, cfg_.uav_speed, t_r, rotor_);
  move_energy_j_ = slot_energy(true, cfg_.uav_speed, t_r, rotor_);
  prev_slot_energy_j_ = hover_energy_j_;
  users_ = scenario_.users;
}

NetworkState Environment::reset(Rng& rng) {
  const Arena& arena = scenario_.map.arena;
  const int nx = static_cast<int>(std::floor((arena.x_max - arena.x_min) / cfg_.grid_step)) + 1;
  const int ny = static_cast<int>(std::floor((arena.y_max - arena.y_min) / cfg_.grid_step)) + 1;

  NetworkState s;
  s.uav_x = arena.x_min + cfg_.grid_step * static_cast<double>(rng.uniform_index(nx));
  s.uav_y = arena.y_min + cfg_.grid_step * static_cast<double>(rng.uniform_index(ny));
  s.thetas.resize(cfg_.n_elements);
  for (auto& t : s.thetas)
    t = kPhaseStep * static_cast<double>(rng.uniform_index(kPhaseLattice));
  s.powers_mw.assign(scenario_.users.size(), cfg_.p_init_mw);

  users_ = scenario_.users;
  s.user_xy.resize(users_.size());
  for (size_t k = 0; k < users_.size(); ++k) s.user_xy[k] = {users_[k].x, users_[k].y};

  prev_slot_energy_j_ = hover_energy_j_;
  slot_ = 0;
  frozen_plan_.reset();
  return s;
}

std::vector<double> Environment::noma_pipeline(
    const NetworkState& s, const ChannelRealization& real,
    const PhaseShiftMatrix& phi, std::vector<double>& powers_io,
    const std::vector<double>& prior_powers, bool power_changed,
    bool& reverted, NomaSlotDiag& diag) {
  const int k_users = static_cast<int>(powers_io.size());
  const int n_clusters = k_users / 2;
  const std::vector<double> zeros(k_users, 0.0);

  CMat rows(k_users, cfg_.n_antennas);
  std::vector<double> gains(k_users);
  for (int k = 0; k < k_users; ++k) {
    const auto row = assemble_combined_row(k, real, phi);
    double g = 0.0;
    for (int a = 0; a < cfg_.n_antennas; ++a) {
      rows.at(k, a) = row[a];
      g += std::norm(row[a]);
    }
    gains[k] = g;
  }

  diag.combined_rows = rows;
  ClusterPlan plan = frozen_plan_ ? *frozen_plan_ : cluster_users(gains, n_clusters);
  const auto fill_powers = [&](const std::vector<double>& p) {
    for (auto& c : plan.clusters) {
      c.power_mw = p[c.strong] + p[c.weak];
      if (cfg_.fixed_power_alloc) {
        c.alpha_strong = 0.25;
        c.alpha_weak = 0.75;
      } else if (c.power_mw > 0.0) {
        c.alpha_strong = p[c.strong] / c.power_mw;
        c.alpha_weak = p[c.weak] / c.power_mw;
      } else {
        c.alpha_strong = c.alpha_weak = 0.5;
      }
    }
  };
  fill_powers(powers_io);

  const auto representatives = [&] {
    CombinedChannel rep;
    rep.rows = CMat(n_clusters, cfg_.n_antennas);
    for (int l = 0; l < n_clusters; ++l)
      for (int a = 0; a < cfg_.n_antennas; ++a)
        rep.rows.at(l, a) = rows.at(plan.clusters[l].strong, a);
    return rep;
  };
  const auto cluster_powers = [&] {
    std::vector<double> p(n_clusters);
    for (int l = 0; l < n_clusters; ++l) p[l] = plan.clusters[l].power_mw;
    return p;
  };

  // Eq.-21f screen on the post-delta powers; an inadmissible delta is
  // reverted, a violation that persists without it makes the slot
  // unservable.
  try {
    if (!check_power_budget(cluster_powers(), representatives(), cfg_.p_max_mw)) {
      if (power_changed) {
        powers_io = prior_powers;
        reverted = true;
        fill_powers(powers_io);
      }
      if (!check_power_budget(cluster_powers(), representatives(), cfg_.p_max_mw))
        return zeros;
    }
  } catch (const SingularMatrixError&) {
    return zeros;
  }

  const double sigma2 = noise_power_mw(channel_.noise_psd_dbm_hz, channel_.bandwidth_hz);
  Precoder w;
  try {
    w = zf_precoder(representatives(), cfg_.zf_cond_cap);
  } catch (const SingularMatrixError&) {
    return zeros;
  }

  if (cfg_.fixed_decoding_order && frozen_plan_) {
    plan = validate_decoding_order(plan, rows, w, sigma2);
  } else {
    ClusterPlan decided = decide_decoding_order(plan, rows, w, sigma2);
    bool swapped = false;
    for (int l = 0; l < n_clusters; ++l)
      swapped |= decided.clusters[l].strong != plan.clusters[l].strong;
    if (swapped) {
      // Re-derive the precoder with the validated strong users as ZF
      // representatives so the strong-user SINR matches the ideal form;
      // a cluster that flips again under the new precoder is unstable and
      // treated as SIC-infeasible for the slot.
      ClusterPlan prev = decided;
      plan = decided;
      try {
        w = zf_precoder(representatives(), cfg_.zf_cond_cap);
      } catch (const SingularMatrixError&) {
        return zeros;
      }
      decided = decide_decoding_order(plan, rows, w, sigma2);
      for (int l = 0; l < n_clusters; ++l)
        if (decided.clusters[l].strong != prev.clusters[l].strong)
          decided.clusters[l].sic_feasible = false;
    }
    plan = decided;
    if (cfg_.fixed_decoding_order) frozen_plan_ = plan;
  }

  diag.plan = plan;
  diag.precoder_cols = w.columns;
  diag.sigma2_mw = sigma2;
  diag.served = true;
  return noma_rates(plan, rows, w, sigma2, channel_.bandwidth_hz);
}

std::vector<double> Environment::oma_pipeline(
    const NetworkState& s, const ChannelRealization& real,
    const PhaseShiftMatrix& phi, std::vector<double>& powers_io,
    const std::vector<double>& prior_powers, bool power_changed,
    bool& reverted) {
  const int k_users = static_cast<int>(powers_io.size());
  const std::vector<double> zeros(k_users, 0.0);

  CombinedChannel h;
  h.rows = CMat(k_users, cfg_.n_antennas);
  for (int k = 0; k < k_users; ++k) {
    const auto row = assemble_combined_row(k, real, phi);
    for (int a = 0; a < cfg_.n_antennas; ++a) h.rows.at(k, a) = row[a];
  }

  try {
    if (!check_power_budget(powers_io, h, cfg_.p_max_mw)) {
      if (power_changed) {
        powers_io = prior_powers;
        reverted = true;
      }
      if (!check_power_budget(powers_io, h, cfg_.p_max_mw)) return zeros;
    }
  } catch (const SingularMatrixError&) {
    return zeros;
  }

  try {
    (void)zf_precoder(h, cfg_.zf_cond_cap);
  } catch (const SingularMatrixError&) {
    return zeros;
  }

  // Orthogonal split of the band; noise integrates over each user's share.
  const double b_k = channel_.bandwidth_hz / k_users;
  const double sigma2 = noise_power_mw(channel_.noise_psd_dbm_hz, b_k);
  return oma_rates(powers_io, sigma2, std::vector<double>(k_users, b_k));
}

Environment::RatesResult Environment::compute_rates(
    NetworkState& next, bool power_changed,
    const std::vector<double>& prior_powers, Rng& rng) {
  ChannelGeometry geo;
  geo.uav_x = next.uav_x;
  geo.uav_y = next.uav_y;
  geo.uav_altitude = scenario_.uav_altitude;
  geo.ris_position = scenario_.ris_position;
  geo.user_xy = next.user_xy;

  const ChannelRealization real =
      draw_channel(geo, cfg_.n_antennas, cfg_.n_elements, channel_,
                   scenario_.map, cfg_.los_mode, cfg_.ris_enabled, rng);
  PhaseShiftMatrix phi = PhaseShiftMatrix::unit(next.thetas);
  if (!cfg_.ris_enabled) phi.betas.assign(phi.betas.size(), 0.0);

  RatesResult res;
  if (cfg_.mode == AccessMode::kNoma) {
    res.diag.emplace();
    res.rates_bps = noma_pipeline(next, real, phi, next.powers_mw, prior_powers,
                                  power_changed, res.reverted_power, *res.diag);
  } else
    res.rates_bps = oma_pipeline(next, real, phi, next.powers_mw, prior_powers,
                                 power_changed, res.reverted_power);
  return res;
}

StepOutcome Environment::step(const NetworkState& state, int action_index,
                              Rng& rng) {
  if (action_index < 0 || action_index >= action_count())
    throw std::out_of_range("Environment::step: action index out of range");
  const EnvAction& a = actions_[action_index];
  const Arena& arena = scenario_.map.arena;

  NetworkState next = state;

  bool moved = false;
  if (!cfg_.static_uav && (a.dx != 0 || a.dy != 0)) {
    const double nx = std::clamp(state.uav_x + a.dx * cfg_.grid_step,
                                 arena.x_min, arena.x_max);
    const double ny = std::clamp(state.uav_y + a.dy * cfg_.grid_step,
                                 arena.y_min, arena.y_max);
    moved = nx != state.uav_x || ny != state.uav_y;
    next.uav_x = nx;
    next.uav_y = ny;
  }

  if (cfg_.random_phase) {
    for (auto& t : next.thetas)
      t = kPhaseStep * static_cast<double>(rng.uniform_index(kPhaseLattice));
  } else {
    for (size_t e = 0; e < next.thetas.size(); ++e)
      if (a.phase_delta[e] != 0)
        next.thetas[e] = wrap_phase(next.thetas[e] + a.phase_delta[e] * kPhaseStep);
  }

  const std::vector<double> prior_powers = state.powers_mw;
  bool power_changed = false;
  for (size_t k = 0; k < next.powers_mw.size(); ++k)
    if (a.power_delta[k] != 0) {
      next.powers_mw[k] =
          std::max(0.0, next.powers_mw[k] + a.power_delta[k] * cfg_.p_tilde_mw);
      power_changed |= next.powers_mw[k] != prior_powers[k];
    }

  step_mobility(users_, cfg_.slot_duration_s(),
                scenario_.mobility_jitter_halfwidth, arena, rng);
  for (size_t k = 0; k < users_.size(); ++k)
    next.user_xy[k] = {users_[k].x, users_[k].y};

  const RatesResult rates = compute_rates(next, power_changed, prior_powers, rng);

  const double slot_e = moved ? move_energy_j_ : hover_energy_j_;
  const std::vector<double> r_min(next.powers_mw.size(), cfg_.r_min_bps);
  const std::vector<bool> xi = satisfaction(rates.rates_bps, r_min);
  const int xi_sum = satisfaction_sum(xi);

  double r;
  if (cfg_.reward_mode == RewardMode::kMaxEnergyEfficiency) {
    double sum_rate = 0.0;
    for (double v : rates.rates_bps) sum_rate += v;
    r = sum_rate / slot_e;
  } else {
    r = reward(xi_sum, prev_slot_energy_j_, slot_e,
               static_cast<int>(next.powers_mw.size()), cfg_.reward_c);
  }

  prev_slot_energy_j_ = slot_e;
  ++slot_;

  StepOutcome out;
  out.next_state = std::move(next);
  out.reward = r;
  out.slot_energy_j = slot_e;
  out.rates_bps = rates.rates_bps;
  out.satisfied = xi;
  out.done = slot_ >= cfg_.horizon;
  out.noma_diag = std::move(rates.diag);
  return out;
}

std::vector<double> Environment::encode_state(const NetworkState& s) const {
  const Arena& arena = scenario_.map.arena;
  const double ax = arena.x_max - arena.x_min;
  const double ay = arena.y_max - arena.y_min;
  std::vector<double> enc;
  enc.reserve(encoding_dim());
  enc.push_back((s.uav_x - arena.x_min) / ax);
  enc.push_back((s.uav_y - arena.y_min) / ay);
  for (const auto& [ux, uy] : s.user_xy) {
    enc.push_back((ux - arena.x_min) / ax);
    enc.push_back((uy - arena.y_min) / ay);
  }
  for (double t : s.thetas) {
    enc.push_back(std::sin(t));
    enc.push_back(std::cos(t));
  }
  for (double p : s.powers_mw) enc.push_back(std::min(1.0, p / cfg_.p_max_mw));
  return enc;
}

int Environment::encoding_dim() const {
  const int k_users = static_cast<int>(scenario_.users.size());
  return 2 + 2 * k_users + 2 * cfg_.n_elements + k_users;
}

}  // namespace uavris
