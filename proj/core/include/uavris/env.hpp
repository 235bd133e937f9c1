#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uavris/channel.hpp"
#include "uavris/config.hpp"
#include "uavris/energy.hpp"
#include "uavris/radio_map.hpp"
#include "uavris/rng.hpp"
#include "uavris/signal.hpp"

namespace uavris {

struct NetworkState {
  double uav_x = 0, uav_y = 0;
  std::vector<std::pair<double, double>> user_xy;
  std::vector<double> thetas;     // [0, 2pi)
  std::vector<double> powers_mw;  // >= 0
};

// Composite action. In the default single-subaction factorization exactly
// one component is non-neutral (or the action is the UAV no-op).
struct EnvAction {
  int dx = 0, dy = 0;                 // one of the five grid moves
  std::vector<int8_t> phase_delta;    // per element, in units of pi/10
  std::vector<int8_t> power_delta;    // per user, in units of p_tilde
};

// Per-slot NOMA bookkeeping exposed for invariant checks: the validated
// plan plus the combined rows and precoder it was validated against.
struct NomaSlotDiag {
  ClusterPlan plan;
  CMat combined_rows;   // K x M
  CMat precoder_cols;   // M x L
  double sigma2_mw = 0.0;
  bool served = false;  // false when the slot was unservable (budget/ZF)
};

struct StepOutcome {
  NetworkState next_state;
  double reward = 0.0;
  double slot_energy_j = 0.0;
  std::vector<double> rates_bps;
  std::vector<bool> satisfied;
  bool done = false;
  std::optional<NomaSlotDiag> noma_diag;
};

enum class AccessMode { kNoma, kOma };
enum class Factorization { kSingleSubaction, kFullProduct };
enum class RewardMode { kStandard, kMaxEnergyEfficiency };

struct EnvConfig {
  AccessMode mode = AccessMode::kNoma;
  LosMode los_mode = LosMode::kRadioMap;
  int horizon = 200;
  double grid_step = 1.0;       // m per move action
  double p_tilde_mw = 1.0;      // power action step
  double r_min_bps = 0.5e6;
  double reward_c = 100.0;
  double p_max_mw = 1000.0;
  Factorization factorization = Factorization::kSingleSubaction;
  double uav_speed = 5.0;       // V, m/s; slot duration = grid_step / V
  double p_init_mw = 10.0;
  int n_antennas = 4;           // M
  int n_elements = 8;           // N
  double zf_cond_cap = kDefaultZfConditionCap;

  // Baseline knobs. Each harness variant flips exactly one of these.
  bool ris_enabled = true;
  bool random_phase = false;
  bool fixed_decoding_order = false;
  bool fixed_power_alloc = false;
  bool static_uav = false;
  RewardMode reward_mode = RewardMode::kStandard;

  double slot_duration_s() const { return grid_step / uav_speed; }

  static EnvConfig from_config(const KeyValueConfig& cfg);
  static const std::set<std::string>& known_keys();
};

// Action list for the configured factorization. Single-subaction order:
// the five UAV moves (no-op first), then -/+ phase steps per element, then
// -/+ power steps per user. full_product refuses when 3^N * 3^K > 1e5.
std::vector<EnvAction> enumerate_actions(int n_elements, int n_users,
                                         Factorization f);

// xi_k = 1 iff rate_k >= r_min_k (inclusive).
std::vector<bool> satisfaction(const std::vector<double>& rates_bps,
                               const std::vector<double>& r_min_bps);
int satisfaction_sum(const std::vector<bool>& xi);

// Four-branch reward on per-slot energies; E_t1 < E_t is folded into the
// "energy unchanged" branches.
double reward(int xi_sum, double e_t, double e_t1, int n_users, double c);

// One MDP episode driver. The instance carries the episode context that is
// not part of the observable state (user headings, previous slot energy,
// slot counter, the frozen decoding order of the fixed-order baseline);
// it is single-threaded per the one-episode-one-stepper model.
class Environment {
 public:
  Environment(Scenario scenario, ChannelParams channel, RotorParams rotor,
              EnvConfig cfg);

  NetworkState reset(Rng& rng);
  StepOutcome step(const NetworkState& state, int action_index, Rng& rng);

  const std::vector<EnvAction>& actions() const { return actions_; }
  int action_count() const { return static_cast<int>(actions_.size()); }

  // Scale-normalized encoding for the Q-network: positions / arena size,
  // phases as (sin, cos), powers / P_max. Every component is in [-1, 1].
  std::vector<double> encode_state(const NetworkState& s) const;
  int encoding_dim() const;

  double hover_slot_energy_j() const { return hover_energy_j_; }
  double move_slot_energy_j() const { return move_energy_j_; }

  const EnvConfig& config() const { return cfg_; }
  const Scenario& scenario() const { return scenario_; }
  const ChannelParams& channel_params() const { return channel_; }
  int slots_elapsed() const { return slot_; }

 private:
  struct RatesResult {
    std::vector<double> rates_bps;
    bool reverted_power = false;
    std::optional<NomaSlotDiag> diag;
  };
  RatesResult compute_rates(NetworkState& next, bool power_changed,
                            const std::vector<double>& prior_powers, Rng& rng);
  std::vector<double> noma_pipeline(const NetworkState& s,
                                    const ChannelRealization& real,
                                    const PhaseShiftMatrix& phi,
                                    std::vector<double>& powers_io,
                                    const std::vector<double>& prior_powers,
                                    bool power_changed, bool& reverted,
                                    NomaSlotDiag& diag);
  std::vector<double> oma_pipeline(const NetworkState& s,
                                   const ChannelRealization& real,
                                   const PhaseShiftMatrix& phi,
                                   std::vector<double>& powers_io,
                                   const std::vector<double>& prior_powers,
                                   bool power_changed, bool& reverted);

  Scenario scenario_;
  ChannelParams channel_;
  RotorParams rotor_;
  EnvConfig cfg_;
  std::vector<EnvAction> actions_;
  double hover_energy_j_ = 0.0;
  double move_energy_j_ = 0.0;

  // Episode context.
  std::vector<MobileUser> users_;
  double prev_slot_energy_j_ = 0.0;
  int slot_ = 0;
  std::optional<ClusterPlan> frozen_plan_;
};

}  // namespace uavris
