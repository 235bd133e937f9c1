#pragma once

#include <string>
#include <vector>

#include "uavris/channel.hpp"
#include "uavris/config.hpp"
#include "uavris/ddqn.hpp"
#include "uavris/energy.hpp"
#include "uavris/env.hpp"
#include "uavris/radio_map.hpp"

namespace uavris {

enum class Variant {
  kDdqnRisNoma,
  kDdqnRisOma,
  kNoRis,
  kRandomPhase,
  kFixedDecodingOrder,
  kFixedPowerAllocation,
  kStaticUav,
  kMaxEeObjective,
};

Variant variant_from_string(const std::string& name);
std::string variant_name(Variant v);
const std::vector<Variant>& all_variants();

// Flips exactly one knob of the base environment configuration.
EnvConfig apply_variant(EnvConfig base, Variant v);
// The knob as a config-format line, for the audit trail next to results.
std::string variant_knob_diff(Variant v);

struct ExperimentConfig {
  ScenarioConfig scenario;
  ChannelParams channel;
  RotorParams rotor;
  EnvConfig env;
  TrainConfig train;
  Variant variant = Variant::kDdqnRisNoma;
  int eval_episodes = 50;
  int matrix_seeds = 5;
  std::vector<Variant> matrix_variants;
  int matrix_episodes = 0;       // 0: reuse train.episodes for matrix cells
  int matrix_eval_episodes = 0;  // 0: reuse eval_episodes

  static ExperimentConfig from_config(const KeyValueConfig& cfg);
  static ExperimentConfig from_file(const std::string& path);
};

// Writes content to path via a temp file + rename so an interrupted run
// never leaves a truncated file under the final name.
void atomic_write_file(const std::string& path, const std::string& content);

std::string format_double(double v);  // round-trip formatting for CSV

std::string episode_log_csv(const std::vector<EpisodeRecord>& log);
std::vector<EpisodeRecord> parse_episode_log_csv(const std::string& text);

// Builds the scenario/environment pair for a config. The scenario geometry
// comes from the scenario seed; run-level randomness comes from run_seed.
Environment make_environment(const ExperimentConfig& cfg, Variant v);

struct TrainRunResult {
  std::string checkpoint_path;
  std::string log_path;
  std::vector<EpisodeRecord> log;
};

// Trains per the config and writes checkpoint + CSV log atomically.
TrainRunResult run_training(const ExperimentConfig& cfg, std::uint64_t run_seed,
                            const std::string& out_dir);

struct EvalSummary {
  int episodes = 0;
  double mean_energy_j = 0.0;
  double stddev_energy_j = 0.0;
  double mean_sum_rate_bps = 0.0;
  double satisfaction_ratio = 0.0;
  std::vector<std::vector<double>> slot_sum_rates;  // per episode, per slot
  std::vector<std::vector<double>> slot_energies;
};

// Greedy-policy (epsilon = 0) evaluation of a checkpoint.
EvalSummary run_eval(const std::string& checkpoint_path,
                     const ExperimentConfig& cfg, int episodes,
                     std::uint64_t run_seed, const std::string& out_dir);

struct MatrixCell {
  Variant variant = Variant::kDdqnRisNoma;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double mean_energy_j = 0.0;
  double mean_sum_rate_bps = 0.0;
};

// One trained-and-evaluated cell per (variant, seed); seeds are shared
// across variants for paired comparison. Cells run as independent workers;
// a failed cell is recorded and the matrix continues.
std::vector<MatrixCell> run_baseline_matrix(const ExperimentConfig& cfg,
                                            const std::vector<Variant>& variants,
                                            int n_seeds, std::uint64_t base_seed,
                                            const std::string& out_dir);

std::string matrix_csv(const std::vector<MatrixCell>& cells);

// Writes a deterministic text dump of the generated scenario.
std::string scenario_dump(const Scenario& sc);
void run_scenario_gen(const ExperimentConfig& cfg, std::uint64_t seed_override,
                      bool has_override, const std::string& out_dir);

}  // namespace uavris
