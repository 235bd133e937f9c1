#include "doctest.h"
#include "uavris/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace uavris;
namespace fs = std::filesystem;

namespace {

std::string mini_config_text() {
  return R"(
# desk-size world for harness smoke tests
arena_x = 20
arena_y = 20
n_buildings = 2
building_wh_range = 3,5
building_h_range = 8,15
n_users = 2
user_speed = 0.5
jitter_halfwidth = 0.2
ris_x = 10
ris_y = 10
ris_z = 12
uav_altitude = 25
seed = 11

n_antennas = 2
n_elements = 2
horizon = 6
episodes = 3
batch_size = 8
replay_capacity = 64
eval_episodes = 2
P_max = 1e12
)";
}

ExperimentConfig mini_config() {
  return ExperimentConfig::from_config(KeyValueConfig::from_string(mini_config_text()));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("uavris_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("each variant flips exactly one knob") {
  const EnvConfig base;
  const auto count_diffs = [&](const EnvConfig& v) {
    int d = 0;
    d += v.mode != base.mode;
    d += v.ris_enabled != base.ris_enabled;
    d += v.random_phase != base.random_phase;
    d += v.fixed_decoding_order != base.fixed_decoding_order;
    d += v.fixed_power_alloc != base.fixed_power_alloc;
    d += v.static_uav != base.static_uav;
    d += v.reward_mode != base.reward_mode;
    return d;
  };
  CHECK(count_diffs(apply_variant(base, Variant::kDdqnRisNoma)) == 0);
  for (Variant v : all_variants()) {
    if (v == Variant::kDdqnRisNoma) continue;
    CHECK(count_diffs(apply_variant(base, v)) == 1);
  }
  CHECK(apply_variant(base, Variant::kNoRis).ris_enabled == false);
  CHECK(apply_variant(base, Variant::kDdqnRisOma).mode == AccessMode::kOma);
  CHECK(variant_from_string("random_phase") == Variant::kRandomPhase);
  CHECK_THROWS_AS(variant_from_string("nope"), ConfigError);
  for (Variant v : all_variants())
    CHECK(variant_from_string(variant_name(v)) == v);
}

TEST_CASE("experiment config loads defaults and rejects unknown keys") {
  const ExperimentConfig cfg = mini_config();
  CHECK(cfg.scenario.arena_x == 20.0);
  CHECK(cfg.env.n_antennas == 2);
  CHECK(cfg.train.episodes == 3);
  CHECK(cfg.train.gamma == 0.7);       // Table-style defaults
  CHECK(cfg.train.alpha0 == 0.1);
  CHECK(cfg.channel.f_c_ghz == 2.0);
  CHECK(cfg.channel.alpha_uav_ris == 2.2);

  auto bad = KeyValueConfig::from_string(mini_config_text());
  bad.set("not_a_key", "1");
  try {
    ExperimentConfig::from_config(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("not_a_key") != std::string::npos);
  }
}

TEST_CASE("atomic write leaves no temp file and full content") {
  TempDir tmp("atomic");
  const std::string target = (tmp.path / "data.csv").string();
  atomic_write_file(target, "hello\nworld\n");
  CHECK(slurp(target) == "hello\nworld\n");
  CHECK_FALSE(fs::exists(target + ".tmp~"));
}

TEST_CASE("episode log CSV round-trips") {
  std::vector<EpisodeRecord> log;
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    EpisodeRecord r;
    r.episode = i;
    r.sum_reward = rng.uniform(-1e4, 1e4);
    r.energy_j = rng.uniform(0, 1e3);
    r.mean_rate_bps = rng.uniform(0, 1e7);
    r.lr = decayed_lr(0.1, 0.001, i);
    r.epsilon = 0.1;
    log.push_back(r);
  }
  const auto parsed = parse_episode_log_csv(episode_log_csv(log));
  REQUIRE(parsed.size() == log.size());
  for (size_t i = 0; i < log.size(); ++i) {
    CHECK(parsed[i].episode == log[i].episode);
    CHECK(parsed[i].sum_reward == log[i].sum_reward);
    CHECK(parsed[i].energy_j == log[i].energy_j);
    CHECK(parsed[i].mean_rate_bps == log[i].mean_rate_bps);
    CHECK(parsed[i].lr == log[i].lr);
    CHECK(parsed[i].epsilon == log[i].epsilon);
  }
}

TEST_CASE("training run writes deterministic checkpoint and log") {
  const ExperimentConfig cfg = mini_config();
  TempDir d1("train1"), d2("train2");
  const TrainRunResult r1 = run_training(cfg, 42, d1.path.string());
  const TrainRunResult r2 = run_training(cfg, 42, d2.path.string());
  CHECK(r1.log.size() == 3);
  CHECK(slurp(r1.log_path) == slurp(r2.log_path));
  CHECK(slurp(r1.checkpoint_path) == slurp(r2.checkpoint_path));
  // The learning-rate column follows the schedule exactly.
  for (size_t i = 0; i < r1.log.size(); ++i)
    CHECK(r1.log[i].lr == decayed_lr(cfg.train.alpha0, cfg.train.eta,
                                     static_cast<int>(i)));

  const TrainRunResult r3 = run_training(cfg, 43, d2.path.string());
  CHECK(slurp(r1.log_path) != slurp(r3.log_path));
}

TEST_CASE("eval summarizes a checkpoint and folds the emitted trace") {
  const ExperimentConfig cfg = mini_config();
  TempDir d("eval");
  const TrainRunResult tr = run_training(cfg, 7, d.path.string());
  const EvalSummary s =
      run_eval(tr.checkpoint_path, cfg, 4, 99, (d.path / "eval").string());
  CHECK(s.episodes == 4);
  CHECK(s.satisfaction_ratio >= 0.0);
  CHECK(s.satisfaction_ratio <= 1.0);
  CHECK(s.mean_energy_j > 0.0);
  // Fold the per-slot energy trace back into the summary.
  REQUIRE(s.slot_energies.size() == 4);
  double total = 0.0;
  for (const auto& ep : s.slot_energies) {
    REQUIRE(static_cast<int>(ep.size()) == cfg.env.horizon);
    for (double e : ep) total += e;
  }
  CHECK(s.mean_energy_j == doctest::Approx(total / 4.0).epsilon(1e-12));
  CHECK(fs::exists(d.path / "eval" / "eval_summary.csv"));
  CHECK(fs::exists(d.path / "eval" / "slot_trace.csv"));
}

TEST_CASE("eval rejects dimension-mismatched checkpoints") {
  const ExperimentConfig cfg = mini_config();
  TempDir d("evalmm");
  const TrainRunResult tr = run_training(cfg, 7, d.path.string());
  ExperimentConfig other = cfg;
  other.env.n_elements = 4;  // changes both encoding and action count
  try {
    run_eval(tr.checkpoint_path, other, 2, 1, "");
    FAIL("expected mismatch error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("mismatch") != std::string::npos);
  }
}

TEST_CASE("baseline matrix emits one row per cell and survives failures") {
  ExperimentConfig cfg = mini_config();
  cfg.scenario.n_users = 4;  // OMA needs K <= M = 2: the OMA cells fail
  cfg.train.episodes = 1;
  cfg.eval_episodes = 1;
  const std::vector<Variant> variants = {Variant::kDdqnRisNoma,
                                         Variant::kDdqnRisOma};
  TempDir d("matrix");
  const auto cells = run_baseline_matrix(cfg, variants, 2, 1000, d.path.string());
  REQUIRE(cells.size() == 4);
  int failed = 0, ok = 0;
  for (const auto& c : cells) (c.failed ? failed : ok)++;
  CHECK(ok == 2);      // noma cells
  CHECK(failed == 2);  // oma cells hit the K > M validation
  const std::string csv = slurp((d.path / "matrix.csv").string());
  CHECK(csv.find("ddqn_ris_noma,1000,") != std::string::npos);
  CHECK(csv.find("failed") != std::string::npos);
  const std::string audit = slurp((d.path / "matrix_variants.txt").string());
  CHECK(audit.find("ddqn_ris_oma: mode=oma") != std::string::npos);
}

TEST_CASE("matrix cells share seeds across variants for pairing") {
  ExperimentConfig cfg = mini_config();
  cfg.train.episodes = 1;
  cfg.eval_episodes = 1;
  const auto cells = run_baseline_matrix(
      cfg, {Variant::kDdqnRisNoma, Variant::kNoRis}, 3, 5, "");
  REQUIRE(cells.size() == 6);
  for (int s = 0; s < 3; ++s) {
    CHECK(cells[s].seed == static_cast<std::uint64_t>(5 + s));
    CHECK(cells[3 + s].seed == static_cast<std::uint64_t>(5 + s));
  }
}

TEST_CASE("scenario-gen writes a deterministic dump") {
  const ExperimentConfig cfg = mini_config();
  TempDir d1("scen1"), d2("scen2");
  run_scenario_gen(cfg, 0, false, d1.path.string());
  run_scenario_gen(cfg, 0, false, d2.path.string());
  const std::string a = slurp((d1.path / "scenario.txt").string());
  CHECK(a == slurp((d2.path / "scenario.txt").string()));
  CHECK(a.find("arena,") != std::string::npos);
  CHECK(a.find("building,") != std::string::npos);
  CHECK(a.find("user,") != std::string::npos);
  run_scenario_gen(cfg, 123, true, d1.path.string());
  CHECK(slurp((d1.path / "scenario.txt").string()) != a);
}
