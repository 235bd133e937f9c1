#include "uavris/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

namespace uavris {

namespace fs = std::filesystem;

Variant variant_from_string(const std::string& name) {
  if (name == "ddqn_ris_noma") return Variant::kDdqnRisNoma;
  if (name == "ddqn_ris_oma") return Variant::kDdqnRisOma;
  if (name == "no_ris") return Variant::kNoRis;
  if (name == "random_phase") return Variant::kRandomPhase;
  if (name == "fixed_decoding_order") return Variant::kFixedDecodingOrder;
  if (name == "fixed_power_allocation") return Variant::kFixedPowerAllocation;
  if (name == "static_uav") return Variant::kStaticUav;
  if (name == "max_ee_objective") return Variant::kMaxEeObjective;
  throw ConfigError("unknown baseline variant: " + name);
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kDdqnRisNoma: return "ddqn_ris_noma";
    case Variant::kDdqnRisOma: return "ddqn_ris_oma";
    case Variant::kNoRis: return "no_ris";
    case Variant::kRandomPhase: return "random_phase";
    case Variant::kFixedDecodingOrder: return "fixed_decoding_order";
    case Variant::kFixedPowerAllocation: return "fixed_power_allocation";
    case Variant::kStaticUav: return "static_uav";
    case Variant::kMaxEeObjective: return "max_ee_objective";
  }
  return "?";
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v = {
      Variant::kDdqnRisNoma,       Variant::kDdqnRisOma,
      Variant::kNoRis,             Variant::kRandomPhase,
      Variant::kFixedDecodingOrder, Variant::kFixedPowerAllocation,
      Variant::kStaticUav,         Variant::kMaxEeObjective};
  return v;
}

EnvConfig apply_variant(EnvConfig base, Variant v) {
  switch (v) {
    case Variant::kDdqnRisNoma:
      base.mode = AccessMode::kNoma;
      break;
    case Variant::kDdqnRisOma:
      base.mode = AccessMode::kOma;
      break;
    case Variant::kNoRis:
      base.ris_enabled = false;
      break;
    case Variant::kRandomPhase:
      base.random_phase = true;
      break;
    case Variant::kFixedDecodingOrder:
      base.fixed_decoding_order = true;
      break;
    case Variant::kFixedPowerAllocation:
      base.fixed_power_alloc = true;
      break;
    case Variant::kStaticUav:
      base.static_uav = true;
      break;
    case Variant::kMaxEeObjective:
      base.reward_mode = RewardMode::kMaxEnergyEfficiency;
      break;
  }
  return base;
}

std::string variant_knob_diff(Variant v) {
  switch (v) {
    case Variant::kDdqnRisNoma: return "mode=noma";
    case Variant::kDdqnRisOma: return "mode=oma";
    case Variant::kNoRis: return "ris_enabled=0";
    case Variant::kRandomPhase: return "random_phase=1";
    case Variant::kFixedDecodingOrder: return "fixed_decoding_order=1";
    case Variant::kFixedPowerAllocation: return "fixed_power_alloc=1";
    case Variant::kStaticUav: return "static_uav=1";
    case Variant::kMaxEeObjective: return "reward_mode=max_ee";
  }
  return "";
}

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& cfg) {
  std::set<std::string> known;
  for (const auto* keys :
       {&ScenarioConfig::known_keys(), &ChannelParams::known_keys(),
        &RotorParams::known_keys(), &EnvConfig::known_keys(),
        &TrainConfig::known_keys()})
    known.insert(keys->begin(), keys->end());
  known.insert({"variant", "eval_episodes", "matrix_seeds", "matrix_variants",
                "matrix_episodes", "matrix_eval_episodes"});
  cfg.ensure_known_keys(known);

  ExperimentConfig e;
  e.scenario = ScenarioConfig::from_config(cfg);
  e.channel = ChannelParams::from_config(cfg);
  e.rotor = RotorParams::from_config(cfg);
  e.env = EnvConfig::from_config(cfg);
  e.train = TrainConfig::from_config(cfg);
  e.variant = variant_from_string(cfg.get_string("variant", "ddqn_ris_noma"));
  e.eval_episodes = static_cast<int>(cfg.get_int("eval_episodes", e.eval_episodes));
  e.matrix_seeds = static_cast<int>(cfg.get_int("matrix_seeds", e.matrix_seeds));
  if (cfg.has("matrix_variants"))
    for (const auto& name : cfg.get_list("matrix_variants"))
      e.matrix_variants.push_back(variant_from_string(name));
  e.matrix_episodes = static_cast<int>(cfg.get_int("matrix_episodes", 0));
  e.matrix_eval_episodes =
      static_cast<int>(cfg.get_int("matrix_eval_episodes", 0));
  if (e.eval_episodes <= 0) throw ConfigError("eval_episodes must be positive");
  if (e.matrix_seeds <= 0) throw ConfigError("matrix_seeds must be positive");
  return e;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  return from_config(KeyValueConfig::from_file(path));
}

void atomic_write_file(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp~";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string episode_log_csv(const std::vector<EpisodeRecord>& log) {
  std::ostringstream out;
  out << "episode,sum_reward,energy_J,mean_rate_bps,lr,epsilon\n";
  for (const auto& r : log)
    out << r.episode << ',' << format_double(r.sum_reward) << ','
        << format_double(r.energy_j) << ',' << format_double(r.mean_rate_bps)
        << ',' << format_double(r.lr) << ',' << format_double(r.epsilon) << '\n';
  return out.str();
}

std::vector<EpisodeRecord> parse_episode_log_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      line != "episode,sum_reward,energy_J,mean_rate_bps,lr,epsilon")
    throw std::runtime_error("episode log: bad header");
  std::vector<EpisodeRecord> log;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    EpisodeRecord r;
    std::istringstream row(line);
    std::string field;
    const auto next = [&]() {
      if (!std::getline(row, field, ','))
        throw std::runtime_error("episode log: short row");
      return field;
    };
    r.episode = std::stoi(next());
    r.sum_reward = std::stod(next());
    r.energy_j = std::stod(next());
    r.mean_rate_bps = std::stod(next());
    r.lr = std::stod(next());
    r.epsilon = std::stod(next());
    log.push_back(r);
  }
  return log;
}

Environment make_environment(const ExperimentConfig& cfg, Variant v) {
  Rng scenario_rng(cfg.scenario.seed);
  Scenario sc = generate_scenario(cfg.scenario, scenario_rng);
  return Environment(std::move(sc), cfg.channel, cfg.rotor,
                     apply_variant(cfg.env, v));
}

TrainRunResult run_training(const ExperimentConfig& cfg, std::uint64_t run_seed,
                            const std::string& out_dir) {
  Environment env = make_environment(cfg, cfg.variant);
  Rng rng(run_seed);
  TrainResult trained = train(env, cfg.train, rng);

  fs::create_directories(out_dir);
  TrainRunResult out;
  out.checkpoint_path = (fs::path(out_dir) / "checkpoint.bin").string();
  out.log_path = (fs::path(out_dir) / "train_log.csv").string();

  std::ostringstream ckpt;
  save_checkpoint_stream(ckpt, trained.net, rng);
  atomic_write_file(out.checkpoint_path, ckpt.str());
  atomic_write_file(out.log_path, episode_log_csv(trained.log));
  out.log = std::move(trained.log);
  return out;
}

EvalSummary run_eval(const std::string& checkpoint_path,
                     const ExperimentConfig& cfg, int episodes,
                     std::uint64_t run_seed, const std::string& out_dir) {
  std::ifstream in(checkpoint_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + checkpoint_path);
  Checkpoint cp = load_checkpoint_stream(in);

  Environment env = make_environment(cfg, cfg.variant);
  if (cp.net.input_dim() != env.encoding_dim() ||
      cp.net.output_dim() != env.action_count())
    throw std::runtime_error(
        "checkpoint/config dimension mismatch: net is " +
        std::to_string(cp.net.input_dim()) + "->" +
        std::to_string(cp.net.output_dim()) + ", environment needs " +
        std::to_string(env.encoding_dim()) + "->" +
        std::to_string(env.action_count()));

  Rng rng(run_seed);
  EvalSummary s;
  std::vector<EpisodeRecord> log = greedy_rollouts(env, cp.net, episodes, rng,
                                                   &s.slot_sum_rates,
                                                   &s.slot_energies);
  s.episodes = episodes;

  double sum = 0.0, sum_sq = 0.0, rate = 0.0, sat = 0.0;
  for (const auto& r : log) {
    sum += r.energy_j;
    sum_sq += r.energy_j * r.energy_j;
    rate += r.mean_rate_bps;
    sat += r.satisfied_frac;
  }
  const double n = static_cast<double>(log.size());
  s.mean_energy_j = sum / n;
  const double var = std::max(0.0, sum_sq / n - s.mean_energy_j * s.mean_energy_j);
  s.stddev_energy_j = std::sqrt(var);
  s.mean_sum_rate_bps = rate / n;
  s.satisfaction_ratio = sat / n;

  if (!out_dir.empty()) {
    std::ostringstream summary;
    summary << "episodes,mean_energy_J,stddev_energy_J,mean_sum_rate_bps,"
               "satisfaction_ratio\n"
            << s.episodes << ',' << format_double(s.mean_energy_j) << ','
            << format_double(s.stddev_energy_j) << ','
            << format_double(s.mean_sum_rate_bps) << ','
            << format_double(s.satisfaction_ratio) << '\n';
    atomic_write_file((fs::path(out_dir) / "eval_summary.csv").string(),
                      summary.str());

    std::ostringstream trace;
    trace << "episode,slot,sum_rate_bps,slot_energy_J\n";
    for (size_t ep = 0; ep < s.slot_sum_rates.size(); ++ep)
      for (size_t t = 0; t < s.slot_sum_rates[ep].size(); ++t)
        trace << ep << ',' << t << ','
              << format_double(s.slot_sum_rates[ep][t]) << ','
              << format_double(s.slot_energies[ep][t]) << '\n';
    atomic_write_file((fs::path(out_dir) / "slot_trace.csv").string(),
                      trace.str());
  }
  return s;
}

namespace {

MatrixCell run_matrix_cell(const ExperimentConfig& base, Variant v,
                           std::uint64_t seed) {
  MatrixCell cell;
  cell.variant = v;
  cell.seed = seed;
  try {
    ExperimentConfig cfg = base;
    cfg.variant = v;
    if (cfg.matrix_episodes > 0) cfg.train.episodes = cfg.matrix_episodes;
    const int eval_eps = cfg.matrix_eval_episodes > 0 ? cfg.matrix_eval_episodes
                                                      : cfg.eval_episodes;

    Environment env = make_environment(cfg, v);
    Rng rng(seed);
    TrainResult trained = train(env, cfg.train, rng);

    Environment eval_env = make_environment(cfg, v);
    Rng eval_rng(seed ^ 0x5eedf00dULL);
    std::vector<EpisodeRecord> log =
        greedy_rollouts(eval_env, trained.net, eval_eps, eval_rng);
    double energy = 0.0, rate = 0.0;
    for (const auto& r : log) {
      energy += r.energy_j;
      rate += r.mean_rate_bps;
    }
    cell.mean_energy_j = energy / log.size();
    cell.mean_sum_rate_bps = rate / log.size();
  } catch (const std::exception& e) {
    cell.failed = true;
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

std::vector<MatrixCell> run_baseline_matrix(const ExperimentConfig& cfg,
                                            const std::vector<Variant>& variants,
                                            int n_seeds, std::uint64_t base_seed,
                                            const std::string& out_dir) {
  std::vector<std::future<MatrixCell>> futures;
  for (const Variant v : variants)
    for (int s = 0; s < n_seeds; ++s)
      futures.push_back(std::async(std::launch::async, run_matrix_cell, cfg, v,
                                   base_seed + static_cast<std::uint64_t>(s)));

  std::vector<MatrixCell> cells;
  cells.reserve(futures.size());
  for (auto& f : futures) cells.push_back(f.get());

  if (!out_dir.empty()) {
    atomic_write_file((fs::path(out_dir) / "matrix.csv").string(),
                      matrix_csv(cells));
    std::ostringstream audit;
    for (const Variant v : variants)
      audit << variant_name(v) << ": " << variant_knob_diff(v) << '\n';
    atomic_write_file((fs::path(out_dir) / "matrix_variants.txt").string(),
                      audit.str());
  }
  return cells;
}

std::string matrix_csv(const std::vector<MatrixCell>& cells) {
  std::ostringstream out;
  out << "variant,seed,mean_episode_energy_J,mean_sum_rate_bps,status\n";
  for (const auto& c : cells) {
    out << variant_name(c.variant) << ',' << c.seed << ',';
    if (c.failed)
      out << "nan,nan,failed\n";
    else
      out << format_double(c.mean_energy_j) << ','
          << format_double(c.mean_sum_rate_bps) << ",ok\n";
  }
  return out.str();
}

std::string scenario_dump(const Scenario& sc) {
  std::ostringstream out;
  out << "arena," << format_double(sc.map.arena.x_min) << ','
      << format_double(sc.map.arena.x_max) << ','
      << format_double(sc.map.arena.y_min) << ','
      << format_double(sc.map.arena.y_max) << '\n';
  out << "uav_altitude," << format_double(sc.uav_altitude) << '\n';
  out << "ris," << format_double(sc.ris_position.x) << ','
      << format_double(sc.ris_position.y) << ','
      << format_double(sc.ris_position.z) << '\n';
  for (const auto& b : sc.map.buildings)
    out << "building," << format_double(b.x_min) << ',' << format_double(b.x_max)
        << ',' << format_double(b.y_min) << ',' << format_double(b.y_max) << ','
        << format_double(b.height) << '\n';
  for (const auto& u : sc.users)
    out << "user," << format_double(u.x) << ',' << format_double(u.y) << ','
        << format_double(u.heading) << ',' << format_double(u.speed) << '\n';
  return out.str();
}

void run_scenario_gen(const ExperimentConfig& cfg, std::uint64_t seed_override,
                      bool has_override, const std::string& out_dir) {
  ScenarioConfig sc_cfg = cfg.scenario;
  if (has_override) sc_cfg.seed = seed_override;
  Rng rng(sc_cfg.seed);
  const Scenario sc = generate_scenario(sc_cfg, rng);
  atomic_write_file((fs::path(out_dir) / "scenario.txt").string(),
                    scenario_dump(sc));
}

}  // namespace uavris
