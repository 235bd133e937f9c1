// Command line front end: train / eval / matrix / scenario-gen.
// Exit codes: 0 success, 1 config/validation error, 2 runtime failure.
// Diagnostics go to stderr; all data lands in files under --out.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "uavris/harness.hpp"

using namespace uavris;

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool out_required) {
  cmd->add_option("--config", args.config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "run seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  auto* out = cmd->add_option("--out", args.out_dir, "output directory");
  if (out_required) out->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-assisted UAV downlink simulator and D-DQN harness"};
  app.require_subcommand(1);

  CommonArgs train_args, eval_args, matrix_args, scen_args;
  std::string checkpoint_path;
  int eval_episodes = 0;

  CLI::App* train_cmd = app.add_subcommand("train", "train a policy");
  add_common(train_cmd, train_args, true);

  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint greedily");
  add_common(eval_cmd, eval_args, true);
  eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--episodes", eval_episodes, "evaluation episodes");

  CLI::App* matrix_cmd =
      app.add_subcommand("matrix", "baseline comparison matrix");
  add_common(matrix_cmd, matrix_args, true);

  CLI::App* scen_cmd =
      app.add_subcommand("scenario-gen", "generate and dump a scenario");
  add_common(scen_cmd, scen_args, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      const ExperimentConfig cfg = ExperimentConfig::from_file(train_args.config_path);
      const TrainRunResult res =
          run_training(cfg, train_args.seed, train_args.out_dir);
      std::cerr << "train: wrote " << res.checkpoint_path << " and "
                << res.log_path << " (" << res.log.size() << " episodes)\n";
    } else if (eval_cmd->parsed()) {
      const ExperimentConfig cfg = ExperimentConfig::from_file(eval_args.config_path);
      const int episodes = eval_episodes > 0 ? eval_episodes : cfg.eval_episodes;
      const EvalSummary s = run_eval(checkpoint_path, cfg, episodes,
                                     eval_args.seed, eval_args.out_dir);
      std::cerr << "eval: " << s.episodes << " episodes, mean energy "
                << s.mean_energy_j << " J (sd " << s.stddev_energy_j
                << "), satisfaction " << s.satisfaction_ratio << "\n";
    } else if (matrix_cmd->parsed()) {
      const ExperimentConfig cfg =
          ExperimentConfig::from_file(matrix_args.config_path);
      const std::vector<Variant> variants =
          cfg.matrix_variants.empty() ? all_variants() : cfg.matrix_variants;
      const auto cells = run_baseline_matrix(cfg, variants, cfg.matrix_seeds,
                                             matrix_args.seed,
                                             matrix_args.out_dir);
      int failed = 0;
      for (const auto& c : cells) failed += c.failed ? 1 : 0;
      std::cerr << "matrix: " << cells.size() << " cells, " << failed
                << " failed\n";
    } else if (scen_cmd->parsed()) {
      const ExperimentConfig cfg = ExperimentConfig::from_file(scen_args.config_path);
      run_scenario_gen(cfg, scen_args.seed, scen_args.seed_set, scen_args.out_dir);
      std::cerr << "scenario-gen: wrote " << scen_args.out_dir << "/scenario.txt\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
