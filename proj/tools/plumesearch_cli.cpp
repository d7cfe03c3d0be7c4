// Command line front end: single episodes, Monte Carlo sweeps and the
// Entrotaxis-Jump tuning sweep, all driven by sectioned config files.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "plumesearch/harness.hpp"

namespace {

using namespace plumesearch;

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::string map_override;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
};

void apply_overrides(ScenarioConfig& cfg, const CommonArgs& args) {
  if (!args.map_override.empty()) cfg.map.path = args.map_override;
  if (args.seed_set) cfg.seed = args.seed;
}

int cmd_run(const CommonArgs& args, const DumpOptions& dumps) {
  ScenarioConfig cfg = scenario_from_config(ConfigFile::parse_file(args.config_path));
  apply_overrides(cfg, args);

  EpisodeArtifacts artifacts;
  const EpisodeLog log = run_episode(cfg, {}, &dumps, &artifacts);

  const std::filesystem::path dir(args.out_dir);
  write_text(dir / "episodes" / (cfg.name + ".csv"), episode_csv(log));
  if (dumps.posterior) write_text(dir / (cfg.name + "_posterior.csv"), artifacts.posterior_csv);
  if (dumps.distribution) write_text(dir / (cfg.name + "_distribution.csv"), artifacts.distribution_csv);
  if (dumps.tree) write_text(dir / (cfg.name + "_tree.csv"), artifacts.tree_csv);
  if (dumps.utility) write_text(dir / (cfg.name + "_utility.csv"), artifacts.utility_csv);

  const auto success = log.first_success_time(cfg.success_radius, cfg.budget_s);
  std::cout << "episode " << cfg.name << ": " << log.steps.size() << " samples, final RMSE "
            << (log.steps.empty() ? 0.0 : log.steps.back().rmse) << " m, "
            << (success ? "success at " + std::to_string(*success) + " s" : std::string("no success")) << "\n";
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  ConfigFile cfg_file = ConfigFile::parse_file(args.config_path);
  SweepSpec spec = sweep_from_config(cfg_file);
  if (!args.map_override.empty()) spec.base.map.path = args.map_override;
  if (args.seed_set) spec.master_seed = args.seed;
  if (args.workers > 0) spec.workers = args.workers;

  const MonteCarloResult result = run_monte_carlo(spec);
  emit_outputs(result, args.out_dir);

  int failed = 0;
  for (const EpisodeLog& log : result.episodes) failed += log.status == EpisodeStatus::failed ? 1 : 0;
  std::cout << "sweep: " << result.episodes.size() << " episodes (" << failed << " failed), outputs in "
            << args.out_dir << "\n";
  for (const auto& [planner, agg] : result.metrics.overall) {
    std::cout << "  " << planner << ": SR " << agg.sr << ", MST " << agg.mst << " s\n";
  }
  return 0;
}

int cmd_tune_jump(const CommonArgs& args) {
  ConfigFile cfg_file = ConfigFile::parse_file(args.config_path);
  SweepSpec spec = sweep_from_config(cfg_file);
  if (!args.map_override.empty()) spec.base.map.path = args.map_override;
  if (args.seed_set) spec.master_seed = args.seed;
  if (args.workers > 0) spec.workers = args.workers;

  const std::vector<int> n_values = {2, 4, 6, 8, 10};
  const std::vector<int> m_values = {10, 12, 14};
  const TuneJumpResult result = tune_jump(spec, n_values, m_values);
  write_text(std::filesystem::path(args.out_dir) / "jump_skill_grid.csv", tune_jump_csv(result));

  const auto best = std::max_element(result.cells.begin(), result.cells.end(),
                                     [](const TuneJumpCell& a, const TuneJumpCell& b) { return a.score < b.score; });
  std::cout << "tune-jump: best n_jump=" << best->n_jump << " m_jump=" << best->m_jump << " (score " << best->score
            << "), grid in " << args.out_dir << "/jump_skill_grid.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Source search simulator: plume dispersion, particle-filter inference and informed tree planning"};
  app.require_subcommand(1);

  CommonArgs args;
  DumpOptions dumps;

  const auto add_common = [&](CLI::App* cmd, bool with_workers) {
    cmd->add_option("--config", args.config_path, "Scenario config file")->required();
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--map", args.map_override, "Override the map file path");
    cmd->add_option("--seed", args.seed, "Override the (master) seed")->each([&](const std::string&) {
      args.seed_set = true;
    });
    if (with_workers) cmd->add_option("--workers", args.workers, "Worker threads");
  };

  CLI::App* run = app.add_subcommand("run", "Run a single episode");
  add_common(run, false);
  run->add_flag("--dump-posterior", dumps.posterior, "Write the final posterior as CSV");
  run->add_flag("--dump-distribution", dumps.distribution, "Write the sampling distribution as CSV");
  run->add_flag("--dump-tree", dumps.tree, "Write per-step planner trees as CSV");
  run->add_flag("--dump-utility", dumps.utility, "Write per-step candidate utilities as CSV");

  CLI::App* sweep = app.add_subcommand("sweep", "Run a Monte Carlo sweep");
  add_common(sweep, true);

  CLI::App* tune = app.add_subcommand("tune-jump", "Sweep Entrotaxis-Jump parameters by skill score");
  add_common(tune, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(args, dumps);
    if (sweep->parsed()) return cmd_sweep(args);
    if (tune->parsed()) return cmd_tune_jump(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
