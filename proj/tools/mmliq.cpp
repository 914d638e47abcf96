#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mmliq/errors.hpp"
#include "mmliq/model.hpp"
#include "mmliq_app/experiment.hpp"

namespace {

using mmliq::app::Artifact;
using mmliq::app::ExperimentConfig;

constexpr int kConfigError = 2;
constexpr int kSolverError = 3;
constexpr int kCheckFailed = 4;

struct Source {
  std::string config;
  std::string preset;
  std::optional<double> grid_h;
  std::string output_dir;
};

void add_source_options(CLI::App* cmd, Source& src) {
  cmd->add_option("--config", src.config, "experiment config file (JSON)");
  cmd->add_option("--preset", src.preset, "built-in preset: cos, twap or vwap");
  cmd->add_option("--grid-h", src.grid_h, "override the grid step");
  cmd->add_option("-o,--output-dir", src.output_dir, "directory for emitted files");
}

ExperimentConfig resolve(const Source& src) {
  if (!src.config.empty() && !src.preset.empty()) {
    throw mmliq::app::SchemaError("pass either --config or --preset, not both");
  }
  ExperimentConfig cfg = src.config.empty()
                             ? mmliq::app::preset_config(src.preset.empty() ? "cos" : src.preset)
                             : mmliq::app::load_config(src.config);
  if (src.grid_h) mmliq::app::set_grid_step(cfg, *src.grid_h);
  if (!src.output_dir.empty()) cfg.output_dir = src.output_dir;
  return cfg;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const mmliq::app::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const mmliq::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const mmliq::GridMismatch& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const mmliq::NonConvergence& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const mmliq::Error& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverError;
  }
}

int run_only(const Source& src, std::vector<Artifact> outputs, const std::vector<int>& players) {
  ExperimentConfig cfg = resolve(src);
  cfg.outputs = std::move(outputs);
  if (!players.empty()) cfg.players = players;
  if (cfg.players.empty()) cfg.players = {2, 10, 100};
  const std::string summary = mmliq::app::run(cfg);
  std::cout << summary << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Major-minor liquidation game: equilibrium solver and analysis"};
  app.require_subcommand(1);

  Source src;
  std::vector<int> players;
  bool check = false;

  auto* validate = app.add_subcommand("validate", "check the weak-interaction condition");
  add_source_options(validate, src);
  auto* solve = app.add_subcommand("solve", "write equilibrium trajectories");
  add_source_options(solve, src);
  auto* decompose = app.add_subcommand("decompose", "periodic-trend decomposition");
  add_source_options(decompose, src);
  auto* costs = app.add_subcommand("costs", "cost breakdowns");
  add_source_options(costs, src);
  auto* amplitudes = app.add_subcommand("amplitudes", "periodic amplitudes");
  add_source_options(amplitudes, src);
  auto* spectrum = app.add_subcommand("spectrum", "Fourier amplitudes of rate and price");
  add_source_options(spectrum, src);
  auto* nplayer = app.add_subcommand("nplayer", "finite-player best-response gaps");
  add_source_options(nplayer, src);
  nplayer->add_option("-N,--players", players, "player counts");
  auto* reproduce = app.add_subcommand("reproduce", "run a preset end to end");
  add_source_options(reproduce, src);
  reproduce->add_flag("--check", check, "compare with the reference table values");

  CLI11_PARSE(app, argc, argv);

  return guarded([&]() -> int {
    if (validate->parsed()) {
      const ExperimentConfig cfg = resolve(src);
      const auto report = mmliq::validate_params(cfg.params);
      nlohmann::json doc = {{"feasible", report.feasible}, {"violated", report.violated}};
      if (report.witness) doc["witness"] = *report.witness;
      std::cout << doc.dump(2) << '\n';
      return report.feasible ? 0 : kConfigError;
    }
    if (solve->parsed()) return run_only(src, {Artifact::trajectories}, players);
    if (decompose->parsed()) return run_only(src, {Artifact::decomposition}, players);
    if (costs->parsed()) return run_only(src, {Artifact::costs}, players);
    if (amplitudes->parsed()) return run_only(src, {Artifact::amplitudes}, players);
    if (spectrum->parsed()) return run_only(src, {Artifact::spectrum}, players);
    if (nplayer->parsed()) return run_only(src, {Artifact::nplayer}, players);

    if (src.preset.empty() && src.config.empty()) {
      std::cerr << "reproduce needs --preset\n";
      return kConfigError;
    }
    const ExperimentConfig cfg = resolve(src);
    const std::string summary = mmliq::app::run(cfg);
    std::cout << summary << '\n';
    if (check) {
      const auto failures = mmliq::app::check_summary(src.preset, summary);
      for (const auto& f : failures) std::cerr << "check failed: " << f << '\n';
      if (!failures.empty()) return kCheckFailed;
      std::cerr << "all reference comparisons passed\n";
    }
    return 0;
  });
}
