#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <numeric>

#include "json.hpp"

#include "mmliq/analysis.hpp"
#include "mmliq/closedform.hpp"
#include "mmliq/nplayer.hpp"
#include "mmliq_app/experiment.hpp"

namespace mmliq::app {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

json breakdown_json(const CostBreakdown& c, bool with_target) {
  json j = {{"total", c.total}, {"profit_q", c.profit_q}, {"risk", c.risk}};
  if (with_target) j["profit_r"] = c.profit_r;
  return j;
}

json costs_json(const TraderCosts& c) {
  return {{"major", breakdown_json(c.major, true)}, {"minor", breakdown_json(c.minor, false)}};
}

GridFn aggregate_rate(const EquilibriumSolution& sol) {
  GridFn f(sol.v_major.grid());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = sol.v_major[i] + sol.v_minor[i];
  return f;
}

void write_trajectories(const fs::path& path, const EquilibriumSolution& sol, const MarketParams& p) {
  const GridFn price = price_path(sol, p);
  CsvWriter csv(path, {"t", "q_major", "q_minor", "v_major", "v_minor", "price"});
  const Grid& g = sol.q_major.grid();
  for (std::size_t i = 0; i < g.nodes(); ++i) {
    csv.row({g.time(i), sol.q_major[i], sol.q_minor[i], sol.v_major[i], sol.v_minor[i], price[i]});
  }
}

Grid period_grid(const ExperimentConfig& cfg, int periods) {
  if (cfg.grid.steps() % periods != 0) throw DomainError("grid does not resolve the target period");
  return Grid(cfg.params.horizon / periods, cfg.grid.steps() / periods);
}

// The largest `count` modes, ties broken by the lower k.
std::vector<int> top_modes(const SpectralEstimate& s, std::size_t count) {
  std::vector<int> order(s.amplitudes.size());
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s.at(a) > s.at(b); });
  order.resize(std::min(count, order.size()));
  return order;
}

json spectrum_section(const SpectralEstimate& eq, const SpectralEstimate& ng) {
  json j = {{"top_modes_equilibrium", top_modes(eq, 2)}, {"top_modes_no_interactions", top_modes(ng, 2)}};
  for (int k : {10, 20}) {
    if (k > static_cast<int>(eq.amplitudes.size())) continue;
    j["equilibrium"][std::to_string(k)] = eq.at(k);
    j["no_interactions"][std::to_string(k)] = ng.at(k);
  }
  return j;
}

void write_spectrum(const fs::path& path, const SpectralEstimate& eq, const SpectralEstimate& ng) {
  CsvWriter csv(path, {"k", "amp_equilibrium", "amp_nogame"});
  for (std::size_t k = 1; k <= eq.amplitudes.size(); ++k) {
    csv.row({static_cast<double>(k), eq.at(static_cast<int>(k)), ng.at(static_cast<int>(k))});
  }
}

std::string section_key(const ExperimentConfig& cfg, const std::string& section) {
  const auto it = cfg.tables.find(section);
  return it == cfg.tables.end() ? section : it->second;
}

bool wants(const ExperimentConfig& cfg, Artifact a) {
  return std::find(cfg.outputs.begin(), cfg.outputs.end(), a) != cfg.outputs.end();
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // folds -0 so identical runs print identically
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string run(const ExperimentConfig& cfg) {
  const ValidationReport feasibility = validate_params(cfg.params);
  if (!feasibility.feasible) {
    std::string msg = "parameters violate the weak-interaction condition:";
    for (const auto& v : feasibility.violated) msg += " " + v + ";";
    throw DomainError(msg);
  }
  fs::create_directories(cfg.output_dir);
  const fs::path dir = cfg.output_dir;
  const MarketParams& p = cfg.params;

  const EquilibriumSolution eq = solve_equilibrium(p, cfg.inv, cfg.target, cfg.grid);
  const EquilibriumSolution ng = solve_no_interaction(p, cfg.inv, cfg.target, cfg.grid);
  json summary;

  if (wants(cfg, Artifact::trajectories)) {
    write_trajectories(dir / "trajectories.csv", eq, p);
    write_trajectories(dir / "trajectories_nogame.csv", ng, p);
  }

  if (wants(cfg, Artifact::decomposition)) {
    const PeriodicResidual residual = periodic_residual(cfg.target);
    const Grid pg = period_grid(cfg, residual.periods());
    const PeriodicSolution per = solve_periodic(p, residual, pg, cfg.options);
    const TrendSolution trend = solve_trend(p, cfg.inv, per.major_initial, per.minor_initial, cfg.grid);
    const AssembledSolution joined =
        assemble_decomposition(per.major, per.minor, trend, cfg.inv, residual.periods());
    CsvWriter csv(dir / "decomposition.csv",
                  {"t", "periodic_major", "periodic_minor", "trend_major", "trend_minor"});
    const auto& parts = joined.parts;
    for (std::size_t i = 0; i < cfg.grid.nodes(); ++i) {
      csv.row({cfg.grid.time(i), parts.periodic_major[i], parts.periodic_minor[i],
               parts.trend_major[i], parts.trend_minor[i]});
    }
    summary["decomposition"] = {
        {"sweeps", per.iterations},
        {"periodic_initial", {per.major_initial, per.minor_initial}},
        {"reassembly_error",
         std::max(sup_norm_diff(joined.solution.q_major, eq.q_major),
                  sup_norm_diff(joined.solution.q_minor, eq.q_minor))}};
  }

  if (wants(cfg, Artifact::costs)) {
    const TraderCosts c_eq = evaluate_costs(eq, cfg.target, p);
    const TraderCosts c_ng = evaluate_costs(ng, cfg.target, p);
    json doc = {{"nash", costs_json(c_eq)}, {"no_interactions", costs_json(c_ng)}};
    if (cfg.target.differentiable()) {
      const ShortcutCosts s = optimal_cost_shortcut(eq, cfg.target, p);
      doc["shortcut"] = {{"major", s.major}, {"minor", s.minor}};
    }
    write_json(dir / "costs.json", doc);
    summary[section_key(cfg, "costs")] = {{"nash", doc["nash"]},
                                          {"no_interactions", doc["no_interactions"]}};
  }

  if (wants(cfg, Artifact::amplitudes)) {
    const PeriodicResidual residual = periodic_residual(cfg.target);
    const Grid pg = period_grid(cfg, residual.periods());
    const PeriodicAmplitudes a = periodic_amplitudes(p, residual, pg, cfg.options);
    json doc = {
        {"nash", {{"aggregate_rate", a.rate_equilibrium}, {"price", a.price_equilibrium}}},
        {"no_interactions", {{"aggregate_rate", a.rate_nogame}, {"price", a.price_nogame}}},
        {"inventory_sum", {{"nash", a.inventory_equilibrium}, {"no_interactions", a.inventory_nogame}}}};
    if (const auto* cosine = std::get_if<Cosine>(&cfg.target.variant())) {
      json closed;
      try {
        const RateAmplitudes r = rate_amplitude_phase(p, cosine->periods, cosine->amplitude);
        closed["major_rate"] = {{"amplitude", r.major.amplitude}, {"phase", r.major.phase}};
        closed["minor_rate"] = {{"amplitude", r.minor.amplitude}, {"phase", r.minor.phase}};
        closed["major_rate_nogame_amplitude"] = r.major_nogame_amplitude;
      } catch (const DegeneratePhase&) {
        closed["major_rate"] = nullptr;
      }
      const PriceAmplitudes pa = price_periodic_amplitude(p, cosine->periods, cosine->amplitude);
      closed["price"] = {{"nash", pa.equilibrium}, {"no_interactions", pa.nogame}};
      doc["closed_form"] = closed;
    }
    write_json(dir / "amplitudes.json", doc);
    summary[section_key(cfg, "amplitudes")] = {{"nash", doc["nash"]},
                                               {"no_interactions", doc["no_interactions"]}};
  }

  if (wants(cfg, Artifact::spectrum)) {
    const auto rate_eq = spectral_amplitudes(aggregate_rate(eq), cfg.spectrum_kmax);
    const auto rate_ng = spectral_amplitudes(aggregate_rate(ng), cfg.spectrum_kmax);
    const auto price_eq = spectral_amplitudes(price_path(eq, p), cfg.spectrum_kmax);
    const auto price_ng = spectral_amplitudes(price_path(ng, p), cfg.spectrum_kmax);
    write_spectrum(dir / "spectrum.csv", rate_eq, rate_ng);
    write_spectrum(dir / "spectrum_price.csv", price_eq, price_ng);
    summary[section_key(cfg, "spectrum")] = {{"aggregate_rate", spectrum_section(rate_eq, rate_ng)},
                                             {"price", spectrum_section(price_eq, price_ng)}};
  }

  if (wants(cfg, Artifact::nplayer)) {
    const Grid coarse = Grid::from_step(p.horizon, cfg.nplayer_step);
    if (const auto* twap = std::get_if<TwapStep>(&cfg.target.variant());
        twap && coarse.steps() % twap->periods != 0) {
      throw DomainError("nplayer_step must divide the TWAP period");
    }
    const EquilibriumSolution base = solve_equilibrium(p, cfg.inv, cfg.target, coarse);
    std::vector<std::future<GapReport>> jobs;
    for (int n : cfg.players) {
      jobs.push_back(std::async(std::launch::async, [&, n] {
        return best_response_gap(base, cfg.target, p, cfg.inv, n);
      }));
    }
    json reports = json::array();
    for (auto& job : jobs) {
      const GapReport r = job.get();
      reports.push_back({{"n_players", r.n_players},
                         {"kappa", r.kappa},
                         {"k_val", r.k_val},
                         {"bound_major", r.bound_major},
                         {"bound_minor", r.bound_minor},
                         {"eps_major", r.eps_major},
                         {"eps_minor", r.eps_minor},
                         {"cost_major", r.cost_major},
                         {"cost_minor", r.cost_minor}});
    }
    write_json(dir / "gap_report.json", reports);
    summary["nplayer"] = reports;
  }

  const std::string text = summary.dump(2);
  std::ofstream out(dir / "summary.json");
  if (!out) throw Error("cannot write summary.json");
  out << text << '\n';
  return text;
}

std::vector<std::string> check_summary(const std::string& preset, const std::string& summary_json) {
  const json s = json::parse(summary_json);
  std::vector<std::string> failures;
  auto value = [&](const json::json_pointer& ptr) -> std::optional<double> {
    if (!s.contains(ptr) || !s.at(ptr).is_number()) return std::nullopt;
    return s.at(ptr).get<double>();
  };
  auto absolute = [&](const std::string& path, double expected, double tol) {
    const auto got = value(json::json_pointer(path));
    if (!got || std::abs(*got - expected) > tol) {
      failures.push_back(path + ": got " + (got ? format_number(*got) : "nothing") + ", expected " +
                         format_number(expected) + " +/- " + format_number(tol));
    }
  };
  auto relative = [&](const std::string& path, double expected, double rel) {
    const auto got = value(json::json_pointer(path));
    if (!got || std::abs(*got - expected) > rel * std::abs(expected)) {
      failures.push_back(path + ": got " + (got ? format_number(*got) : "nothing") + ", expected " +
                         format_number(expected) + " within " + format_number(rel * 100) + "%");
    }
  };
  // {total, profit_q, profit_r, risk} major then {total, profit_q, risk} minor,
  // Nash column first.
  auto cost_table = [&](const std::string& key, const std::array<double, 14>& v) {
    const double tol = 5e-4;
    std::size_t i = 0;
    for (const char* column : {"nash", "no_interactions"}) {
      const std::string base = "/" + key + "/" + column;
      for (const char* f : {"total", "profit_q", "profit_r", "risk"}) absolute(base + "/major/" + f, v[i++], tol);
      for (const char* f : {"total", "profit_q", "risk"}) absolute(base + "/minor/" + f, v[i++], tol);
    }
  };
  auto amplitude_table = [&](const std::string& key, double rel, const std::array<double, 4>& v) {
    relative("/" + key + "/nash/aggregate_rate", v[0], rel);
    relative("/" + key + "/no_interactions/aggregate_rate", v[1], rel);
    relative("/" + key + "/nash/price", v[2], rel);
    relative("/" + key + "/no_interactions/price", v[3], rel);
  };

  if (preset == "cos") {
    cost_table("table1", {0.0130, -0.0368, -0.0253, 0.0014, -0.0246, 0.0475, 0.0229,
                          0.0136, -0.0126, 0.0000, 0.0010, 0.0000, 0.0000, 0.0000});
    amplitude_table("table2", 0.005, {0.672341, 0.716953, 0.001020, 0.001141});
  } else if (preset == "twap") {
    cost_table("table3", {0.0477, -0.0504, -0.0290, 0.0264, -0.0266, 0.0491, 0.0225,
                          0.0500, -0.0250, 0.0000, 0.0250, 0.0000, 0.0000, 0.0000});
    amplitude_table("table4", 0.01, {2.364551, 2.466589, 0.230056, 0.239414});
  } else if (preset == "vwap") {
    cost_table("table5", {0.0138, -0.0412, -0.0279, 0.0005, -0.0276, 0.0521, 0.0246,
                          0.0140, -0.0137, 0.0000, 0.0004, 0.0000, 0.0000, 0.0000});
    for (const char* series : {"aggregate_rate", "price"}) {
      const std::string base = std::string("/spectral/") + series;
      const json::json_pointer top(base + "/top_modes_equilibrium");
      const json::json_pointer top_ng(base + "/top_modes_no_interactions");
      for (const auto& ptr : {top, top_ng}) {
        if (!s.contains(ptr)) {
          failures.push_back(ptr.to_string() + ": missing");
          continue;
        }
        for (const auto& k : s.at(ptr)) {
          const int mode = k.get<int>();
          if (mode != 10 && mode != 20) {
            failures.push_back(ptr.to_string() + ": mode " + std::to_string(mode) + " not in {10, 20}");
          }
        }
      }
      for (const char* k : {"10", "20"}) {
        const auto e = value(json::json_pointer(base + "/equilibrium/" + k));
        const auto n = value(json::json_pointer(base + "/no_interactions/" + k));
        if (!e || !n || !(*e < *n)) {
          failures.push_back(base + " mode " + k + ": equilibrium " + (e ? format_number(*e) : "?") +
                             " not below " + (n ? format_number(*n) : "?"));
        }
      }
    }
  } else {
    failures.push_back("no reference values for preset '" + preset + "'");
  }
  return failures;
}

}  // namespace mmliq::app
