#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

#include "mmliq_app/experiment.hpp"

namespace mmliq::app {

namespace {

using nlohmann::json;

// Reads keys out of one JSON object and rejects whatever was not consumed.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw SchemaError(path_ + " must be an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& raw(const std::string& key) {
    if (!node_.contains(key)) throw SchemaError("missing key " + path_ + "." + key);
    seen_.insert(key);
    return node_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw SchemaError(path_ + "." + key + " must be a number");
    return v.get<double>();
  }

  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  int integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw SchemaError(path_ + "." + key + " must be an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      throw DomainError(path_ + "." + key + " out of range");
    }
    return static_cast<int>(x);
  }

  int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

  std::string text(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw SchemaError(path_ + "." + key + " must be a string");
    return v.get<std::string>();
  }

  Section child(const std::string& key) { return Section(raw(key), path_ + "." + key); }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) throw SchemaError("unknown key " + path_ + "." + key);
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

MarketParams parse_market(Section s) {
  MarketParams p;
  p.major_temp_impact = s.number("major_temp_impact");
  p.minor_temp_impact = s.number("minor_temp_impact");
  p.major_perm_impact = s.number("major_perm_impact");
  p.minor_perm_impact = s.number("minor_perm_impact");
  p.major_risk_aversion = s.number("major_risk_aversion");
  p.minor_risk_aversion = s.number("minor_risk_aversion");
  p.volatility = s.number("volatility", 0.0);
  p.horizon = s.number("horizon");
  s.finish();
  p.validate();
  return p;
}

TargetStrategy parse_target(Section s, const MarketParams& p, const Inventories& inv) {
  const std::string kind = s.text("kind");
  const double q0 = inv.major;
  if (kind == "dtwap") {
    s.finish();
    return TargetStrategy(p.horizon, DTwap{q0});
  }
  if (kind == "cosine") {
    const int periods = s.integer("periods");
    const double amplitude = s.number("amplitude");
    s.finish();
    return TargetStrategy(p.horizon, Cosine{q0, periods, amplitude});
  }
  if (kind == "twap_step") {
    const int periods = s.integer("periods");
    s.finish();
    return TargetStrategy(p.horizon, TwapStep{q0, periods});
  }
  if (kind == "vwap") {
    const int cells = s.integer("cells", 100000);
    s.finish();
    TargetStrategy t = vwap_reference_target(cells);
    if (std::abs(p.horizon - t.horizon()) > 1e-12 * t.horizon() ||
        std::abs(q0 - t.initial_inventory()) > 1e-12 * std::abs(t.initial_inventory())) {
      throw DomainError("the vwap target needs horizon 10 and major inventory 10");
    }
    return t;
  }
  if (kind == "sampled_rate") {
    const json& rates = s.raw("rates");
    if (!rates.is_array() || rates.empty()) throw SchemaError("target.rates must be a non-empty array");
    SampledRate sr{q0, {}, std::nullopt};
    for (const auto& r : rates) {
      if (!r.is_number()) throw SchemaError("target.rates entries must be numbers");
      sr.cell_rates.push_back(r.get<double>());
    }
    if (s.has("periods")) sr.periods = s.integer("periods");
    s.finish();
    return TargetStrategy(p.horizon, std::move(sr));
  }
  throw SchemaError("unknown target kind '" + kind + "'");
}

Artifact parse_artifact(const std::string& name) {
  if (name == "trajectories") return Artifact::trajectories;
  if (name == "decomposition") return Artifact::decomposition;
  if (name == "costs") return Artifact::costs;
  if (name == "amplitudes") return Artifact::amplitudes;
  if (name == "spectrum") return Artifact::spectrum;
  throw SchemaError("unknown output '" + name + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw SchemaError("config is empty");
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed config: ") + e.what());
  }
  Section root(doc, "config");
  ExperimentConfig cfg;
  cfg.params = parse_market(root.child("market"));

  Section inv = root.child("inventories");
  cfg.inv.major = inv.number("major");
  cfg.inv.minor = inv.number("minor", 0.0);
  inv.finish();
  if (!std::isfinite(cfg.inv.major) || !std::isfinite(cfg.inv.minor)) {
    throw DomainError("inventories must be finite");
  }

  cfg.target = parse_target(root.child("target"), cfg.params, cfg.inv);

  Section grid = root.child("grid");
  if (grid.has("step") == grid.has("steps")) throw SchemaError("grid needs exactly one of step, steps");
  cfg.grid = grid.has("step") ? Grid::from_step(cfg.params.horizon, grid.number("step"))
                              : Grid(cfg.params.horizon, grid.integer("steps"));
  grid.finish();

  if (root.has("options")) {
    Section o = root.child("options");
    cfg.options.max_iter = o.integer("max_iter", cfg.options.max_iter);
    cfg.options.tol = o.number("tol", cfg.options.tol);
    cfg.options.oracle_quadrature_steps =
        o.integer("oracle_quadrature_steps", cfg.options.oracle_quadrature_steps);
    cfg.nplayer_step = o.number("nplayer_step", cfg.nplayer_step);
    cfg.spectrum_kmax = o.integer("spectrum_kmax", cfg.spectrum_kmax);
    o.finish();
  }
  cfg.options.validate();
  if (!(cfg.nplayer_step > 0.0)) throw DomainError("nplayer_step must be > 0");
  if (cfg.spectrum_kmax < 1 || cfg.spectrum_kmax > cfg.grid.steps() / 2) {
    throw DomainError("spectrum_kmax must lie in [1, steps/2]");
  }

  if (root.has("outputs")) {
    const json& outs = root.raw("outputs");
    if (!outs.is_array()) throw SchemaError("outputs must be an array");
    for (const auto& item : outs) {
      if (item.is_string()) {
        cfg.outputs.push_back(parse_artifact(item.get<std::string>()));
      } else if (item.is_object()) {
        Section n(item, "outputs[]");
        const json& list = n.raw("nplayer");
        n.finish();
        if (!list.is_array() || list.empty()) throw SchemaError("nplayer needs a list of player counts");
        for (const auto& v : list) {
          if (!v.is_number_integer()) throw SchemaError("player counts must be integers");
          const auto count = v.get<long long>();
          if (count < 1 || count > 1000000) throw DomainError("player counts must lie in [1, 1e6]");
          cfg.players.push_back(static_cast<int>(count));
        }
        cfg.outputs.push_back(Artifact::nplayer);
      } else {
        throw SchemaError("outputs entries must be names or {\"nplayer\": [...]}");
      }
    }
  } else {
    cfg.outputs = {Artifact::trajectories, Artifact::costs};
  }

  if (root.has("output_dir")) cfg.output_dir = root.text("output_dir");

  if (root.has("tables")) {
    Section t = root.child("tables");
    for (const char* key : {"costs", "amplitudes", "spectrum"}) {
      if (t.has(key)) cfg.tables[key] = t.text(key);
    }
    t.finish();
  }
  root.finish();

  set_grid_step(cfg, cfg.grid.step());
  return cfg;
}

void set_grid_step(ExperimentConfig& cfg, double step) {
  cfg.grid = Grid::from_step(cfg.params.horizon, step);
  if (const auto* twap = std::get_if<TwapStep>(&cfg.target.variant())) {
    if (cfg.grid.steps() % twap->periods != 0) {
      throw DomainError("grid step must divide the TWAP period");
    }
  }
  if (cfg.spectrum_kmax > cfg.grid.steps() / 2) {
    throw DomainError("spectrum_kmax must lie in [1, steps/2]");
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<std::string> preset_names() { return {"cos", "twap", "vwap"}; }

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.params = MarketParams::reference();
  cfg.inv = {10.0, 0.0};
  cfg.grid = Grid::from_step(cfg.params.horizon, 0.001);
  cfg.output_dir = std::filesystem::path("out") / name;
  if (name == "cos") {
    cfg.target = TargetStrategy(cfg.params.horizon, Cosine{10.0, 10, 0.5 / std::numbers::pi});
    cfg.outputs = {Artifact::trajectories, Artifact::decomposition, Artifact::costs,
                   Artifact::amplitudes, Artifact::nplayer};
    cfg.players = {2, 10, 100};
    cfg.tables = {{"costs", "table1"}, {"amplitudes", "table2"}};
  } else if (name == "twap") {
    cfg.target = TargetStrategy(cfg.params.horizon, TwapStep{10.0, 10});
    cfg.outputs = {Artifact::trajectories, Artifact::decomposition, Artifact::costs,
                   Artifact::amplitudes};
    cfg.tables = {{"costs", "table3"}, {"amplitudes", "table4"}};
  } else if (name == "vwap") {
    cfg.target = vwap_reference_target();
    cfg.outputs = {Artifact::trajectories, Artifact::costs, Artifact::spectrum};
    cfg.tables = {{"costs", "table5"}, {"spectrum", "spectral"}};
  } else {
    throw SchemaError("unknown preset '" + name + "'");
  }
  return cfg;
}

}  // namespace mmliq::app
