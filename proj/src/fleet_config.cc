#include "fleetcbm/fleet_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fleetcbm {

using nlohmann::json;

std::optional<std::size_t> FleetSpec::asset_index(std::string_view id) const {
  for (std::size_t i = 0; i < assets.size(); ++i) {
    if (assets[i].id == id) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> FleetSpec::edges_into(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].target == assets[i].id) out.push_back(e);
  }
  return out;
}

std::size_t FleetSpec::edge_source(std::size_t edge) const {
  return *asset_index(edges[edge].source);
}

std::size_t FleetSpec::edge_target(std::size_t edge) const {
  return *asset_index(edges[edge].target);
}

namespace {

// Tracks which keys of an object were consumed so leftovers can be rejected.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError("'" + path_ + "' must be an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& required(const std::string& key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) throw ConfigError("missing required field '" + child(key) + "'");
    used_.insert(key);
    return *it;
  }

  const json* optional(const std::string& key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  double number(const std::string& key) { return as_number(required(key), child(key)); }

  int integer(const std::string& key) {
    const json& v = required(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      throw ConfigError("field '" + child(key) + "' must be an integer");
    }
    return v.get<int>();
  }

  std::string string(const std::string& key) {
    const json& v = required(key);
    if (!v.is_string()) throw ConfigError("field '" + child(key) + "' must be a string");
    return v.get<std::string>();
  }

  // Scalar broadcast across the horizon, or an array of exactly `horizon`.
  std::vector<double> series(const std::string& key, int horizon) {
    return as_series(required(key), child(key), horizon);
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError("unknown field '" + child(it.key()) + "'");
    }
  }

  const std::string& path() const { return path_; }

  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError("field '" + where + "' must be a number");
    return v.get<double>();
  }

  static std::vector<double> as_series(const json& v, const std::string& where, int horizon) {
    if (v.is_number()) return std::vector<double>(static_cast<std::size_t>(horizon), v.get<double>());
    if (!v.is_array()) throw ConfigError("field '" + where + "' must be a number or an array");
    if (static_cast<int>(v.size()) != horizon) {
      throw ConfigError("field '" + where + "' has " + std::to_string(v.size()) +
                        " entries, expected horizon " + std::to_string(horizon));
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t t = 0; t < v.size(); ++t) {
      out.push_back(as_number(v[t], where + "[" + std::to_string(t) + "]"));
    }
    return out;
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json series_json(const std::vector<double>& v) {
  if (!v.empty() && std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) {
    return v.front();
  }
  return json(v);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

FleetSpec parse_fleet_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    auto pos = what.find("]: ");
    throw ConfigError("syntax error at " + line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                      (pos == std::string::npos ? what : what.substr(pos + 3)));
  }

  FleetSpec spec;
  ObjectReader top(doc, "");
  spec.horizon = top.integer("horizon");
  if (spec.horizon < 1) throw ConfigError("field 'horizon' must be >= 1");
  const int H = spec.horizon;
  spec.max_cycles = top.integer("cycles");

  {
    ObjectReader crew(top.required("crew"), "crew");
    spec.crew_capacity = crew.integer("capacity");
    spec.pm_duration = crew.integer("pm_duration");
    spec.cm_duration = crew.integer("cm_duration");
    crew.finish();
  }
  {
    ObjectReader costs(top.required("costs"), "costs");
    spec.pm_cost = costs.number("preventive");
    spec.cm_cost = costs.number("corrective");
    spec.unmet_penalty = costs.number("unmet_demand");
    costs.finish();
  }
  spec.demand = ObjectReader::as_series(top.required("demand"), "demand", H);

  const json& assets = top.required("assets");
  if (!assets.is_array()) throw ConfigError("field 'assets' must be an array");
  std::vector<std::vector<double>> nominal_rates;
  for (std::size_t a = 0; a < assets.size(); ++a) {
    ObjectReader r(assets[a], "assets[" + std::to_string(a) + "]");
    AssetSpec asset;
    asset.id = r.string("id");
    if (spec.asset_index(asset.id)) throw ConfigError("duplicate asset id '" + asset.id + "'");
    asset.failure_threshold = r.number("failure_threshold");
    asset.initial_level = r.number("initial_level");
    asset.production_capacity = r.number("production_capacity");
    asset.production_cost = r.series("production_cost", H);
    nominal_rates.push_back(r.series("nominal_rate", H));
    asset.error_std = r.number("error_std");
    r.finish();
    spec.assets.push_back(std::move(asset));
  }

  if (const json* edges = top.optional("edges")) {
    if (!edges->is_array()) throw ConfigError("field 'edges' must be an array");
    for (std::size_t e = 0; e < edges->size(); ++e) {
      ObjectReader r((*edges)[e], "edges[" + std::to_string(e) + "]");
      InteractionEdge edge;
      edge.source = r.string("source");
      edge.target = r.string("target");
      for (const std::string* id : {&edge.source, &edge.target}) {
        if (!spec.asset_index(*id)) {
          throw ConfigError("unknown asset id '" + *id + "' in " + r.child(id == &edge.source ? "source" : "target"));
        }
      }
      edge.gamma_nominal = r.series("gamma_nominal", H);
      edge.gamma_halfwidth = r.series("gamma_halfwidth", H);
      r.finish();
      spec.edges.push_back(std::move(edge));
    }
  }

  spec.uncertainty.assets.resize(spec.assets.size());
  std::vector<bool> seen(spec.assets.size(), false);
  const json& unc = top.required("uncertainty");
  if (!unc.is_array()) throw ConfigError("field 'uncertainty' must be an array");
  for (std::size_t u = 0; u < unc.size(); ++u) {
    ObjectReader r(unc[u], "uncertainty[" + std::to_string(u) + "]");
    std::string id = r.string("asset");
    auto idx = spec.asset_index(id);
    if (!idx) throw ConfigError("unknown asset id '" + id + "' in " + r.child("asset"));
    if (seen[*idx]) throw ConfigError("duplicate uncertainty entry for asset '" + id + "'");
    seen[*idx] = true;
    AssetUncertainty& au = spec.uncertainty.assets[*idx];
    au.d_bar = nominal_rates[*idx];
    au.d_hat = r.series("d_hat", H);
    au.zeta_bar = r.series("zeta_bar", H);
    au.zeta_hat = r.series("zeta_hat", H);
    const bool has_budget = r.has("budget");
    const bool has_rate = r.has("budget_per_period");
    if (has_budget == has_rate) {
      throw ConfigError("'" + r.path() + "' needs exactly one of 'budget' or 'budget_per_period'");
    }
    if (has_budget) {
      au.budget = r.series("budget", H);
    } else {
      double delta = r.number("budget_per_period");
      au.budget.resize(static_cast<std::size_t>(H));
      for (int t = 1; t <= H; ++t) au.budget[static_cast<std::size_t>(t - 1)] = delta * t;
    }
    r.finish();
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw ConfigError("missing required field 'uncertainty' entry for asset '" + spec.assets[i].id + "'");
    }
  }
  top.finish();
  return spec;
}

FleetSpec load_fleet_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_fleet_config(ss.str());
}

std::string serialize_fleet_config(const FleetSpec& spec) {
  json doc;
  doc["horizon"] = spec.horizon;
  doc["cycles"] = spec.max_cycles;
  doc["crew"] = {{"capacity", spec.crew_capacity},
                 {"pm_duration", spec.pm_duration},
                 {"cm_duration", spec.cm_duration}};
  doc["costs"] = {{"preventive", spec.pm_cost},
                  {"corrective", spec.cm_cost},
                  {"unmet_demand", spec.unmet_penalty}};
  doc["demand"] = series_json(spec.demand);
  json assets = json::array();
  for (std::size_t i = 0; i < spec.assets.size(); ++i) {
    const AssetSpec& a = spec.assets[i];
    assets.push_back({{"id", a.id},
                      {"failure_threshold", a.failure_threshold},
                      {"initial_level", a.initial_level},
                      {"production_capacity", a.production_capacity},
                      {"production_cost", series_json(a.production_cost)},
                      {"nominal_rate", series_json(spec.uncertainty.assets[i].d_bar)},
                      {"error_std", a.error_std}});
  }
  doc["assets"] = assets;
  json edges = json::array();
  for (const InteractionEdge& e : spec.edges) {
    edges.push_back({{"source", e.source},
                     {"target", e.target},
                     {"gamma_nominal", series_json(e.gamma_nominal)},
                     {"gamma_halfwidth", series_json(e.gamma_halfwidth)}});
  }
  doc["edges"] = edges;
  json unc = json::array();
  for (std::size_t i = 0; i < spec.assets.size(); ++i) {
    const AssetUncertainty& u = spec.uncertainty.assets[i];
    unc.push_back({{"asset", spec.assets[i].id},
                   {"d_hat", series_json(u.d_hat)},
                   {"zeta_bar", series_json(u.zeta_bar)},
                   {"zeta_hat", series_json(u.zeta_hat)},
                   {"budget", series_json(u.budget)}});
  }
  doc["uncertainty"] = unc;
  return doc.dump(2) + "\n";
}

std::vector<Violation> validate(const FleetSpec& spec) {
  std::vector<Violation> out;
  auto add = [&](std::string field, std::string rule, std::string value) {
    out.push_back({std::move(field), std::move(rule), std::move(value)});
  };
  const int H = spec.horizon;
  if (H < 1) add("horizon", "horizon must be >= 1", std::to_string(H));
  if (spec.max_cycles < 1) add("cycles", "cycles must be >= 1", std::to_string(spec.max_cycles));
  if (spec.crew_capacity < 1) add("crew.capacity", "crew capacity must be >= 1", std::to_string(spec.crew_capacity));
  if (spec.pm_duration < 1) add("crew.pm_duration", "pm_duration must be >= 1", std::to_string(spec.pm_duration));
  if (spec.cm_duration < 1) add("crew.cm_duration", "cm_duration must be >= 1", std::to_string(spec.cm_duration));
  if (spec.pm_cost < 0) add("costs.preventive", "preventive cost must be >= 0", fmt(spec.pm_cost));
  if (spec.unmet_penalty < 0) add("costs.unmet_demand", "unmet demand penalty must be >= 0", fmt(spec.unmet_penalty));
  if (spec.cm_cost < spec.pm_cost) {
    add("costs.corrective", "corrective cost must be >= preventive cost",
        fmt(spec.cm_cost) + " < " + fmt(spec.pm_cost));
  }
  if (spec.assets.empty()) add("assets", "at least one asset is required", "0");

  auto check_series = [&](const std::string& field, const std::vector<double>& v, bool nonneg) {
    if (H >= 1 && static_cast<int>(v.size()) != H) {
      add(field, "series length must equal horizon", std::to_string(v.size()));
      return false;
    }
    for (std::size_t t = 0; t < v.size(); ++t) {
      if (!std::isfinite(v[t])) {
        add(field + "[t=" + std::to_string(t + 1) + "]", "value must be finite", fmt(v[t]));
      } else if (nonneg && v[t] < 0) {
        add(field + "[t=" + std::to_string(t + 1) + "]", "value must be >= 0", fmt(v[t]));
      }
    }
    return true;
  };
  // Nominal/half-width pair of an uncertain coefficient. A pair of exact zeros
  // declares the coefficient absent, which keeps it out of the uncertainty set.
  auto check_pair = [&](const std::string& field, const std::string& bar_name, const std::string& hat_name,
                        const std::vector<double>& bar, const std::vector<double>& hat, bool allow_absent) {
    if (!check_series(field + "." + bar_name, bar, true) || !check_series(field + "." + hat_name, hat, false)) return;
    for (std::size_t t = 0; t < bar.size() && t < hat.size(); ++t) {
      const std::string at = "[t=" + std::to_string(t + 1) + "]";
      if (allow_absent && bar[t] == 0.0 && hat[t] == 0.0) continue;
      if (!(hat[t] > 0)) {
        add(field + "." + hat_name + at, hat_name + " must be > 0", fmt(hat[t]));
      } else if (bar[t] < hat[t]) {
        add(field + "." + bar_name + at, bar_name + " must be >= " + hat_name,
            fmt(bar[t]) + " < " + fmt(hat[t]));
      }
    }
  };

  check_series("demand", spec.demand, true);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < spec.assets.size(); ++i) {
    const AssetSpec& a = spec.assets[i];
    const std::string f = "assets[" + a.id + "]";
    if (!ids.insert(a.id).second) add(f + ".id", "asset ids must be unique", a.id);
    if (!(a.failure_threshold > 0)) add(f + ".failure_threshold", "failure threshold must be > 0", fmt(a.failure_threshold));
    if (!(a.initial_level >= 0) || !(a.initial_level < a.failure_threshold)) {
      add(f + ".initial_level", "initial level must lie in [0, failure_threshold)", fmt(a.initial_level));
    }
    if (!(a.production_capacity >= 0)) add(f + ".production_capacity", "production capacity must be >= 0", fmt(a.production_capacity));
    if (!(a.error_std >= 0)) add(f + ".error_std", "error_std must be >= 0", fmt(a.error_std));
    check_series(f + ".production_cost", a.production_cost, false);

    if (i >= spec.uncertainty.assets.size()) {
      add("uncertainty[" + a.id + "]", "every asset needs an uncertainty entry", "missing");
      continue;
    }
    const AssetUncertainty& u = spec.uncertainty.assets[i];
    const std::string uf = "uncertainty[" + a.id + "]";
    check_pair(uf, "d_bar", "d_hat", u.d_bar, u.d_hat, false);
    check_pair(uf, "zeta_bar", "zeta_hat", u.zeta_bar, u.zeta_hat, true);
    if (check_series(uf + ".budget", u.budget, true)) {
      for (std::size_t t = 1; t < u.budget.size(); ++t) {
        if (u.budget[t] < u.budget[t - 1]) {
          add(uf + ".budget[t=" + std::to_string(t + 1) + "]", "budget must be nondecreasing in t",
              fmt(u.budget[t]) + " < " + fmt(u.budget[t - 1]));
        }
      }
    }
  }
  if (spec.uncertainty.assets.size() > spec.assets.size()) {
    add("uncertainty", "more uncertainty entries than assets", std::to_string(spec.uncertainty.assets.size()));
  }

  std::set<std::pair<std::string, std::string>> pairs;
  for (const InteractionEdge& e : spec.edges) {
    const std::string f = "edges[" + e.source + "->" + e.target + "]";
    if (!spec.asset_index(e.source)) add(f + ".source", "unknown asset id", e.source);
    if (!spec.asset_index(e.target)) add(f + ".target", "unknown asset id", e.target);
    if (e.source == e.target) add(f, "source must differ from target", e.source);
    if (!pairs.insert({e.source, e.target}).second) add(f, "duplicate edge", e.source + "->" + e.target);
    check_pair(f, "gamma_nominal", "gamma_halfwidth", e.gamma_nominal, e.gamma_halfwidth, true);
  }
  std::sort(out.begin(), out.end());
  return out;
}

FleetSpec with_budget_per_period(FleetSpec spec, double delta) {
  for (AssetUncertainty& u : spec.uncertainty.assets) {
    u.budget.assign(static_cast<std::size_t>(spec.horizon), 0.0);
    for (int t = 1; t <= spec.horizon; ++t) u.budget[static_cast<std::size_t>(t - 1)] = delta * t;
  }
  return spec;
}

}  // namespace fleetcbm
