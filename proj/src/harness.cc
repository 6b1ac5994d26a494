#include "fleetcbm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fleetcbm/mps.hpp"
#include "fleetcbm/robust_model.hpp"

namespace fleetcbm {
namespace {

constexpr double kIntTol = 1e-6;

std::string var_label(const char* base, std::size_t i, int t) {
  return std::string(base) + "[i=" + std::to_string(i + 1) + ",t=" + std::to_string(t) + "]";
}

bool read_binary(const MilpSolution& sol, std::size_t id, const std::string& label) {
  const double x = sol.values.at(id);
  const double r = std::round(x);
  if (std::abs(x - r) > kIntTol || (r != 0.0 && r != 1.0)) {
    throw std::runtime_error("binary " + label + " is not integral: " + std::to_string(x));
  }
  return r == 1.0;
}

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / double(xs.size() - 1));
  }
  // Guard the mean against rounding just outside [min, max].
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

double at_t(const std::vector<double>& series, int t) { return series[std::size_t(t - 1)]; }

enum class Mode { kUp, kFailed, kMaint };

struct AssetState {
  double level = 0.0;
  Mode mode = Mode::kUp;
  int maint_end = 0;
  int recourse_start = 0;  // reserved CM start while failed, 0 if none
};

// One replication. Streams are per asset so results do not depend on the
// order in which scenarios run.
ScenarioOutcome run_scenario(const FixedSchedule& plan, const FleetSpec& spec, std::uint64_t seed,
                             std::size_t scenario, const SimOptions& options, std::vector<SignalPath>* paths) {
  const std::size_t n = spec.num_assets();
  const int h = plan.horizon;
  std::vector<Rng> rng;
  rng.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rng.push_back(stream_rng(seed, scenario, i));

  // Crew usage by planned windows; skipped PMs give their slots back.
  std::vector<int> crew(std::size_t(h) + 2, 0);
  auto reserve = [&](int start, int duration, int delta) {
    for (int t = start; t < start + duration && t <= h; ++t) crew[std::size_t(t)] += delta;
  };
  std::vector<std::map<int, char>> planned(n);  // start -> 'p' or 'c'
  for (std::size_t i = 0; i < n; ++i) {
    for (int t : plan.pm_starts[i]) {
      planned[i][t] = 'p';
      reserve(t, plan.pm_duration, 1);
    }
    for (int t : plan.cm_starts[i]) {
      planned[i][t] = 'c';
      reserve(t, plan.cm_duration, 1);
    }
  }

  std::vector<AssetState> st(n);
  for (std::size_t i = 0; i < n; ++i) st[i].level = spec.assets[i].initial_level;
  if (paths) {
    paths->assign(n, SignalPath{});
    for (std::size_t i = 0; i < n; ++i) {
      (*paths)[i].asset = spec.assets[i].id;
      (*paths)[i].levels.assign(1, st[i].level);
    }
  }

  ScenarioOutcome out;
  const int last_cm = h - spec.cm_duration;
  std::vector<double> prod(n, 0.0);
  for (int t = 1; t <= h; ++t) {
    // Peer levels seen in period t are the end-of-period t-1 values.
    std::vector<double> peer_value(n);
    for (std::size_t j = 0; j < n; ++j) {
      peer_value[j] = st[j].mode == Mode::kFailed ? spec.assets[j].failure_threshold
                      : st[j].mode == Mode::kMaint ? 0.0
                                                   : st[j].level;
    }

    // Maintenance transitions.
    for (std::size_t i = 0; i < n; ++i) {
      AssetState& a = st[i];
      if (a.mode == Mode::kMaint && t > a.maint_end) a.mode = Mode::kUp;
      auto it = planned[i].find(t);
      const char kind = it == planned[i].end() ? 0 : it->second;
      auto start_cm = [&] {
        a.mode = Mode::kMaint;
        a.maint_end = t + spec.cm_duration - 1;
        a.level = 0.0;
        a.recourse_start = 0;
        out.om_cost += spec.cm_cost;
      };
      bool started = false;
      if (kind == 'c' && a.mode != Mode::kMaint) {
        if (a.mode == Mode::kFailed && a.recourse_start > 0) reserve(a.recourse_start, spec.cm_duration, -1);
        start_cm();
        started = true;
      } else if (a.mode == Mode::kFailed && a.recourse_start == t) {
        start_cm();
        started = true;
      }
      if (kind == 'p') {
        if (!started && a.mode == Mode::kUp) {
          a.mode = Mode::kMaint;
          a.maint_end = t + spec.pm_duration - 1;
          a.level = 0.0;
          out.om_cost += spec.pm_cost;
        } else {
          reserve(t, spec.pm_duration, -1);
        }
      } else if (kind == 'c' && !started) {
        reserve(t, spec.cm_duration, -1);
      }
    }

    // Production.
    for (std::size_t i = 0; i < n; ++i) {
      prod[i] = st[i].mode == Mode::kUp ? std::clamp(plan.production[i][std::size_t(t - 1)], 0.0,
                                                      spec.assets[i].production_capacity)
                                        : 0.0;
    }
    const double demand = at_t(spec.demand, t);
    if (options.redispatch) {
      double short_by = demand - std::accumulate(prod.begin(), prod.end(), 0.0);
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return at_t(spec.assets[a].production_cost, t) < at_t(spec.assets[b].production_cost, t);
      });
      for (std::size_t i : order) {
        if (short_by <= 0.0) break;
        if (st[i].mode != Mode::kUp) continue;
        const double extra = std::min(short_by, spec.assets[i].production_capacity - prod[i]);
        prod[i] += extra;
        short_by -= extra;
      }
    }

    // Degradation and failures.
    for (std::size_t i = 0; i < n; ++i) {
      AssetState& a = st[i];
      if (a.mode != Mode::kUp) {
        if (paths) {
          (*paths)[i].production.push_back(0.0);
          (*paths)[i].levels.push_back(a.mode == Mode::kFailed ? a.level : 0.0);
          for (std::size_t e : spec.edges_into(i)) {
            (*paths)[i].peer_levels[spec.edges[e].source].push_back(peer_value[spec.edge_source(e)]);
          }
        }
        continue;
      }
      const AssetUncertainty& unc = spec.uncertainty.assets[i];
      DegradationParams params;
      params.nominal_rate = at_t(unc.d_bar, t);
      params.error_std = spec.assets[i].error_std;
      params.oid_coeff = at_t(unc.zeta_bar, t);
      if (options.sample_coefficients) {
        const double hat = at_t(unc.zeta_hat, t);
        params.oid_coeff = std::max(0.0, std::uniform_real_distribution<double>(params.oid_coeff - hat,
                                                                                params.oid_coeff + hat)(rng[i]));
      }
      std::map<std::string, double> levels;
      for (std::size_t e : spec.edges_into(i)) {
        const InteractionEdge& edge = spec.edges[e];
        const std::size_t j = spec.edge_source(e);
        double gamma = at_t(edge.gamma_nominal, t);
        if (options.sample_coefficients) {
          const double hat = at_t(edge.gamma_halfwidth, t);
          gamma = std::max(0.0, std::uniform_real_distribution<double>(gamma - hat, gamma + hat)(rng[i]));
        }
        params.mdi_coeffs[edge.source] += gamma;
        levels[edge.source] = peer_value[j];
      }
      a.level += sample_increment(params, prod[i], levels, rng[i]);
      const double lam = spec.assets[i].failure_threshold;
      if (a.level > lam + 1e-9 * std::max(1.0, lam)) {
        ++out.failures;
        prod[i] = 0.0;
        a.mode = Mode::kFailed;
        // A planned corrective start still ahead covers the failure.
        auto next = std::find_if(planned[i].upper_bound(t), planned[i].end(),
                                 [](const auto& kv) { return kv.second == 'c'; });
        if (next == planned[i].end()) {
          for (int s = t + 1; s <= last_cm; ++s) {
            bool ok = true;
            for (int u = s; u < s + spec.cm_duration && u <= h; ++u) ok = ok && crew[std::size_t(u)] < spec.crew_capacity;
            if (ok) {
              a.recourse_start = s;
              reserve(s, spec.cm_duration, 1);
              break;
            }
          }
        }
      }
      if (paths) {
        (*paths)[i].production.push_back(prod[i]);
        (*paths)[i].levels.push_back(a.level);
        if (a.mode == Mode::kFailed && !(*paths)[i].failure_time) (*paths)[i].failure_time = t;
        for (const auto& [peer, lvl] : levels) (*paths)[i].peer_levels[peer].push_back(lvl);
      }
    }

    double produced = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      produced += prod[i];
      out.production_cost += at_t(spec.assets[i].production_cost, t) * prod[i];
    }
    out.penalty_cost += spec.unmet_penalty * std::max(0.0, demand - produced);
  }
  for (const AssetState& a : st) {
    if (a.mode == Mode::kFailed) out.om_cost += spec.cm_cost;
  }
  return out;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ExperimentRow simulate_plan(const FleetSpec& spec, PolicyKind policy, const PlanOptions& options, std::size_t n_scenarios,
                            std::uint64_t seed, const SimOptions& sim) {
  ExperimentRow row;
  row.policy = policy;
  Plan plan = solve_plan(spec, policy, options);
  row.status = plan.solution.status;
  row.objective = plan.solution.objective;
  row.bound = plan.solution.bound;
  row.nodes = plan.solution.nodes;
  row.seconds = plan.seconds;
  if (!plan.schedule) {
    row.error = plan.error;
    return row;
  }
  row.metrics = simulate_fixed_decisions(*plan.schedule, spec, n_scenarios, seed, sim);
  row.simulated = true;
  return row;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_row_metrics(std::ostream& out, const ExperimentRow& r) {
  const SimMetrics& m = r.metrics;
  out << to_string(r.status) << ',' << r.objective << ',' << r.bound << ',' << r.nodes << ',' << r.seconds << ',';
  if (r.simulated) {
    out << m.om_cost.mean << ',' << m.penalty_cost.mean << ',' << m.production_cost.mean << ',' << m.total_cost.mean
        << ',' << m.total_cost.stddev << ',' << m.failures.mean << ',' << m.failures.max;
  } else {
    out << ",,,,,,";
  }
  out << ',' << csv_escape(r.error) << '\n';
}

}  // namespace

bool FixedSchedule::in_maintenance(std::size_t i, int t) const {
  for (int s : pm_starts.at(i)) {
    if (t >= s && t < s + pm_duration) return true;
  }
  for (int s : cm_starts.at(i)) {
    if (t >= s && t < s + cm_duration) return true;
  }
  return false;
}

FixedSchedule extract_schedule(const MilpSolution& solution, const VariableCatalogue& cat, const FleetSpec& spec) {
  if (solution.status != SolveStatus::kOptimal && solution.status != SolveStatus::kGapLimit) {
    throw std::runtime_error("cannot extract a schedule from a " + std::string(to_string(solution.status)) +
                             " solution");
  }
  if (cat.num_assets != spec.num_assets() || cat.horizon != spec.horizon) {
    throw std::runtime_error("catalogue does not match the fleet spec");
  }
  const std::size_t n = spec.num_assets();
  const int h = spec.horizon;
  FixedSchedule s;
  s.horizon = h;
  s.pm_duration = spec.pm_duration;
  s.cm_duration = spec.cm_duration;
  s.pm_starts.resize(n);
  s.cm_starts.resize(n);
  s.production.assign(n, std::vector<double>(std::size_t(h), 0.0));
  for (const AssetSpec& a : spec.assets) s.asset_ids.push_back(a.id);

  for (std::size_t i = 0; i < n; ++i) {
    for (int t = 1; t <= h; ++t) {
      if (read_binary(solution, cat.mp_at(i, t), var_label("mp", i, t))) s.pm_starts[i].push_back(t);
      if (read_binary(solution, cat.mc_at(i, t), var_label("mc", i, t))) s.cm_starts[i].push_back(t);
      read_binary(solution, cat.uf_at(i, t), var_label("uf", i, t));
      read_binary(solution, cat.um_at(i, t), var_label("um", i, t));
      const double p = solution.values.at(cat.p_at(i, t));
      s.production[i][std::size_t(t - 1)] = std::clamp(p, 0.0, spec.assets[i].production_capacity);
    }
  }

  // Audit: windows inside the horizon, one window at a time per asset, crew
  // capacity, no production while unavailable.
  std::vector<int> crew(std::size_t(h) + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> busy(std::size_t(h) + 1, 0);
    auto mark = [&](int start, int duration, const char* kind) {
      if (start + duration - 1 > h) {
        throw std::runtime_error(std::string(kind) + " window of " + spec.assets[i].id + " at t=" +
                                 std::to_string(start) + " runs past the horizon");
      }
      for (int t = start; t < start + duration; ++t) {
        if (++busy[std::size_t(t)] > 1) {
          throw std::runtime_error("overlapping maintenance windows for " + spec.assets[i].id + " at t=" +
                                   std::to_string(t));
        }
        ++crew[std::size_t(t)];
      }
    };
    for (int t : s.pm_starts[i]) mark(t, spec.pm_duration, "PM");
    for (int t : s.cm_starts[i]) mark(t, spec.cm_duration, "CM");
    for (int t = 1; t <= h; ++t) {
      double& p = s.production[i][std::size_t(t - 1)];
      const bool failed = std::round(solution.values.at(cat.uf_at(i, t))) == 1.0;
      if (busy[std::size_t(t)] > 0 || failed) {
        if (p > 1e-6 * std::max(1.0, spec.assets[i].production_capacity)) {
          throw std::runtime_error("production " + std::to_string(p) + " planned for unavailable " +
                                   var_label("p", i, t));
        }
        p = 0.0;
      }
    }
  }
  for (int t = 1; t <= h; ++t) {
    if (crew[std::size_t(t)] > spec.crew_capacity) {
      throw std::runtime_error("crew capacity exceeded at t=" + std::to_string(t));
    }
  }
  return s;
}

SimMetrics simulate_fixed_decisions(const FixedSchedule& schedule, const FleetSpec& spec, std::size_t n_scenarios,
                                    std::uint64_t master_seed, const SimOptions& options) {
  if (n_scenarios == 0) throw std::invalid_argument("n_scenarios must be at least 1");
  if (schedule.asset_ids.size() != spec.num_assets() || schedule.horizon != spec.horizon) {
    throw std::invalid_argument("schedule does not match the fleet spec");
  }
  SimMetrics m;
  m.scenarios.reserve(n_scenarios);
  for (std::size_t s = 0; s < n_scenarios; ++s) {
    std::vector<SignalPath>* paths = options.record_paths && s == 0 ? &m.paths : nullptr;
    m.scenarios.push_back(run_scenario(schedule, spec, master_seed, s, options, paths));
  }
  std::vector<double> om, pen, prod, total, fail;
  for (const ScenarioOutcome& o : m.scenarios) {
    om.push_back(o.om_cost);
    pen.push_back(o.penalty_cost);
    prod.push_back(o.production_cost);
    total.push_back(o.total());
    fail.push_back(double(o.failures));
  }
  m.om_cost = summarize(om);
  m.penalty_cost = summarize(pen);
  m.production_cost = summarize(prod);
  m.total_cost = summarize(total);
  m.failures = summarize(fail);
  return m;
}

std::string_view to_string(ModelVariant variant) {
  switch (variant) {
    case ModelVariant::kSingle: return "single";
    case ModelVariant::kMulti: return "multi";
    case ModelVariant::kRobust: return "robust";
  }
  return "unknown";
}

Plan solve_plan(const FleetSpec& spec, PolicyKind policy, const PlanOptions& options) {
  Plan plan;
  const auto start = Clock::now();
  MilpOptions mo;
  mo.gap_tol = options.gap_tol;
  mo.time_limit = options.time_limit;
  mo.seed = options.seed;
  switch (options.variant) {
    case ModelVariant::kSingle: {
      BuiltModel b = build_single_maintenance(spec, policy);
      plan.solution = options.solver(b.model, mo);
      plan.catalogue = std::move(b.catalogue);
      break;
    }
    case ModelVariant::kMulti: {
      BuiltModel b = build_multi_cycle(spec, policy);
      plan.solution = options.solver(b.model, mo);
      plan.catalogue = std::move(b.catalogue);
      break;
    }
    case ModelVariant::kRobust: {
      if (options.accelerate) {
        AccelerateOptions ao;
        ao.gap_tol = options.gap_tol;
        ao.time_limit = options.time_limit;
        ao.n_cuts = options.n_cuts;
        ao.seed = options.seed;
        plan.solution = accelerate_solve(spec, policy, ao, options.solver).solution;
        plan.catalogue = build_multi_cycle(spec, policy).catalogue;
      } else {
        RobustModel r = build_robust(spec, policy);
        plan.solution = options.solver(r.built.model, mo);
        plan.catalogue = std::move(r.built.catalogue);
      }
      break;
    }
  }
  plan.seconds = seconds_since(start);
  if (plan.solution.status != SolveStatus::kOptimal && plan.solution.status != SolveStatus::kGapLimit) {
    plan.error = "solver returned " + std::string(to_string(plan.solution.status));
    return plan;
  }
  try {
    plan.schedule = extract_schedule(plan.solution, plan.catalogue, spec);
  } catch (const std::exception& e) {
    plan.error = e.what();
  }
  return plan;
}

std::vector<ExperimentRow> budget_sweep(const FleetSpec& spec, PolicyKind policy, const std::vector<double>& budgets,
                                        std::size_t n_scenarios, std::uint64_t seed, const PlanOptions& options,
                                        const SimOptions& sim) {
  if (budgets.empty()) throw std::invalid_argument("budget list is empty");
  PlanOptions robust = options;
  robust.variant = ModelVariant::kRobust;
  std::vector<ExperimentRow> rows;
  for (double delta : budgets) {
    ExperimentRow row;
    try {
      row = simulate_plan(with_budget_per_period(spec, delta), policy, robust, n_scenarios, seed, sim);
    } catch (const std::exception& e) {
      row.policy = policy;
      row.error = e.what();
    }
    row.delta = delta;
    std::ostringstream label;
    label << delta;
    row.label = label.str();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ExperimentRow> compare_policies(const FleetSpec& spec, const std::vector<PolicyKind>& policies,
                                            std::size_t n_scenarios, std::uint64_t seed, const PlanOptions& options,
                                            const SimOptions& sim) {
  std::vector<ExperimentRow> rows;
  for (PolicyKind policy : policies) {
    ExperimentRow row;
    try {
      row = simulate_plan(spec, policy, options, n_scenarios, seed, sim);
    } catch (const std::exception& e) {
      row.policy = policy;
      row.error = e.what();
    }
    row.label = std::string(to_string(policy));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << "delta,policy,status,robust_objective,bound,nodes,seconds,mean_sim_om_cost,mean_penalty,"
         "mean_production_cost,mean_total_cost,std_total_cost,mean_failures,max_failures,error\n";
  for (const ExperimentRow& r : rows) {
    out << r.delta << ',' << to_string(r.policy) << ',';
    write_row_metrics(out, r);
  }
}

void write_metrics_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << "policy,status,objective,bound,nodes,seconds,mean_om_cost,mean_penalty,mean_production_cost,"
         "mean_total_cost,std_total_cost,mean_failures,max_failures,error\n";
  for (const ExperimentRow& r : rows) {
    out << r.label << ',';
    write_row_metrics(out, r);
  }
}

void write_schedule_csv(std::ostream& out, const FixedSchedule& s) {
  out << "asset,t,production,pm_start,cm_start,in_maintenance\n";
  for (std::size_t i = 0; i < s.asset_ids.size(); ++i) {
    for (int t = 1; t <= s.horizon; ++t) {
      const bool pm = std::find(s.pm_starts[i].begin(), s.pm_starts[i].end(), t) != s.pm_starts[i].end();
      const bool cm = std::find(s.cm_starts[i].begin(), s.cm_starts[i].end(), t) != s.cm_starts[i].end();
      out << s.asset_ids[i] << ',' << t << ',' << s.production[i][std::size_t(t - 1)] << ',' << int(pm) << ','
          << int(cm) << ',' << int(s.in_maintenance(i, t)) << '\n';
    }
  }
}

SolverFn make_mps_solver(std::string dir, std::string command) {
  return [dir = std::move(dir), command = std::move(command)](const MilpModel& model, const MilpOptions&) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path mps = fs::path(dir) / "model.mps";
    const fs::path sol = fs::path(dir) / "solution.txt";
    {
      std::ofstream f(mps);
      if (!f) throw std::runtime_error("cannot write " + mps.string());
      f << export_mps(model);
    }
    if (!command.empty()) {
      std::error_code ec;
      fs::remove(sol, ec);
      std::string cmd = command;
      for (std::size_t pos; (pos = cmd.find("{dir}")) != std::string::npos;) cmd.replace(pos, 5, dir);
      if (std::system(cmd.c_str()) != 0) throw std::runtime_error("external solver command failed: " + cmd);
    }
    std::ifstream f(sol);
    if (!f) throw std::runtime_error("no solution file at " + sol.string() + "; solve " + mps.string() + " first");
    std::stringstream text;
    text << f.rdbuf();
    const std::string body = text.str();
    // A leading "# status <name>" line reports a solve without a solution.
    std::istringstream lines(body);
    std::string first;
    while (std::getline(lines, first) && first.find_first_not_of(" \t\r") == std::string::npos) {
    }
    if (first.rfind("# status ", 0) == 0) {
      std::string name = first.substr(9);
      name.erase(name.find_last_not_of(" \t\r") + 1);
      if (name == "infeasible") {
        MilpSolution s;
        s.status = SolveStatus::kInfeasible;
        return s;
      }
      if (name != "optimal") {
        MilpSolution s;
        s.status = SolveStatus::kTimeLimit;
        if (name.find("time") == std::string::npos) s.status = SolveStatus::kNumericallyUnstable;
        return s;
      }
    }
    MilpSolution s = import_solution(body, model);
    s.bound = s.objective;
    return s;
  };
}

}  // namespace fleetcbm
