// fleetcbm: build, solve and simulate fleet O&M plans from a JSON config.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fleetcbm/fleet_config.hpp"
#include "fleetcbm/harness.hpp"
#include "fleetcbm/model_builder.hpp"
#include "fleetcbm/mps.hpp"
#include "fleetcbm/robust_model.hpp"

namespace fs = std::filesystem;
using namespace fleetcbm;

namespace {

struct Args {
  std::string config;
  std::string policy = "comprehensive";
  bool robust = false;
  bool deterministic = false;
  std::string model = "multi";
  std::optional<double> budget;
  std::vector<double> budgets{0, 0.25, 0.5, 1, 1.5, 2, 4};
  std::optional<int> cycles;
  std::size_t scenarios = 100;
  std::uint64_t seed = 1;
  double gap = 1e-4;
  double time_limit = 600.0;
  bool accelerate = false;
  std::size_t cuts = 5;
  std::string solver = "internal";
  std::string mps_command;
  std::string out = ".";
  std::string dump_model;
  bool dump_paths = false;
  bool sample_coefficients = false;
  bool redispatch = false;
};

void add_shared(CLI::App* app, Args& a) {
  app->add_option("--config", a.config, "fleet config (JSON)")->required()->check(CLI::ExistingFile);
  app->add_option("--policy", a.policy, "base|oid|mdi|comprehensive")
      ->check(CLI::IsMember({"base", "oid", "mdi", "comprehensive"}));
  auto* r = app->add_flag("--robust", a.robust, "robust model (default)");
  auto* d = app->add_flag("--deterministic", a.deterministic, "nominal model");
  r->excludes(d);
  app->add_option("--model", a.model, "deterministic variant: single|multi")->check(CLI::IsMember({"single", "multi"}));
  app->add_option("--budget", a.budget, "budget per period delta (Delta_{i,t} = delta * t)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--cycles", a.cycles, "maximum cycles per asset")->check(CLI::PositiveNumber);
  app->add_option("--scenarios", a.scenarios, "simulation scenarios")->check(CLI::PositiveNumber);
  app->add_option("--seed", a.seed, "master seed");
  app->add_option("--gap", a.gap, "relative MIP gap")->check(CLI::NonNegativeNumber);
  app->add_option("--time-limit", a.time_limit, "solver time limit (s)")->check(CLI::PositiveNumber);
  app->add_flag("--accelerate", a.accelerate, "warm start and scenario cuts for robust solves");
  app->add_option("--cuts", a.cuts, "scenario cuts with --accelerate");
  app->add_option("--solver", a.solver, "internal | mps:<dir>");
  app->add_option("--mps-command", a.mps_command, "command run after writing <dir>/model.mps ({dir} is substituted)");
  app->add_option("--out", a.out, "output directory");
}

FleetSpec load(const Args& a) {
  FleetSpec spec = load_fleet_config(a.config);
  if (a.cycles) spec.max_cycles = *a.cycles;
  if (a.budget) spec = with_budget_per_period(spec, *a.budget);
  return spec;
}

PlanOptions plan_options(const Args& a) {
  PlanOptions po;
  po.variant = a.deterministic ? (a.model == "single" ? ModelVariant::kSingle : ModelVariant::kMulti)
                               : ModelVariant::kRobust;
  po.gap_tol = a.gap;
  po.time_limit = a.time_limit;
  po.accelerate = a.accelerate;
  po.n_cuts = a.cuts;
  po.seed = a.seed;
  if (a.solver.rfind("mps:", 0) == 0) {
    po.solver = make_mps_solver(a.solver.substr(4), a.mps_command);
  } else if (a.solver != "internal") {
    throw CLI::ValidationError("--solver", "expected internal or mps:<dir>");
  }
  return po;
}

SimOptions sim_options(const Args& a) {
  SimOptions so;
  so.sample_coefficients = a.sample_coefficients;
  so.redispatch = a.redispatch;
  so.record_paths = a.dump_paths;
  return so;
}

std::ofstream open_out(const Args& a, const std::string& name) {
  fs::create_directories(a.out);
  std::ofstream f(fs::path(a.out) / name);
  if (!f) throw std::runtime_error("cannot write " + (fs::path(a.out) / name).string());
  return f;
}

int cmd_validate(const Args& a) {
  const FleetSpec spec = load(a);
  const auto violations = validate(spec);
  for (const Violation& v : violations) std::cout << v.field << ": " << v.rule << " (" << v.value << ")\n";
  if (violations.empty()) {
    std::cout << "ok: " << spec.num_assets() << " assets, " << spec.edges.size() << " edges, H=" << spec.horizon
              << ", K=" << spec.max_cycles << "\n";
    return 0;
  }
  return 1;
}

int cmd_build(const Args& a) {
  const FleetSpec spec = load(a);
  const PolicyKind policy = parse_policy(a.policy);
  MilpModel model;
  ModelCounts expect;
  if (a.deterministic && a.model == "single") {
    model = build_single_maintenance(spec, policy).model;
    expect = single_maintenance_counts(spec, policy);
  } else if (a.deterministic) {
    model = build_multi_cycle(spec, policy).model;
    expect = multi_cycle_counts(spec, policy);
  } else {
    model = build_robust(spec, policy).built.model;
    expect = robust_counts(spec, policy);
  }
  std::size_t binaries = 0;
  for (const Variable& v : model.variables()) binaries += v.kind == VarKind::kBinary;
  std::cout << "variables " << model.num_variables() << " (binary " << binaries << ", expected "
            << expect.variables << ")\nconstraints " << model.num_constraints() << " (expected "
            << expect.constraints << ")\n";
  if (!a.dump_model.empty()) {
    std::ofstream f(a.dump_model);
    if (!f) throw std::runtime_error("cannot write " + a.dump_model);
    f << export_mps(model);
    std::cout << "wrote " << a.dump_model << "\n";
  }
  return 0;
}

void print_plan(const Plan& plan) {
  const MilpSolution& s = plan.solution;
  std::printf("status %s objective %.6f bound %.6f gap %.3g nodes %lld time %.2fs\n",
              std::string(to_string(s.status)).c_str(), s.objective, s.bound, s.gap, static_cast<long long>(s.nodes),
              plan.seconds);
  if (plan.schedule) {
    for (std::size_t i = 0; i < plan.schedule->asset_ids.size(); ++i) {
      std::printf("  %s: PM at", plan.schedule->asset_ids[i].c_str());
      if (plan.schedule->pm_starts[i].empty()) std::printf(" -");
      for (int t : plan.schedule->pm_starts[i]) std::printf(" %d", t);
      std::printf("\n");
    }
  } else if (!plan.error.empty()) {
    std::printf("no schedule: %s\n", plan.error.c_str());
  }
}

int cmd_solve(const Args& a) {
  const FleetSpec spec = load(a);
  const Plan plan = solve_plan(spec, parse_policy(a.policy), plan_options(a));
  print_plan(plan);
  if (!plan.schedule) return 2;
  auto f = open_out(a, "schedule.csv");
  write_schedule_csv(f, *plan.schedule);
  return 0;
}

int cmd_simulate(const Args& a) {
  const FleetSpec spec = load(a);
  const PolicyKind policy = parse_policy(a.policy);
  const Plan plan = solve_plan(spec, policy, plan_options(a));
  print_plan(plan);
  if (!plan.schedule) return 2;
  const SimMetrics m = simulate_fixed_decisions(*plan.schedule, spec, a.scenarios, a.seed, sim_options(a));
  ExperimentRow row;
  row.label = std::string(to_string(policy));
  row.policy = policy;
  row.status = plan.solution.status;
  row.objective = plan.solution.objective;
  row.bound = plan.solution.bound;
  row.nodes = plan.solution.nodes;
  row.seconds = plan.seconds;
  row.simulated = true;
  row.metrics = m;
  {
    auto f = open_out(a, "metrics.csv");
    write_metrics_csv(f, {row});
    auto g = open_out(a, "schedule.csv");
    write_schedule_csv(g, *plan.schedule);
  }
  if (a.dump_paths) {
    fs::create_directories(fs::path(a.out) / "paths");
    for (const SignalPath& p : m.paths) {
      std::ofstream f(fs::path(a.out) / "paths" / (p.asset + ".csv"));
      write_paths_csv(f, {p});
    }
  }
  std::printf("mean total %.2f (om %.2f, penalty %.2f, production %.2f), failures %.3f over %zu scenarios\n",
              m.total_cost.mean, m.om_cost.mean, m.penalty_cost.mean, m.production_cost.mean, m.failures.mean,
              a.scenarios);
  return 0;
}

int cmd_sweep(const Args& a) {
  const FleetSpec spec = load(a);
  const auto rows = budget_sweep(spec, parse_policy(a.policy), a.budgets, a.scenarios, a.seed, plan_options(a),
                                 sim_options(a));
  auto f = open_out(a, "sweep.csv");
  write_sweep_csv(f, rows);
  write_sweep_csv(std::cout, rows);
  return 0;
}

int cmd_compare(const Args& a, const std::vector<std::string>& names) {
  const FleetSpec spec = load(a);
  std::vector<PolicyKind> policies;
  for (const std::string& n : names) policies.push_back(parse_policy(n));
  const auto rows = compare_policies(spec, policies, a.scenarios, a.seed, plan_options(a), sim_options(a));
  auto f = open_out(a, "metrics.csv");
  write_metrics_csv(f, rows);
  write_metrics_csv(std::cout, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fleet condition-based maintenance planning"};
  app.require_subcommand(1);
  Args a;
  std::vector<std::string> policies{"base", "oid", "mdi", "comprehensive"};

  auto* validate_cmd = app.add_subcommand("validate", "check a config");
  validate_cmd->add_option("--config", a.config, "fleet config (JSON)")->required()->check(CLI::ExistingFile);

  auto* build = app.add_subcommand("build", "build a model and report its size");
  add_shared(build, a);
  build->add_option("--dump-model", a.dump_model, "write the model as MPS");

  auto* solve = app.add_subcommand("solve", "solve and write schedule.csv");
  add_shared(solve, a);

  auto* simulate = app.add_subcommand("simulate", "solve, fix decisions and simulate");
  add_shared(simulate, a);
  simulate->add_flag("--dump-paths", a.dump_paths, "write paths/<asset>.csv for scenario 0");

  auto* sweep = app.add_subcommand("sweep", "robust solve and simulation per budget");
  add_shared(sweep, a);
  sweep->add_option("--budgets", a.budgets, "comma-separated delta values")->delimiter(',');

  auto* compare = app.add_subcommand("compare", "solve and simulate several policies");
  add_shared(compare, a);
  compare->add_option("--policies", policies, "comma-separated policies")->delimiter(',');

  for (auto* sub : {simulate, sweep, compare}) {
    sub->add_flag("--sample-coefficients", a.sample_coefficients, "draw zeta and gamma from their boxes");
    sub->add_flag("--redispatch", a.redispatch, "cover shortfalls with spare capacity");
  }

  CLI11_PARSE(app, argc, argv);
  try {
    if (*validate_cmd) return cmd_validate(a);
    if (*build) return cmd_build(a);
    if (*solve) return cmd_solve(a);
    if (*simulate) return cmd_simulate(a);
    if (*sweep) return cmd_sweep(a);
    if (*compare) return cmd_compare(a, policies);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
