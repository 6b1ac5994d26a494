// Solve-then-simulate experiment loop: fixed schedules, Monte Carlo
// replication with corrective-maintenance recourse, budget sweeps and
// policy comparisons.

#ifndef FLEETCBM_HARNESS_HPP_
#define FLEETCBM_HARNESS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fleetcbm/degradation.hpp"
#include "fleetcbm/fleet_config.hpp"
#include "fleetcbm/milp_solver.hpp"
#include "fleetcbm/model_builder.hpp"

namespace fleetcbm {

struct FixedSchedule {
  int horizon = 0;
  int pm_duration = 1;
  int cm_duration = 1;
  std::vector<std::string> asset_ids;
  std::vector<std::vector<int>> pm_starts;      // [i], increasing periods
  std::vector<std::vector<int>> cm_starts;      // [i], planned corrective starts
  std::vector<std::vector<double>> production;  // [i][t-1]

  // True when a planned PM or CM window covers period t.
  bool in_maintenance(std::size_t i, int t) const;
};

// Rounds binaries (tolerance 1e-6), reads production and re-audits the
// maintenance windows, crew capacity and production caps. Throws
// std::runtime_error naming the offending variable or period.
FixedSchedule extract_schedule(const MilpSolution& solution, const VariableCatalogue& catalogue,
                               const FleetSpec& spec);

struct SimOptions {
  // Draw zeta and gamma uniformly from their boxes each period instead of
  // holding them at nominal.
  bool sample_coefficients = false;
  // Cover shortfalls with spare capacity of available assets, cheapest first.
  bool redispatch = false;
  // Keep the signal paths of scenario 0.
  bool record_paths = false;
};

struct ScenarioOutcome {
  double om_cost = 0.0;          // PM and CM charges
  double penalty_cost = 0.0;     // C^u * sum psi
  double production_cost = 0.0;
  int failures = 0;

  double total() const { return om_cost + penalty_cost + production_cost; }
};

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct SimMetrics {
  std::vector<ScenarioOutcome> scenarios;
  Summary om_cost, penalty_cost, production_cost, total_cost, failures;
  std::vector<SignalPath> paths;  // scenario 0, when recorded
};

// Replays the schedule on `spec` (the physics being simulated). Levels above
// the threshold fail the asset; corrective maintenance then starts at the
// earliest period with crew slack over its whole window.
SimMetrics simulate_fixed_decisions(const FixedSchedule& schedule, const FleetSpec& spec, std::size_t n_scenarios,
                                    std::uint64_t master_seed, const SimOptions& options = {});

enum class ModelVariant { kSingle, kMulti, kRobust };

std::string_view to_string(ModelVariant variant);

struct PlanOptions {
  ModelVariant variant = ModelVariant::kRobust;
  double gap_tol = 1e-4;
  double time_limit = 600.0;
  bool accelerate = false;
  std::size_t n_cuts = 5;
  std::uint64_t seed = 1;
  SolverFn solver = solve_milp;
};

struct Plan {
  MilpSolution solution;
  VariableCatalogue catalogue;
  double seconds = 0.0;
  std::optional<FixedSchedule> schedule;  // set when the solution is usable
  std::string error;                      // why no schedule was produced
};

// Builds and solves one policy's model on `spec`.
Plan solve_plan(const FleetSpec& spec, PolicyKind policy, const PlanOptions& options);

struct ExperimentRow {
  std::string label;  // policy name or budget value
  PolicyKind policy = PolicyKind::kComprehensive;
  double delta = 0.0;
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;
  double bound = 0.0;
  std::int64_t nodes = 0;
  double seconds = 0.0;
  bool simulated = false;
  SimMetrics metrics;
  std::string error;
};

// One robust solve and one simulation per delta, with Delta_{i,t} = delta * t.
// A row whose solve yields no usable schedule is marked and the sweep goes on.
std::vector<ExperimentRow> budget_sweep(const FleetSpec& spec, PolicyKind policy, const std::vector<double>& budgets,
                                        std::size_t n_scenarios, std::uint64_t seed, const PlanOptions& options,
                                        const SimOptions& sim = {});

// Solves every policy (options.variant decides deterministic or robust) and
// simulates each schedule on the full spec.
std::vector<ExperimentRow> compare_policies(const FleetSpec& spec, const std::vector<PolicyKind>& policies,
                                            std::size_t n_scenarios, std::uint64_t seed, const PlanOptions& options,
                                            const SimOptions& sim = {});

void write_sweep_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);
void write_metrics_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);
void write_schedule_csv(std::ostream& out, const FixedSchedule& schedule);

// Solver that writes <dir>/model.mps, optionally runs `command` (with the
// token {dir} replaced by dir) and reads <dir>/solution.txt back.
SolverFn make_mps_solver(std::string dir, std::string command = "");

}  // namespace fleetcbm

#endif  // FLEETCBM_HARNESS_HPP_
