// Nested budgeted uncertainty sets, the dualized robust multi-cycle model
// and the warm-start / scenario-cut acceleration.

#ifndef FLEETCBM_ROBUST_MODEL_HPP_
#define FLEETCBM_ROBUST_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fleetcbm/fleet_config.hpp"
#include "fleetcbm/milp_model.hpp"
#include "fleetcbm/milp_solver.hpp"
#include "fleetcbm/model_builder.hpp"

namespace fleetcbm {

enum class TermKind { kRate, kOid, kMdi };

struct UncertainTerm {
  TermKind kind = TermKind::kRate;
  int tau = 1;
  std::size_t edge = 0;  // FleetSpec::edges index, kMdi only
  double bar = 0.0;
  double hat = 0.0;
};

// U_{i,t}: every uncertain coefficient of asset i over periods 1..t. Terms
// whose nominal value and half-width are both zero are not uncertain and are
// left out; with every coefficient present the term count is t(2 + |A_i|).
struct NestedUncertaintySet {
  std::size_t asset = 0;
  int t = 0;
  std::vector<UncertainTerm> terms;  // by tau, then rate, oid, mdi (edge order)
  double budget = 0.0;

  double shifted_budget() const;  // budget + sum(bar / hat)
};

NestedUncertaintySet nested_set(const FleetSpec& spec, std::size_t asset, int t);

struct ScenarioRealization {
  std::size_t asset = 0;
  int t = 0;
  std::vector<double> values;  // parallel to nested_set(spec, asset, t).terms
};

// Box membership and signed budget row, within `tol`.
bool is_member(const NestedUncertaintySet& set, const ScenarioRealization& r, double tol = 1e-9);

struct WorstCase {
  double value = 0.0;
  ScenarioRealization realization;
  // An optimal solution of the dual LP.
  double pi_budget = 0.0;
  std::vector<double> pi_upper;
  std::vector<double> pi_lower;
};

// Maximizes sum_k coeff_k * q_k over the set (coefficients parallel to terms).
WorstCase inner_worst_case(const NestedUncertaintySet& set, std::span<const double> coeffs);

// Same, with the coefficients given as gate[tau-1] = 1 - z - u^f for rate
// terms, oid_mult[tau-1] = p' and mdi_mult[e][tau-1] = omega' for the
// incoming edge at position e of spec.edges_into(asset).
WorstCase inner_worst_case(const NestedUncertaintySet& set, std::span<const double> gate,
                           std::span<const double> oid_mult, const std::vector<std::vector<double>>& mdi_mult,
                           const FleetSpec& spec);

// Dual variables and rows of one (i,t,k) block; entries follow the term order
// of nested_set(view, i, t).
struct DualBlock {
  std::size_t asset = 0;
  int t = 0;
  std::size_t cycle = 0;
  std::size_t pi_budget = kNoVar;
  std::vector<std::size_t> pi_upper;
  std::vector<std::size_t> pi_lower;
};

struct RobustModel {
  BuiltModel built;          // multi-cycle model with deg-cum replaced
  FleetSpec view;            // policy_view of the input spec
  std::vector<DualBlock> blocks;  // ordered by (i, t, k)

  const DualBlock& block(std::size_t i, int t, std::size_t k) const;
};

RobustModel build_robust(const FleetSpec& spec, PolicyKind policy);

// Closed-form robust model size; matches build_robust exactly.
ModelCounts robust_counts(const FleetSpec& spec, PolicyKind policy);

// Coefficient vector of set (i,t) evaluated at the values of a robust or
// multi-cycle model (cycle k).
std::vector<double> term_coefficients(const FleetSpec& view, const VariableCatalogue& cat, const NestedUncertaintySet& set,
                                      std::size_t k, std::span<const double> values);

// Every uncertain coefficient at bar + hat, one realization per (i,t).
std::vector<ScenarioRealization> ultra_conservative_scenario(const FleetSpec& spec);

// Deterministic spec whose nominal values are the box upper bounds.
FleetSpec ultra_conservative_spec(const FleetSpec& spec);

struct ScenarioCut {
  LinearConstraint row;
  ScenarioRealization realization;
  std::size_t cycle = 0;
};

// Budget-concentrating scenarios turned into deg-cum shaped rows for the
// robust model; tags are "cut-scenario[n=..,i=..,t=..,k=..]".
std::vector<ScenarioCut> extreme_scenario_cuts(const RobustModel& robust, std::size_t n_cuts, std::uint64_t seed);

// Maps a multi-cycle assignment onto the robust model: copies shared
// variables by name, sets each dual block to its closed-form optimum and lifts
// l' (and the omega/omega' chain) to cover the worst case.
std::vector<double> lift_to_robust(const RobustModel& robust, const MilpModel& source, std::span<const double> values);

struct AccelerateOptions {
  double gap_tol = 1e-4;
  double time_limit = 600.0;
  std::size_t n_cuts = 5;
  std::uint64_t seed = 1;
  bool use_warm_start = true;
};

struct AccelerateResult {
  MilpSolution solution;
  MilpSolution conservative;  // Step 1 solve
  bool warm_start_feasible = false;
  std::string warm_start_issue;  // first violated row when rejected
  double warm_start_objective = 0.0;
  std::size_t cuts_added = 0;
};

AccelerateResult accelerate_solve(const FleetSpec& spec, PolicyKind policy, const AccelerateOptions& options,
                                  const SolverFn& solver = solve_milp);

}  // namespace fleetcbm

#endif  // FLEETCBM_ROBUST_MODEL_HPP_
