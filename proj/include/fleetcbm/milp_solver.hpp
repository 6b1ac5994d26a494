// Bundled LP / MILP solver: bounded dual simplex and best-first
// branch-and-bound.

#ifndef FLEETCBM_MILP_SOLVER_HPP_
#define FLEETCBM_MILP_SOLVER_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fleetcbm/milp_model.hpp"

namespace fleetcbm {

class WarmStartError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct MilpOptions {
  double gap_tol = 1e-6;
  double time_limit = std::numeric_limits<double>::infinity();  // seconds
  std::optional<std::vector<double>> warm_start;
  // Reserved for randomized strategies; the current search is deterministic.
  std::uint64_t seed = 0;
  std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
  bool verbose = false;
};

// LP relaxation (binaries relaxed to [0,1]). Status is kOptimal, kInfeasible,
// kTimeLimit or kNumericallyUnstable; bound equals objective when optimal.
MilpSolution solve_lp(const MilpModel& model, double time_limit = std::numeric_limits<double>::infinity());

// Throws WarmStartError naming the violated row or bound when the warm start
// is infeasible.
MilpSolution solve_milp(const MilpModel& model, const MilpOptions& options = {});

using SolverFn = std::function<MilpSolution(const MilpModel&, const MilpOptions&)>;

}  // namespace fleetcbm

#endif  // FLEETCBM_MILP_SOLVER_HPP_
