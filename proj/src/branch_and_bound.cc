#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <queue>

#include "fleetcbm/milp_solver.hpp"
#include "simplex.hpp"

namespace fleetcbm {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kIntTol = 1e-6;
constexpr double kExactGap = 1e-9;
constexpr std::size_t kNoBranch = std::numeric_limits<std::size_t>::max();
constexpr std::int64_t kRoundingInterval = 50;

struct Node {
  std::int64_t id = 0;
  double bound = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::uint32_t, std::uint8_t>> fixings;  // binary var -> value
  std::shared_ptr<const detail::Basis> basis;
};

struct NodeOrder {
  bool operator()(const std::shared_ptr<Node>& a, const std::shared_ptr<Node>& b) const {
    if (a->bound != b->bound) return a->bound > b->bound;
    return a->id < b->id;  // newest first among ties: dives instead of sweeping plateaus
  }
};

Clock::time_point deadline_after(double seconds) {
  if (!std::isfinite(seconds)) return Clock::time_point::max();
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(std::max(0.0, seconds)));
}

}  // namespace

MilpSolution solve_milp(const MilpModel& model, const MilpOptions& options) {
  if (model.num_variables() == 0) throw std::invalid_argument("solve_milp: model has no variables");
  const auto deadline = deadline_after(options.time_limit);

  MilpSolution out;
  std::vector<double> incumbent;
  double inc_obj = std::numeric_limits<double>::infinity();
  if (options.warm_start) {
    const auto& ws = *options.warm_start;
    const auto issues = model.check_feasibility(ws);
    if (!issues.empty()) {
      throw WarmStartError("warm start is infeasible: '" + issues.front().what + "' violated by " +
                           std::to_string(issues.front().amount));
    }
    incumbent = ws;
    inc_obj = model.objective_value(ws);
  }

  std::vector<std::size_t> binaries;
  for (const Variable& v : model.variables()) {
    if (v.kind == VarKind::kBinary) binaries.push_back(v.id);
  }

  detail::DualSimplex lp(model);
  std::priority_queue<std::shared_ptr<Node>, std::vector<std::shared_ptr<Node>>, NodeOrder> open;
  std::int64_t next_id = 0;
  auto root = std::make_shared<Node>();
  root->id = next_id++;
  open.push(root);

  double pruned_bound = std::numeric_limits<double>::infinity();
  bool stopped = false;
  bool unstable = false;
  const auto abs_tol = [&] { return std::isfinite(inc_obj) ? options.gap_tol * std::max(1.0, std::abs(inc_obj)) : 0.0; };

  while (!open.empty()) {
    if (Clock::now() > deadline || out.nodes >= options.node_limit) {
      stopped = true;
      break;
    }
    auto node = open.top();
    if (std::isfinite(inc_obj) && node->bound >= inc_obj - abs_tol()) {
      // Every remaining node is within tolerance of the incumbent.
      break;
    }
    open.pop();
    ++out.nodes;

    lp.reset_bounds();
    for (const auto& [var, value] : node->fixings) lp.set_bounds(var, value, value);
    const double cutoff = std::isfinite(inc_obj) ? inc_obj - abs_tol() : std::numeric_limits<double>::infinity();
    detail::LpStatus st = lp.solve(node->basis.get(), cutoff, deadline);
    if (st == detail::LpStatus::kUnstable && node->basis) st = lp.solve(nullptr, cutoff, deadline);
    out.lp_iterations = lp.iterations();
    if (st == detail::LpStatus::kTimeLimit) {
      open.push(node);
      stopped = true;
      break;
    }
    if (st == detail::LpStatus::kUnstable) {
      unstable = true;
      open.push(node);
      break;
    }
    if (st == detail::LpStatus::kInfeasible) continue;
    if (st == detail::LpStatus::kCutoff) {
      pruned_bound = std::min(pruned_bound, cutoff);
      continue;
    }
    const double obj = lp.objective();
    if (std::isfinite(inc_obj) && obj >= inc_obj - abs_tol()) {
      pruned_bound = std::min(pruned_bound, obj);
      continue;
    }

    const auto& x = lp.primal();
    std::size_t branch = kNoBranch;
    double best_frac = kIntTol;
    for (std::size_t j : binaries) {
      const double f = std::abs(x[j] - std::round(x[j]));
      if (f > best_frac) {
        best_frac = f;
        branch = j;
      }
    }
    if (options.verbose && (out.nodes % 100 == 1)) {
      std::fprintf(stderr, "node %lld open %zu lp %.6f inc %.6f depth %zu\n", static_cast<long long>(out.nodes),
                   open.size(), obj, inc_obj, node->fixings.size());
    }

    if (branch == kNoBranch) {
      std::vector<double> cand(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(model.num_variables()));
      std::vector<double> snapped = cand;
      for (std::size_t j : binaries) snapped[j] = std::round(snapped[j]);
      if (model.check_feasibility(snapped).empty()) cand = std::move(snapped);
      const double val = model.objective_value(cand);
      if (val < inc_obj) {
        inc_obj = val;
        incumbent = std::move(cand);
      }
      continue;
    }

    auto basis = std::make_shared<const detail::Basis>(lp.basis());
    const double branch_value = x[branch];

    // Rounding heuristic: fix every binary at its nearest value and re-solve.
    if (out.nodes == 1 || out.nodes % kRoundingInterval == 0) {
      for (std::size_t j : binaries) {
        const double r = std::round(std::clamp(x[j], 0.0, 1.0));
        lp.set_bounds(j, r, r);
      }
      if (lp.solve(basis.get(), cutoff, deadline) == detail::LpStatus::kOptimal) {
        std::vector<double> cand(lp.primal().begin(), lp.primal().begin() + static_cast<std::ptrdiff_t>(model.num_variables()));
        const double val = model.objective_value(cand);
        if (val < inc_obj && model.check_feasibility(cand).empty()) {
          inc_obj = val;
          incumbent = std::move(cand);
        }
      }
      out.lp_iterations = lp.iterations();
      if (std::isfinite(inc_obj) && obj >= inc_obj - abs_tol()) {
        pruned_bound = std::min(pruned_bound, obj);
        continue;
      }
    }

    // The child on the rounding side gets the larger id and is explored first.
    const std::uint8_t first = branch_value >= 0.5 ? 0 : 1;
    for (std::uint8_t value : {first, std::uint8_t(1 - first)}) {
      auto child = std::make_shared<Node>();
      child->id = next_id++;
      child->bound = obj;
      child->fixings = node->fixings;
      child->fixings.emplace_back(static_cast<std::uint32_t>(branch), value);
      child->basis = basis;
      open.push(child);
    }
  }

  double bound = std::min(inc_obj, pruned_bound);
  if (!open.empty()) bound = std::min(bound, open.top()->bound);
  if (incumbent.empty()) {
    out.status = unstable ? SolveStatus::kNumericallyUnstable
                 : stopped ? SolveStatus::kTimeLimit
                           : SolveStatus::kInfeasible;
    out.bound = bound;
    return out;
  }
  out.values = std::move(incumbent);
  out.objective = inc_obj;
  out.bound = std::min(bound, inc_obj);
  out.gap = relative_gap(out.objective, out.bound);
  if (unstable) out.status = SolveStatus::kNumericallyUnstable;
  else if (stopped && out.gap > options.gap_tol) out.status = SolveStatus::kTimeLimit;
  else out.status = out.gap <= kExactGap ? SolveStatus::kOptimal : SolveStatus::kGapLimit;
  return out;
}

}  // namespace fleetcbm
