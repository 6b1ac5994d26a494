// Solver-agnostic MILP representation (minimization only).

#ifndef FLEETCBM_MILP_MODEL_HPP_
#define FLEETCBM_MILP_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fleetcbm {

enum class VarKind { kBinary, kContinuous };
enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct Variable {
  std::size_t id = 0;
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = 0.0;
  double obj_coeff = 0.0;
};

struct Term {
  std::size_t var;
  double coeff;
};

struct LinearConstraint {
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  std::string tag;

  double activity(std::span<const double> values) const;
  // Amount by which `values` violates the row (0 when satisfied).
  double violation(std::span<const double> values) const;
  // Tag up to the first '[', e.g. "deg-cum" for "deg-cum[i=1,t=3,k=1]".
  std::string_view family() const;
};

struct FeasibilityIssue {
  std::string what;  // variable name or constraint tag
  double amount = 0.0;
};

class MilpModel {
 public:
  std::size_t add_variable(std::string name, VarKind kind, double lower, double upper, double obj_coeff = 0.0);
  // Duplicate variable ids are merged and exact zero coefficients dropped.
  std::size_t add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string tag);

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }
  const Variable& variable(std::size_t id) const { return variables_.at(id); }

  void set_bounds(std::size_t id, double lower, double upper);
  void set_obj_coeff(std::size_t id, double coeff) { variables_.at(id).obj_coeff = coeff; }
  std::optional<std::size_t> find_variable(std::string_view name) const;
  std::size_t variable_id(std::string_view name) const;  // throws if absent

  // Removes every constraint whose family matches; returns the count removed.
  std::size_t remove_family(std::string_view family);
  std::size_t count_family(std::string_view family) const;

  double objective_value(std::span<const double> values) const;

  // Bound, integrality and row violations above `tol`, worst first.
  std::vector<FeasibilityIssue> check_feasibility(std::span<const double> values, double tol = 1e-6) const;

 private:
  std::vector<Variable> variables_;
  std::vector<LinearConstraint> constraints_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

enum class SolveStatus { kOptimal, kGapLimit, kInfeasible, kTimeLimit, kNumericallyUnstable };

std::string_view to_string(SolveStatus status);

struct MilpSolution {
  std::vector<double> values;
  double objective = 0.0;
  SolveStatus status = SolveStatus::kInfeasible;
  double bound = 0.0;
  double gap = 0.0;  // (objective - bound) / max(1, |objective|)
  std::int64_t nodes = 0;
  std::int64_t lp_iterations = 0;

  bool has_solution() const {
    return status == SolveStatus::kOptimal || status == SolveStatus::kGapLimit ||
           (status == SolveStatus::kTimeLimit && !values.empty());
  }
};

double relative_gap(double objective, double bound);

}  // namespace fleetcbm

#endif  // FLEETCBM_MILP_MODEL_HPP_
