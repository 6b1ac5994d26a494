#include "fleetcbm/milp_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fleetcbm {

double LinearConstraint::activity(std::span<const double> values) const {
  double s = 0.0;
  for (const Term& t : terms) s += t.coeff * values[t.var];
  return s;
}

double LinearConstraint::violation(std::span<const double> values) const {
  const double a = activity(values);
  switch (sense) {
    case Sense::kLessEqual: return std::max(0.0, a - rhs);
    case Sense::kGreaterEqual: return std::max(0.0, rhs - a);
    case Sense::kEqual: return std::abs(a - rhs);
  }
  return 0.0;
}

std::string_view LinearConstraint::family() const {
  std::string_view t = tag;
  return t.substr(0, t.find('['));
}

std::size_t MilpModel::add_variable(std::string name, VarKind kind, double lower, double upper, double obj_coeff) {
  if (!(lower <= upper)) throw std::invalid_argument("variable '" + name + "' has lower > upper");
  if (kind == VarKind::kBinary && (lower < 0.0 || upper > 1.0)) {
    throw std::invalid_argument("binary variable '" + name + "' has bounds outside [0,1]");
  }
  if (by_name_.count(name)) throw std::invalid_argument("duplicate variable name '" + name + "'");
  const std::size_t id = variables_.size();
  by_name_.emplace(name, id);
  variables_.push_back({id, std::move(name), kind, lower, upper, obj_coeff});
  return id;
}

std::size_t MilpModel::add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string tag) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const Term& t : terms) {
    if (t.var >= variables_.size()) throw std::out_of_range("constraint '" + tag + "' references unknown variable");
    if (!std::isfinite(t.coeff)) throw std::invalid_argument("constraint '" + tag + "' has a non-finite coefficient");
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coeff == 0.0; });
  constraints_.push_back({std::move(merged), sense, rhs, std::move(tag)});
  return constraints_.size() - 1;
}

void MilpModel::set_bounds(std::size_t id, double lower, double upper) {
  Variable& v = variables_.at(id);
  if (!(lower <= upper)) throw std::invalid_argument("variable '" + v.name + "' has lower > upper");
  v.lower = lower;
  v.upper = upper;
}

std::optional<std::size_t> MilpModel::find_variable(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t MilpModel::variable_id(std::string_view name) const {
  auto id = find_variable(name);
  if (!id) throw std::out_of_range("unknown variable '" + std::string(name) + "'");
  return *id;
}

std::size_t MilpModel::remove_family(std::string_view family) {
  return std::erase_if(constraints_, [&](const LinearConstraint& c) { return c.family() == family; });
}

std::size_t MilpModel::count_family(std::string_view family) const {
  return static_cast<std::size_t>(std::count_if(constraints_.begin(), constraints_.end(),
                                                [&](const LinearConstraint& c) { return c.family() == family; }));
}

double MilpModel::objective_value(std::span<const double> values) const {
  double s = 0.0;
  for (const Variable& v : variables_) s += v.obj_coeff * values[v.id];
  return s;
}

std::vector<FeasibilityIssue> MilpModel::check_feasibility(std::span<const double> values, double tol) const {
  std::vector<FeasibilityIssue> issues;
  if (values.size() != variables_.size()) {
    issues.push_back({"value count " + std::to_string(values.size()) + " != " + std::to_string(variables_.size()),
                      std::numeric_limits<double>::infinity()});
    return issues;
  }
  for (const Variable& v : variables_) {
    const double x = values[v.id];
    const double b = std::max(v.lower - x, x - v.upper);
    if (!std::isfinite(x) || b > tol) issues.push_back({v.name + " (bounds)", std::isfinite(x) ? b : INFINITY});
    if (v.kind == VarKind::kBinary) {
      const double frac = std::abs(x - std::round(x));
      if (frac > tol) issues.push_back({v.name + " (integrality)", frac});
    }
  }
  for (const LinearConstraint& c : constraints_) {
    const double viol = c.violation(values);
    if (viol > tol) issues.push_back({c.tag, viol});
  }
  std::stable_sort(issues.begin(), issues.end(),
                   [](const FeasibilityIssue& a, const FeasibilityIssue& b) { return a.amount > b.amount; });
  return issues;
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kGapLimit: return "gap-limit";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeLimit: return "time-limit";
    case SolveStatus::kNumericallyUnstable: return "numerically-unstable";
  }
  return "unknown";
}

double relative_gap(double objective, double bound) {
  return std::max(0.0, objective - bound) / std::max(1.0, std::abs(objective));
}

}  // namespace fleetcbm
