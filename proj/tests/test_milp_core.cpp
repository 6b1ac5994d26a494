#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fleetcbm/milp_model.hpp"
#include "fleetcbm/milp_solver.hpp"
#include "fleetcbm/mps.hpp"
#include "oracles.hpp"

using namespace fleetcbm;

namespace {

MilpModel random_lp(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  MilpModel m;
  std::vector<double> x0(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    const double lo = U(-5, 2), hi = lo + U(0.5, 10);
    m.add_variable("x" + std::to_string(j), VarKind::kContinuous, lo, hi, U(-10, 10));
    x0[j] = U(lo, hi);
  }
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<Term> terms;
    double act = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      if (U(0, 1) < 0.4) {
        const double a = U(-5, 5);
        terms.push_back({j, a});
        act += a * x0[j];
      }
    }
    const double kind = U(0, 1);
    if (kind < 0.45) {
      m.add_constraint(std::move(terms), Sense::kLessEqual, act + U(0, 3), "r" + std::to_string(r));
    } else if (kind < 0.9) {
      m.add_constraint(std::move(terms), Sense::kGreaterEqual, act - U(0, 3), "r" + std::to_string(r));
    } else {
      m.add_constraint(std::move(terms), Sense::kEqual, act, "r" + std::to_string(r));
    }
  }
  return m;
}

void check_feasible(const MilpModel& m, const MilpSolution& s) {
  const auto issues = m.check_feasibility(s.values, 1e-6);
  CHECK_MESSAGE(issues.empty(), (issues.empty() ? "" : issues.front().what));
  CHECK(std::abs(m.objective_value(s.values) - s.objective) < 1e-6 * std::max(1.0, std::abs(s.objective)));
}

}  // namespace

TEST_CASE("single bound LP") {
  MilpModel m;
  const auto x = m.add_variable("x", VarKind::kContinuous, 0, 10, 1);
  m.add_constraint({{x, 1}}, Sense::kGreaterEqual, 3, "lo");
  const MilpSolution s = solve_lp(m);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.values[x] == doctest::Approx(3));
  CHECK(s.objective == doctest::Approx(3));
}

TEST_CASE("contradictory rows are infeasible") {
  MilpModel m;
  const auto x = m.add_variable("x", VarKind::kContinuous, 0, 10, 1);
  m.add_constraint({{x, 1}}, Sense::kLessEqual, 1, "a");
  m.add_constraint({{x, 1}}, Sense::kGreaterEqual, 2, "b");
  CHECK(solve_lp(m).status == SolveStatus::kInfeasible);
  CHECK(solve_milp(m).status == SolveStatus::kInfeasible);
}

TEST_CASE("random LPs agree with the tableau oracle") {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 40; ++trial) {
    const MilpModel m = random_lp(rng, 20, 30);
    const auto oracle = testing::tableau_lp(m);
    const MilpSolution s = solve_lp(m);
    REQUIRE(oracle.has_value());  // built around a feasible point
    REQUIRE(s.status == SolveStatus::kOptimal);
    CHECK(std::abs(s.objective - *oracle) < 1e-6 * std::max(1.0, std::abs(*oracle)));
    check_feasible(m, s);
  }
}

TEST_CASE("LP-integral instance solves at the root") {
  MilpModel m;
  const auto a = m.add_variable("a", VarKind::kBinary, 0, 1, -3);
  const auto b = m.add_variable("b", VarKind::kBinary, 0, 1, -2);
  m.add_constraint({{a, 1}, {b, 1}}, Sense::kLessEqual, 1, "pick-one");
  const MilpSolution lp = solve_lp(m);
  const MilpSolution ip = solve_milp(m);
  REQUIRE(ip.status == SolveStatus::kOptimal);
  CHECK(ip.objective == doctest::Approx(lp.objective));
  CHECK(ip.values == lp.values);
  CHECK(ip.nodes == 1);
}

TEST_CASE("knapsacks match exhaustive enumeration") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const MilpModel m = testing::random_milp(rng, 12, 0, 1 + trial % 3);
    const auto oracle = testing::enumerate_binaries(m);
    REQUIRE(oracle);
    const MilpSolution s = solve_milp(m, {.gap_tol = 0.0});
    REQUIRE(s.status == SolveStatus::kOptimal);
    CHECK(s.objective == doctest::Approx(*oracle).epsilon(1e-9));
    CHECK(s.bound <= s.objective + 1e-9);
    check_feasible(m, s);
  }
}

TEST_CASE("mixed instances match enumeration") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const MilpModel m = testing::random_milp(rng, 7, 4, 3);
    const auto oracle = testing::enumerate_binaries(m);
    const MilpSolution s = solve_milp(m, {.gap_tol = 0.0});
    if (!oracle) {
      CHECK(s.status == SolveStatus::kInfeasible);
      continue;
    }
    REQUIRE(s.status == SolveStatus::kOptimal);
    CHECK(s.objective == doctest::Approx(*oracle).epsilon(1e-7));
    check_feasible(m, s);
  }
}

TEST_CASE("solves are deterministic") {
  std::mt19937_64 rng(4);
  const MilpModel m = testing::random_milp(rng, 12, 3, 3);
  const MilpSolution a = solve_milp(m, {.gap_tol = 0.0});
  const MilpSolution b = solve_milp(m, {.gap_tol = 0.0});
  CHECK(a.values == b.values);
  CHECK(a.nodes == b.nodes);
  CHECK(a.lp_iterations == b.lp_iterations);
}

TEST_CASE("warm starts") {
  std::mt19937_64 rng(8);
  const MilpModel m = testing::random_milp(rng, 12, 0, 2);
  std::vector<double> zero(m.num_variables(), 0.0);
  const double v = m.objective_value(zero);

  MilpOptions opts;
  opts.warm_start = zero;
  opts.node_limit = 1;
  const MilpSolution s = solve_milp(m, opts);
  REQUIRE(s.has_solution());
  CHECK(s.objective <= v + 1e-9);

  std::vector<double> bad(m.num_variables(), 1.0);
  opts.warm_start = bad;
  CHECK_THROWS_WITH_AS(solve_milp(m, opts), doctest::Contains("cap"), WarmStartError);

  std::vector<double> frac(m.num_variables(), 0.0);
  frac[0] = 0.5;
  opts.warm_start = frac;
  CHECK_THROWS_AS(solve_milp(m, opts), WarmStartError);
}

TEST_CASE("gap and node limits report a consistent bound") {
  std::mt19937_64 rng(30);
  const MilpModel m = testing::random_milp(rng, 12, 0, 3);
  MilpOptions opts;
  opts.node_limit = 3;
  opts.gap_tol = 0.0;
  const MilpSolution s = solve_milp(m, opts);
  CHECK(s.bound <= s.objective + 1e-9);
  if (s.has_solution()) check_feasible(m, s);
}

TEST_CASE("model bookkeeping") {
  MilpModel m;
  const auto x = m.add_variable("x[i=1]", VarKind::kContinuous, 0, 4, 1);
  const auto y = m.add_variable("y", VarKind::kBinary, 0, 1, 2);
  const auto row = m.add_constraint({{x, 1}, {y, 2}, {x, 3}, {y, 0}}, Sense::kLessEqual, 5, "cap[i=1]");
  const LinearConstraint& c = m.constraints()[row];
  REQUIRE(c.terms.size() == 2);
  CHECK(c.terms[0].coeff == 4);
  CHECK(c.family() == "cap");
  CHECK(m.count_family("cap") == 1);
  CHECK(m.variable_id("y") == y);
  CHECK(!m.find_variable("z"));
  CHECK_THROWS(m.add_variable("y", VarKind::kContinuous, 0, 1));
  const std::vector<double> vals{1.0, 1.0};
  CHECK(c.activity(vals) == 6);
  CHECK(c.violation(vals) == 1);
  CHECK(m.remove_family("cap") == 1);
  CHECK(m.num_constraints() == 0);
}

TEST_CASE("MPS export layout") {
  MilpModel m;
  const auto x = m.add_variable("x", VarKind::kContinuous, 0, 4, 1);
  const auto y = m.add_variable("y", VarKind::kBinary, 0, 1, -2);
  m.add_constraint({{x, 1}, {y, 1}}, Sense::kEqual, 1, "balance[t=1]");
  m.add_constraint({{x, 1}}, Sense::kGreaterEqual, 0.5, "floor");
  const std::string mps = export_mps(m);
  for (const char* section : {"NAME", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA"}) {
    const bool found = mps.find(std::string("\n") + section) != std::string::npos || mps.rfind(section, 0) == 0;
    CHECK_MESSAGE(found, section);
  }
  CHECK(mps.find(" E balance[t=1]\n") != std::string::npos);
  CHECK(mps.find(" G floor\n") != std::string::npos);
  CHECK(mps.find("'INTORG'") != std::string::npos);
  CHECK(mps.find(" UP BND y 1\n") != std::string::npos);
}

TEST_CASE("MPS names are sanitized and unique") {
  MilpModel m;
  m.add_variable("a b", VarKind::kContinuous, 0, 1);
  m.add_variable("a_b", VarKind::kContinuous, 0, 1);
  m.add_variable(std::string(300, 'q'), VarKind::kContinuous, 0, 1);
  CHECK(mps_column_name(m, 0) == "a_b");
  CHECK(mps_column_name(m, 1) == "a_b#2");
  CHECK(mps_column_name(m, 2).size() == 255);
}

TEST_CASE("solution import") {
  std::mt19937_64 rng(9);
  const MilpModel m = testing::random_milp(rng, 6, 2, 2);
  const MilpSolution s = solve_milp(m, {.gap_tol = 0.0});
  REQUIRE(s.status == SolveStatus::kOptimal);

  std::string text = "# written by hand\n\n";
  for (const Variable& v : m.variables()) text += mps_column_name(m, v.id) + " " + std::to_string(s.values[v.id]) + "\n";
  const MilpSolution back = import_solution(text, m, 1e-5);
  CHECK(back.status == SolveStatus::kOptimal);
  CHECK(back.objective == doctest::Approx(m.objective_value(back.values)));
  CHECK(back.objective == doctest::Approx(s.objective).epsilon(1e-5));

  CHECK_THROWS_WITH_AS(import_solution(text + "ghost 1\n", m), doctest::Contains("unknown variable 'ghost'"),
                       SolutionFormatError);
  CHECK_THROWS_WITH_AS(import_solution("b0 1\n", m), doctest::Contains("missing value"), SolutionFormatError);
  CHECK_THROWS_WITH_AS(import_solution(text + "b0 one\n", m), doctest::Contains("malformed"), SolutionFormatError);

  std::string infeasible;
  for (const Variable& v : m.variables()) infeasible += v.name + " " + (v.kind == VarKind::kBinary ? "1" : "0") + "\n";
  CHECK_THROWS_WITH_AS(import_solution(infeasible, m), doctest::Contains("infeasible assignment"), SolutionFormatError);
}
