#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fleetcbm/milp_solver.hpp"
#include "fleetcbm/model_builder.hpp"
#include "test_support.hpp"

using namespace fleetcbm;

namespace {

const PolicyKind kPolicies[] = {PolicyKind::kBase, PolicyKind::kOid, PolicyKind::kMdi, PolicyKind::kComprehensive};

double val(const MilpSolution& s, std::size_t id) { return s.values.at(id); }

bool is_one(double x) { return std::abs(x - 1.0) < 1e-6; }
bool is_zero(double x) { return std::abs(x) < 1e-6; }

void fix(MilpModel& m, std::size_t id, double v) { m.set_bounds(id, v, v); }

}  // namespace

TEST_CASE("nothing to do gives a zero objective") {
  const FleetSpec spec = testing::single_asset_spec(3, 100, 0, 10);
  for (auto build : {build_single_maintenance, build_multi_cycle}) {
    const BuiltModel b = build(spec, PolicyKind::kComprehensive);
    const MilpSolution s = solve_milp(b.model);
    REQUIRE(s.status == SolveStatus::kOptimal);
    CHECK(s.objective == doctest::Approx(0.0));
    for (int t = 1; t <= 3; ++t) {
      CHECK(is_zero(val(s, b.catalogue.mp_at(0, t))));
      CHECK(is_zero(val(s, b.catalogue.p_at(0, t))));
    }
  }
}

TEST_CASE("a forced crossing fails the asset and charges the end-of-horizon CM") {
  // Level 60 after t=1 and 120 after t=2; no maintenance fits in H=3.
  FleetSpec spec = testing::single_asset_spec(3, 100, 0, 60);
  spec.pm_duration = 3;
  spec.cm_duration = 3;
  const BuiltModel b = build_single_maintenance(spec, PolicyKind::kComprehensive);
  const MilpSolution s = solve_milp(b.model);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(spec.cm_cost));
  CHECK(is_one(val(s, b.catalogue.uf_at(0, 2))));
  CHECK(is_one(val(s, b.catalogue.uf_at(0, 3))));

  const BuiltModel multi = build_multi_cycle(spec, PolicyKind::kComprehensive);
  const MilpSolution sm = solve_milp(multi.model);
  REQUIRE(sm.status == SolveStatus::kOptimal);
  CHECK(sm.objective == doctest::Approx(spec.cm_cost));
  CHECK(is_one(val(sm, multi.catalogue.uf_at(0, 2))));
}

TEST_CASE("maintenance windows stay inside the horizon") {
  FleetSpec spec = testing::single_asset_spec(6, 100, 0, 1);
  spec.pm_duration = 2;
  spec.cm_duration = 3;
  const BuiltModel b = build_multi_cycle(spec, PolicyKind::kBase);
  CHECK(b.model.variable(b.catalogue.mp_at(0, 4)).upper == 1.0);
  CHECK(b.model.variable(b.catalogue.mp_at(0, 5)).upper == 0.0);
  CHECK(b.model.variable(b.catalogue.mc_at(0, 3)).upper == 1.0);
  CHECK(b.model.variable(b.catalogue.mc_at(0, 4)).upper == 0.0);
}

TEST_CASE("policy views drop the ignored coefficients") {
  const FleetSpec spec = testing::two_asset_spec();
  for (PolicyKind policy : kPolicies) {
    for (auto build : {build_single_maintenance, build_multi_cycle}) {
      const BuiltModel b = build(spec, policy);
      bool has_zeta = false, has_gamma = false;
      for (const LinearConstraint& c : b.model.constraints()) {
        if (c.family() != "deg-cum") continue;
        for (const Term& term : c.terms) {
          const std::string& name = b.model.variable(term.var).name;
          if (name.rfind("p[", 0) == 0 || name.rfind("pp[", 0) == 0) has_zeta = true;
          if (name.rfind("omega", 0) == 0) has_gamma = true;
        }
      }
      CHECK(has_zeta == models_oid(policy));
      CHECK(has_gamma == models_mdi(policy));
    }
  }
}

TEST_CASE("big-M closed form") {
  FleetSpec spec = testing::single_asset_spec(10, 1000, 0, 1);
  spec.uncertainty.assets[0].d_hat = testing::flat(10, 1e-12);
  CHECK(big_m(spec, 0) == doctest::Approx(10.0));
  spec.assets[0].production_capacity = 50;
  spec.uncertainty.assets[0].zeta_bar = testing::flat(10, 0.06);
  spec.uncertainty.assets[0].zeta_hat = testing::flat(10, 0.04);
  CHECK(big_m(spec, 0) == doctest::Approx(60.0));
}

TEST_CASE("big-M bounds the accumulated degradation of feasible points") {
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const FleetSpec spec = testing::random_spec(rng, 2, 6, 2);
    BuiltModel b = build_multi_cycle(spec, PolicyKind::kComprehensive);
    // Random objective directions reach different vertices.
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    for (std::size_t id = 0; id < b.model.num_variables(); ++id) b.model.set_obj_coeff(id, coef(rng));
    const MilpSolution s = solve_lp(b.model);
    if (s.status != SolveStatus::kOptimal) continue;
    const VariableCatalogue& cat = b.catalogue;
    for (std::size_t i = 0; i < spec.num_assets(); ++i) {
      const double m = big_m(spec, i);
      const AssetUncertainty& u = spec.uncertainty.assets[i];
      for (std::size_t k = 0; k < 2; ++k) {
        double lhs = cycle_initial_level(spec, i, k);
        for (int t = 1; t <= spec.horizon; ++t) {
          const std::size_t ti = std::size_t(t - 1);
          lhs += u.d_bar[ti] * (1 - val(s, cat.z_at(i, t, k)) - val(s, cat.uf_at(i, t))) +
                 u.zeta_bar[ti] * val(s, cat.pp_at(i, t, k));
          for (std::size_t e : spec.edges_into(i)) lhs += spec.edges[e].gamma_nominal[ti] * val(s, cat.omegap_at(e, t, k));
          CHECK(lhs <= m + 1e-9);
        }
      }
    }
    ++checked;
  }
  CHECK(checked >= 90);
}

TEST_CASE("model sizes match the closed forms") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const FleetSpec spec = testing::random_spec(rng, 1 + trial % 4, 3 + trial % 5, 1 + trial % 3, 0.5);
    for (PolicyKind policy : kPolicies) {
      const BuiltModel single = build_single_maintenance(spec, policy);
      const ModelCounts sc = single_maintenance_counts(spec, policy);
      CHECK(single.model.num_variables() == sc.variables);
      CHECK(single.model.num_constraints() == sc.constraints);
      const BuiltModel multi = build_multi_cycle(spec, policy);
      const ModelCounts mc = multi_cycle_counts(spec, policy);
      CHECK(multi.model.num_variables() == mc.variables);
      CHECK(multi.model.num_constraints() == mc.constraints);
    }
  }
}

TEST_CASE("every catalogue entry names a distinct variable") {
  const FleetSpec spec = testing::two_asset_spec(5, 2);
  const BuiltModel b = build_multi_cycle(spec, PolicyKind::kComprehensive);
  const VariableCatalogue& c = b.catalogue;
  std::vector<int> seen(b.model.num_variables(), 0);
  for (const IdGrid* g : {&c.mp, &c.mc, &c.u, &c.um, &c.uf, &c.p, &c.omega, &c.psi, &c.z, &c.v, &c.lp, &c.pp, &c.v0,
                          &c.omegap}) {
    for (std::size_t id : g->ids()) {
      REQUIRE(id != kNoVar);
      ++seen[id];
    }
  }
  for (int n : seen) CHECK(n == 1);
  CHECK(c.l.empty());
  CHECK(b.model.variable(c.mp_at(1, 3)).name == "mp[i=2,t=3]");
  CHECK(b.model.variable(c.omegap_at(0, 2, 1)).name == "omegap[j=1,i=2,t=2,k=2]");
}

TEST_CASE("sample schedule pins v, z and u^m") {
  const FleetSpec spec = testing::two_pm_schedule_spec();
  BuiltModel b = build_multi_cycle(spec, PolicyKind::kComprehensive);
  const VariableCatalogue& c = b.catalogue;
  for (int t = 1; t <= spec.horizon; ++t) {
    fix(b.model, c.mp_at(0, t), t == testing::kSchedulePm1 || t == testing::kSchedulePm2 ? 1 : 0);
    fix(b.model, c.mc_at(0, t), 0);
    fix(b.model, c.uf_at(0, t), 0);
  }
  const MilpSolution s = solve_milp(b.model);
  REQUIRE(s.status == SolveStatus::kOptimal);
  for (int t = 1; t <= spec.horizon; ++t) {
    CAPTURE(t);
    CHECK(val(s, c.v_at(0, t, 0)) == doctest::Approx(t == 6 ? 1 : 0));
    CHECK(val(s, c.v_at(0, t, 1)) == doctest::Approx(t == 17 ? 1 : 0));
    CHECK(val(s, c.z_at(0, t, 0)) == doctest::Approx(t >= 6 ? 1 : 0));
    CHECK(val(s, c.z_at(0, t, 1)) == doctest::Approx(t >= 8 && t <= 16 ? 0 : 1));
    CHECK(val(s, c.um_at(0, t)) == doctest::Approx(t == 6 || t == 7 || t == 17 || t == 18 ? 1 : 0));
  }
  CHECK(is_zero(val(s, c.v0_at(0, 0))));
  CHECK(is_zero(val(s, c.v0_at(0, 1))));
}

TEST_CASE("an unprofitable maintenance is skipped") {
  FleetSpec spec = testing::single_asset_spec(8, 100, 0, 2);
  const BuiltModel b = build_multi_cycle(spec, PolicyKind::kComprehensive);
  const MilpSolution s = solve_milp(b.model);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(is_one(val(s, b.catalogue.v0_at(0, 0))));
  for (int t = 1; t <= 8; ++t) {
    CHECK(is_zero(val(s, b.catalogue.z_at(0, t, 0))));
    CHECK(is_zero(val(s, b.catalogue.mp_at(0, t))));
  }
}

TEST_CASE("maintaining the peer lowers the coupled asset's degradation") {
  // Asset 2 ("fan") feeds asset 1 ("pump") here.
  FleetSpec spec = testing::two_asset_spec(10, 2);
  spec.edges = {{"fan", "pump", testing::flat(10, 0.05), testing::flat(10, 0.01)}};
  spec.assets[0].failure_threshold = 1000;
  spec.assets[1].failure_threshold = 1000;
  auto lowest_level = [&](bool maintain) {
    BuiltModel b = build_multi_cycle(spec, PolicyKind::kComprehensive);
    const VariableCatalogue& c = b.catalogue;
    for (std::size_t id = 0; id < b.model.num_variables(); ++id) b.model.set_obj_coeff(id, 0.0);
    b.model.set_obj_coeff(c.lp_at(0, 10, 0), 1.0);
    for (int t = 1; t <= 10; ++t) {
      for (std::size_t i = 0; i < 2; ++i) {
        fix(b.model, c.mp_at(i, t), i == 1 && maintain && t == 5 ? 1 : 0);
        fix(b.model, c.mc_at(i, t), 0);
        fix(b.model, c.uf_at(i, t), 0);
        fix(b.model, c.p_at(i, t), i == 1 && t == 5 ? 0 : 10);
      }
    }
    const MilpSolution s = solve_milp(b.model, {.gap_tol = 0.0});
    REQUIRE(s.status == SolveStatus::kOptimal);
    return s.objective;
  };
  const double without = lowest_level(false);
  const double with = lowest_level(true);
  CHECK(with < without - 1e-6);
}

TEST_CASE("policies coincide when OID and MDI data vanish") {
  FleetSpec spec = testing::two_asset_spec(8, 2);
  for (AssetUncertainty& u : spec.uncertainty.assets) {
    u.zeta_bar = testing::flat(8, 0);
    u.zeta_hat = testing::flat(8, 0);
  }
  for (InteractionEdge& e : spec.edges) {
    e.gamma_nominal = testing::flat(8, 0);
    e.gamma_halfwidth = testing::flat(8, 0);
  }
  std::vector<double> objs;
  for (PolicyKind policy : kPolicies) {
    const MilpSolution s = solve_milp(build_multi_cycle(spec, policy).model, {.gap_tol = 0.0});
    REQUIRE(s.status == SolveStatus::kOptimal);
    objs.push_back(s.objective);
  }
  for (double o : objs) CHECK(o == doctest::Approx(objs[0]).epsilon(1e-9));
}

TEST_CASE("single and multi-cycle models agree when at most one PM is used") {
  std::mt19937_64 rng(21);
  int compared = 0;
  for (int trial = 0; trial < 25; ++trial) {
    FleetSpec spec = testing::random_spec(rng, 2, 8, 1);
    const BuiltModel multi = build_multi_cycle(spec, PolicyKind::kComprehensive);
    const MilpSolution sm = solve_milp(multi.model, {.gap_tol = 0.0});
    const MilpSolution ss = solve_milp(build_single_maintenance(spec, PolicyKind::kComprehensive).model, {.gap_tol = 0.0});
    REQUIRE(sm.status == SolveStatus::kOptimal);
    REQUIRE(ss.status == SolveStatus::kOptimal);
    bool simple = true;
    for (std::size_t i = 0; i < 2; ++i) {
      double pm = 0.0, failed = 0.0;
      for (int t = 1; t <= spec.horizon; ++t) {
        pm += val(sm, multi.catalogue.mp_at(i, t));
        failed += val(sm, multi.catalogue.mc_at(i, t)) + val(sm, multi.catalogue.uf_at(i, t));
      }
      simple = simple && pm < 1.5 && failed < 0.5;
    }
    if (!simple) continue;
    CHECK(ss.objective == doctest::Approx(sm.objective).epsilon(1e-6));
    ++compared;
  }
  CHECK(compared >= 10);
}

TEST_CASE("PM windows in optimal solutions") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    FleetSpec spec = testing::random_spec(rng, 2, 6, 2);
    for (AssetSpec& a : spec.assets) a.failure_threshold = 12;  // force maintenance
    spec.pm_cost = 1;
    spec.cm_cost = 1000;
    const BuiltModel b = build_multi_cycle(spec, PolicyKind::kComprehensive);
    const MilpSolution s = solve_milp(b.model);
    REQUIRE(s.has_solution());
    const VariableCatalogue& c = b.catalogue;
    for (std::size_t i = 0; i < 2; ++i) {
      for (int t = 1; t <= spec.horizon; ++t) {
        double expected = 0.0;
        for (int tau = std::max(1, t - spec.pm_duration + 1); tau <= t; ++tau) expected += val(s, c.mp_at(i, tau));
        for (int tau = std::max(1, t - spec.cm_duration + 1); tau <= t; ++tau) expected += val(s, c.mc_at(i, tau));
        CHECK(val(s, c.um_at(i, t)) == doctest::Approx(expected));
      }
    }
  }
}
