#include "fleetcbm/robust_model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace fleetcbm {
namespace {

double at_t(const std::vector<double>& series, int t) { return series[static_cast<std::size_t>(t - 1)]; }

bool present(double bar, double hat) { return !(bar == 0.0 && hat == 0.0); }

// Largest magnitude a term's coefficient can take in the robust model.
double coeff_cap(const FleetSpec& view, std::size_t asset, const UncertainTerm& term) {
  switch (term.kind) {
    case TermKind::kRate: return 1.0;
    case TermKind::kOid: return view.assets[asset].production_capacity;
    case TermKind::kMdi: return view.assets[view.edge_source(term.edge)].failure_threshold;
  }
  return 0.0;
}

std::string tag_itk(const char* base, std::size_t i, int t, std::size_t k) {
  return std::string(base) + "[i=" + std::to_string(i + 1) + ",t=" + std::to_string(t) + ",k=" + std::to_string(k + 1) +
         "]";
}

std::string term_suffix(const FleetSpec& view, std::size_t i, int t, std::size_t k, const UncertainTerm& term) {
  std::string s = "[i=" + std::to_string(i + 1) + ",t=" + std::to_string(t) + ",k=" + std::to_string(k + 1);
  if (term.kind == TermKind::kMdi) s += ",j=" + std::to_string(view.edge_source(term.edge) + 1);
  s += ",tau=" + std::to_string(term.tau) + "]";
  return s;
}

// Row terms (l' excluded) of a deg-cum shaped inequality under fixed
// coefficient values q; the row reads l' + terms >= l'_0 + sum of rate q.
void realized_row(const FleetSpec& view, const VariableCatalogue& cat, const NestedUncertaintySet& set,
                  std::span<const double> q, std::size_t k, std::vector<Term>& terms, double& rate_sum) {
  rate_sum = 0.0;
  for (std::size_t n = 0; n < set.terms.size(); ++n) {
    const UncertainTerm& term = set.terms[n];
    switch (term.kind) {
      case TermKind::kRate:
        rate_sum += q[n];
        terms.push_back({cat.z_at(set.asset, term.tau, k), q[n]});
        terms.push_back({cat.uf_at(set.asset, term.tau), q[n]});
        break;
      case TermKind::kOid: terms.push_back({cat.pp_at(set.asset, term.tau, k), -q[n]}); break;
      case TermKind::kMdi: terms.push_back({cat.omegap_at(term.edge, term.tau, k), -q[n]}); break;
    }
  }
  (void)view;
}

}  // namespace

double NestedUncertaintySet::shifted_budget() const {
  double s = budget;
  for (const UncertainTerm& term : terms) s += term.bar / term.hat;
  return s;
}

NestedUncertaintySet nested_set(const FleetSpec& spec, std::size_t asset, int t) {
  NestedUncertaintySet set;
  set.asset = asset;
  set.t = t;
  const AssetUncertainty& u = spec.uncertainty.assets.at(asset);
  set.budget = at_t(u.budget, t);
  const auto in = spec.edges_into(asset);
  for (int tau = 1; tau <= t; ++tau) {
    set.terms.push_back({TermKind::kRate, tau, 0, at_t(u.d_bar, tau), at_t(u.d_hat, tau)});
    if (present(at_t(u.zeta_bar, tau), at_t(u.zeta_hat, tau))) {
      set.terms.push_back({TermKind::kOid, tau, 0, at_t(u.zeta_bar, tau), at_t(u.zeta_hat, tau)});
    }
    for (std::size_t e : in) {
      const InteractionEdge& edge = spec.edges[e];
      if (present(at_t(edge.gamma_nominal, tau), at_t(edge.gamma_halfwidth, tau))) {
        set.terms.push_back({TermKind::kMdi, tau, e, at_t(edge.gamma_nominal, tau), at_t(edge.gamma_halfwidth, tau)});
      }
    }
  }
  return set;
}

bool is_member(const NestedUncertaintySet& set, const ScenarioRealization& r, double tol) {
  if (r.values.size() != set.terms.size()) return false;
  double dev = 0.0;
  for (std::size_t n = 0; n < set.terms.size(); ++n) {
    const UncertainTerm& term = set.terms[n];
    const double q = r.values[n];
    if (q < term.bar - term.hat - tol || q > term.bar + term.hat + tol) return false;
    dev += (q - term.bar) / term.hat;
  }
  return dev <= set.budget + tol;
}

WorstCase inner_worst_case(const NestedUncertaintySet& set, std::span<const double> coeffs) {
  const std::size_t n = set.terms.size();
  if (coeffs.size() != n) throw std::invalid_argument("inner_worst_case: coefficient count mismatch");
  std::vector<double> y(n, -1.0);
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < n; ++k) {
    if (coeffs[k] > 0.0) order.push_back(k);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return coeffs[a] * set.terms[a].hat > coeffs[b] * set.terms[b].hat;
  });
  double remaining = set.budget + static_cast<double>(n);
  WorstCase wc;
  bool priced = false;
  for (std::size_t k : order) {
    const double raise = std::clamp(remaining, 0.0, 2.0);
    y[k] += raise;
    remaining -= raise;
    if (!priced && raise < 2.0) {
      wc.pi_budget = coeffs[k] * set.terms[k].hat;
      priced = true;
    }
  }
  wc.realization.asset = set.asset;
  wc.realization.t = set.t;
  wc.realization.values.resize(n);
  wc.pi_upper.resize(n);
  wc.pi_lower.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const UncertainTerm& term = set.terms[k];
    const double q = term.bar + term.hat * y[k];
    wc.realization.values[k] = q;
    wc.value += coeffs[k] * q;
    const double reduced = coeffs[k] - wc.pi_budget / term.hat;
    wc.pi_upper[k] = std::max(0.0, reduced);
    wc.pi_lower[k] = std::max(0.0, -reduced);
  }
  return wc;
}

WorstCase inner_worst_case(const NestedUncertaintySet& set, std::span<const double> gate,
                           std::span<const double> oid_mult, const std::vector<std::vector<double>>& mdi_mult,
                           const FleetSpec& spec) {
  const auto in = spec.edges_into(set.asset);
  std::vector<double> coeffs;
  coeffs.reserve(set.terms.size());
  for (const UncertainTerm& term : set.terms) {
    const std::size_t tau = std::size_t(term.tau - 1);
    switch (term.kind) {
      case TermKind::kRate: coeffs.push_back(gate[tau]); break;
      case TermKind::kOid: coeffs.push_back(oid_mult[tau]); break;
      case TermKind::kMdi: {
        const auto pos = std::size_t(std::find(in.begin(), in.end(), term.edge) - in.begin());
        coeffs.push_back(mdi_mult.at(pos)[tau]);
        break;
      }
    }
  }
  return inner_worst_case(set, coeffs);
}

const DualBlock& RobustModel::block(std::size_t i, int t, std::size_t k) const {
  const std::size_t h = std::size_t(view.horizon), nk = std::size_t(view.max_cycles);
  return blocks.at((i * h + std::size_t(t - 1)) * nk + k);
}

RobustModel build_robust(const FleetSpec& spec, PolicyKind policy) {
  RobustModel out;
  out.built = build_multi_cycle(spec, policy);
  out.view = policy_view(spec, policy);
  out.built.model.remove_family("deg-cum");
  const FleetSpec& view = out.view;
  const VariableCatalogue& cat = out.built.catalogue;
  MilpModel& model = out.built.model;
  const std::size_t nk = std::size_t(view.max_cycles);

  for (std::size_t i = 0; i < view.num_assets(); ++i) {
    for (int t = 1; t <= view.horizon; ++t) {
      const NestedUncertaintySet set = nested_set(view, i, t);
      double lambda_max = 0.0;
      for (const UncertainTerm& term : set.terms) lambda_max = std::max(lambda_max, coeff_cap(view, i, term) * term.hat);
      const double shifted = set.shifted_budget();
      for (std::size_t k = 0; k < nk; ++k) {
        DualBlock b;
        b.asset = i;
        b.t = t;
        b.cycle = k;
        b.pi_budget = model.add_variable(tag_itk("pi1", i, t, k), VarKind::kContinuous, 0.0, lambda_max);
        for (const UncertainTerm& term : set.terms) {
          const char* up = term.kind == TermKind::kRate ? "pi2" : term.kind == TermKind::kOid ? "pi4" : "pi6";
          const char* lo = term.kind == TermKind::kRate ? "pi3" : term.kind == TermKind::kOid ? "pi5" : "pi7";
          const std::string suffix = term_suffix(view, i, t, k, term);
          b.pi_upper.push_back(
              model.add_variable(up + suffix, VarKind::kContinuous, 0.0, coeff_cap(view, i, term)));
          b.pi_lower.push_back(
              model.add_variable(lo + suffix, VarKind::kContinuous, 0.0, lambda_max / term.hat + 1.0));
        }

        // Dual objective bound on the cycle's accumulated degradation.
        std::vector<Term> row{{cat.lp_at(i, t, k), 1.0}, {b.pi_budget, -shifted}};
        for (std::size_t n = 0; n < set.terms.size(); ++n) {
          const UncertainTerm& term = set.terms[n];
          row.push_back({b.pi_upper[n], -(term.bar + term.hat)});
          row.push_back({b.pi_lower[n], term.bar - term.hat});
        }
        model.add_constraint(std::move(row), Sense::kGreaterEqual, cycle_initial_level(view, i, k),
                             tag_itk("deg-robust", i, t, k));

        // Dual feasibility, one row per uncertain term.
        for (std::size_t n = 0; n < set.terms.size(); ++n) {
          const UncertainTerm& term = set.terms[n];
          std::vector<Term> dual{{b.pi_budget, 1.0 / term.hat}, {b.pi_upper[n], 1.0}, {b.pi_lower[n], -1.0}};
          double rhs = 0.0;
          const char* family = "dual-d";
          switch (term.kind) {
            case TermKind::kRate:
              dual.push_back({cat.z_at(i, term.tau, k), 1.0});
              dual.push_back({cat.uf_at(i, term.tau), 1.0});
              rhs = 1.0;
              break;
            case TermKind::kOid:
              dual.push_back({cat.pp_at(i, term.tau, k), -1.0});
              family = "dual-zeta";
              break;
            case TermKind::kMdi:
              dual.push_back({cat.omegap_at(term.edge, term.tau, k), -1.0});
              family = "dual-gamma";
              break;
          }
          model.add_constraint(std::move(dual), Sense::kGreaterEqual, rhs, family + term_suffix(view, i, t, k, term));
        }
        out.blocks.push_back(std::move(b));
      }
    }
  }
  return out;
}

ModelCounts robust_counts(const FleetSpec& spec, PolicyKind policy) {
  const FleetSpec view = policy_view(spec, policy);
  ModelCounts c = multi_cycle_counts(spec, policy);
  const std::size_t nk = std::size_t(view.max_cycles), h = std::size_t(view.horizon);
  c.constraints -= view.num_assets() * h * nk;  // nominal deg-cum rows
  for (std::size_t i = 0; i < view.num_assets(); ++i) {
    const AssetUncertainty& u = view.uncertainty.assets[i];
    const auto in = view.edges_into(i);
    std::size_t terms = 0;
    for (int t = 1; t <= view.horizon; ++t) {
      terms += 1;
      if (present(at_t(u.zeta_bar, t), at_t(u.zeta_hat, t))) ++terms;
      for (std::size_t e : in) {
        if (present(at_t(view.edges[e].gamma_nominal, t), at_t(view.edges[e].gamma_halfwidth, t))) ++terms;
      }
      c.variables += nk * (1 + 2 * terms);
      c.constraints += nk * (1 + terms);
    }
  }
  return c;
}

std::vector<double> term_coefficients(const FleetSpec& view, const VariableCatalogue& cat, const NestedUncertaintySet& set,
                                      std::size_t k, std::span<const double> values) {
  (void)view;
  std::vector<double> coeffs;
  coeffs.reserve(set.terms.size());
  for (const UncertainTerm& term : set.terms) {
    switch (term.kind) {
      case TermKind::kRate:
        coeffs.push_back(1.0 - values[cat.z_at(set.asset, term.tau, k)] - values[cat.uf_at(set.asset, term.tau)]);
        break;
      case TermKind::kOid: coeffs.push_back(values[cat.pp_at(set.asset, term.tau, k)]); break;
      case TermKind::kMdi: coeffs.push_back(values[cat.omegap_at(term.edge, term.tau, k)]); break;
    }
  }
  return coeffs;
}

std::vector<ScenarioRealization> ultra_conservative_scenario(const FleetSpec& spec) {
  std::vector<ScenarioRealization> out;
  for (std::size_t i = 0; i < spec.num_assets(); ++i) {
    for (int t = 1; t <= spec.horizon; ++t) {
      const NestedUncertaintySet set = nested_set(spec, i, t);
      ScenarioRealization r{i, t, {}};
      for (const UncertainTerm& term : set.terms) r.values.push_back(term.bar + term.hat);
      out.push_back(std::move(r));
    }
  }
  return out;
}

FleetSpec ultra_conservative_spec(const FleetSpec& spec) {
  FleetSpec out = spec;
  for (AssetUncertainty& u : out.uncertainty.assets) {
    for (std::size_t t = 0; t < u.d_bar.size(); ++t) {
      u.d_bar[t] += u.d_hat[t];
      u.zeta_bar[t] += u.zeta_hat[t];
    }
  }
  for (InteractionEdge& e : out.edges) {
    for (std::size_t t = 0; t < e.gamma_nominal.size(); ++t) e.gamma_nominal[t] += e.gamma_halfwidth[t];
  }
  return out;
}

std::vector<ScenarioCut> extreme_scenario_cuts(const RobustModel& robust, std::size_t n_cuts, std::uint64_t seed) {
  const FleetSpec& view = robust.view;
  const VariableCatalogue& cat = robust.built.catalogue;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_asset(0, view.num_assets() - 1);
  std::uniform_int_distribution<int> pick_t(1, view.horizon);
  std::uniform_int_distribution<std::size_t> pick_k(0, std::size_t(view.max_cycles) - 1);

  std::vector<ScenarioCut> cuts;
  for (std::size_t c = 0; c < n_cuts; ++c) {
    const std::size_t i = pick_asset(rng);
    const int t = pick_t(rng);
    const std::size_t k = pick_k(rng);
    const NestedUncertaintySet set = nested_set(view, i, t);
    std::vector<std::size_t> perm(set.terms.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    ScenarioRealization r{i, t, {}};
    for (const UncertainTerm& term : set.terms) r.values.push_back(term.bar);
    double budget = std::min(set.budget, static_cast<double>(set.terms.size()));
    for (std::size_t n = 0; n < perm.size() && budget > 0.0; ++n) {
      const double step = std::min(1.0, budget);
      r.values[perm[n]] += step * set.terms[perm[n]].hat;
      budget -= step;
    }

    ScenarioCut cut;
    cut.cycle = k;
    double rate_sum = 0.0;
    realized_row(view, cat, set, r.values, k, cut.row.terms, rate_sum);
    cut.row.terms.push_back({cat.lp_at(i, t, k), 1.0});
    cut.row.sense = Sense::kGreaterEqual;
    cut.row.rhs = cycle_initial_level(view, i, k) + rate_sum;
    cut.row.tag = "cut-scenario[n=" + std::to_string(c + 1) + ",i=" + std::to_string(i + 1) +
                  ",t=" + std::to_string(t) + ",k=" + std::to_string(k + 1) + "]";
    cut.realization = std::move(r);
    cuts.push_back(std::move(cut));
  }
  return cuts;
}

std::vector<double> lift_to_robust(const RobustModel& robust, const MilpModel& source, std::span<const double> values) {
  const MilpModel& model = robust.built.model;
  const VariableCatalogue& cat = robust.built.catalogue;
  const FleetSpec& view = robust.view;
  std::vector<double> x(model.num_variables(), 0.0);
  for (const Variable& v : model.variables()) {
    if (auto id = source.find_variable(v.name)) {
      double val = values[*id];
      if (v.kind == VarKind::kBinary) val = std::round(val);
      x[v.id] = std::clamp(val, v.lower, v.upper);
    }
  }

  const std::size_t n = view.num_assets(), nk = std::size_t(view.max_cycles);
  const int h = view.horizon;
  std::vector<NestedUncertaintySet> sets;
  for (std::size_t i = 0; i < n; ++i) {
    for (int t = 1; t <= h; ++t) sets.push_back(nested_set(view, i, t));
  }
  const auto set_at = [&](std::size_t i, int t) -> const NestedUncertaintySet& {
    return sets[i * std::size_t(h) + std::size_t(t - 1)];
  };

  // l' feeds omega, omega feeds omega', omega' feeds later worst cases.
  for (int pass = 0; pass < 4 * h + 4; ++pass) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (int t = 1; t <= h; ++t) {
        for (std::size_t k = 0; k < nk; ++k) {
          const auto coeffs = term_coefficients(view, cat, set_at(i, t), k, x);
          const double need = cycle_initial_level(view, i, k) + inner_worst_case(set_at(i, t), coeffs).value;
          double& lp = x[cat.lp_at(i, t, k)];
          if (lp < need) {
            lp = need;
            changed = true;
          }
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double lam = view.assets[i].failure_threshold;
      for (int t = 1; t <= h; ++t) {
        double need = lam * x[cat.uf_at(i, t)];
        for (std::size_t k = 0; k < nk; ++k) {
          need = std::max(need, x[cat.lp_at(i, t, k)] - lam * x[cat.z_at(i, t, k)]);
        }
        double& om = x[cat.omega_at(i, t)];
        if (om < need) {
          om = need;
          changed = true;
        }
      }
    }
    if (models_mdi(robust.built.policy)) {
      for (std::size_t e = 0; e < view.edges.size(); ++e) {
        const std::size_t j = view.edge_source(e), i = view.edge_target(e);
        const double lam = view.assets[j].failure_threshold;
        for (int t = 1; t <= h; ++t) {
          for (std::size_t k = 0; k < nk; ++k) {
            const double need = x[cat.omega_at(j, t)] - lam * x[cat.z_at(i, t, k)] - lam * x[cat.uf_at(i, t)];
            double& op = x[cat.omegap_at(e, t, k)];
            if (op < need) {
              op = need;
              changed = true;
            }
          }
        }
      }
    }
    if (!changed) break;
  }

  for (const DualBlock& b : robust.blocks) {
    const NestedUncertaintySet& set = set_at(b.asset, b.t);
    const WorstCase wc = inner_worst_case(set, term_coefficients(view, cat, set, b.cycle, x));
    x[b.pi_budget] = wc.pi_budget;
    for (std::size_t m = 0; m < set.terms.size(); ++m) {
      x[b.pi_upper[m]] = wc.pi_upper[m];
      x[b.pi_lower[m]] = wc.pi_lower[m];
    }
  }
  return x;
}

AccelerateResult accelerate_solve(const FleetSpec& spec, PolicyKind policy, const AccelerateOptions& options,
                                  const SolverFn& solver) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto remaining = [&] {
    return options.time_limit - std::chrono::duration<double>(Clock::now() - start).count();
  };

  AccelerateResult result;
  RobustModel robust = build_robust(spec, policy);

  std::optional<std::vector<double>> warm;
  if (options.use_warm_start) {
    const BuiltModel conservative = build_multi_cycle(ultra_conservative_spec(spec), policy);
    MilpOptions step1;
    step1.gap_tol = options.gap_tol;
    step1.time_limit = remaining();
    step1.seed = options.seed;
    result.conservative = solver(conservative.model, step1);
    if (result.conservative.has_solution()) {
      std::vector<double> lifted = lift_to_robust(robust, conservative.model, result.conservative.values);
      const auto issues = robust.built.model.check_feasibility(lifted);
      if (issues.empty()) {
        result.warm_start_feasible = true;
        result.warm_start_objective = robust.built.model.objective_value(lifted);
        warm = std::move(lifted);
      } else {
        result.warm_start_issue = issues.front().what;
      }
    } else {
      result.warm_start_issue = "conservative solve returned " + std::string(to_string(result.conservative.status));
    }
  }

  MilpModel with_cuts = robust.built.model;
  for (ScenarioCut& cut : extreme_scenario_cuts(robust, options.n_cuts, options.seed)) {
    with_cuts.add_constraint(std::move(cut.row.terms), cut.row.sense, cut.row.rhs, std::move(cut.row.tag));
    ++result.cuts_added;
  }

  MilpOptions step3;
  step3.gap_tol = options.gap_tol;
  step3.time_limit = std::max(0.0, remaining());
  step3.seed = options.seed;
  step3.warm_start = std::move(warm);
  result.solution = solver(with_cuts, step3);
  return result;
}

}  // namespace fleetcbm
