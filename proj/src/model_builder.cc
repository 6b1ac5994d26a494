#include "fleetcbm/model_builder.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fleetcbm {
namespace {

std::string idx(std::initializer_list<std::pair<const char*, std::size_t>> parts) {
  std::string s = "[";
  bool first = true;
  for (const auto& [key, value] : parts) {
    if (!first) s += ',';
    first = false;
    s += key;
    s += '=';
    s += std::to_string(value);
  }
  s += ']';
  return s;
}

std::string it_name(const char* base, std::size_t i, int t) {
  return base + idx({{"i", i + 1}, {"t", std::size_t(t)}});
}

std::string itk_name(const char* base, std::size_t i, int t, std::size_t k) {
  return base + idx({{"i", i + 1}, {"t", std::size_t(t)}, {"k", k + 1}});
}

double at_t(const std::vector<double>& series, int t) { return series[static_cast<std::size_t>(t - 1)]; }

// Variables and rows shared by both formulations.
struct Common {
  const FleetSpec& spec;
  MilpModel& model;
  VariableCatalogue& cat;
  std::size_t n;
  int h;

  void add_operational_variables(bool with_level) {
    cat.mp = IdGrid({n, std::size_t(h)});
    cat.mc = IdGrid({n, std::size_t(h)});
    cat.u = IdGrid({n, std::size_t(h)});
    cat.um = IdGrid({n, std::size_t(h)});
    cat.uf = IdGrid({n, std::size_t(h)});
    cat.p = IdGrid({n, std::size_t(h)});
    cat.omega = IdGrid({n, std::size_t(h)});
    if (with_level) cat.l = IdGrid({n, std::size_t(h)});
    cat.psi = IdGrid({std::size_t(h)});

    const int last_pm = last_start(spec, spec.pm_duration);
    const int last_cm = last_start(spec, spec.cm_duration);
    for (std::size_t i = 0; i < n; ++i) {
      const AssetSpec& a = spec.assets[i];
      for (int t = 1; t <= h; ++t) {
        const std::size_t ti = std::size_t(t - 1);
        cat.mp.at({i, ti}) = model.add_variable(it_name("mp", i, t), VarKind::kBinary, 0.0,
                                                t <= last_pm ? 1.0 : 0.0, spec.pm_cost);
        cat.mc.at({i, ti}) = model.add_variable(it_name("mc", i, t), VarKind::kBinary, 0.0,
                                                t <= last_cm ? 1.0 : 0.0, spec.cm_cost);
        cat.u.at({i, ti}) = model.add_variable(it_name("u", i, t), VarKind::kBinary, 0.0, 1.0);
        cat.um.at({i, ti}) = model.add_variable(it_name("um", i, t), VarKind::kBinary, 0.0, 1.0);
        cat.uf.at({i, ti}) = model.add_variable(it_name("uf", i, t), VarKind::kBinary, 0.0, 1.0,
                                                t == h ? spec.cm_cost : 0.0);
        cat.p.at({i, ti}) = model.add_variable(it_name("p", i, t), VarKind::kContinuous, 0.0,
                                               a.production_capacity, at_t(a.production_cost, t));
        if (with_level) {
          cat.l.at({i, ti}) = model.add_variable(it_name("l", i, t), VarKind::kContinuous, 0.0, a.failure_threshold);
        }
        cat.omega.at({i, ti}) =
            model.add_variable(it_name("omega", i, t), VarKind::kContinuous, 0.0, a.failure_threshold);
      }
    }
    for (int t = 1; t <= h; ++t) {
      cat.psi.at({std::size_t(t - 1)}) = model.add_variable("psi" + idx({{"t", std::size_t(t)}}),
                                                            VarKind::kContinuous, 0.0,
                                                            std::max(0.0, at_t(spec.demand, t)), spec.unmet_penalty);
    }
  }

  // Per-period operating rows; the level rows only exist in the
  // single-maintenance model.
  void add_operational_rows() {
    for (std::size_t i = 0; i < n; ++i) {
      const AssetSpec& a = spec.assets[i];
      for (int t = 1; t <= h; ++t) {
        const std::size_t u = cat.u_at(i, t), um = cat.um_at(i, t), uf = cat.uf_at(i, t);
        model.add_constraint({{u, 1.0}, {um, -1.0}, {uf, -1.0}}, Sense::kEqual, 0.0, it_name("avail", i, t));
        if (!cat.l.empty()) {
          model.add_constraint({{cat.omega_at(i, t), 1.0}, {cat.l_at(i, t), -1.0}}, Sense::kGreaterEqual, 0.0,
                               it_name("omega-level", i, t));
        }
        model.add_constraint({{cat.omega_at(i, t), 1.0}, {uf, -a.failure_threshold}}, Sense::kGreaterEqual, 0.0,
                             it_name("omega-fail", i, t));

        std::vector<Term> window{{um, 1.0}};
        for (int tau = std::max(1, t - spec.pm_duration + 1); tau <= t; ++tau) window.push_back({cat.mp_at(i, tau), -1.0});
        for (int tau = std::max(1, t - spec.cm_duration + 1); tau <= t; ++tau) window.push_back({cat.mc_at(i, tau), -1.0});
        model.add_constraint(std::move(window), Sense::kEqual, 0.0, it_name("maint-window", i, t));

        model.add_constraint({{cat.mp_at(i, t), 1.0}, {uf, 1.0}}, Sense::kLessEqual, 1.0, it_name("pm-excl", i, t));
        if (t >= 2) {
          model.add_constraint({{cat.uf_at(i, t - 1), 1.0}, {uf, -1.0}, {cat.mc_at(i, t), -1.0}}, Sense::kLessEqual,
                               0.0, it_name("cm-trigger", i, t));
        }
        model.add_constraint({{cat.p_at(i, t), 1.0}, {u, a.production_capacity}}, Sense::kLessEqual,
                             a.production_capacity, it_name("prod-cap", i, t));
      }
    }
    for (int t = 1; t <= h; ++t) {
      std::vector<Term> crew, demand;
      for (std::size_t i = 0; i < n; ++i) {
        crew.push_back({cat.um_at(i, t), 1.0});
        demand.push_back({cat.p_at(i, t), 1.0});
      }
      demand.push_back({cat.psi_at(t), 1.0});
      model.add_constraint(std::move(crew), Sense::kLessEqual, spec.crew_capacity,
                           "crew" + idx({{"t", std::size_t(t)}}));
      model.add_constraint(std::move(demand), Sense::kGreaterEqual, at_t(spec.demand, t),
                           "demand" + idx({{"t", std::size_t(t)}}));
    }
  }
};

void require_valid(const FleetSpec& spec) {
  auto v = validate(spec);
  if (!v.empty()) {
    throw std::invalid_argument("invalid fleet spec: " + v.front().field + ": " + v.front().rule);
  }
}

VariableCatalogue empty_catalogue(const FleetSpec& spec, int cycles) {
  VariableCatalogue cat;
  cat.num_assets = spec.num_assets();
  cat.horizon = spec.horizon;
  cat.cycles = cycles;
  cat.num_edges = spec.edges.size();
  return cat;
}

}  // namespace

std::string_view to_string(PolicyKind policy) {
  switch (policy) {
    case PolicyKind::kBase: return "base";
    case PolicyKind::kOid: return "oid";
    case PolicyKind::kMdi: return "mdi";
    case PolicyKind::kComprehensive: return "comprehensive";
  }
  return "unknown";
}

PolicyKind parse_policy(std::string_view text) {
  if (text == "base") return PolicyKind::kBase;
  if (text == "oid") return PolicyKind::kOid;
  if (text == "mdi") return PolicyKind::kMdi;
  if (text == "comprehensive") return PolicyKind::kComprehensive;
  throw std::invalid_argument("unknown policy '" + std::string(text) + "'");
}

FleetSpec policy_view(FleetSpec spec, PolicyKind policy) {
  if (!models_oid(policy)) {
    for (AssetUncertainty& u : spec.uncertainty.assets) {
      std::fill(u.zeta_bar.begin(), u.zeta_bar.end(), 0.0);
      std::fill(u.zeta_hat.begin(), u.zeta_hat.end(), 0.0);
    }
  }
  if (!models_mdi(policy)) {
    for (InteractionEdge& e : spec.edges) {
      std::fill(e.gamma_nominal.begin(), e.gamma_nominal.end(), 0.0);
      std::fill(e.gamma_halfwidth.begin(), e.gamma_halfwidth.end(), 0.0);
    }
  }
  return spec;
}

IdGrid::IdGrid(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  std::size_t total = 1;
  for (std::size_t d : dims_) total *= d;
  ids_.assign(total, kNoVar);
}

std::size_t IdGrid::offset(std::initializer_list<std::size_t> idx) const {
  if (idx.size() != dims_.size()) throw std::out_of_range("IdGrid: wrong index arity");
  std::size_t off = 0;
  std::size_t d = 0;
  for (std::size_t x : idx) {
    if (x >= dims_[d]) throw std::out_of_range("IdGrid: index out of range");
    off = off * dims_[d] + x;
    ++d;
  }
  return off;
}

std::size_t& IdGrid::at(std::initializer_list<std::size_t> idx) { return ids_[offset(idx)]; }
std::size_t IdGrid::at(std::initializer_list<std::size_t> idx) const { return ids_[offset(idx)]; }

double big_m(const FleetSpec& spec, std::size_t asset) {
  const AssetSpec& a = spec.assets.at(asset);
  const AssetUncertainty& u = spec.uncertainty.assets.at(asset);
  const auto in = spec.edges_into(asset);
  double m = a.initial_level;
  for (std::size_t t = 0; t < std::size_t(spec.horizon); ++t) {
    m += u.d_bar[t] + u.d_hat[t] + (u.zeta_bar[t] + u.zeta_hat[t]) * a.production_capacity;
    for (std::size_t e : in) {
      const InteractionEdge& edge = spec.edges[e];
      m += (edge.gamma_nominal[t] + edge.gamma_halfwidth[t]) * spec.assets[spec.edge_source(e)].failure_threshold;
    }
  }
  return m;
}

double cycle_initial_level(const FleetSpec& spec, std::size_t asset, std::size_t k) {
  return k == 0 ? spec.assets.at(asset).initial_level : 0.0;
}

int last_start(const FleetSpec& spec, int duration) { return spec.horizon - duration; }

BuiltModel build_single_maintenance(const FleetSpec& raw, PolicyKind policy) {
  require_valid(raw);
  const FleetSpec spec = policy_view(raw, policy);
  BuiltModel out;
  out.policy = policy;
  out.catalogue = empty_catalogue(spec, 0);
  Common c{spec, out.model, out.catalogue, spec.num_assets(), spec.horizon};
  c.add_operational_variables(true);

  const VariableCatalogue& cat = out.catalogue;
  for (std::size_t i = 0; i < c.n; ++i) {
    const AssetUncertainty& unc = spec.uncertainty.assets[i];
    const auto in = spec.edges_into(i);
    const double m = big_m(raw, i);
    double rhs = spec.assets[i].initial_level;
    std::vector<Term> acc;  // grows with t
    for (int t = 1; t <= c.h; ++t) {
      rhs += at_t(unc.d_bar, t);
      acc.push_back({cat.p_at(i, t), -at_t(unc.zeta_bar, t)});
      for (std::size_t e : in) {
        acc.push_back({cat.omega_at(spec.edge_source(e), t), -at_t(spec.edges[e].gamma_nominal, t)});
      }
      acc.push_back({cat.u_at(i, t), m});
      std::vector<Term> row = acc;
      row.push_back({cat.l_at(i, t), 1.0});
      out.model.add_constraint(std::move(row), Sense::kGreaterEqual, rhs, it_name("deg-cum", i, t));
    }
  }
  c.add_operational_rows();
  return out;
}

BuiltModel build_multi_cycle(const FleetSpec& raw, PolicyKind policy) {
  require_valid(raw);
  const FleetSpec spec = policy_view(raw, policy);
  BuiltModel out;
  out.policy = policy;
  const std::size_t nk = std::size_t(spec.max_cycles);
  out.catalogue = empty_catalogue(spec, spec.max_cycles);
  Common c{spec, out.model, out.catalogue, spec.num_assets(), spec.horizon};
  c.add_operational_variables(false);
  VariableCatalogue& cat = out.catalogue;
  MilpModel& model = out.model;
  const std::size_t n = c.n;
  const int h = c.h;
  const std::size_t hs = std::size_t(h);
  const bool mdi = models_mdi(policy);

  cat.z = IdGrid({n, hs, nk});
  cat.v = IdGrid({n, hs, nk});
  cat.lp = IdGrid({n, hs, nk});
  cat.pp = IdGrid({n, hs, nk});
  cat.v0 = IdGrid({n, nk});
  cat.omegap = IdGrid({spec.edges.size(), hs, nk});
  for (std::size_t i = 0; i < n; ++i) {
    const AssetSpec& a = spec.assets[i];
    for (int t = 1; t <= h; ++t) {
      for (std::size_t k = 0; k < nk; ++k) {
        const std::size_t ti = std::size_t(t - 1);
        cat.z.at({i, ti, k}) = model.add_variable(itk_name("z", i, t, k), VarKind::kBinary, 0.0, 1.0);
        cat.v.at({i, ti, k}) = model.add_variable(itk_name("v", i, t, k), VarKind::kBinary, 0.0, 1.0);
        cat.lp.at({i, ti, k}) =
            model.add_variable(itk_name("lp", i, t, k), VarKind::kContinuous, 0.0, a.failure_threshold);
        cat.pp.at({i, ti, k}) =
            model.add_variable(itk_name("pp", i, t, k), VarKind::kContinuous, 0.0, a.production_capacity);
      }
    }
    for (std::size_t k = 0; k < nk; ++k) {
      cat.v0.at({i, k}) = model.add_variable("v0" + idx({{"i", i + 1}, {"k", k + 1}}), VarKind::kBinary, 0.0, 1.0);
    }
  }
  for (std::size_t e = 0; e < spec.edges.size(); ++e) {
    const std::size_t j = spec.edge_source(e), i = spec.edge_target(e);
    for (int t = 1; t <= h; ++t) {
      for (std::size_t k = 0; k < nk; ++k) {
        cat.omegap.at({e, std::size_t(t - 1), k}) = model.add_variable(
            "omegap" + idx({{"j", j + 1}, {"i", i + 1}, {"t", std::size_t(t)}, {"k", k + 1}}), VarKind::kContinuous,
            0.0, mdi ? spec.assets[j].failure_threshold : 0.0);
      }
    }
  }

  // Cumulative degradation per cycle.
  for (std::size_t i = 0; i < n; ++i) {
    const AssetUncertainty& unc = spec.uncertainty.assets[i];
    const auto in = spec.edges_into(i);
    for (std::size_t k = 0; k < nk; ++k) {
      double rhs = cycle_initial_level(spec, i, k);
      std::vector<Term> acc;
      for (int t = 1; t <= h; ++t) {
        const double d = at_t(unc.d_bar, t);
        rhs += d;
        acc.push_back({cat.z_at(i, t, k), d});
        acc.push_back({cat.uf_at(i, t), d});
        acc.push_back({cat.pp_at(i, t, k), -at_t(unc.zeta_bar, t)});
        for (std::size_t e : in) acc.push_back({cat.omegap_at(e, t, k), -at_t(spec.edges[e].gamma_nominal, t)});
        std::vector<Term> row = acc;
        row.push_back({cat.lp_at(i, t, k), 1.0});
        model.add_constraint(std::move(row), Sense::kGreaterEqual, rhs, itk_name("deg-cum", i, t, k));
      }
    }
  }

  // Links for the OID and MDI products.
  for (std::size_t i = 0; i < n; ++i) {
    const AssetSpec& a = spec.assets[i];
    for (int t = 1; t <= h; ++t) {
      for (std::size_t k = 0; k < nk; ++k) {
        model.add_constraint({{cat.pp_at(i, t, k), 1.0}, {cat.p_at(i, t), -1.0}, {cat.z_at(i, t, k), a.production_capacity}},
                             Sense::kGreaterEqual, 0.0, itk_name("oid-link", i, t, k));
        model.add_constraint({{cat.omega_at(i, t), 1.0}, {cat.lp_at(i, t, k), -1.0}, {cat.z_at(i, t, k), a.failure_threshold}},
                             Sense::kGreaterEqual, 0.0, itk_name("omega-link", i, t, k));
      }
    }
  }
  if (mdi) {
    for (std::size_t e = 0; e < spec.edges.size(); ++e) {
      const std::size_t j = spec.edge_source(e), i = spec.edge_target(e);
      const double lam = spec.assets[j].failure_threshold;
      for (int t = 1; t <= h; ++t) {
        for (std::size_t k = 0; k < nk; ++k) {
          model.add_constraint({{cat.omegap_at(e, t, k), 1.0},
                                {cat.omega_at(j, t), -1.0},
                                {cat.z_at(i, t, k), lam},
                                {cat.uf_at(i, t), lam}},
                               Sense::kGreaterEqual, 0.0,
                               "mdi-link" + idx({{"j", j + 1}, {"i", i + 1}, {"t", std::size_t(t)}, {"k", k + 1}}));
        }
      }
    }
  }

  // Cycle bookkeeping.
  for (std::size_t i = 0; i < n; ++i) {
    for (int t = 1; t <= h; ++t) {
      std::vector<Term> row;
      for (std::size_t k = 0; k < nk; ++k) row.push_back({cat.v_at(i, t, k), 1.0});
      model.add_constraint(std::move(row), Sense::kLessEqual, 1.0, it_name("cycle-start", i, t));
    }
    for (std::size_t k = 1; k < nk; ++k) {
      model.add_constraint({{cat.v0_at(i, k - 1), 1.0}, {cat.v0_at(i, k), -1.0}}, Sense::kLessEqual, 0.0,
                           "cycle-order" + idx({{"i", i + 1}, {"k", k + 1}}));
    }
    for (std::size_t k = 0; k < nk; ++k) {
      std::vector<Term> row{{cat.v0_at(i, k), 1.0}};
      for (int t = 1; t <= h; ++t) row.push_back({cat.v_at(i, t, k), 1.0});
      model.add_constraint(std::move(row), Sense::kEqual, 1.0, "cycle-once" + idx({{"i", i + 1}, {"k", k + 1}}));
    }
    for (int t = 1; t <= h; ++t) {
      for (std::size_t k = 0; k < nk; ++k) {
        model.add_constraint({{cat.v_at(i, t, k), 1.0}, {cat.mp_at(i, t), -1.0}}, Sense::kLessEqual, 0.0,
                             itk_name("cycle-pm", i, t, k));
      }
    }
    for (std::size_t k = 0; k < nk; ++k) {
      std::vector<Term> started;  // sum_{tau<=t} of v_k (minus v_{k-1})
      for (int t = 1; t <= h; ++t) {
        started.push_back({cat.v_at(i, t, k), -1.0});
        if (k > 0) started.push_back({cat.v_at(i, t, k - 1), 1.0});
        std::vector<Term> row = started;
        row.push_back({cat.z_at(i, t, k), 1.0});
        row.push_back({cat.um_at(i, t), -1.0});
        model.add_constraint(std::move(row), Sense::kLessEqual, k == 0 ? 0.0 : 1.0, itk_name("cycle-active", i, t, k));
      }
    }
  }

  c.add_operational_rows();
  return out;
}

ModelCounts single_maintenance_counts(const FleetSpec& spec, PolicyKind) {
  const std::size_t n = spec.num_assets(), h = std::size_t(spec.horizon);
  return {8 * n * h + h, 8 * n * h - n + 2 * h};
}

ModelCounts multi_cycle_counts(const FleetSpec& spec, PolicyKind policy) {
  const std::size_t n = spec.num_assets(), h = std::size_t(spec.horizon), k = std::size_t(spec.max_cycles);
  const std::size_t e = spec.edges.size();
  const std::size_t e_rows = models_mdi(policy) ? e : 0;
  ModelCounts c;
  c.variables = 7 * n * h + h + 4 * n * h * k + n * k + e * h * k;
  c.constraints = 5 * n * h * k + 7 * n * h - n + 2 * h + e_rows * h * k + n * (k - 1) + n * k;
  return c;
}

}  // namespace fleetcbm
