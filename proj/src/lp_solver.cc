#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fleetcbm/milp_solver.hpp"
#include "simplex.hpp"

namespace fleetcbm::detail {
namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kResidualTol = 1e-7;
constexpr std::size_t kRefactorInterval = 100;

}  // namespace

DualSimplex::DualSimplex(const MilpModel& model) : n_(model.num_variables()), m_(model.num_constraints()) {
  const auto& vars = model.variables();
  const auto& rows = model.constraints();

  std::vector<int> count(n_, 0);
  row_start_.assign(m_ + 1, 0);
  for (std::size_t i = 0; i < m_; ++i) {
    for (const Term& t : rows[i].terms) ++count[t.var];
    row_start_[i + 1] = row_start_[i] + static_cast<int>(rows[i].terms.size());
  }
  col_start_.assign(n_ + 1, 0);
  for (std::size_t j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + count[j];
  col_row_.resize(static_cast<std::size_t>(col_start_[n_]));
  col_val_.resize(col_row_.size());
  row_col_.resize(col_row_.size());
  row_val_.resize(col_row_.size());
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (std::size_t i = 0; i < m_; ++i) {
    int k = row_start_[i];
    for (const Term& t : rows[i].terms) {
      row_col_[std::size_t(k)] = static_cast<int>(t.var);
      row_val_[std::size_t(k)] = t.coeff;
      ++k;
      const int slot = fill[t.var]++;
      col_row_[std::size_t(slot)] = static_cast<int>(i);
      col_val_[std::size_t(slot)] = t.coeff;
    }
  }

  root_lb_.resize(n_ + m_);
  root_ub_.resize(n_ + m_);
  cost_.assign(n_ + m_, 0.0);
  for (const Variable& v : vars) {
    if (!std::isfinite(v.lower) || !std::isfinite(v.upper)) {
      throw std::invalid_argument("variable '" + v.name + "' has an infinite bound");
    }
    root_lb_[v.id] = v.lower;
    root_ub_[v.id] = v.upper;
    cost_[v.id] = v.obj_coeff;
  }
  // Logical bounds: the row range intersected with the activity range implied
  // by the structural bounds, widened so it is never empty.
  for (std::size_t i = 0; i < m_; ++i) {
    double amin = 0.0, amax = 0.0;
    for (const Term& t : rows[i].terms) {
      const double a = t.coeff * vars[t.var].lower, b = t.coeff * vars[t.var].upper;
      amin += std::min(a, b);
      amax += std::max(a, b);
    }
    const double pad_lo = 1.0 + 1e-6 * std::abs(amin), pad_hi = 1.0 + 1e-6 * std::abs(amax);
    const double rhs = rows[i].rhs;
    double lo = 0.0, hi = 0.0;
    switch (rows[i].sense) {
      case Sense::kLessEqual: lo = std::min(amin - pad_lo, rhs); hi = rhs; break;
      case Sense::kGreaterEqual: lo = rhs; hi = std::max(amax + pad_hi, rhs); break;
      case Sense::kEqual: lo = hi = rhs; break;
    }
    root_lb_[n_ + i] = lo;
    root_ub_[n_ + i] = hi;
  }
  lb_ = root_lb_;
  ub_ = root_ub_;
  row_scratch_.assign(n_ + m_, 0.0);
}

void DualSimplex::set_bounds(std::size_t j, double lower, double upper) {
  lb_[j] = lower;
  ub_[j] = upper;
}

void DualSimplex::reset_bounds() {
  lb_ = root_lb_;
  ub_ = root_ub_;
}

void DualSimplex::add_column(std::size_t j, double scale, std::vector<double>& v) const {
  if (j < n_) {
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) v[std::size_t(col_row_[std::size_t(k)])] += scale * col_val_[std::size_t(k)];
  } else {
    v[j - n_] -= scale;
  }
}

bool DualSimplex::refactor() {
  etas_.clear();
  slack_basis_ = true;
  for (std::size_t p = 0; p < m_; ++p) {
    if (head_[p] != static_cast<int>(n_ + p)) {
      slack_basis_ = false;
      break;
    }
  }
  if (slack_basis_) return true;
  bump_row_.assign(m_, -1);
  logical_pos_.assign(m_, -1);
  bump_rows_.clear();
  bump_pos_.clear();
  bump_col_.clear();
  for (std::size_t p = 0; p < m_; ++p) {
    const std::size_t j = std::size_t(head_[p]);
    if (j >= n_) logical_pos_[j - n_] = static_cast<int>(p);
    else {
      bump_pos_.push_back(static_cast<int>(p));
      bump_col_.push_back(static_cast<int>(j));
    }
  }
  for (std::size_t i = 0; i < m_; ++i) {
    if (logical_pos_[i] < 0) {
      bump_row_[i] = static_cast<int>(bump_rows_.size());
      bump_rows_.push_back(static_cast<int>(i));
    }
  }
  const auto k = static_cast<Eigen::Index>(bump_pos_.size());
  if (static_cast<std::size_t>(k) != bump_rows_.size()) return false;
  bump_buf_.resize(k);
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index c = 0; c < k; ++c) {
    const std::size_t j = std::size_t(bump_col_[std::size_t(c)]);
    for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
      const int br = bump_row_[std::size_t(col_row_[std::size_t(e)])];
      if (br >= 0) trip.emplace_back(br, static_cast<int>(c), col_val_[std::size_t(e)]);
    }
  }
  Eigen::SparseMatrix<double> b(k, k);
  b.setFromTriplets(trip.begin(), trip.end());
  b.makeCompressed();
  lu_.compute(b);
  return lu_.info() == Eigen::Success;
}

void DualSimplex::ftran(std::vector<double>& v) const {
  if (slack_basis_) {
    for (double& x : v) x = -x;
  } else {
    // v is indexed by row on entry and by basis position on exit.
    const std::size_t k = bump_rows_.size();
    bool any = false;
    for (std::size_t c = 0; c < k; ++c) {
      bump_buf_[Eigen::Index(c)] = v[std::size_t(bump_rows_[c])];
      any = any || bump_buf_[Eigen::Index(c)] != 0.0;
    }
    if (any) {
      Eigen::VectorXd sol = lu_.solve(bump_buf_);
      bump_buf_.swap(sol);
    }
    std::vector<double>& out = row_work_;
    out.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (logical_pos_[i] >= 0) out[std::size_t(logical_pos_[i])] = -v[i];
    }
    if (any) {
      for (std::size_t c = 0; c < k; ++c) {
        const double xs = bump_buf_[Eigen::Index(c)];
        const std::size_t p = std::size_t(bump_pos_[c]);
        out[p] = xs;
        if (xs == 0.0) continue;
        const std::size_t j = std::size_t(bump_col_[c]);
        for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
          const int lp = logical_pos_[std::size_t(col_row_[std::size_t(e)])];
          if (lp >= 0) out[std::size_t(lp)] += col_val_[std::size_t(e)] * xs;
        }
      }
    }
    v.swap(out);
  }
  for (const Eta& e : etas_) {
    const double xr = v[std::size_t(e.row)];
    if (xr == 0.0) continue;
    v[std::size_t(e.row)] = xr * e.pivot;
    for (const auto& [i, eta] : e.entries) v[std::size_t(i)] += eta * xr;
  }
}

void DualSimplex::btran(std::vector<double>& v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[std::size_t(it->row)] * it->pivot;
    for (const auto& [i, eta] : it->entries) s += eta * v[std::size_t(i)];
    v[std::size_t(it->row)] = s;
  }
  if (slack_basis_) {
    for (double& x : v) x = -x;
  } else {
    // v is indexed by basis position on entry and by row on exit.
    const std::size_t k = bump_rows_.size();
    std::vector<double>& out = row_work_;
    out.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (logical_pos_[i] >= 0) out[i] = -v[std::size_t(logical_pos_[i])];
    }
    bool any = false;
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t p = std::size_t(bump_pos_[c]);
      const std::size_t j = std::size_t(bump_col_[c]);
      double s = v[p];
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        const std::size_t i = std::size_t(col_row_[std::size_t(e)]);
        if (logical_pos_[i] >= 0) s -= col_val_[std::size_t(e)] * out[i];
      }
      bump_buf_[Eigen::Index(c)] = s;
      any = any || s != 0.0;
    }
    if (any) {
      Eigen::VectorXd sol = lu_.transpose().solve(bump_buf_);
      bump_buf_.swap(sol);
      for (std::size_t c = 0; c < k; ++c) out[std::size_t(bump_rows_[c])] = bump_buf_[Eigen::Index(c)];
    }
    v.swap(out);
  }
}

void DualSimplex::compute_primal() {
  std::vector<double> rhs(m_, 0.0);
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (status_[j] == VarStatus::kBasic) continue;
    x_[j] = status_[j] == VarStatus::kLower ? lb_[j] : ub_[j];
    if (x_[j] != 0.0) add_column(j, -x_[j], rhs);
  }
  ftran(rhs);
  for (std::size_t p = 0; p < m_; ++p) x_[std::size_t(head_[p])] = rhs[p];
}

void DualSimplex::compute_duals() {
  std::vector<double> y(m_);
  for (std::size_t p = 0; p < m_; ++p) y[p] = work_cost_[std::size_t(head_[p])];
  btran(y);
  for (std::size_t j = 0; j < n_; ++j) {
    if (status_[j] == VarStatus::kBasic) {
      d_[j] = 0.0;
      continue;
    }
    double s = work_cost_[j];
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) s -= y[std::size_t(col_row_[std::size_t(k)])] * col_val_[std::size_t(k)];
    d_[j] = s;
  }
  for (std::size_t i = 0; i < m_; ++i) d_[n_ + i] = status_[n_ + i] == VarStatus::kBasic ? 0.0 : y[i];
}

void DualSimplex::flip_to_dual_feasible() {
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (status_[j] == VarStatus::kBasic) continue;
    if (status_[j] == VarStatus::kLower && d_[j] < -kDualTol) status_[j] = VarStatus::kUpper;
    else if (status_[j] == VarStatus::kUpper && d_[j] > kDualTol) status_[j] = VarStatus::kLower;
  }
}

void DualSimplex::install_basis(const Basis* start) {
  status_.assign(n_ + m_, VarStatus::kLower);
  bool ok = start && start->status.size() == n_ + m_;
  if (ok) {
    status_ = start->status;
    std::size_t basic = 0;
    for (VarStatus s : status_) basic += s == VarStatus::kBasic;
    ok = basic == m_;
  }
  if (!ok) {
    for (std::size_t j = 0; j < n_; ++j) status_[j] = cost_[j] >= 0.0 ? VarStatus::kLower : VarStatus::kUpper;
    for (std::size_t i = 0; i < m_; ++i) status_[n_ + i] = VarStatus::kBasic;
  }
  head_.clear();
  position_.assign(n_ + m_, -1);
  // Logicals first in their own rows keeps the slack basis recognizable.
  head_.assign(m_, -1);
  std::vector<int> rest;
  for (std::size_t i = 0; i < m_; ++i) {
    if (status_[n_ + i] == VarStatus::kBasic) head_[i] = static_cast<int>(n_ + i);
  }
  for (std::size_t j = 0; j < n_; ++j) {
    if (status_[j] == VarStatus::kBasic) rest.push_back(static_cast<int>(j));
  }
  std::size_t next = 0;
  for (std::size_t p = 0; p < m_; ++p) {
    if (head_[p] < 0) head_[p] = rest[next++];
  }
  for (std::size_t p = 0; p < m_; ++p) position_[std::size_t(head_[p])] = static_cast<int>(p);
}

void DualSimplex::perturb_costs() {
  work_cost_ = cost_;
  perturb_bound_ = 0.0;
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  for (std::size_t j = 0; j < n_; ++j) {
    if (ub_[j] <= lb_[j]) continue;
    const double xi = 1e-7 * (1.0 + std::abs(cost_[j])) * u(rng);
    work_cost_[j] += status_[j] == VarStatus::kUpper ? -xi : xi;
    perturb_bound_ += xi * std::max(std::abs(lb_[j]), std::abs(ub_[j]));
  }
}

double DualSimplex::current_objective() const {
  double s = 0.0;
  for (std::size_t j = 0; j < n_; ++j) s += cost_[j] * x_[j];
  return s;
}

double DualSimplex::max_row_residual() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < m_; ++i) {
    double a = 0.0;
    for (int k = row_start_[i]; k < row_start_[i + 1]; ++k) a += row_val_[std::size_t(k)] * x_[std::size_t(row_col_[std::size_t(k)])];
    const double lo = lb_[n_ + i], hi = ub_[n_ + i];
    worst = std::max({worst, lo - a, a - hi});
  }
  for (std::size_t j = 0; j < n_; ++j) worst = std::max({worst, lb_[j] - x_[j], x_[j] - ub_[j]});
  return worst;
}

LpStatus DualSimplex::iterate(double cutoff, std::chrono::steady_clock::time_point deadline, bool& restart) {
  restart = false;
  const std::size_t total = n_ + m_;
  std::vector<double> rho(m_), col(m_), tau(m_), flip(m_);
  struct Candidate {
    std::size_t j;
    double ratio;
    double alpha;  // signed pivot-row entry times s
  };
  std::vector<Candidate> cand;
  std::int64_t local = 0;
  const std::int64_t cap = 50 * static_cast<std::int64_t>(total) + 10000;

  while (true) {
    if (++local > cap) return LpStatus::kUnstable;
    if ((local & 31) == 0 && std::chrono::steady_clock::now() > deadline) return LpStatus::kTimeLimit;
    if (etas_.size() >= kRefactorInterval) {
      if (!refactor()) return LpStatus::kUnstable;
      compute_duals();
      flip_to_dual_feasible();
      compute_primal();
    }
    if ((local & 7) == 0 && std::isfinite(cutoff)) {
      double obj = 0.0;
      for (std::size_t j = 0; j < n_; ++j) obj += work_cost_[j] * x_[j];
      if (obj - perturb_bound_ >= cutoff) return LpStatus::kCutoff;
    }

    // Leaving row: dual steepest edge pricing.
    std::size_t r = m_;
    double best = 0.0;
    for (std::size_t p = 0; p < m_; ++p) {
      const std::size_t j = std::size_t(head_[p]);
      const double v = x_[j];
      double infeas = 0.0;
      if (v < lb_[j] - kPrimalTol) infeas = lb_[j] - v;
      else if (v > ub_[j] + kPrimalTol) infeas = v - ub_[j];
      if (infeas > 0.0) {
        const double score = infeas * infeas / dse_[p];
        if (score > best) {
          best = score;
          r = p;
        }
      }
    }
    if (r == m_) return LpStatus::kOptimal;
    ++iterations_;

    const std::size_t leave = std::size_t(head_[r]);
    const double s = x_[leave] < lb_[leave] ? 1.0 : -1.0;
    const double delta = s > 0 ? lb_[leave] - x_[leave] : x_[leave] - ub_[leave];

    std::fill(rho.begin(), rho.end(), 0.0);
    rho[r] = 1.0;
    btran(rho);

    // Pivot row over nonbasic columns.
    for (int j : touched_) row_scratch_[std::size_t(j)] = 0.0;
    touched_.clear();
    double rho_norm2 = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double ri = rho[i];
      if (ri == 0.0) continue;
      rho_norm2 += ri * ri;
      if (std::abs(ri) < 1e-14) continue;
      for (int k = row_start_[i]; k < row_start_[i + 1]; ++k) {
        const std::size_t j = std::size_t(row_col_[std::size_t(k)]);
        if (row_scratch_[j] == 0.0) touched_.push_back(static_cast<int>(j));
        row_scratch_[j] += ri * row_val_[std::size_t(k)];
        if (row_scratch_[j] == 0.0) row_scratch_[j] = 1e-300;
      }
      const std::size_t lj = n_ + i;
      if (row_scratch_[lj] == 0.0) touched_.push_back(static_cast<int>(lj));
      row_scratch_[lj] -= ri;
    }
    double alpha_max = 0.0;
    for (int jj : touched_) {
      const std::size_t j = std::size_t(jj);
      if (status_[j] != VarStatus::kBasic) alpha_max = std::max(alpha_max, std::abs(row_scratch_[j]));
    }
    const double piv_tol = std::max(kPivotTol, 1e-9 * alpha_max);

    cand.clear();
    for (int jj : touched_) {
      const std::size_t j = std::size_t(jj);
      if (status_[j] == VarStatus::kBasic || ub_[j] <= lb_[j]) continue;
      const double a = s * row_scratch_[j];
      if (status_[j] == VarStatus::kLower && a < -piv_tol) {
        cand.push_back({j, std::max(d_[j], 0.0) / -a, a});
      } else if (status_[j] == VarStatus::kUpper && a > piv_tol) {
        cand.push_back({j, std::max(-d_[j], 0.0) / a, a});
      }
    }
    if (cand.empty()) return LpStatus::kInfeasible;
    std::sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) {
      return x.ratio < y.ratio || (x.ratio == y.ratio && x.j < y.j);
    });

    // Bound-flipping ratio test.
    double slope = delta;
    std::size_t idx = 0;
    std::size_t chosen = cand.size();
    std::vector<std::size_t> flips;
    while (idx < cand.size()) {
      const double limit = cand[idx].ratio + 1e-12 + kDualTol / std::abs(cand[idx].alpha);
      std::size_t end = idx;
      double group_slope = 0.0;
      std::size_t big = idx;
      while (end < cand.size() && cand[end].ratio <= limit) {
        group_slope += std::abs(cand[end].alpha) * (ub_[cand[end].j] - lb_[cand[end].j]);
        if (std::abs(cand[end].alpha) > std::abs(cand[big].alpha)) big = end;
        ++end;
      }
      if (slope - group_slope > 0.0 && end < cand.size()) {
        for (std::size_t k = idx; k < end; ++k) flips.push_back(k);
        slope -= group_slope;
        idx = end;
        continue;
      }
      if (slope - group_slope > 0.0) return LpStatus::kInfeasible;
      chosen = big;
      break;
    }
    const Candidate enter = cand[chosen];
    const std::size_t q = enter.j;
    const double t = enter.ratio;

    // Entering column.
    std::fill(col.begin(), col.end(), 0.0);
    add_column(q, 1.0, col);
    ftran(col);
    const double alpha_rq = col[r];
    const double alpha_row = row_scratch_[q];
    if (std::abs(alpha_rq) < 1e-11 ||
        std::abs(alpha_rq - alpha_row) > 1e-7 * (1.0 + std::abs(alpha_rq))) {
      if (!refactor()) return LpStatus::kUnstable;
      compute_duals();
      flip_to_dual_feasible();
      compute_primal();
      restart = true;
      return LpStatus::kOptimal;  // caller re-enters the loop
    }

    // Dual update.
    for (int jj : touched_) {
      const std::size_t j = std::size_t(jj);
      if (status_[j] == VarStatus::kBasic) continue;
      d_[j] += s * t * row_scratch_[j];
    }
    d_[q] = 0.0;
    d_[leave] = s * t;

    // Bound flips.
    if (!flips.empty()) {
      std::fill(flip.begin(), flip.end(), 0.0);
      for (std::size_t k : flips) {
        const std::size_t j = cand[k].j;
        if (j == q) continue;
        const bool to_upper = status_[j] == VarStatus::kLower;
        const double change = to_upper ? ub_[j] - lb_[j] : lb_[j] - ub_[j];
        status_[j] = to_upper ? VarStatus::kUpper : VarStatus::kLower;
        x_[j] = to_upper ? ub_[j] : lb_[j];
        add_column(j, change, flip);
      }
      ftran(flip);
      for (std::size_t p = 0; p < m_; ++p) x_[std::size_t(head_[p])] -= flip[p];
    }
    for (int jj : touched_) {
      const std::size_t j = std::size_t(jj);
      if (status_[j] == VarStatus::kLower && d_[j] < 0.0 && d_[j] > -kDualTol) d_[j] = 0.0;
      if (status_[j] == VarStatus::kUpper && d_[j] > 0.0 && d_[j] < kDualTol) d_[j] = 0.0;
    }

    // Primal step.
    const double target = s > 0 ? lb_[leave] : ub_[leave];
    const double theta = (x_[leave] - target) / alpha_rq;
    for (std::size_t p = 0; p < m_; ++p) {
      if (col[p] != 0.0) x_[std::size_t(head_[p])] -= theta * col[p];
    }
    x_[q] += theta;
    x_[leave] = target;

    // Dual steepest edge weights.
    tau = rho;
    ftran(tau);
    const double w_r = rho_norm2;
    for (std::size_t p = 0; p < m_; ++p) {
      if (p == r || col[p] == 0.0) continue;
      const double kappa = col[p] / alpha_rq;
      dse_[p] = std::max(dse_[p] - 2.0 * kappa * tau[p] + kappa * kappa * w_r, 1e-10);
    }
    dse_[r] = std::max(w_r / (alpha_rq * alpha_rq), 1e-10);

    // Basis change.
    Eta eta;
    eta.row = static_cast<int>(r);
    eta.pivot = 1.0 / alpha_rq;
    for (std::size_t p = 0; p < m_; ++p) {
      if (p != r && std::abs(col[p]) > 1e-14) eta.entries.emplace_back(static_cast<int>(p), -col[p] / alpha_rq);
    }
    etas_.push_back(std::move(eta));
    status_[leave] = s > 0 ? VarStatus::kLower : VarStatus::kUpper;
    position_[leave] = -1;
    status_[q] = VarStatus::kBasic;
    position_[q] = static_cast<int>(r);
    head_[r] = static_cast<int>(q);
  }
}

LpStatus DualSimplex::solve(const Basis* start, double cutoff, std::chrono::steady_clock::time_point deadline) {
  x_.assign(n_ + m_, 0.0);
  d_.assign(n_ + m_, 0.0);
  install_basis(start);
  if (!refactor()) {
    install_basis(nullptr);
    refactor();
  }
  dse_.assign(m_, 1.0);
  perturb_costs();
  compute_duals();
  flip_to_dual_feasible();
  compute_primal();

  bool perturbed = true;
  int infeasible_claims = 0;
  int residual_retries = 0;
  int restarts = 0;
  while (true) {
    bool restart = false;
    const LpStatus st = iterate(perturbed ? cutoff : cutoff, deadline, restart);
    if (restart) {
      if (++restarts > 200) return LpStatus::kUnstable;
      continue;
    }
    if (st == LpStatus::kTimeLimit || st == LpStatus::kUnstable) return st;
    if (st == LpStatus::kCutoff) {
      objective_ = current_objective();
      return st;
    }
    if (st == LpStatus::kInfeasible) {
      if (++infeasible_claims > 2) return st;
      if (!refactor()) return LpStatus::kUnstable;
      compute_duals();
      flip_to_dual_feasible();
      compute_primal();
      continue;
    }
    // Optimal for the working costs.
    if (perturbed) {
      perturbed = false;
      work_cost_ = cost_;
      perturb_bound_ = 0.0;
      compute_duals();
      flip_to_dual_feasible();
      compute_primal();
      continue;
    }
    if (max_row_residual() > kResidualTol) {
      if (++residual_retries > 3) return LpStatus::kUnstable;
      if (!refactor()) return LpStatus::kUnstable;
      compute_duals();
      flip_to_dual_feasible();
      compute_primal();
      continue;
    }
    objective_ = current_objective();
    return LpStatus::kOptimal;
  }
}

}  // namespace fleetcbm::detail

namespace fleetcbm {

MilpSolution solve_lp(const MilpModel& model, double time_limit) {
  MilpSolution sol;
  if (model.num_variables() == 0) throw std::invalid_argument("solve_lp: model has no variables");
  detail::DualSimplex lp(model);
  const auto deadline = std::isfinite(time_limit)
                            ? std::chrono::steady_clock::now() +
                                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                      std::chrono::duration<double>(time_limit))
                            : std::chrono::steady_clock::time_point::max();
  const detail::LpStatus st = lp.solve(nullptr, std::numeric_limits<double>::infinity(), deadline);
  sol.lp_iterations = lp.iterations();
  switch (st) {
    case detail::LpStatus::kOptimal:
      sol.status = SolveStatus::kOptimal;
      sol.values.assign(lp.primal().begin(), lp.primal().begin() + static_cast<std::ptrdiff_t>(model.num_variables()));
      sol.objective = lp.objective();
      sol.bound = sol.objective;
      break;
    case detail::LpStatus::kInfeasible: sol.status = SolveStatus::kInfeasible; break;
    case detail::LpStatus::kTimeLimit: sol.status = SolveStatus::kTimeLimit; break;
    default: sol.status = SolveStatus::kNumericallyUnstable; break;
  }
  return sol;
}

}  // namespace fleetcbm
