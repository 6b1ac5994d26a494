// Bounded dual simplex over [A | -I] (x, s) = 0 with every variable boxed.
// Internal to the library; solve_lp and solve_milp are the public entry
// points.

#ifndef FLEETCBM_SRC_SIMPLEX_HPP_
#define FLEETCBM_SRC_SIMPLEX_HPP_

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <chrono>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "fleetcbm/milp_model.hpp"

namespace fleetcbm::detail {

enum class VarStatus : std::int8_t { kBasic, kLower, kUpper };

enum class LpStatus { kOptimal, kInfeasible, kCutoff, kTimeLimit, kUnstable };

struct Basis {
  std::vector<VarStatus> status;  // n structurals then m logicals
};

class DualSimplex {
 public:
  explicit DualSimplex(const MilpModel& model);

  std::size_t num_structurals() const { return n_; }
  std::size_t num_rows() const { return m_; }

  // Structural bounds; logical bounds are fixed at construction.
  void set_bounds(std::size_t j, double lower, double upper);
  double lower(std::size_t j) const { return lb_[j]; }
  double upper(std::size_t j) const { return ub_[j]; }
  void reset_bounds();

  // Solves from `start` (or the slack basis). Stops with kCutoff once the
  // objective provably reaches `cutoff`.
  LpStatus solve(const Basis* start, double cutoff, std::chrono::steady_clock::time_point deadline);

  double objective() const { return objective_; }
  const std::vector<double>& primal() const { return x_; }  // size n + m
  Basis basis() const { return Basis{status_}; }
  std::int64_t iterations() const { return iterations_; }

 private:
  struct Eta {
    int row;
    double pivot;  // 1 / alpha_rq
    std::vector<std::pair<int, double>> entries;  // -alpha_iq / alpha_rq, i != row
  };

  bool refactor();
  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;
  void add_column(std::size_t j, double scale, std::vector<double>& v) const;
  void compute_primal();
  void compute_duals();
  void flip_to_dual_feasible();
  void install_basis(const Basis* start);
  void perturb_costs();
  double current_objective() const;
  double max_row_residual() const;
  LpStatus iterate(double cutoff, std::chrono::steady_clock::time_point deadline, bool& restart);

  std::size_t n_ = 0;
  std::size_t m_ = 0;
  // Structural columns (CSC) and rows (CSR).
  std::vector<int> col_start_, col_row_;
  std::vector<double> col_val_;
  std::vector<int> row_start_, row_col_;
  std::vector<double> row_val_;

  std::vector<double> cost_;       // original costs, size n + m
  std::vector<double> work_cost_;  // possibly perturbed
  double perturb_bound_ = 0.0;     // bound on |work_cost - cost|^T |x|
  std::vector<double> root_lb_, root_ub_;
  std::vector<double> lb_, ub_;

  std::vector<VarStatus> status_;
  std::vector<int> head_;      // basic variable per position
  std::vector<int> position_;  // basis position per variable, -1 if nonbasic
  std::vector<double> x_, d_;
  std::vector<double> dse_;

  // B0 is factored through its bump: the rows not covered by basic logicals
  // against the basic structural columns. Logical rows follow by substitution.
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  bool slack_basis_ = true;  // B0 = -I, no factorization needed
  std::vector<int> bump_row_;       // row -> bump index, -1 if covered by a basic logical
  std::vector<int> bump_rows_;      // bump index -> row
  std::vector<int> bump_pos_;       // bump index -> basis position of a structural
  std::vector<int> bump_col_;       // bump index -> that structural
  std::vector<int> logical_pos_;    // covered row -> basis position of its logical
  mutable Eigen::VectorXd bump_buf_;
  std::vector<Eta> etas_;

  double objective_ = 0.0;
  std::int64_t iterations_ = 0;
  std::vector<double> row_scratch_;
  mutable std::vector<double> row_work_;
  std::vector<int> touched_;
};

}  // namespace fleetcbm::detail

#endif  // FLEETCBM_SRC_SIMPLEX_HPP_
