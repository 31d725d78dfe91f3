#pragma once

#include "sicert/types.hpp"

#include <vector>

namespace sicert::sdp {

/// Linear conic problems over one dense PSD block plus a nonnegative block:
///
///   minimize   tr(C X) + c.x
///   subject to tr(A_i X) + a_i.x  (=, <=, >=)  b_i,   X >= 0 (PSD), x >= 0.
///
/// Symmetric coefficients are entered once per unordered index pair: an entry
/// (r, c, v) with r != c stands for A_rc = A_cr = v, so it contributes
/// 2 v X_rc to the row value.
enum class Sense { Eq, Le, Ge };

enum class Status {
  Optimal,
  PrimalInfeasible,  // certified by a separating dual ray
  DualInfeasible,    // primal unbounded; certified by a feasible ray
  Stalled,           // returned best iterate; inspect residuals
  IterLimit,
  NumericalError,
};

struct Options {
  int max_iterations = 150;
  double feas_tol = 1e-9;
  double gap_tol = 1e-8;
  double step_fraction = 0.98;
  bool verbose = false;
};

struct Solution {
  Status status = Status::NumericalError;
  double objective = 0.0;  // primal objective of the minimize form
  Matrix X;
  Vector x_lin;
  Vector y;  // constraint multipliers; for PrimalInfeasible, the Farkas ray
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  double rel_gap = 0.0;
  double mu = 0.0;
  int iterations = 0;

  /// True when the iterate is trustworthy at the given tolerance even if the
  /// solver stopped short of its own (tighter) targets.
  bool usable(double tol = 1e-7) const {
    if (status == Status::Optimal) return true;
    if (status == Status::PrimalInfeasible || status == Status::DualInfeasible) return false;
    return primal_infeas <= tol && dual_infeas <= tol && rel_gap <= 10 * tol;
  }
};

class Problem {
public:
  explicit Problem(int psd_dim);

  int psd_dim() const { return psd_dim_; }
  int rows() const { return static_cast<int>(rhs_.size()); }

  /// Adds a nonnegative scalar variable (used for slacks or free-variable
  /// splits); returns its index.
  int add_lin_var(double cost = 0.0);

  void add_objective(int r, int c, double v);
  void add_lin_objective(int var, double v) { lin_cost_[var] += v; }

  /// Starts a new constraint row; returns its index.
  int add_constraint(Sense sense, double rhs);
  void add_coeff(int row, int r, int c, double v);
  void add_lin_coeff(int row, int var, double v);

  Solution solve(const Options& opts = {}) const;

private:
  struct Entry {
    int row, r, c;
    double v;
  };
  struct LinEntry {
    int row, var;
    double v;
  };

  int psd_dim_;
  std::vector<Entry> entries_;      // row >= 0: constraint; row == -1: objective
  std::vector<LinEntry> lin_entries_;
  std::vector<double> lin_cost_;
  std::vector<double> rhs_;
  std::vector<Sense> sense_;
};

}  // namespace sicert::sdp
