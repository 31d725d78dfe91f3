#include "sicert/sdp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace sicert::sdp {

Problem::Problem(int psd_dim) : psd_dim_(psd_dim) {
  if (psd_dim < 1) throw Error("sdp: PSD dimension must be >= 1");
}

int Problem::add_lin_var(double cost) {
  lin_cost_.push_back(cost);
  return static_cast<int>(lin_cost_.size()) - 1;
}

void Problem::add_objective(int r, int c, double v) { entries_.push_back({-1, r, c, v}); }

int Problem::add_constraint(Sense sense, double rhs) {
  rhs_.push_back(rhs);
  sense_.push_back(sense);
  return static_cast<int>(rhs_.size()) - 1;
}

void Problem::add_coeff(int row, int r, int c, double v) {
  if (row < 0 || row >= rows()) throw Error("sdp: bad constraint row");
  entries_.push_back({row, r, c, v});
}

void Problem::add_lin_coeff(int row, int var, double v) {
  if (row < 0 || row >= rows()) throw Error("sdp: bad constraint row");
  if (var < 0 || var >= static_cast<int>(lin_cost_.size())) throw Error("sdp: bad variable");
  lin_entries_.push_back({row, var, v});
}

namespace {

struct PsdEntry {
  int r, c;  // r <= c
  double v;
};

struct Row {
  std::vector<PsdEntry> psd;
  std::vector<std::pair<int, double>> lin;
  double b = 0.0;
};

// tr(A T) for the symmetric sparse A and an arbitrary dense T.
double tr_sparse(const std::vector<PsdEntry>& a, const Matrix& t) {
  double s = 0.0;
  for (const auto& e : a) s += e.r == e.c ? e.v * t(e.r, e.r) : e.v * (t(e.r, e.c) + t(e.c, e.r));
  return s;
}

// Accumulates y * A into a dense symmetric matrix.
void add_scaled(Matrix& out, const std::vector<PsdEntry>& a, double y) {
  for (const auto& e : a) {
    out(e.r, e.c) += y * e.v;
    if (e.r != e.c) out(e.c, e.r) += y * e.v;
  }
}

// Largest step keeping X + alpha dX PSD, from the Cholesky factor of X.
double max_psd_step(const Eigen::LLT<Matrix>& lltX, const Matrix& dX) {
  const Matrix l = lltX.matrixL();
  Matrix t = l.triangularView<Eigen::Lower>().solve(dX);
  t = l.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (t + t.transpose()), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-14) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double max_lin_step(const Vector& x, const Vector& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < x.size(); ++k)
    if (dx[k] < 0.0) a = std::min(a, -x[k] / dx[k]);
  return a;
}

}  // namespace

Solution Problem::solve(const Options& opts) const {
  const int ns = psd_dim_;
  const int m = rows();

  // Assemble rows; inequality rows get a slack in the nonnegative block.
  std::vector<Row> rows(m);
  const int nl0 = static_cast<int>(lin_cost_.size());
  int nl = nl0;
  std::vector<int> slack_of(m, -1);
  for (int i = 0; i < m; ++i) {
    rows[i].b = rhs_[i];
    if (sense_[i] != Sense::Eq) slack_of[i] = nl++;
  }
  Vector lin_cost = Vector::Zero(nl);
  for (int k = 0; k < nl0; ++k) lin_cost[k] = lin_cost_[k];

  Matrix cmat = Matrix::Zero(ns, ns);
  for (const auto& e : entries_) {
    if (e.row < 0) {
      cmat(e.r, e.c) += e.v;
      if (e.r != e.c) cmat(e.c, e.r) += e.v;
    } else {
      rows[e.row].psd.push_back({std::min(e.r, e.c), std::max(e.r, e.c), e.v});
    }
  }
  for (const auto& e : lin_entries_) rows[e.row].lin.emplace_back(e.var, e.v);
  for (int i = 0; i < m; ++i)
    if (slack_of[i] >= 0)
      rows[i].lin.emplace_back(slack_of[i], sense_[i] == Sense::Le ? 1.0 : -1.0);

  // Row equilibration keeps the Schur complement well scaled.
  for (int i = 0; i < m; ++i) {
    double s2 = 0.0;
    for (const auto& e : rows[i].psd) s2 += (e.r == e.c ? 1.0 : 2.0) * e.v * e.v;
    for (const auto& [var, v] : rows[i].lin) s2 += v * v;
    const double s = std::max(std::sqrt(s2), 1e-8);
    for (auto& e : rows[i].psd) e.v /= s;
    for (auto& [var, v] : rows[i].lin) v /= s;
    rows[i].b /= s;
  }
  const double obj_scale =
      std::max({1.0, cmat.cwiseAbs().maxCoeff(), nl > 0 ? lin_cost.cwiseAbs().maxCoeff() : 0.0});
  cmat /= obj_scale;
  lin_cost /= obj_scale;

  double normb = 0.0;
  for (int i = 0; i < m; ++i) normb = std::max(normb, std::abs(rows[i].b));
  const double normc =
      std::max(cmat.cwiseAbs().maxCoeff(), nl > 0 ? lin_cost.cwiseAbs().maxCoeff() : 0.0);

  // Interior starting point.
  const double xi = std::max({10.0, std::sqrt(double(ns)), 2.0 * normb});
  const double eta = std::max({10.0, std::sqrt(double(ns)), 2.0 * normc});
  Matrix X = xi * Matrix::Identity(ns, ns);
  Matrix Z = eta * Matrix::Identity(ns, ns);
  Vector xl = Vector::Constant(nl, xi);
  Vector zl = Vector::Constant(nl, eta);
  Vector y = Vector::Zero(m);

  Solution best;
  double best_score = std::numeric_limits<double>::infinity();
  auto finish = [&](Status st, int iter) {
    Solution s = best;
    if (s.X.size() == 0) {
      s.X = X;
      s.x_lin = xl;
      s.y = y;
    }
    s.status = st;
    s.iterations = iter;
    s.objective = ((cmat.cwiseProduct(s.X)).sum() + lin_cost.dot(s.x_lin)) * obj_scale;
    s.x_lin.conservativeResize(nl0);  // drop internal slacks
    return s;
  };

  int stall_count = 0;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    Vector rp(m);
    for (int i = 0; i < m; ++i) {
      double v = rows[i].b - tr_sparse(rows[i].psd, X);
      for (const auto& [var, w] : rows[i].lin) v -= w * xl[var];
      rp[i] = v;
    }
    Matrix Rd = cmat - Z;
    for (int i = 0; i < m; ++i) add_scaled(Rd, rows[i].psd, -y[i]);
    Vector rd = lin_cost - zl;
    for (int i = 0; i < m; ++i)
      for (const auto& [var, w] : rows[i].lin) rd[var] -= w * y[i];

    const double pobj = (cmat.cwiseProduct(X)).sum() + lin_cost.dot(xl);
    double dobj = 0.0;
    for (int i = 0; i < m; ++i) dobj += rows[i].b * y[i];
    const double gap = (X.cwiseProduct(Z)).sum() + xl.dot(zl);
    const double mu = gap / static_cast<double>(ns + nl);
    const double pinf = m > 0 ? rp.cwiseAbs().maxCoeff() / (1.0 + normb) : 0.0;
    const double dinf =
        std::max(Rd.cwiseAbs().maxCoeff(), nl > 0 ? rd.cwiseAbs().maxCoeff() : 0.0) /
        (1.0 + normc);
    const double relgap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (opts.verbose)
      std::fprintf(stderr, "it %2d  pobj %+.6e  dobj %+.6e  gap %.2e  pinf %.2e  dinf %.2e\n",
                   iter, pobj * obj_scale, dobj * obj_scale, relgap, pinf, dinf);

    const double score = std::max({pinf, dinf, relgap});
    if (score < 0.97 * best_score) {
      stall_count = 0;
    } else if (++stall_count > 40) {
      return finish(Status::Stalled, iter);
    }
    if (score < best_score) {
      best_score = score;
      best.X = X;
      best.x_lin = xl;
      best.y = y;
      best.primal_infeas = pinf;
      best.dual_infeas = dinf;
      best.rel_gap = relgap;
      best.mu = mu;
    }

    if (pinf <= opts.feas_tol && dinf <= opts.feas_tol && relgap <= opts.gap_tol)
      return finish(Status::Optimal, iter);

    // Dual-infeasibility probe: a feasible ray X with A(X) = 0 and
    // tr(C X) < 0 makes the primal unbounded below.
    if (pobj < -1e4 * (1.0 + normb + normc)) {
      const double xmax = std::max(X.cwiseAbs().maxCoeff(), nl > 0 ? xl.maxCoeff() : 0.0);
      const Matrix Xh = X / xmax;
      const Vector xlh = xl / xmax;
      double rmax = 0.0;
      for (int i = 0; i < m; ++i) {
        double v = tr_sparse(rows[i].psd, Xh);
        for (const auto& [var, w] : rows[i].lin) v += w * xlh[var];
        rmax = std::max(rmax, std::abs(v));
      }
      const double ray_obj = (cmat.cwiseProduct(Xh)).sum() + lin_cost.dot(xlh);
      if (rmax < 1e-6 && ray_obj < -1e-6) {
        Solution s;
        s.status = Status::DualInfeasible;
        s.X = Xh;
        s.x_lin = xlh;
        s.x_lin.conservativeResize(nl0);
        s.y = y;
        s.iterations = iter;
        return s;
      }
    }

    // Primal-infeasibility probe: a dual ray with A^*(y) in -K* and b.y > 0
    // separates the feasible set; verify the candidate explicitly.
    if (dobj > 1.0 + normb) {
      Vector ray = y / dobj;
      Matrix S = Matrix::Zero(ns, ns);
      for (int i = 0; i < m; ++i) add_scaled(S, rows[i].psd, -ray[i]);
      Vector sl = Vector::Zero(nl);
      for (int i = 0; i < m; ++i)
        for (const auto& [var, w] : rows[i].lin) sl[var] -= w * ray[i];
      Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
      const double smin = std::min(es.eigenvalues().minCoeff(), nl > 0 ? sl.minCoeff() : 0.0);
      const double snorm = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
      if (smin > -1e-10 * snorm && dobj > 1e5 * (1.0 + normb)) {
        Solution s;
        s.status = Status::PrimalInfeasible;
        s.y = ray;
        s.X = X;
        s.x_lin = xl;
        s.x_lin.conservativeResize(nl0);
        s.iterations = iter;
        return s;
      }
    }

    Eigen::LLT<Matrix> lltX(X), lltZ(Z);
    if (lltX.info() != Eigen::Success || lltZ.info() != Eigen::Success)
      return finish(Status::NumericalError, iter);
    const Matrix Zinv = lltZ.solve(Matrix::Identity(ns, ns));

    // Schur complement M_ij = tr(A_i X A_j Z^-1) + sum_k a_ik a_jk x_k / z_k.
    std::vector<Matrix> W(m);
    for (int j = 0; j < m; ++j) {
      Matrix B = Matrix::Zero(ns, ns);
      std::vector<int> touched;
      for (const auto& e : rows[j].psd) {
        B.row(e.r) += e.v * Zinv.row(e.c);
        if (e.r != e.c) B.row(e.c) += e.v * Zinv.row(e.r);
        touched.push_back(e.r);
        if (e.r != e.c) touched.push_back(e.c);
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      W[j] = Matrix::Zero(ns, ns);
      for (int r : touched) W[j].noalias() += X.col(r) * B.row(r);
    }
    const Vector xz = nl > 0 ? Vector(xl.cwiseQuotient(zl)) : Vector();
    Matrix M(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        const double v = tr_sparse(rows[i].psd, W[j]);
        M(i, j) = v;
        M(j, i) = v;
      }
    for (int i = 0; i < m; ++i)
      for (const auto& [vi, wi] : rows[i].lin)
        for (int j = i; j < m; ++j)
          for (const auto& [vj, wj] : rows[j].lin)
            if (vi == vj) {
              M(i, j) += wi * wj * xz[vi];
              if (i != j) M(j, i) += wi * wj * xz[vi];
            }

    Eigen::LDLT<Matrix> ldlt(M);
    if (ldlt.info() != Eigen::Success) {
      M.diagonal().array() += 1e-12 * (1.0 + M.diagonal().maxCoeff());
      ldlt.compute(M);
      if (ldlt.info() != Eigen::Success) return finish(Status::NumericalError, iter);
    }

    const Matrix XRdZinv = X * (Rd * Zinv);
    Vector u(m), w0(m);
    for (int i = 0; i < m; ++i) {
      double ui = tr_sparse(rows[i].psd, Zinv);
      double wi = tr_sparse(rows[i].psd, X) + tr_sparse(rows[i].psd, XRdZinv);
      for (const auto& [var, wv] : rows[i].lin) {
        ui += wv / zl[var];
        wi += wv * xl[var] + wv * xz[var] * rd[var];
      }
      u[i] = ui;
      w0[i] = wi;
    }

    auto solve_direction = [&](double mu_t, const Matrix* Rc, const Vector* rc_l, Matrix& dX,
                               Vector& dxl, Vector& dy, Matrix& dZ, Vector& dzl) {
      Vector rhs = rp + w0 - mu_t * u;
      Matrix RcZinv;
      if (Rc) {
        RcZinv = *Rc * Zinv;
        for (int i = 0; i < m; ++i) {
          rhs[i] += tr_sparse(rows[i].psd, RcZinv);
          for (const auto& [var, wv] : rows[i].lin) rhs[i] += wv * (*rc_l)[var] / zl[var];
        }
      }
      dy = ldlt.solve(rhs);
      dZ = Rd;
      for (int i = 0; i < m; ++i) add_scaled(dZ, rows[i].psd, -dy[i]);
      dzl = rd;
      for (int i = 0; i < m; ++i)
        for (const auto& [var, wv] : rows[i].lin) dzl[var] -= wv * dy[i];
      dX = mu_t * Zinv - X - X * (dZ * Zinv);
      if (Rc) dX -= RcZinv;
      dX = 0.5 * (dX + dX.transpose()).eval();
      dxl = -xl;
      for (Eigen::Index k = 0; k < dxl.size(); ++k) {
        dxl[k] += mu_t / zl[k] - xz[k] * dzl[k];
        if (rc_l) dxl[k] -= (*rc_l)[k] / zl[k];
      }
    };

    Matrix dXa, dZa;
    Vector dxla, dya, dzla;
    solve_direction(0.0, nullptr, nullptr, dXa, dxla, dya, dZa, dzla);
    const double apa = std::min({1.0, opts.step_fraction * max_psd_step(lltX, dXa),
                                 opts.step_fraction * max_lin_step(xl, dxla)});
    const double ada = std::min({1.0, opts.step_fraction * max_psd_step(lltZ, dZa),
                                 opts.step_fraction * max_lin_step(zl, dzla)});
    const double gap_aff = ((X + apa * dXa).cwiseProduct(Z + ada * dZa)).sum() +
                           (xl + apa * dxla).dot(zl + ada * dzla);
    const double sigma = std::clamp(std::pow(std::max(gap_aff, 0.0) / gap, 3.0), 1e-10, 1.0);

    const Matrix Rc = dXa * dZa;
    const Vector rc_l = dxla.cwiseProduct(dzla);
    Matrix dX, dZ;
    Vector dxl_s, dy, dzl;
    solve_direction(sigma * mu, &Rc, &rc_l, dX, dxl_s, dy, dZ, dzl);

    double ap = std::min({1.0, opts.step_fraction * max_psd_step(lltX, dX),
                          opts.step_fraction * max_lin_step(xl, dxl_s)});
    double ad = std::min({1.0, opts.step_fraction * max_psd_step(lltZ, dZ),
                          opts.step_fraction * max_lin_step(zl, dzl)});

    // Roundoff can spoil the step-length estimate; back off until the
    // factorizations go through.
    for (int tries = 0;; ++tries) {
      Matrix Xn = X + ap * dX, Zn = Z + ad * dZ;
      if (Eigen::LLT<Matrix>(Xn).info() == Eigen::Success &&
          Eigen::LLT<Matrix>(Zn).info() == Eigen::Success) {
        X = std::move(Xn);
        Z = std::move(Zn);
        break;
      }
      if (tries > 30) return finish(Status::NumericalError, iter);
      ap *= 0.8;
      ad *= 0.8;
    }
    xl += ap * dxl_s;
    zl += ad * dzl;
    y += ad * dy;

    if (ap < 1e-7 && ad < 1e-7) return finish(Status::Stalled, iter + 1);
  }
  return finish(Status::IterLimit, opts.max_iterations);
}

}  // namespace sicert::sdp
