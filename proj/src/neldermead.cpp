#include "sicert/neldermead.hpp"

#include <algorithm>
#include <numeric>

namespace sicert {

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                             const NelderMeadOptions& opts) {
  const int n = static_cast<int>(x0.size());
  if (n == 0) throw Error("nelder_mead: empty parameter vector");

  // Gao-Han adaptive coefficients.
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / n;
  const double gamma = 0.75 - 0.5 / n;
  const double delta = 1.0 - 1.0 / n;

  Vector step = opts.initial_step.size() == n ? opts.initial_step : Vector::Constant(n, 0.1);

  std::vector<Vector> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (int i = 1; i <= n; ++i) xs[i][i - 1] += step[i - 1];
  for (int i = 0; i <= n; ++i) fs[i] = f(xs[i]);

  std::vector<int> order(n + 1);
  std::iota(order.begin(), order.end(), 0);
  auto sort_simplex = [&] {
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
  };
  sort_simplex();

  double best_seen = fs[order[0]];
  int since_improve = 0;
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    const int ib = order[0], iw = order[n], is = order[n - 1];
    if (fs[iw] - fs[ib] < opts.f_tol * (1.0 + std::abs(fs[ib]))) break;
    if (fs[ib] < best_seen - opts.f_tol) {
      best_seen = fs[ib];
      since_improve = 0;
    } else if (++since_improve >= opts.stall_iterations) {
      break;
    }

    Vector centroid = Vector::Zero(n);
    for (int k = 0; k <= n; ++k)
      if (k != iw) centroid += xs[k];
    centroid /= n;

    const Vector xr = centroid + alpha * (centroid - xs[iw]);
    const double fr = f(xr);
    if (fr < fs[ib]) {
      const Vector xe = centroid + beta * (xr - centroid);
      const double fe = f(xe);
      if (fe < fr) {
        xs[iw] = xe;
        fs[iw] = fe;
      } else {
        xs[iw] = xr;
        fs[iw] = fr;
      }
    } else if (fr < fs[is]) {
      xs[iw] = xr;
      fs[iw] = fr;
    } else {
      const bool outside = fr < fs[iw];
      const Vector xc = outside ? Vector(centroid + gamma * (xr - centroid))
                                : Vector(centroid - gamma * (centroid - xs[iw]));
      const double fc = f(xc);
      if (fc < (outside ? fr : fs[iw])) {
        xs[iw] = xc;
        fs[iw] = fc;
      } else {
        for (int k = 0; k <= n; ++k) {
          if (k == ib) continue;
          xs[k] = xs[ib] + delta * (xs[k] - xs[ib]);
          fs[k] = f(xs[k]);
        }
      }
    }
    sort_simplex();
  }

  sort_simplex();
  NelderMeadResult out;
  out.x = xs[order[0]];
  out.f = fs[order[0]];
  out.iterations = iter;
  out.converged = iter < opts.max_iterations;
  return out;
}

}  // namespace sicert
