#include "sicert/witness.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace sicert {

WitnessValue witness_value(const MeasurementSet& set, const OrthogonalityGraph& graph,
                           const WitnessInputs& inputs) {
  const int n = graph.n;
  if (inputs.p.size() != n) throw Error("witness_value: P vector size mismatch");

  double w = 0.0;
  Vector dw_dp = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double wi = static_cast<double>(set.vertex_weights[i]);
    w += wi * inputs.p[i];
    dw_dp[i] += wi;
  }

  const double wij = static_cast<double>(set.edge_weight);
  double sigma2_eps_part = 0.0;
  for (const auto& [i, j] : graph.edges) {
    const auto fwd = inputs.eps.find({i, j});
    const auto rev = inputs.eps.find({j, i});
    if (fwd == inputs.eps.end() && rev == inputs.eps.end())
      throw Error("witness_value: missing eps entry for edge (" + std::to_string(i) + "," +
                  std::to_string(j) + ")");
    const double scale = (fwd != inputs.eps.end() && rev != inputs.eps.end()) ? 0.5 : 1.0;
    for (const auto* it : {fwd != inputs.eps.end() ? &*fwd : nullptr,
                           rev != inputs.eps.end() ? &*rev : nullptr}) {
      if (!it) continue;
      const int first = it->first.first;
      const double eps = it->second;
      w -= scale * wij * inputs.p[first] * eps;
      dw_dp[first] -= scale * wij * eps;
      const auto se = inputs.sigma_eps.find(it->first);
      const double sig_eps = se == inputs.sigma_eps.end() ? 0.0 : se->second;
      const double deriv = -scale * wij * inputs.p[first];
      sigma2_eps_part += deriv * deriv * sig_eps * sig_eps;
    }
  }

  double sigma2 = sigma2_eps_part;
  if (inputs.sigma_p.size() == n)
    for (int i = 0; i < n; ++i) sigma2 += dw_dp[i] * dw_dp[i] * inputs.sigma_p[i] * inputs.sigma_p[i];

  return {w, std::sqrt(sigma2)};
}

WitnessValue worst_case_bound(const WitnessValue& w_mm, const Rational& w_opt, int d) {
  if (d < 2) throw Error("worst_case_bound: d must be >= 2");
  WitnessValue out;
  out.w = d * w_mm.w - (d - 1) * w_opt.value();
  out.sigma = d * w_mm.sigma;
  return out;
}

Matrix witness_operator(const std::vector<Vector>& projector_vectors, const MeasurementSet& set,
                        const OrthogonalityGraph& graph) {
  const int n = graph.n;
  const int d = set.dim;
  if (static_cast<int>(projector_vectors.size()) != n)
    throw Error("witness_operator: need one vector per vertex");

  std::vector<Matrix> proj(n);
  for (int i = 0; i < n; ++i) {
    const Vector& v = projector_vectors[i];
    if (v.size() != d) throw Error("witness_operator: vector dimension mismatch");
    if (std::abs(v.norm() - 1.0) > 1e-12)
      throw Error("witness_operator: vector " + std::to_string(i) + " is not unit");
    proj[i] = v * v.transpose();
  }

  Matrix op = Matrix::Zero(d, d);
  for (int i = 0; i < n; ++i) op += static_cast<double>(set.vertex_weights[i]) * proj[i];
  const double wij = static_cast<double>(set.edge_weight);
  for (const auto& [i, j] : graph.edges)
    op -= wij * 0.5 * (proj[i] * proj[j] * proj[i] + proj[j] * proj[i] * proj[j]);
  return op;
}

SpectrumBounds spectrum_bounds(const Matrix& op) {
  if (op.rows() != op.cols()) throw Error("spectrum_bounds: matrix must be square");
  if ((op - op.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error("spectrum_bounds: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(op, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  SpectrumBounds out;
  out.lambda_min = ev.minCoeff();
  out.lambda_max = ev.maxCoeff();
  out.trace_over_d = op.trace() / static_cast<double>(op.rows());
  return out;
}

}  // namespace sicert
