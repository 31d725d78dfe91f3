#pragma once

#include "sicert/geometry.hpp"
#include "sicert/types.hpp"

#include <map>

namespace sicert {

/// Measured statistics feeding the witness: P_i per vertex and eps_ij per
/// ordered edge (first-measured vertex first), with standard deviations.
struct WitnessInputs {
  Vector p;
  Vector sigma_p;
  std::map<VertexPair, double> eps;
  std::map<VertexPair, double> sigma_eps;
};

struct WitnessValue {
  double w = 0.0;
  double sigma = 0.0;
};

/// Sum_i w_i P_i - Sum_{(i,j) in E} w_ij P_i eps_ij, each unordered edge
/// counted once. When both orientations of an edge were measured their
/// contributions are averaged. Sigma by first-order propagation with all
/// inputs independent. Throws on a missing edge entry.
WitnessValue witness_value(const MeasurementSet& set, const OrthogonalityGraph& graph,
                           const WitnessInputs& inputs);

/// d*W(mm) - (d-1)*W_opt: certified lower bound on the witness over all
/// input states given the maximally-mixed-state value.
WitnessValue worst_case_bound(const WitnessValue& w_mm, const Rational& w_opt, int d);

/// W_hat = Sum_i w_i P_i' - Sum_{(i,j) in E} w_ij (P_i'P_j'P_i' + P_j'P_i'P_j')/2
/// with P_i' the rank-1 projector onto projector_vectors[i]. Vectors must be
/// unit within 1e-12.
Matrix witness_operator(const std::vector<Vector>& projector_vectors, const MeasurementSet& set,
                        const OrthogonalityGraph& graph);

struct SpectrumBounds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double trace_over_d = 0.0;
};

/// Eigenvalue extremes and trace/d of a Hermitian operator (trace/d is the
/// maximally-mixed-state witness value when applied to W_hat).
SpectrumBounds spectrum_bounds(const Matrix& op);

}  // namespace sicert
