#pragma once

#include "sicert/geometry.hpp"
#include "sicert/opticsim.hpp"
#include "sicert/types.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace sicert {

struct NoiseFitOptions {
  int multi_starts = 8;
  std::uint64_t seed = 20240901;
  int max_iterations = 40000;  // per start
  int threads = 0;             // 0 = hardware concurrency
};

/// Channel probabilities, per-state deviations, and the pure-state overlaps
/// |<V_j|V_i>|^2 left after the channels are eliminated from the measured eps.
struct NoiseFitResult {
  NoiseChannelParams params;
  std::vector<Vector> deviations;           // n vectors, set dimension
  std::map<VertexPair, double> eps_prime;   // keyed like the measured edges
  double residual = 0.0;
};

/// Least-squares inversion of the forward optics model over the deviations
/// and the three channel probabilities (bounds enforced by a logistic
/// reparameterization); multi-start simplex descent, best residual wins.
NoiseFitResult fit_noise(const std::map<VertexPair, double>& eps_measured,
                         const MeasurementSet& set, const OrthogonalityGraph& graph,
                         const NoiseFitOptions& opts = {});

struct AngleFitResult {
  double delta_theta_deg = 0.0;
  double residual = 0.0;
};

/// Attributes all residual imperfection to one calibration offset on the last
/// measurement waveplate: grid scan over [-5, 5] degrees plus golden-section
/// refinement of sum_{(i,j) in E} (|<V_j(dt)|v_i>|^2 - eps'_ij)^2.
AngleFitResult fit_delta_theta(const std::map<VertexPair, double>& eps_prime,
                               const MeasurementSet& set, const OrthogonalityGraph& graph);

}  // namespace sicert
