#pragma once

#include "sicert/geometry.hpp"
#include "sicert/types.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <optional>

namespace sicert {

/// Probabilities of the three Kraus channels modeling the setup: spatial-mode
/// bit flip, polarization bit flip, spatial-mode phase flip.
struct NoiseChannelParams {
  double p_ba = 0.0;
  double p_bb = 0.0;
  double p_pa = 0.0;

  void validate() const {
    if (p_ba < 0.0 || p_ba > 1.0) throw Error("NoiseChannelParams: p_ba out of [0,1]");
    if (p_bb < 0.0 || p_bb > 1.0) throw Error("NoiseChannelParams: p_bb out of [0,1]");
    if (p_pa < 0.0 || p_pa > 0.5) throw Error("NoiseChannelParams: p_pa out of [0,1/2]");
  }
  bool is_zero() const { return p_ba == 0.0 && p_bb == 0.0 && p_pa == 0.0; }
};

/// Half-wave-plate angles in degrees; theta1..3 prepare, theta4..6 project,
/// delta_theta is an additive calibration error on theta4.
struct AngleSettings {
  double theta1 = 0.0, theta2 = 0.0, theta3 = 0.0;
  double theta4 = 0.0, theta5 = 0.0, theta6 = 0.0;
  double delta_theta = 0.0;
};

enum class AngleRole { Preparation, Measurement };

template <typename Scalar = double>
constexpr Scalar deg2rad(Scalar deg) {
  return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

/// Jones matrix of a half-wave plate at angle theta (degrees):
/// [[cos2t, sin2t], [sin2t, -cos2t]].
template <typename Scalar = double>
Eigen::Matrix<Scalar, 2, 2> jones_hwp(Scalar theta_deg) {
  const Scalar c = std::cos(Scalar(2) * deg2rad(theta_deg));
  const Scalar s = std::sin(Scalar(2) * deg2rad(theta_deg));
  Eigen::Matrix<Scalar, 2, 2> j;
  j << c, s, s, -c;
  return j;
}

/// State behind the preparation block:
/// (cos2t1 cos2t2, cos2t1 sin2t2, sin2t1 sin2t3, -sin2t1 cos2t3).
template <typename Scalar = double>
Eigen::Matrix<Scalar, 4, 1> prepared_state(Scalar t1_deg, Scalar t2_deg, Scalar t3_deg) {
  const Scalar c1 = std::cos(Scalar(2) * deg2rad(t1_deg)), s1 = std::sin(Scalar(2) * deg2rad(t1_deg));
  const Scalar c2 = std::cos(Scalar(2) * deg2rad(t2_deg)), s2 = std::sin(Scalar(2) * deg2rad(t2_deg));
  const Scalar c3 = std::cos(Scalar(2) * deg2rad(t3_deg)), s3 = std::sin(Scalar(2) * deg2rad(t3_deg));
  return {c1 * c2, c1 * s2, s1 * s3, -s1 * c3};
}

/// State projected by the measurement block, with theta4 offset by delta:
/// (sin2t4' cos2t5, sin2t4' sin2t5, cos2t4' cos2t6, cos2t4' sin2t6).
template <typename Scalar = double>
Eigen::Matrix<Scalar, 4, 1> measurement_state(Scalar t4_deg, Scalar t5_deg, Scalar t6_deg,
                                              Scalar delta_deg = Scalar(0)) {
  const Scalar t4 = t4_deg + delta_deg;
  const Scalar c4 = std::cos(Scalar(2) * deg2rad(t4)), s4 = std::sin(Scalar(2) * deg2rad(t4));
  const Scalar c5 = std::cos(Scalar(2) * deg2rad(t5_deg)), s5 = std::sin(Scalar(2) * deg2rad(t5_deg));
  const Scalar c6 = std::cos(Scalar(2) * deg2rad(t6_deg)), s6 = std::sin(Scalar(2) * deg2rad(t6_deg));
  return {s4 * c5, s4 * s5, c4 * c6, c4 * s6};
}

/// Inverts the two parameterizations above: returns the relevant angle triple
/// (theta1..3 or theta4..6, degrees) whose forward map reproduces v up to
/// global sign within 1e-10. v must be a real unit 4-vector.
Eigen::Vector3d angles_for_vector(const Vector4& v, AngleRole role);

/// Embeds a qutrit state into the dual-rail model: |1>,|2>,|3> mapped to
/// |LH>,|LV>,|RV> (components 0, 1, 3).
Vector4 embed_qutrit(const Eigen::Vector3d& v);

/// Applies the three Kraus channels (8-term operator sum) to a pure state.
Matrix4 apply_noise(const Vector4& state, const NoiseChannelParams& params);

/// Same channels applied to a density matrix.
Matrix4 apply_noise_density(const Matrix4& rho, const NoiseChannelParams& params);

/// Simulated (or ingested) sequential-measurement data: P_i and eps_ij
/// estimates with Poisson standard deviations, plus raw counts when sampled.
struct ExperimentRecord {
  std::string set_name;
  long long shots = 0;  // 0 = exact mode (analytic probabilities, zero sigmas)
  std::uint64_t rng_seed = 0;
  double delta_theta_deg = 0.0;
  NoiseChannelParams noise;

  Vector p, sigma_p;
  std::map<VertexPair, double> eps, sigma_eps;

  std::vector<std::vector<long long>> m1_counts;             // per basis, per outcome
  std::map<VertexPair, std::vector<long long>> m2_counts;    // per ordered edge, per outcome

  bool exact_mode() const { return shots == 0; }
};

/// Forward-models the two-stage experiment on the maximally mixed state:
/// stage M1 estimates P_i basis-relative, stage M2 estimates eps_ij for every
/// ordered edge per the graph's edge list (optionally both orientations).
/// shots = 0 selects exact mode; otherwise counts are Poisson with
/// per-setting RNG streams derived from (seed, setting index).
ExperimentRecord simulate_experiment(const MeasurementSet& set, const OrthogonalityGraph& graph,
                                     const NoiseChannelParams& noise, double delta_theta_deg,
                                     long long shots, std::uint64_t seed,
                                     bool both_orientations = false);

/// <V_j | rho_i | V_j> for the noisy/offset forward model; the fit target of
/// the noise-elimination stage. Zero noise and offset reproduces the ideal
/// overlap.
double exact_pair_probability(int i, int j, const NoiseChannelParams& noise,
                              double delta_theta_deg, const MeasurementSet& set,
                              const OrthogonalityGraph& graph);

/// The unit projector vector actually used to measure index idx (vertex or
/// aux) under a theta4 offset; equals the ideal vector when the offset is 0
/// and the set dimension has no angle model.
Vector measurement_vector(const MeasurementSet& set, int idx, double delta_theta_deg);

}  // namespace sicert
