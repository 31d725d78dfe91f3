#include "sicert/opticsim.hpp"

#include <algorithm>
#include <random>

namespace sicert {

namespace {

constexpr double kDegenerate = 1e-14;

double atan2_deg(double y, double x) { return std::atan2(y, x) * 180.0 / std::numbers::pi; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 setting_rng(std::uint64_t seed, std::uint64_t setting_index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(setting_index + 1)));
}

// sigma of x / (x + r) for independent Poisson counts by the delta method;
// zero counts contribute variance from the rate upper bound (count + 1).
double ratio_sigma(long long x, long long r) {
  const double n = static_cast<double>(x + r);
  if (n <= 0.0) return 1.0;
  const double vx = x > 0 ? static_cast<double>(x) : 1.0;
  const double vr = r > 0 ? static_cast<double>(r) : 1.0;
  const double rr = static_cast<double>(r), xx = static_cast<double>(x);
  return std::sqrt(vx * rr * rr + vr * xx * xx) / (n * n);
}

}  // namespace

Eigen::Vector3d angles_for_vector(const Vector4& v, AngleRole role) {
  if (std::abs(v.norm() - 1.0) > 1e-10) throw Error("angles_for_vector: vector is not unit");

  if (role == AngleRole::Preparation) {
    // v = (c1 c2, c1 s2, s1 s3, -s1 c3); theta1 in [0, 45] covers all vectors
    // up to the global sign absorbed by theta2/theta3.
    const double top = std::hypot(v[0], v[1]);
    const double bot = std::hypot(v[2], v[3]);
    const double t1 = 0.5 * atan2_deg(bot, top);
    const double t2 = top > kDegenerate ? 0.5 * atan2_deg(v[1], v[0]) : 0.0;
    const double t3 = bot > kDegenerate ? 0.5 * atan2_deg(v[2], -v[3]) : 0.0;
    return {t1, t2, t3};
  }

  // Measurement: v = (s4 c5, s4 s5, c4 c6, c4 s6). Pick the global sign that
  // puts 2*theta6 in (-90, 90], then keep 2*theta5 in [0, 180) with the
  // top-pair sign pushed into theta4; this reproduces the conventional
  // settings (e.g. (-22.5, 45, 0) for (0,1,-1,0)).
  Vector4 u = v;
  const double bot = std::hypot(u[2], u[3]);
  if (bot > kDegenerate && (u[2] < -kDegenerate || (std::abs(u[2]) <= kDegenerate && u[3] < 0.0)))
    u = -u;
  const double top = std::hypot(u[0], u[1]);
  double t5 = 0.0;
  double s4 = top;
  if (top > kDegenerate) {
    double a = atan2_deg(u[1], u[0]);
    if (a < 0.0) {
      a += 180.0;
      s4 = -top;
    }
    t5 = 0.5 * a;
  }
  const double t6 = bot > kDegenerate ? 0.5 * atan2_deg(u[3], u[2]) : 0.0;
  const double t4 = 0.5 * atan2_deg(s4, bot);
  return {t4, t5, t6};
}

Vector4 embed_qutrit(const Eigen::Vector3d& v) { return {v[0], v[1], 0.0, v[2]}; }

namespace {

// Pauli actions in the |LH>,|LV>,|RH>,|RV> basis: spatial qubit first.
Matrix4 sigma_z_spatial() {
  Matrix4 m = Matrix4::Zero();
  m.diagonal() << 1, 1, -1, -1;
  return m;
}
Matrix4 sigma_x_spatial() {
  Matrix4 m = Matrix4::Zero();
  m(0, 2) = m(2, 0) = m(1, 3) = m(3, 1) = 1;
  return m;
}
Matrix4 sigma_x_polarization() {
  Matrix4 m = Matrix4::Zero();
  m(0, 1) = m(1, 0) = m(2, 3) = m(3, 2) = 1;
  return m;
}

Matrix4 apply_single_channel(const Matrix4& rho, const Matrix4& flip, double p) {
  if (p == 0.0) return rho;
  return (1.0 - p) * rho + p * (flip * rho * flip.transpose());
}

}  // namespace

Matrix4 apply_noise_density(const Matrix4& rho, const NoiseChannelParams& params) {
  params.validate();
  Matrix4 out = apply_single_channel(rho, sigma_z_spatial(), params.p_pa);
  out = apply_single_channel(out, sigma_x_polarization(), params.p_bb);
  out = apply_single_channel(out, sigma_x_spatial(), params.p_ba);
  return out;
}

Matrix4 apply_noise(const Vector4& state, const NoiseChannelParams& params) {
  return apply_noise_density(state * state.transpose(), params);
}

Vector measurement_vector(const MeasurementSet& set, int idx, double delta_theta_deg) {
  const Vector ideal = unit_vector_of(set, idx);
  if (set.dim == 4 || set.dim == 3) {
    const Vector4 v4 = set.dim == 4 ? Vector4(ideal) : embed_qutrit(Eigen::Vector3d(ideal));
    const Eigen::Vector3d a = angles_for_vector(v4, AngleRole::Measurement);
    return measurement_state(a[0], a[1], a[2], delta_theta_deg);
  }
  if (delta_theta_deg != 0.0)
    throw Error("simulate: the waveplate angle model requires dimension 4 (or 3 embedded)");
  return ideal;
}

namespace {

struct ModelContext {
  const MeasurementSet& set;
  const OrthogonalityGraph& graph;
  NoiseChannelParams noise;
  double delta_theta;
  bool angle_model;  // d = 4 native or d = 3 embedded

  Matrix mixed_state() const {
    if (!angle_model) {
      const int d = set.dim;
      return Matrix::Identity(d, d) / static_cast<double>(d);
    }
    if (set.dim == 4) return Matrix4::Identity() / 4.0;
    Matrix4 rho = Matrix4::Zero();
    for (int k : {0, 1, 3}) rho(k, k) = 1.0 / 3.0;
    return rho;
  }

  Matrix prepared_density(int vertex) const {
    if (!angle_model) {
      const Vector v = unit_vector_of(set, vertex);
      return v * v.transpose();
    }
    const Vector ideal = unit_vector_of(set, vertex);
    const Vector4 v4 = set.dim == 4 ? Vector4(ideal) : embed_qutrit(Eigen::Vector3d(ideal));
    const Eigen::Vector3d a = angles_for_vector(v4, AngleRole::Preparation);
    const Vector4 prep = prepared_state(a[0], a[1], a[2]);
    return apply_noise(prep, noise);
  }

  Matrix noisy_mixed_state() const {
    const Matrix rho = mixed_state();
    if (!angle_model || noise.is_zero()) return rho;
    return apply_noise_density(Matrix4(rho), noise);
  }

  Vector projector_vector(int idx) const { return measurement_vector(set, idx, delta_theta); }
};

}  // namespace

ExperimentRecord simulate_experiment(const MeasurementSet& set, const OrthogonalityGraph& graph,
                                     const NoiseChannelParams& noise, double delta_theta_deg,
                                     long long shots, std::uint64_t seed, bool both_orientations) {
  noise.validate();
  if (shots < 0) throw Error("simulate: shots must be >= 0 (0 = exact mode)");
  const bool angle_model = (set.dim == 4 || set.dim == 3);
  if (!angle_model && delta_theta_deg != 0.0)
    throw Error("simulate: the waveplate angle model requires dimension 4 (or 3 embedded)");
  if (!angle_model && !noise.is_zero())
    throw Error("simulate: noise channels require dimension 4 (or 3 embedded)");

  ModelContext ctx{set, graph, noise, delta_theta_deg, angle_model};
  const int n = set.size();
  const bool exact = shots == 0;

  ExperimentRecord rec;
  rec.set_name = set.name;
  rec.shots = shots;
  rec.rng_seed = seed;
  rec.delta_theta_deg = delta_theta_deg;
  rec.noise = noise;
  rec.p = Vector::Zero(n);
  rec.sigma_p = Vector::Zero(n);

  // Per-index projector cache (vertices and aux slots).
  std::vector<Vector> proj(n + set.aux_vectors.size());
  auto projector = [&](int idx) -> const Vector& {
    const std::size_t slot = is_aux(idx) ? static_cast<std::size_t>(n + aux_slot(idx))
                                         : static_cast<std::size_t>(idx);
    if (proj[slot].size() == 0) proj[slot] = ctx.projector_vector(idx);
    return proj[slot];
  };

  std::uint64_t setting = 0;

  // Stage M1: maximally mixed input, one setting per measurement basis.
  const Matrix rho_mm = ctx.noisy_mixed_state();
  for (std::size_t b = 0; b < graph.measurement_bases.size(); ++b) {
    const auto& basis = graph.measurement_bases[b];
    std::vector<double> q(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const Vector& w = projector(basis[k]);
      q[k] = std::max(0.0, w.dot(rho_mm * w));
    }
    std::vector<long long> counts(basis.size(), 0);
    double total = 0.0;
    long long ctotal = 0;
    if (exact) {
      for (double qq : q) total += qq;
    } else {
      auto rng = setting_rng(seed, setting);
      for (std::size_t k = 0; k < basis.size(); ++k) {
        std::poisson_distribution<long long> po(static_cast<double>(shots) * q[k]);
        counts[k] = po(rng);
        ctotal += counts[k];
      }
      rec.m1_counts.push_back(counts);
    }
    ++setting;
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const int idx = basis[k];
      // P_i comes from the designated basis of each real vertex.
      if (is_aux(idx) || graph.basis_of(idx) != static_cast<int>(b)) continue;
      if (exact) {
        rec.p[idx] = total > 0.0 ? q[k] / total : 0.0;
      } else {
        rec.p[idx] = ctotal > 0 ? static_cast<double>(counts[k]) / static_cast<double>(ctotal) : 0.0;
        rec.sigma_p[idx] = ratio_sigma(counts[k], ctotal - counts[k]);
      }
    }
  }

  // Stage M2: prepare |V_i>, push through the channels, project onto the
  // designated basis of j with the theta4 offset.
  auto measure_edge = [&](int i, int j) {
    const Matrix rho_i = ctx.prepared_density(i);
    const auto& basis = graph.measurement_bases[graph.basis_of(j)];
    std::vector<double> q(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const Vector& w = projector(basis[k]);
      q[k] = std::max(0.0, w.dot(rho_i * w));
    }
    const std::size_t pos_j = static_cast<std::size_t>(
        std::find(basis.begin(), basis.end(), j) - basis.begin());
    if (exact) {
      double total = 0.0;
      for (double qq : q) total += qq;
      rec.eps[{i, j}] = total > 0.0 ? q[pos_j] / total : 0.0;
      rec.sigma_eps[{i, j}] = 0.0;
    } else {
      auto rng = setting_rng(seed, setting);
      std::vector<long long> counts(basis.size(), 0);
      long long ctotal = 0;
      for (std::size_t k = 0; k < basis.size(); ++k) {
        std::poisson_distribution<long long> po(static_cast<double>(shots) * q[k]);
        counts[k] = po(rng);
        ctotal += counts[k];
      }
      rec.eps[{i, j}] =
          ctotal > 0 ? static_cast<double>(counts[pos_j]) / static_cast<double>(ctotal) : 0.0;
      rec.sigma_eps[{i, j}] = ratio_sigma(counts[pos_j], ctotal - counts[pos_j]);
      rec.m2_counts[{i, j}] = counts;
    }
    ++setting;
  };

  for (const auto& [i, j] : graph.edges) measure_edge(i, j);
  if (both_orientations)
    for (const auto& [i, j] : graph.edges) measure_edge(j, i);

  return rec;
}

double exact_pair_probability(int i, int j, const NoiseChannelParams& noise,
                              double delta_theta_deg, const MeasurementSet& set,
                              const OrthogonalityGraph& graph) {
  const bool angle_model = (set.dim == 4 || set.dim == 3);
  ModelContext ctx{set, graph, noise, delta_theta_deg, angle_model};
  const Matrix rho_i = ctx.prepared_density(i);
  const Vector w = ctx.projector_vector(j);
  return std::max(0.0, w.dot(rho_i * w));
}

}  // namespace sicert
