#include <doctest.h>

#include "sicert/geometry.hpp"
#include "sicert/opticsim.hpp"

#include <Eigen/Dense>

#include <random>

using namespace sicert;

namespace {

double mean_eps(const ExperimentRecord& rec) {
  double s = 0.0;
  for (const auto& [e, v] : rec.eps) s += v;
  return s / static_cast<double>(rec.eps.size());
}

}  // namespace

TEST_CASE("jones matrix of the half-wave plate") {
  Matrix2 j0 = jones_hwp(0.0);
  CHECK(j0(0, 0) == doctest::Approx(1.0));
  CHECK(j0(1, 1) == doctest::Approx(-1.0));
  CHECK(j0(0, 1) == doctest::Approx(0.0));

  Matrix2 j45 = jones_hwp(45.0);
  CHECK(j45(0, 0) == doctest::Approx(0.0));
  CHECK(j45(0, 1) == doctest::Approx(1.0));

  Matrix2 j22 = jones_hwp(22.5);
  const double r = std::sqrt(2.0) / 2.0;
  CHECK(j22(0, 0) == doctest::Approx(r));
  CHECK(j22(0, 1) == doctest::Approx(r));
  CHECK(j22(1, 1) == doctest::Approx(-r));
}

TEST_CASE("preparation parameterization") {
  CHECK((prepared_state(0.0, 0.0, 31.0) - Vector4(1, 0, 0, 0)).norm() < 1e-12);
  // theta1 = 45 puts all weight on the lower block; theta3 = 45 selects |3>.
  CHECK((prepared_state(45.0, 17.0, 45.0) - Vector4(0, 0, 1, 0)).norm() < 1e-12);
  CHECK((prepared_state(22.5, 22.5, -22.5) - Vector4(0.5, 0.5, -0.5, -0.5)).norm() < 1e-12);
  // Unit norm by construction.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-90.0, 90.0);
  for (int t = 0; t < 100; ++t)
    CHECK(std::abs(prepared_state(uni(rng), uni(rng), uni(rng)).norm() - 1.0) < 1e-12);
}

TEST_CASE("measurement parameterization") {
  const Vector4 v24 = Vector4(0, 1, -1, 0) / std::sqrt(2.0);
  const Vector4 m = measurement_state(-22.5, 45.0, 0.0, 0.0);
  CHECK(std::min((m - v24).norm(), (m + v24).norm()) < 1e-12);

  CHECK((measurement_state(45.0, 0.0, 63.0, 0.0) - Vector4(1, 0, 0, 0)).norm() < 1e-12);
  CHECK((measurement_state(10.0, 20.0, 30.0, 1e-13) - measurement_state(10.0, 20.0, 30.0, 0.0))
            .norm() < 1e-10);
}

TEST_CASE("angle inversion") {
  const Vector4 v24 = Vector4(0, 1, -1, 0) / std::sqrt(2.0);
  const Eigen::Vector3d a = angles_for_vector(v24, AngleRole::Measurement);
  CHECK(a[0] == doctest::Approx(-22.5));
  CHECK(a[1] == doctest::Approx(45.0));
  CHECK(a[2] == doctest::Approx(0.0));

  const Eigen::Vector3d ap = angles_for_vector(Vector4(1, 0, 0, 0), AngleRole::Preparation);
  CHECK(ap.norm() < 1e-12);

  // Round trip over all Peres-24 vectors, both roles, up to global sign.
  const MeasurementSet s = load_set("peres24");
  for (int i = 0; i < s.size(); ++i) {
    const Vector4 v = unit_vector_of(s, i);
    const Eigen::Vector3d p = angles_for_vector(v, AngleRole::Preparation);
    const Vector4 vp = prepared_state(p[0], p[1], p[2]);
    CHECK(std::min((vp - v).norm(), (vp + v).norm()) < 1e-10);
    const Eigen::Vector3d q = angles_for_vector(v, AngleRole::Measurement);
    const Vector4 vq = measurement_state(q[0], q[1], q[2], 0.0);
    CHECK(std::min((vq - v).norm(), (vq + v).norm()) < 1e-10);
  }
}

TEST_CASE("noise channels") {
  const Vector4 e1(1, 0, 0, 0);
  CHECK((apply_noise(e1, {}) - e1 * e1.transpose()).cwiseAbs().maxCoeff() < 1e-15);

  NoiseChannelParams half;
  half.p_ba = 0.5;
  Matrix4 rho = apply_noise(e1, half);
  Matrix4 expect = Matrix4::Zero();
  expect(0, 0) = expect(2, 2) = 0.5;
  CHECK((rho - expect).cwiseAbs().maxCoeff() < 1e-15);

  NoiseChannelParams bad;
  bad.p_pa = 0.6;
  CHECK_THROWS_AS(apply_noise(e1, bad), Error);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    Vector4 v;
    for (int k = 0; k < 4; ++k) v[k] = gauss(rng);
    v.normalize();
    NoiseChannelParams p{uni(rng), uni(rng), 0.5 * uni(rng)};
    const Matrix4 out = apply_noise(v, p);
    CHECK(std::abs(out.trace() - 1.0) < 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix4> es(out, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("exact mode reproduces the ideal limit") {
  for (const char* name : {"peres24", "yo13"}) {
    const MeasurementSet s = load_set(name);
    const OrthogonalityGraph g = build_graph(s);
    const ExperimentRecord rec = simulate_experiment(s, g, {}, 0.0, 0, 1);
    CHECK(rec.exact_mode());
    for (int i = 0; i < s.size(); ++i)
      CHECK(rec.p[i] == doctest::Approx(1.0 / s.dim).epsilon(1e-13));
    for (const auto& [e, v] : rec.eps) CHECK(v < 1e-12);
    for (const auto& [e, v] : rec.sigma_eps) CHECK(v == 0.0);
  }
}

TEST_CASE("offset angle produces monotone mean eps") {
  const MeasurementSet s = load_set("peres24");
  const OrthogonalityGraph g = build_graph(s);
  double last = 0.0;
  for (double dt = 0.1; dt <= 1.05; dt += 0.1) {
    const ExperimentRecord rec = simulate_experiment(s, g, {}, dt, 0, 1);
    const double m = mean_eps(rec);
    CHECK(m > last);
    last = m;
  }
}

TEST_CASE("qutrit embedding keeps basis probabilities normalized") {
  const MeasurementSet s = load_set("yo13");
  const OrthogonalityGraph g = build_graph(s);
  NoiseChannelParams noise{1e-3, 1e-3, 1e-2};
  const ExperimentRecord rec = simulate_experiment(s, g, noise, 0.2, 0, 1);
  // First basis {v1,v2,v3}: all three designated there, ratios sum to 1.
  CHECK(rec.p[0] + rec.p[1] + rec.p[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact pair probability") {
  const MeasurementSet s = load_set("peres24");
  const OrthogonalityGraph g = build_graph(s);
  const RationalMatrix ov = ideal_overlaps(s);
  for (const auto& [i, j] : g.edges) CHECK(exact_pair_probability(i, j, {}, 0.0, s, g) < 1e-12);
  for (int i = 0; i < s.size(); ++i)
    for (int j = 0; j < s.size(); ++j) {
      if (i == j || g.has_edge(i, j)) continue;
      CHECK(std::abs(exact_pair_probability(i, j, {}, 0.0, s, g) - ov(i, j).value()) < 1e-12);
    }
  NoiseChannelParams half;
  half.p_ba = 0.5;
  CHECK(exact_pair_probability(0, 2, half, 0.0, s, g) == doctest::Approx(0.5));
}

TEST_CASE("sampling agrees with exact mode within statistics") {
  const MeasurementSet s = load_set("yo13");
  const OrthogonalityGraph g = build_graph(s);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const long long shots = 1000000;
  const int reps = 50;
  for (int setting = 0; setting < 20; ++setting) {
    NoiseChannelParams noise{2e-3 * uni(rng), 2e-3 * uni(rng), 2e-2 * uni(rng)};
    const double dt = 0.5 * uni(rng);
    const ExperimentRecord exact = simulate_experiment(s, g, noise, dt, 0, 1);
    const auto probe = exact.eps.begin()->first;
    const double target = exact.eps.at(probe);
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < reps; ++r) {
      const ExperimentRecord smp =
          simulate_experiment(s, g, noise, dt, shots, 1000 + 77 * setting + r);
      sum += smp.eps.at(probe);
      sum2 += smp.eps.at(probe) * smp.eps.at(probe);
    }
    const double mean = sum / reps;
    const double var = std::max(sum2 / reps - mean * mean, 1e-300);
    const double se = std::sqrt(var / reps);
    CHECK(std::abs(mean - target) < 3.0 * se + 1e-9);
  }
}

TEST_CASE("simulation is deterministic per seed") {
  const MeasurementSet s = load_set("yo13");
  const OrthogonalityGraph g = build_graph(s);
  const ExperimentRecord a = simulate_experiment(s, g, {}, 0.1, 5000, 42);
  const ExperimentRecord b = simulate_experiment(s, g, {}, 0.1, 5000, 42);
  const ExperimentRecord c = simulate_experiment(s, g, {}, 0.1, 5000, 43);
  CHECK(a.p == b.p);
  CHECK(a.eps == b.eps);
  CHECK(a.m1_counts == b.m1_counts);
  CHECK(a.m2_counts != c.m2_counts);
}

TEST_CASE("invalid simulate arguments") {
  const MeasurementSet s = load_set("yo13");
  const OrthogonalityGraph g = build_graph(s);
  CHECK_THROWS_AS(simulate_experiment(s, g, {}, 0.0, -1, 1), Error);

  MeasurementSet s5;
  s5.name = "basis5";
  s5.dim = 5;
  for (int i = 0; i < 5; ++i) {
    IntVec v = IntVec::Zero(5);
    v[i] = 1;
    s5.vectors.push_back(v);
  }
  s5.vertex_weights.assign(5, 1);
  s5.edge_weight = 1;
  const OrthogonalityGraph g5 = build_graph(s5);
  CHECK_THROWS_WITH_AS(simulate_experiment(s5, g5, {}, 0.3, 0, 1),
                       doctest::Contains("dimension 4"), Error);
  // Zero offset, zero noise still simulates fine in any dimension.
  const ExperimentRecord rec = simulate_experiment(s5, g5, {}, 0.0, 0, 1);
  CHECK(rec.p[0] == doctest::Approx(0.2));
}
