#include <doctest.h>

#include "sicert/geometry.hpp"
#include "sicert/witness.hpp"

#include <random>

using namespace sicert;

namespace {

std::vector<Vector> ideal_unit_vectors(const MeasurementSet& s) {
  std::vector<Vector> out;
  for (int i = 0; i < s.size(); ++i) out.push_back(unit_vector_of(s, i));
  return out;
}

WitnessInputs ideal_inputs(const MeasurementSet& s, const OrthogonalityGraph& g) {
  WitnessInputs in;
  in.p = Vector::Constant(s.size(), 1.0 / s.dim);
  in.sigma_p = Vector::Zero(s.size());
  for (const auto& e : g.edges) {
    in.eps[e] = 0.0;
    in.sigma_eps[e] = 0.0;
  }
  return in;
}

}  // namespace

TEST_CASE("witness value at ideal statistics") {
  const MeasurementSet p24 = load_set("peres24");
  const OrthogonalityGraph g24 = build_graph(p24);
  CHECK(witness_value(p24, g24, ideal_inputs(p24, g24)).w == doctest::Approx(6.0).epsilon(1e-12));

  const MeasurementSet y13 = load_set("yo13");
  const OrthogonalityGraph g13 = build_graph(y13);
  CHECK(witness_value(y13, g13, ideal_inputs(y13, g13)).w ==
        doctest::Approx(35.0 / 3.0).epsilon(1e-12));

  WitnessInputs zero = ideal_inputs(p24, g24);
  zero.p.setZero();
  CHECK(witness_value(p24, g24, zero).w == doctest::Approx(0.0));
}

TEST_CASE("witness value requires every edge entry") {
  const MeasurementSet s = load_set("yo13");
  const OrthogonalityGraph g = build_graph(s);
  WitnessInputs in = ideal_inputs(s, g);
  in.eps.erase(in.eps.begin());
  CHECK_THROWS_WITH_AS(witness_value(s, g, in), doctest::Contains("missing eps"), Error);
}

TEST_CASE("worst case bound") {
  CHECK(worst_case_bound({6.0, 0.0}, Rational(6), 4).w == doctest::Approx(6.0));
  CHECK(worst_case_bound({5.9, 0.0}, Rational(6), 4).w == doctest::Approx(5.6));
  CHECK(worst_case_bound({35.0 / 3.0, 0.0}, Rational(35, 3), 3).w ==
        doctest::Approx(35.0 / 3.0));
  // Sigma scales by d.
  CHECK(worst_case_bound({5.9, 0.01}, Rational(6), 4).sigma == doctest::Approx(0.04));
}

TEST_CASE("witness operator at the ideal vectors is W_opt * I") {
  for (const char* name : {"peres24", "yo13"}) {
    const MeasurementSet s = load_set(name);
    const OrthogonalityGraph g = build_graph(s);
    const Matrix op = witness_operator(ideal_unit_vectors(s), s, g);
    const double wopt = ideal_witness_optimum(s).value();
    const SpectrumBounds sb = spectrum_bounds(op);
    CHECK(std::abs(sb.lambda_min - wopt) < 1e-9);
    CHECK(std::abs(sb.lambda_max - wopt) < 1e-9);
    CHECK(std::abs(sb.trace_over_d - wopt) < 1e-9);
  }
}

TEST_CASE("witness operator for a single projector") {
  MeasurementSet s;
  s.name = "one";
  s.dim = 3;
  IntVec v = IntVec::Zero(3);
  v[0] = 1;
  s.vectors.push_back(v);
  s.vertex_weights = {1};
  s.edge_weight = 1;
  // No orthogonal completion exists for a lone vector; graph built by hand.
  OrthogonalityGraph g;
  g.n = 1;
  g.adjacent.assign(1, std::vector<bool>(1, false));
  const Matrix op = witness_operator({unit_vector_of(s, 0)}, s, g);
  Matrix expect = Matrix::Zero(3, 3);
  expect(0, 0) = 1.0;
  CHECK((op - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("witness operator rejects non-unit vectors") {
  const MeasurementSet s = load_set("yo13");
  const OrthogonalityGraph g = build_graph(s);
  auto vs = ideal_unit_vectors(s);
  vs[3] *= 1.0 + 1e-6;
  CHECK_THROWS_WITH_AS(witness_operator(vs, s, g), doctest::Contains("not unit"), Error);
}

TEST_CASE("spectrum bounds") {
  CHECK(spectrum_bounds(Matrix::Identity(3, 3)).lambda_min == doctest::Approx(1.0));
  CHECK(spectrum_bounds(Matrix::Identity(3, 3)).trace_over_d == doctest::Approx(1.0));
  Matrix diag = Matrix::Zero(4, 4);
  diag.diagonal() << 0, 6, 6, 6;
  const SpectrumBounds sb = spectrum_bounds(diag);
  CHECK(sb.lambda_min == doctest::Approx(0.0));
  CHECK(sb.lambda_max == doctest::Approx(6.0));
  CHECK(sb.trace_over_d == doctest::Approx(4.5));

  Matrix asym = Matrix::Zero(2, 2);
  asym(0, 1) = 1e-6;
  CHECK_THROWS_AS(spectrum_bounds(asym), Error);
}

TEST_CASE("state independence at ideality") {
  const MeasurementSet s = load_set("peres24");
  const OrthogonalityGraph g = build_graph(s);
  const auto vs = ideal_unit_vectors(s);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 50; ++trial) {
    Vector psi(4);
    for (int k = 0; k < 4; ++k) psi[k] = gauss(rng);
    psi.normalize();
    WitnessInputs in;
    in.p = Vector(s.size());
    for (int i = 0; i < s.size(); ++i) {
      const double a = vs[i].dot(psi);
      in.p[i] = a * a;
    }
    for (const auto& e : g.edges) in.eps[e] = 0.0;
    CHECK(std::abs(witness_value(s, g, in).w - 6.0) < 1e-12);
  }
}

TEST_CASE("witness is affine with the documented coefficients") {
  const MeasurementSet s = load_set("yo13");
  const OrthogonalityGraph g = build_graph(s);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  WitnessInputs in;
  in.p = Vector(s.size());
  for (int i = 0; i < s.size(); ++i) in.p[i] = uni(rng) * 0.4;
  for (const auto& e : g.edges) in.eps[e] = uni(rng) * 0.01;

  const double h = 1e-4;
  const double wij = static_cast<double>(s.edge_weight);
  for (int i = 0; i < s.size(); ++i) {
    WitnessInputs up = in, dn = in;
    up.p[i] += h;
    dn.p[i] -= h;
    const double slope = (witness_value(s, g, up).w - witness_value(s, g, dn).w) / (2 * h);
    double expect = static_cast<double>(s.vertex_weights[i]);
    for (const auto& [e, eps] : in.eps)
      if (e.first == i) expect -= wij * eps;
    CHECK(std::abs(slope - expect) < 1e-9);
  }
  for (const auto& [e, eps] : in.eps) {
    WitnessInputs up = in, dn = in;
    up.eps[e] += h;
    dn.eps[e] -= h;
    const double slope = (witness_value(s, g, up).w - witness_value(s, g, dn).w) / (2 * h);
    CHECK(std::abs(slope - (-wij * in.p[e.first])) < 1e-9);
  }
}

TEST_CASE("doubling input sigmas doubles the output sigma") {
  const MeasurementSet s = load_set("yo13");
  const OrthogonalityGraph g = build_graph(s);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  WitnessInputs in;
  in.p = Vector(s.size());
  in.sigma_p = Vector(s.size());
  for (int i = 0; i < s.size(); ++i) {
    in.p[i] = uni(rng);
    in.sigma_p[i] = 0.01 * uni(rng);
  }
  for (const auto& e : g.edges) {
    in.eps[e] = 0.01 * uni(rng);
    in.sigma_eps[e] = 0.001 * uni(rng);
  }
  WitnessInputs twice = in;
  twice.sigma_p *= 2.0;
  for (auto& [e, sv] : twice.sigma_eps) sv *= 2.0;
  CHECK(witness_value(s, g, twice).sigma ==
        doctest::Approx(2.0 * witness_value(s, g, in).sigma).epsilon(1e-12));
}

TEST_CASE("averaged edge orientation keeps the operator and scalar consistent") {
  // When both orientations of an edge are supplied, each contributes half.
  const MeasurementSet s = load_set("yo13");
  const OrthogonalityGraph g = build_graph(s);
  WitnessInputs one;
  one.p = Vector::Constant(s.size(), 1.0 / 3.0);
  WitnessInputs both = one;
  for (const auto& [i, j] : g.edges) {
    one.eps[{i, j}] = 0.004;
    both.eps[{i, j}] = 0.004;
    both.eps[{j, i}] = 0.004;
  }
  CHECK(witness_value(s, g, one).w == doctest::Approx(witness_value(s, g, both).w).epsilon(1e-12));
}
