#include <doctest.h>

#include "sicert/geometry.hpp"

#include <cstdio>
#include <fstream>
#include <set>

using namespace sicert;

namespace {

MeasurementSet single_basis_set(int d) {
  MeasurementSet s;
  s.name = "basis";
  s.dim = d;
  for (int i = 0; i < d; ++i) {
    IntVec v = IntVec::Zero(d);
    v[i] = 1;
    s.vectors.push_back(v);
  }
  s.vertex_weights.assign(d, 1);
  s.edge_weight = 1;
  return s;
}

}  // namespace

TEST_CASE("built-in peres24 matches the published table") {
  const MeasurementSet s = load_set("peres24");
  CHECK(s.dim == 4);
  CHECK(s.size() == 24);
  CHECK(s.edge_weight == 1);
  for (auto w : s.vertex_weights) CHECK(w == 1);
  CHECK(s.aux_vectors.empty());
  CHECK_FALSE(s.force_unit_context_gram);
  // v_5 and v_12 (1-based) as published.
  CHECK(s.vectors[4] == IntVec(Eigen::Vector4i(1, 1, 1, 1).cast<std::int64_t>()));
  CHECK(s.vectors[11] == IntVec(Eigen::Vector4i(-1, 1, 1, 1).cast<std::int64_t>()));
  // All 24 rays distinct (no pair proportional).
  for (int i = 0; i < 24; ++i)
    for (int j = i + 1; j < 24; ++j) {
      const auto &a = s.vectors[i], &b = s.vectors[j];
      std::int64_t dot = 0, na = 0, nb = 0;
      for (int k = 0; k < 4; ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
      }
      CHECK(dot * dot != na * nb);
    }
}

TEST_CASE("built-in yo13 matches the published table") {
  const MeasurementSet s = load_set("yo13");
  CHECK(s.dim == 3);
  CHECK(s.size() == 13);
  CHECK(s.edge_weight == 3);
  for (int i = 0; i < 9; ++i) CHECK(s.vertex_weights[i] == 3);
  for (int i = 9; i < 13; ++i) CHECK(s.vertex_weights[i] == 2);
  // v_C = (-1,1,1) with weight 2.
  CHECK(s.vectors[11][0] == -1);
  CHECK(s.vectors[11][1] == 1);
  CHECK(s.vectors[11][2] == 1);
  REQUIRE(s.aux_vectors.size() == 4);
  CHECK(s.aux_vectors[0][0] == 2);
  CHECK(s.force_unit_context_gram);
}

TEST_CASE("unknown set name is rejected") {
  CHECK_THROWS_AS(load_set("nosuchset"), Error);
}

TEST_CASE("set-definition files round-trip and are validated") {
  const char* path = "test_set_ok.json";
  {
    std::ofstream f(path);
    f << R"({"name":"mini","dim":2,"vectors":[[1,0],[0,1],[1,1]],
             "vertex_weights":[1,1,1],"edge_weight":2})";
  }
  const MeasurementSet s = load_set(path);
  CHECK(s.name == "mini");
  CHECK(s.dim == 2);
  CHECK(s.size() == 3);
  CHECK(s.edge_weight == 2);
  std::remove(path);

  const char* bad = "test_set_bad.json";
  {
    std::ofstream f(bad);
    f << R"({"name":"bad","dim":2,"vectors":[[1,0],[0,0]],
             "vertex_weights":[1,1],"edge_weight":1})";
  }
  CHECK_THROWS_WITH_AS(load_set(bad), doctest::Contains("vector 1"), Error);
  std::remove(bad);

  const char* badw = "test_set_badw.json";
  {
    std::ofstream f(badw);
    f << R"({"name":"badw","dim":2,"vectors":[[1,0],[0,1]],
             "vertex_weights":[2,1],"edge_weight":1})";
  }
  CHECK_THROWS_WITH_AS(load_set(badw), doctest::Contains("edge_weight"), Error);
  std::remove(badw);
}

TEST_CASE("peres24 orthogonality graph") {
  const MeasurementSet s = load_set("peres24");
  const OrthogonalityGraph g = build_graph(s);

  CHECK(g.has_edge(4, 5));  // (1,1,1,1) vs (1,1,-1,-1)

  // Symmetry and context consistency.
  for (const auto& [i, j] : g.edges) {
    CHECK(g.adjacent[i][j]);
    CHECK(g.adjacent[j][i]);
  }
  for (const auto& c : g.contexts) {
    REQUIRE(c.size() == 4);
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b) CHECK(g.has_edge(c[a], c[b]));
  }

  CHECK(g.contexts.size() == 24);
  for (int v = 0; v < g.n; ++v) CHECK(g.contexts_of(v).size() == 4);

  // Every vertex is covered by a measurement basis made of set vectors only.
  std::set<int> covered;
  for (const auto& basis : g.measurement_bases)
    for (int m : basis) {
      CHECK(!is_aux(m));
      covered.insert(m);
    }
  CHECK(covered.size() == 24);
}

TEST_CASE("yo13 orthogonality graph") {
  const MeasurementSet s = load_set("yo13");
  const OrthogonalityGraph g = build_graph(s);

  REQUIRE(g.contexts.size() == 4);
  const std::vector<std::vector<int>> expected = {{0, 1, 2}, {0, 3, 4}, {1, 5, 6}, {2, 7, 8}};
  for (const auto& c : expected)
    CHECK(std::find(g.contexts.begin(), g.contexts.end(), c) != g.contexts.end());

  // Eight bases: the four complete contexts plus the four auxiliary ones.
  REQUIRE(g.measurement_bases.size() == 8);
  std::set<int> covered;
  for (const auto& basis : g.measurement_bases)
    for (int m : basis)
      if (!is_aux(m)) covered.insert(m);
  CHECK(covered.size() == 13);
}

TEST_CASE("ideal overlaps are exact rationals") {
  const MeasurementSet s = load_set("peres24");
  const OrthogonalityGraph g = build_graph(s);
  const RationalMatrix ov = ideal_overlaps(s);

  CHECK(ov(0, 4) == Rational(1, 4));  // (1,0,0,0) vs (1,1,1,1)
  for (int i = 0; i < s.size(); ++i) CHECK(ov(i, i) == Rational(1));
  for (int i = 0; i < s.size(); ++i)
    for (int j = i + 1; j < s.size(); ++j) {
      if (g.has_edge(i, j))
        CHECK(ov(i, j) == Rational(0));
      else
        CHECK(ov(i, j).num > 0);
    }

  const MeasurementSet y = load_set("yo13");
  const RationalMatrix ovy = ideal_overlaps(y);
  CHECK(ovy(0, 9) == Rational(1, 3));  // v_1 vs v_A
}

TEST_CASE("ideal witness optimum") {
  CHECK(ideal_witness_optimum(load_set("peres24")) == Rational(6));
  CHECK(ideal_witness_optimum(load_set("yo13")) == Rational(35, 3));
  CHECK(ideal_witness_optimum(single_basis_set(5)) == Rational(1));
}

TEST_CASE("contexts resolve the identity exactly") {
  for (const char* name : {"peres24", "yo13"}) {
    const MeasurementSet s = load_set(name);
    const OrthogonalityGraph g = build_graph(s);
    for (const auto& c : g.contexts) {
      // Sum over the context of |v><v| / ||v||^2 in exact rationals.
      std::vector<std::vector<Rational>> sum(
          s.dim, std::vector<Rational>(s.dim, Rational(0)));
      for (int v : c) {
        std::int64_t n2 = 0;
        for (int k = 0; k < s.dim; ++k) n2 += s.vectors[v][k] * s.vectors[v][k];
        for (int r = 0; r < s.dim; ++r)
          for (int col = 0; col < s.dim; ++col)
            sum[r][col] = sum[r][col] + Rational(s.vectors[v][r] * s.vectors[v][col], n2);
      }
      for (int r = 0; r < s.dim; ++r)
        for (int col = 0; col < s.dim; ++col)
          CHECK(sum[r][col] == (r == col ? Rational(1) : Rational(0)));
    }
  }
}
