#include "sicert/geometry.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>

namespace sicert {

namespace {

IntVec make_vec(std::initializer_list<std::int64_t> xs) {
  IntVec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (auto x : xs) v[k++] = x;
  return v;
}

std::int64_t dot(const IntVec& a, const IntVec& b) {
  std::int64_t s = 0;
  for (Eigen::Index k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

void MeasurementSet::validate() const {
  if (dim <= 0) throw Error(name + ": dimension must be positive");
  if (vectors.empty()) throw Error(name + ": empty vector list");
  if (vectors.size() != vertex_weights.size())
    throw Error(name + ": vectors and vertex_weights lengths differ");
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != dim)
      throw Error(name + ": vector " + std::to_string(i) + " has wrong length");
    if (vectors[i].isZero()) throw Error(name + ": vector " + std::to_string(i) + " is zero");
    if (vertex_weights[i] <= 0)
      throw Error(name + ": weight " + std::to_string(i) + " must be positive");
  }
  for (std::size_t a = 0; a < aux_vectors.size(); ++a) {
    if (aux_vectors[a].size() != dim)
      throw Error(name + ": aux vector " + std::to_string(a) + " has wrong length");
    if (aux_vectors[a].isZero()) throw Error(name + ": aux vector " + std::to_string(a) + " is zero");
  }
  const std::int64_t wmax = *std::max_element(vertex_weights.begin(), vertex_weights.end());
  if (edge_weight < wmax) throw Error(name + ": edge_weight must be >= max vertex weight");
}

MeasurementSet builtin_peres24() {
  MeasurementSet s;
  s.name = "peres24";
  s.dim = 4;
  s.vectors = {
      make_vec({1, 0, 0, 0}),   make_vec({0, 1, 0, 0}),   make_vec({0, 0, 1, 0}),
      make_vec({0, 0, 0, 1}),   make_vec({1, 1, 1, 1}),   make_vec({1, 1, -1, -1}),
      make_vec({1, -1, 1, -1}), make_vec({1, -1, -1, 1}), make_vec({1, 1, 1, -1}),
      make_vec({1, 1, -1, 1}),  make_vec({1, -1, 1, 1}),  make_vec({-1, 1, 1, 1}),
      make_vec({1, 1, 0, 0}),   make_vec({1, -1, 0, 0}),  make_vec({0, 0, 1, 1}),
      make_vec({0, 0, 1, -1}),  make_vec({1, 0, 1, 0}),   make_vec({1, 0, -1, 0}),
      make_vec({0, 1, 0, 1}),   make_vec({0, 1, 0, -1}),  make_vec({1, 0, 0, 1}),
      make_vec({1, 0, 0, -1}),  make_vec({0, 1, 1, 0}),   make_vec({0, 1, -1, 0}),
  };
  s.vertex_weights.assign(24, 1);
  s.edge_weight = 1;
  return s;
}

MeasurementSet builtin_yo13() {
  MeasurementSet s;
  s.name = "yo13";
  s.dim = 3;
  s.vectors = {
      make_vec({1, 0, 0}),  make_vec({0, 1, 0}),  make_vec({0, 0, 1}),  make_vec({0, 1, 1}),
      make_vec({0, 1, -1}), make_vec({1, 0, 1}),  make_vec({1, 0, -1}), make_vec({1, 1, 0}),
      make_vec({1, -1, 0}), make_vec({1, 1, 1}),  make_vec({1, 1, -1}), make_vec({-1, 1, 1}),
      make_vec({1, -1, 1}),
  };
  s.vertex_weights = {3, 3, 3, 3, 3, 3, 3, 3, 3, 2, 2, 2, 2};
  s.edge_weight = 3;
  s.aux_vectors = {make_vec({2, -1, -1}), make_vec({-1, 2, 1}), make_vec({1, -1, 2}),
                   make_vec({1, 2, 1})};
  s.force_unit_context_gram = true;
  return s;
}

MeasurementSet load_set(const std::string& name_or_path) {
  if (name_or_path == "peres24") return builtin_peres24();
  if (name_or_path == "yo13") return builtin_yo13();

  std::ifstream in(name_or_path);
  if (!in) throw Error("unknown set '" + name_or_path + "' (not built in, not a readable file)");

  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed set file '" + name_or_path + "': " + e.what());
  }

  auto parse_vectors = [&](const nlohmann::json& arr, const char* what) {
    std::vector<IntVec> out;
    for (const auto& row : arr) {
      IntVec v(static_cast<Eigen::Index>(row.size()));
      Eigen::Index k = 0;
      for (const auto& x : row) {
        if (!x.is_number_integer()) throw Error(std::string("malformed set file: ") + what + " entries must be integers");
        v[k++] = x.get<std::int64_t>();
      }
      out.push_back(std::move(v));
    }
    return out;
  };

  MeasurementSet s;
  try {
    s.name = j.at("name").get<std::string>();
    s.dim = j.at("dim").get<int>();
    s.vectors = parse_vectors(j.at("vectors"), "vectors");
    for (const auto& w : j.at("vertex_weights")) {
      if (!w.is_number_integer()) throw Error("malformed set file: vertex_weights must be integers");
      s.vertex_weights.push_back(w.get<std::int64_t>());
    }
    if (!j.at("edge_weight").is_number_integer())
      throw Error("malformed set file: edge_weight must be an integer");
    s.edge_weight = j.at("edge_weight").get<std::int64_t>();
    if (j.contains("aux_vectors")) s.aux_vectors = parse_vectors(j["aux_vectors"], "aux_vectors");
    if (j.contains("force_unit_context_gram"))
      s.force_unit_context_gram = j["force_unit_context_gram"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed set file '" + name_or_path + "': " + e.what());
  }
  s.validate();
  return s;
}

int OrthogonalityGraph::basis_of(int v) const {
  for (std::size_t b = 0; b < measurement_bases.size(); ++b)
    for (int m : measurement_bases[b])
      if (m == v) return static_cast<int>(b);
  throw Error("vertex " + std::to_string(v) + " not covered by any measurement basis");
}

std::vector<int> OrthogonalityGraph::contexts_of(int v) const {
  std::vector<int> out;
  for (std::size_t c = 0; c < contexts.size(); ++c)
    if (std::find(contexts[c].begin(), contexts[c].end(), v) != contexts[c].end())
      out.push_back(static_cast<int>(c));
  return out;
}

namespace {

// Depth-first extension of cliques to exactly size d. Vertices are added in
// ascending order so each clique is produced once.
void extend_cliques(const std::vector<std::vector<bool>>& adj, int n, int d,
                    std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == d) {
    out.push_back(current);
    return;
  }
  const int start = current.empty() ? 0 : current.back() + 1;
  for (int v = start; v < n; ++v) {
    bool ok = true;
    for (int u : current)
      if (!adj[u][v]) {
        ok = false;
        break;
      }
    if (!ok) continue;
    current.push_back(v);
    extend_cliques(adj, n, d, current, out);
    current.pop_back();
  }
}

// Tries to complete `members` (indices into `all`) to a mutually orthogonal
// set of size d, preferring candidates in the given order.
bool complete_basis(const std::vector<IntVec>& all, const std::vector<int>& order, int d,
                    std::vector<int>& members) {
  if (static_cast<int>(members.size()) == d) return true;
  for (int cand : order) {
    if (std::find(members.begin(), members.end(), cand) != members.end()) continue;
    bool ok = true;
    for (int m : members)
      if (dot(all[static_cast<std::size_t>(m)], all[static_cast<std::size_t>(cand)]) != 0) {
        ok = false;
        break;
      }
    if (!ok) continue;
    members.push_back(cand);
    if (complete_basis(all, order, d, members)) return true;
    members.pop_back();
  }
  return false;
}

}  // namespace

OrthogonalityGraph build_graph(const MeasurementSet& set) {
  set.validate();
  const int n = set.size();
  const int d = set.dim;

  OrthogonalityGraph g;
  g.n = n;
  g.adjacent.assign(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (dot(set.vectors[i], set.vectors[j]) == 0) {
        g.adjacent[i][j] = g.adjacent[j][i] = true;
        g.edges.emplace_back(i, j);
      }

  std::vector<int> current;
  extend_cliques(g.adjacent, n, d, current, g.contexts);

  if (set.name == "yo13") {
    // Four complete contexts plus the four auxiliary bases prescribed for the
    // experiment; aux vectors complete bases but are never SDP vertices.
    g.measurement_bases = {{0, 1, 2},          {0, 3, 4},          {1, 5, 6},
                           {2, 7, 8},          {4, 9, aux_index(0)}, {5, 10, aux_index(1)},
                           {7, 11, aux_index(2)}, {6, 12, aux_index(3)}};
  } else {
    // Greedy context cover first, then per-vertex completion with the
    // remaining vectors and, as a last resort, aux vectors.
    std::vector<bool> covered(n, false);
    int n_covered = 0;
    while (n_covered < n) {
      int best = -1, best_gain = 0;
      for (std::size_t c = 0; c < g.contexts.size(); ++c) {
        int gain = 0;
        for (int v : g.contexts[c])
          if (!covered[v]) ++gain;
        if (gain > best_gain) {
          best_gain = gain;
          best = static_cast<int>(c);
        }
      }
      if (best < 0) break;
      g.measurement_bases.push_back(g.contexts[best]);
      for (int v : g.contexts[best])
        if (!covered[v]) {
          covered[v] = true;
          ++n_covered;
        }
    }
    if (n_covered < n) {
      // Vertices in no complete context: build a combined pool of vertex and
      // aux vectors and search for any orthogonal completion.
      std::vector<IntVec> pool = set.vectors;
      pool.insert(pool.end(), set.aux_vectors.begin(), set.aux_vectors.end());
      std::vector<int> order(pool.size());
      for (std::size_t k = 0; k < pool.size(); ++k) order[k] = static_cast<int>(k);
      for (int v = 0; v < n; ++v) {
        if (covered[v]) continue;
        std::vector<int> members{v};
        if (!complete_basis(pool, order, d, members))
          throw Error(set.name + ": vertex " + std::to_string(v) +
                      " cannot be completed to an orthogonal basis even with aux vectors");
        std::vector<int> basis;
        for (int m : members) basis.push_back(m < n ? m : aux_index(m - n));
        g.measurement_bases.push_back(basis);
        for (int m : members)
          if (m < n && !covered[m]) {
            covered[m] = true;
            ++n_covered;
          }
      }
    }
  }

  // Every basis must be mutually orthogonal and of size d.
  for (const auto& basis : g.measurement_bases) {
    if (static_cast<int>(basis.size()) != d)
      throw Error(set.name + ": measurement basis of wrong size");
    for (std::size_t a = 0; a < basis.size(); ++a)
      for (std::size_t b = a + 1; b < basis.size(); ++b) {
        const IntVec& va = is_aux(basis[a]) ? set.aux_vectors[aux_slot(basis[a])]
                                            : set.vectors[basis[a]];
        const IntVec& vb = is_aux(basis[b]) ? set.aux_vectors[aux_slot(basis[b])]
                                            : set.vectors[basis[b]];
        if (dot(va, vb) != 0) throw Error(set.name + ": non-orthogonal measurement basis");
      }
  }
  return g;
}

RationalMatrix ideal_overlaps(const MeasurementSet& set) {
  const int n = set.size();
  RationalMatrix m(n);
  for (int i = 0; i < n; ++i) {
    const std::int64_t ni = dot(set.vectors[i], set.vectors[i]);
    for (int j = 0; j < n; ++j) {
      const std::int64_t nj = dot(set.vectors[j], set.vectors[j]);
      const std::int64_t dij = dot(set.vectors[i], set.vectors[j]);
      m(i, j) = Rational(dij * dij, ni * nj);
    }
  }
  return m;
}

Rational ideal_witness_optimum(const MeasurementSet& set) {
  Rational sum(0);
  for (auto w : set.vertex_weights) sum = sum + Rational(w);
  return sum / Rational(set.dim);
}

Vector unit_vector_of(const MeasurementSet& set, int idx) {
  const IntVec& v = is_aux(idx) ? set.aux_vectors.at(aux_slot(idx)) : set.vectors.at(idx);
  Vector u = v.cast<double>();
  return u / u.norm();
}

}  // namespace sicert
