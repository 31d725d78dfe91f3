#pragma once

#include "sicert/types.hpp"

#include <string>
#include <vector>

namespace sicert {

/// A target state-independent-contextuality set: integer projector vectors
/// with witness weights, plus any auxiliary vectors needed to complete
/// measurement bases experimentally.
struct MeasurementSet {
  std::string name;
  int dim = 0;
  std::vector<IntVec> vectors;
  std::vector<std::int64_t> vertex_weights;
  std::int64_t edge_weight = 1;
  std::vector<IntVec> aux_vectors;
  bool force_unit_context_gram = false;

  int size() const { return static_cast<int>(vectors.size()); }

  /// Throws Error with the offending index if any type invariant is violated.
  void validate() const;
};

/// Measurement-basis members are vertex indices (>= 0) or auxiliary vectors
/// encoded as aux_index(a) = -(a + 1).
inline int aux_index(int a) { return -(a + 1); }
inline bool is_aux(int idx) { return idx < 0; }
inline int aux_slot(int idx) { return -idx - 1; }

struct OrthogonalityGraph {
  int n = 0;
  std::vector<VertexPair> edges;              // i < j, exact integer orthogonality
  std::vector<std::vector<bool>> adjacent;    // n x n symmetric
  std::vector<std::vector<int>> contexts;     // size-d cliques, ascending vertex order
  std::vector<std::vector<int>> measurement_bases;  // cover all vertices; may use aux indices

  bool has_edge(int i, int j) const { return adjacent[i][j]; }

  /// Index of the basis used to measure vertex v (first basis containing it).
  int basis_of(int v) const;

  /// Contexts containing vertex v.
  std::vector<int> contexts_of(int v) const;
};

/// Loads a built-in set ("peres24", "yo13") or, if the argument names an
/// existing file, parses a JSON set definition. Validates all invariants.
MeasurementSet load_set(const std::string& name_or_path);

MeasurementSet builtin_peres24();
MeasurementSet builtin_yo13();

/// Exact-integer orthogonality graph, all size-d cliques as contexts, and a
/// greedy measurement-basis cover (auxiliary vectors used when provided).
OrthogonalityGraph build_graph(const MeasurementSet& set);

/// |<v_i|v_j>|^2 for unit-normalized vectors as exact rationals.
RationalMatrix ideal_overlaps(const MeasurementSet& set);

/// Sum_i w_i / d: the witness value of the ideal realization on any state.
Rational ideal_witness_optimum(const MeasurementSet& set);

/// Unit-normalized vertex (idx >= 0) or auxiliary (idx < 0) vector.
Vector unit_vector_of(const MeasurementSet& set, int idx);

}  // namespace sicert
