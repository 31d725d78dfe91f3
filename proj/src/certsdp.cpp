#include "sicert/certsdp.hpp"
#include <cstdio>

#include "sicert/noisefit.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace sicert {

namespace {

constexpr double kZeroBound = 1e-12;
constexpr double kEagerBound = 5e-3;
const double kInf = std::numeric_limits<double>::infinity();

int thread_count(const CertOptions& opts, int tasks) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return std::max(1, std::min(tasks, opts.threads > 0 ? opts.threads : static_cast<int>(hw)));
}

// Runs fn(k) for k in [0, tasks); exceptions are rethrown on the caller
// thread once all workers stop. Each task writes only its own slot, so the
// results are independent of scheduling.
template <typename Fn>
void parallel_for(int tasks, int threads, std::atomic<bool>* stop, Fn&& fn) {
  if (threads <= 1 || tasks <= 1) {
    for (int k = 0; k < tasks; ++k) {
      if (stop && stop->load()) break;
      fn(k);
    }
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mx;
  auto worker = [&] {
    for (int k = next.fetch_add(1); k < tasks; k = next.fetch_add(1)) {
      if (stop && stop->load()) break;
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mx);
        if (!err) err = std::current_exception();
        if (stop) stop->store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::vector<VertexPair> non_edges(const OrthogonalityGraph& graph) {
  std::vector<VertexPair> out;
  for (int i = 0; i < graph.n; ++i)
    for (int j = i + 1; j < graph.n; ++j)
      if (!graph.has_edge(i, j)) out.emplace_back(i, j);
  return out;
}

}  // namespace

EpsilonPrimeMatrix EpsilonPrimeMatrix::initial(const OrthogonalityGraph& graph,
                                               const std::map<VertexPair, double>& eps_on_edges) {
  EpsilonPrimeMatrix out;
  out.m = Matrix::Constant(graph.n, graph.n, 1.0);
  for (const auto& [i, j] : graph.edges) {
    const auto fwd = eps_on_edges.find({i, j});
    const auto rev = eps_on_edges.find({j, i});
    if (fwd == eps_on_edges.end() && rev == eps_on_edges.end())
      throw Error("eps_prime: missing on-edge value for (" + std::to_string(i) + "," +
                  std::to_string(j) + ")");
    // Both orientations estimate the same pure-state overlap; the larger one
    // is a valid upper bound for the pair.
    double v = 0.0;
    if (fwd != eps_on_edges.end()) v = std::max(v, fwd->second);
    if (rev != eps_on_edges.end()) v = std::max(v, rev->second);
    if (v < 0.0 || v > 1.0) throw Error("eps_prime: on-edge value out of [0,1]");
    out.m(i, j) = out.m(j, i) = v;
  }
  return out;
}

double EpsilonPrimeMatrix::max_change(const EpsilonPrimeMatrix& other) const {
  return (m - other.m).cwiseAbs().maxCoeff();
}

ContextGramBounds context_gram_bounds(const MeasurementSet& set, const OrthogonalityGraph& graph,
                                      const EpsilonPrimeMatrix& eps_prime) {
  ContextGramBounds out;
  for (const auto& c : graph.contexts) {
    if (set.force_unit_context_gram) {
      out.g_min_lb.push_back(1.0);
      out.g_max_ub.push_back(1.0);
      continue;
    }
    // Gershgorin disc radius over the feasible set |G_kt| <= sqrt(eps'_kt),
    // G_kk = 1: every eigenvalue lies within the largest row radius of 1.
    double radius = 0.0;
    for (int k : c) {
      double r = 0.0;
      for (int t : c)
        if (t != k) r += std::sqrt(std::max(0.0, eps_prime.m(k, t)));
      radius = std::max(radius, r);
    }
    out.g_min_lb.push_back(1.0 - radius);
    out.g_max_ub.push_back(1.0 + radius);
  }
  return out;
}

namespace {

// The (1+n)-dimensional Gram SDP anchored at vertex `anchor` is facially
// reduced: X_00 = X_0a = X_aa = 1 forces column a equal to column 0, so the
// anchor merges into the reference row and the variable is n x n.
struct AnchorMap {
  int anchor;
  int n;
  int dim() const { return n; }
  int pos(int vertex) const {
    if (vertex == anchor) return 0;
    return vertex < anchor ? vertex + 1 : vertex;
  }
};

// Bound on |X_kt| from the triple-product family. The printed form mixes the
// outer pair into the product; the anchored form is the Gram-construction
// value. Both orderings of the printed form apply to a symmetric X.
double entry_bound(const Matrix& eps, int i, int j, int k, int t, bool printed_form) {
  auto one = [&](int a, int b) {
    const double p = printed_form ? eps(i, a) * eps(a, b) * eps(b, j)
                                  : eps(i, a) * eps(a, b) * eps(i, b);
    return std::sqrt(std::max(0.0, p));
  };
  return std::min(one(k, t), one(t, k));
}

struct PairBound {
  int k, t;  // vertex labels, k < t
  double u;
};

struct PairSdpOutcome {
  PairValue value;
  Matrix Y;
};

// Shared constraint family of the tau and tightening programs for non-edge
// (i, j), anchored at i. Entry bounds above kEagerBound join lazily: an
// optimum of the relaxation violating no dropped bound is optimal for the
// full program, and a relaxation infeasibility certificate carries over.
PairSdpOutcome solve_pair_sdp(int i, int j, const EpsilonPrimeMatrix& eps_prime,
                              const ContextGramBounds& gram, double w_candidate,
                              const MeasurementSet& set, const OrthogonalityGraph& graph,
                              const CertOptions& opts, bool maximize) {
  const int n = graph.n;
  const Matrix& eps = eps_prime.m;
  const double we = static_cast<double>(set.edge_weight);

  // Presolve: a vanishing bound on X_ik zeroes the diagonal X_kk = X_0k, and
  // a PSD matrix with a zero diagonal entry has a zero row, so the vertex
  // drops out of the block entirely.
  std::vector<bool> alive(n, true);
  for (int k = 0; k < n; ++k)
    if (k != i && entry_bound(eps, i, j, i, k, opts.printed_bound_form) < kZeroBound)
      alive[k] = false;
  if (!alive[j]) {
    // The target entry itself is pinned to zero.
    PairSdpOutcome out;
    out.value.value = 0.0;
    return out;
  }
  const AnchorMap am{i, n, alive};

  std::vector<PairBound> eager, lazy;
  for (int k = 0; k < n; ++k)
    for (int t = k + 1; t < n; ++t) {
      if (!alive[k] || !alive[t]) continue;  // the entry is already zero
      const double u = entry_bound(eps, i, j, k, t, opts.printed_bound_form);
      if (u >= 1.0) continue;  // implied by the PSD block and unit reference
      (u < kEagerBound ? eager : lazy).push_back({k, t, u});
    }

  // Witness row: coefficient of X_kk is w_k - w_e * sum_{t ~ k} eps'_kt; the
  // anchor diagonal is the constant 1 and moves to the right-hand side.
  std::vector<double> wit_coeff(n, 0.0);
  double wit_rhs = w_candidate;
  for (int k = 0; k < n; ++k) {
    double coeff = static_cast<double>(set.vertex_weights[k]);
    for (int t = 0; t < n; ++t)
      if (graph.has_edge(k, t)) coeff -= we * eps(k, t);
    if (k == i)
      wit_rhs -= coeff;
    else
      wit_coeff[k] = coeff;
  }

  struct CtxRow {
    std::vector<int> members;  // excluding the anchor
    double lo, hi;
  };
  std::vector<CtxRow> ctx_rows;
  for (std::size_t ci = 0; ci < graph.contexts.size(); ++ci) {
    CtxRow row;
    row.lo = gram.g_min_lb[ci];
    row.hi = gram.g_max_ub[ci];
    for (int v : graph.contexts[ci]) {
      if (v == i) {
        row.lo -= 1.0;
        row.hi -= 1.0;
      } else {
        row.members.push_back(v);
      }
    }
    ctx_rows.push_back(std::move(row));
  }

  std::vector<PairBound> active = eager;
  std::vector<bool> lazy_added(lazy.size(), false);
  for (int round = 0; round < 32; ++round) {
    sdp::Problem p(am.dim());

    {
      const int row = p.add_constraint(sdp::Sense::Eq, 1.0);
      p.add_coeff(row, 0, 0, 1.0);
    }
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      const int q = am.pos(k);
      const int row = p.add_constraint(sdp::Sense::Eq, 0.0);
      p.add_coeff(row, q, q, 1.0);
      p.add_coeff(row, 0, q, -0.5);
    }
    {
      const int row = p.add_constraint(sdp::Sense::Ge, wit_rhs);
      for (int k = 0; k < n; ++k)
        if (k != i && wit_coeff[k] != 0.0) p.add_coeff(row, am.pos(k), am.pos(k), wit_coeff[k]);
    }
    for (const auto& c : ctx_rows) {
      const int nmem = static_cast<int>(c.members.size());
      if (nmem == 0) continue;
      if (c.hi - c.lo < kZeroBound) {
        const int row = p.add_constraint(sdp::Sense::Eq, c.lo);
        for (int v : c.members) p.add_coeff(row, am.pos(v), am.pos(v), 1.0);
        continue;
      }
      if (c.lo > 0.0) {  // PSD already gives a nonnegative sum
        const int row = p.add_constraint(sdp::Sense::Ge, c.lo);
        for (int v : c.members) p.add_coeff(row, am.pos(v), am.pos(v), 1.0);
      }
      if (c.hi < static_cast<double>(nmem)) {  // unit diagonals cap the sum
        const int row = p.add_constraint(sdp::Sense::Le, c.hi);
        for (int v : c.members) p.add_coeff(row, am.pos(v), am.pos(v), 1.0);
      }
    }
    for (const auto& b : active) {
      const int q1 = am.pos(b.k), q2 = am.pos(b.t);
      if (b.u < kZeroBound) {
        const int row = p.add_constraint(sdp::Sense::Eq, 0.0);
        p.add_coeff(row, q1, q2, 0.5);
        continue;
      }
      const int row = p.add_constraint(sdp::Sense::Le, b.u);
      p.add_coeff(row, q1, q2, 0.5);
      // Entries in the reference row equal a diagonal and are nonnegative.
      if (q1 != 0 && q2 != 0) {
        const int row2 = p.add_constraint(sdp::Sense::Ge, -b.u);
        p.add_coeff(row2, q1, q2, 0.5);
      }
    }

    p.add_objective(0, am.pos(j), maximize ? -0.5 : 0.5);

    sdp::Options sopts;
    sdp::Solution sol = p.solve(sopts);
    if (sol.status == sdp::Status::PrimalInfeasible) return {{0.0, true}, Matrix()};
    if (!sol.usable(opts.solver_tol)) {
      sopts.max_iterations = 250;
      sol = p.solve(sopts);
    }
    if (sol.status == sdp::Status::PrimalInfeasible) return {{0.0, true}, Matrix()};
    if (!sol.usable(opts.solver_tol)) {
      char diag[160];
      std::snprintf(diag, sizeof(diag),
                    " (status %d, pinf %.2e, dinf %.2e, gap %.2e, iters %d)",
                    static_cast<int>(sol.status), sol.primal_infeas, sol.dual_infeas, sol.rel_gap,
                    sol.iterations);
      throw Error("sdp solver failed on pair (" + std::to_string(i) + "," + std::to_string(j) +
                  ") at w=" + std::to_string(w_candidate) + diag);
    }

    bool violated = false;
    for (std::size_t b = 0; b < lazy.size(); ++b) {
      if (lazy_added[b]) continue;
      const double val = sol.X(am.pos(lazy[b].k), am.pos(lazy[b].t));
      if (std::abs(val) > lazy[b].u + 1e-8) {
        lazy_added[b] = true;
        active.push_back(lazy[b]);
        violated = true;
      }
    }
    if (violated) continue;

    const double raw = maximize ? -sol.objective : sol.objective;
    PairSdpOutcome out;
    out.value.value = std::clamp(raw, 0.0, 1.0);
    out.Y = sol.X;
    return out;
  }
  throw Error("sdp entry-bound generation did not settle for pair (" + std::to_string(i) + "," +
              std::to_string(j) + ")");
}

}  // namespace

PairValue tau_min(int i, int j, const EpsilonPrimeMatrix& eps_prime, const ContextGramBounds& gram,
                  double w_candidate, const MeasurementSet& set, const OrthogonalityGraph& graph,
                  const CertOptions& opts) {
  if (i == j || graph.has_edge(i, j)) throw Error("tau_min: (i,j) must be a non-edge pair");
  return solve_pair_sdp(i, j, eps_prime, gram, w_candidate, set, graph, opts, false).value;
}

EpsilonPrimeMatrix tighten_eps_prime(const EpsilonPrimeMatrix& eps_prime,
                                     const ContextGramBounds& gram, double w_candidate,
                                     const MeasurementSet& set, const OrthogonalityGraph& graph,
                                     const CertOptions& opts, int* sweeps_out) {
  const auto pairs = non_edges(graph);
  EpsilonPrimeMatrix current = eps_prime;
  int sweeps = 0;
  for (; sweeps < opts.max_sweeps; ++sweeps) {
    EpsilonPrimeMatrix next = current;
    std::vector<PairValue> results(pairs.size());
    parallel_for(static_cast<int>(pairs.size()), thread_count(opts, static_cast<int>(pairs.size())),
                 nullptr, [&](int k) {
                   const auto [i, j] = pairs[k];
                   results[k] =
                       solve_pair_sdp(i, j, current, gram, w_candidate, set, graph, opts, true)
                           .value;
                 });
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (results[k].infeasible) continue;  // empty feasible set: keep the old bound
      const auto [i, j] = pairs[k];
      // Both the old and new values are valid upper bounds; keep the tighter
      // so sweeps are monotone under solver tolerances.
      const double v = std::min(results[k].value, current.m(i, j));
      next.m(i, j) = next.m(j, i) = v;
    }
    const double change = next.max_change(current);
    current = std::move(next);
    if (change < opts.eps_prime_precision) {
      ++sweeps;
      break;
    }
  }
  if (sweeps_out) *sweeps_out = sweeps;
  return current;
}

std::vector<PairValue> completeness_nu(const std::map<VertexPair, double>& eps_on_edges,
                                       double w_candidate, const MeasurementSet& set,
                                       const OrthogonalityGraph& graph, const CertOptions& opts) {
  const int n = graph.n;
  const EpsilonPrimeMatrix eps = EpsilonPrimeMatrix::initial(graph, eps_on_edges);
  const double we = static_cast<double>(set.edge_weight);

  std::vector<PairValue> out(graph.contexts.size());
  parallel_for(
      static_cast<int>(graph.contexts.size()),
      thread_count(opts, static_cast<int>(graph.contexts.size())), nullptr, [&](int ci) {
        // Anchor-free (1+n)-dimensional Gram: index 0 is the reference state.
        sdp::Problem p(n + 1);
        {
          const int row = p.add_constraint(sdp::Sense::Eq, 1.0);
          p.add_coeff(row, 0, 0, 1.0);
        }
        for (int k = 0; k < n; ++k) {
          const int row = p.add_constraint(sdp::Sense::Eq, 0.0);
          p.add_coeff(row, k + 1, k + 1, 1.0);
          p.add_coeff(row, 0, k + 1, -0.5);
        }
        {
          const int row = p.add_constraint(sdp::Sense::Ge, w_candidate);
          for (int k = 0; k < n; ++k) {
            double coeff = static_cast<double>(set.vertex_weights[k]);
            for (int t = 0; t < n; ++t)
              if (graph.has_edge(k, t)) coeff -= we * eps.m(k, t);
            p.add_coeff(row, k + 1, k + 1, coeff);
          }
        }
        for (const auto& [a, b] : graph.edges) {
          const double u = eps.m(a, b);
          if (u < kZeroBound) {
            const int row = p.add_constraint(sdp::Sense::Eq, 0.0);
            p.add_coeff(row, a + 1, b + 1, 0.5);
          } else {
            const int row = p.add_constraint(sdp::Sense::Le, u);
            p.add_coeff(row, a + 1, b + 1, 0.5);
            const int row2 = p.add_constraint(sdp::Sense::Ge, -u);
            p.add_coeff(row2, a + 1, b + 1, 0.5);
          }
        }
        for (int v : graph.contexts[ci]) p.add_objective(0, v + 1, 0.5);

        sdp::Solution sol = p.solve({});
        if (sol.status == sdp::Status::PrimalInfeasible) {
          out[ci] = {kInf, true};
          return;
        }
        if (!sol.usable(opts.solver_tol))
          throw Error("sdp solver failed on completeness context " + std::to_string(ci));
        out[ci] = {std::max(0.0, sol.objective), false};
      });
  return out;
}

SdpVerdict threshold_search(const std::map<VertexPair, double>& eps_on_edges,
                            const MeasurementSet& set, const OrthogonalityGraph& graph,
                            const CertOptions& opts) {
  const EpsilonPrimeMatrix eps0 = EpsilonPrimeMatrix::initial(graph, eps_on_edges);
  const ContextGramBounds gram = context_gram_bounds(set, graph, eps0);
  const double w_opt = ideal_witness_optimum(set).value();
  const auto pairs = non_edges(graph);
  const int threads = thread_count(opts, static_cast<int>(pairs.size()));

  bool gram_complete = true;
  for (double g : gram.g_min_lb) gram_complete = gram_complete && g > 0.0;

  // Converged eps' per evaluated candidate; tightening at w may warm-start
  // from any candidate below it (their fixed points upper-bound this one's).
  std::map<double, EpsilonPrimeMatrix> converged;
  auto warm_start = [&](double w) -> const EpsilonPrimeMatrix& {
    auto it = converged.upper_bound(w);
    if (it == converged.begin()) return eps0;
    return std::prev(it)->second;
  };

  // tau values from the previous candidate order the scan so failing
  // candidates exit early.
  std::vector<double> last_tau(pairs.size(), 0.0);

  struct Verify {
    bool ok = false;
    std::vector<double> tau;
    std::vector<bool> tau_infeasible;
    int sweeps = 0;
  };
  auto verify = [&](double w, bool early_exit) {
    Verify v;
    EpsilonPrimeMatrix tight = tighten_eps_prime(warm_start(w), gram, w, set, graph, opts, &v.sweeps);
    v.tau.assign(pairs.size(), kInf);
    v.tau_infeasible.assign(pairs.size(), false);

    std::vector<int> order(pairs.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return last_tau[a] < last_tau[b]; });

    std::atomic<bool> failed{false};
    parallel_for(static_cast<int>(pairs.size()), threads, early_exit ? &failed : nullptr,
                 [&](int idx) {
                   const int k = order[idx];
                   const auto [i, j] = pairs[k];
                   const PairValue r = tau_min(i, j, tight, gram, w, set, graph, opts);
                   v.tau_infeasible[k] = r.infeasible;
                   v.tau[k] = r.infeasible ? kInf : r.value;
                   if (!r.infeasible && r.value <= opts.tau_threshold) failed.store(true);
                 });

    bool tau_ok = true;
    for (std::size_t k = 0; k < pairs.size(); ++k)
      if (!v.tau_infeasible[k] && v.tau[k] <= opts.tau_threshold) tau_ok = false;
    if (early_exit && failed.load()) tau_ok = false;

    bool complete = gram_complete;
    if (opts.nu_completeness) {
      complete = true;
      for (const auto& nu : completeness_nu(eps_on_edges, w, set, graph, opts))
        if (!nu.infeasible && nu.value <= opts.tau_threshold) complete = false;
    }

    v.ok = tau_ok && complete;
    converged.insert_or_assign(w, std::move(tight));
    for (std::size_t k = 0; k < pairs.size(); ++k)
      if (v.tau[k] < kInf) last_tau[k] = v.tau[k];
    return v;
  };

  SdpVerdict verdict;
  verdict.gram = gram;

  double w_sdp = w_opt;
  if (!verify(w_opt, true).ok) {
    verdict.reached_w_opt = true;  // uncertifiable at this error level
  } else if (verify(0.0, true).ok) {
    w_sdp = 0.0;
  } else {
    double lo = 0.0, hi = w_opt;
    while (hi - lo > opts.bisection_tol) {
      const double mid = 0.5 * (lo + hi);
      if (verify(mid, true).ok)
        hi = mid;
      else
        lo = mid;
    }
    w_sdp = hi;
  }

  // Full (no early exit) evaluation at the returned candidate for the report.
  const Verify fin = verify(w_sdp, false);
  verdict.w_sdp = w_sdp;
  verdict.sweeps = fin.sweeps;
  verdict.orthogonality_ok = true;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    verdict.tau[pairs[k]] = fin.tau[k];
    if (!fin.tau_infeasible[k] && fin.tau[k] <= opts.tau_threshold) verdict.orthogonality_ok = false;
  }
  if (verdict.reached_w_opt) verdict.orthogonality_ok = fin.ok && verdict.orthogonality_ok;
  verdict.completeness_ok = gram_complete;
  const auto nu = completeness_nu(eps_on_edges, w_sdp, set, graph, opts);
  for (const auto& r : nu) verdict.nu.push_back(r.infeasible ? kInf : r.value);
  if (opts.nu_completeness) {
    verdict.completeness_ok = true;
    for (const auto& r : nu)
      if (!r.infeasible && r.value <= opts.tau_threshold) verdict.completeness_ok = false;
  }
  verdict.eps_prime = converged.at(w_sdp);
  return verdict;
}

CertificationReport certify(const ExperimentRecord& record, const MeasurementSet& set,
                            const OrthogonalityGraph& graph, bool use_noise_fit,
                            const CertOptions& opts, std::map<std::string, double>* stage_seconds) {
  if (record.p.size() != graph.n) throw Error("certify: record does not match the graph");
  const auto tick = [] { return std::chrono::steady_clock::now(); };
  auto mark = [&](const char* stage, auto t0) {
    if (stage_seconds)
      (*stage_seconds)[stage] = std::chrono::duration<double>(tick() - t0).count();
  };

  CertificationReport rep;
  rep.set_name = set.name;
  rep.dim = set.dim;
  const Rational w_opt = ideal_witness_optimum(set);
  rep.w_opt = w_opt.value();
  rep.use_noise_fit = use_noise_fit;

  {
    double se = 0.0, sp = 0.0, vare = 0.0, varp = 0.0;
    for (const auto& [e, v] : record.eps) {
      se += v;
      const auto s = record.sigma_eps.find(e);
      if (s != record.sigma_eps.end()) vare += s->second * s->second;
    }
    const double ne = std::max<std::size_t>(1, record.eps.size());
    rep.mean_eps = se / ne;
    rep.sigma_mean_eps = std::sqrt(vare) / ne;
    for (int i = 0; i < record.p.size(); ++i) {
      sp += record.p[i];
      if (record.sigma_p.size() == record.p.size()) varp += record.sigma_p[i] * record.sigma_p[i];
    }
    rep.mean_p = sp / std::max<int>(1, record.p.size());
    rep.sigma_mean_p = std::sqrt(varp) / std::max<int>(1, record.p.size());
  }

  // The witness itself always uses the raw measured statistics; noise
  // elimination only feeds the SDP side.
  auto t0 = tick();
  WitnessInputs in{record.p, record.sigma_p, record.eps, record.sigma_eps};
  rep.w_exp = witness_value(set, graph, in);
  rep.w_worst = worst_case_bound(rep.w_exp, w_opt, set.dim);
  mark("witness", t0);

  std::map<VertexPair, double> eps_for_sdp = record.eps;
  if (use_noise_fit) {
    t0 = tick();
    const NoiseFitResult nf = fit_noise(record.eps, set, graph);
    eps_for_sdp = nf.eps_prime;
    rep.noise_fit = NoiseFitSummary{nf.params, nf.residual};
    mark("noise_fit", t0);
    t0 = tick();
    const AngleFitResult af = fit_delta_theta(nf.eps_prime, set, graph);
    rep.delta_theta_fit_deg = af.delta_theta_deg;
    rep.delta_theta_fit_residual = af.residual;
    mark("angle_fit", t0);
  }

  t0 = tick();
  rep.sdp = threshold_search(eps_for_sdp, set, graph, opts);
  mark("threshold_search", t0);
  rep.w_sdp = rep.sdp.w_sdp;
  rep.certified =
      rep.w_worst.w > rep.sdp.w_sdp && rep.sdp.orthogonality_ok && rep.sdp.completeness_ok;
  return rep;
}

}  // namespace sicert
