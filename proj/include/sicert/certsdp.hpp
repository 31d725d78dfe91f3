#pragma once

#include "sicert/geometry.hpp"
#include "sicert/opticsim.hpp"
#include "sicert/sdp.hpp"
#include "sicert/types.hpp"
#include "sicert/witness.hpp"

#include <map>
#include <optional>
#include <vector>

namespace sicert {

/// Symmetric matrix of upper bounds on |<V_i|V_j>|^2: unit diagonal, measured
/// values on edges, off-edge entries start at 1 and are tightened iteratively.
struct EpsilonPrimeMatrix {
  Matrix m;

  static EpsilonPrimeMatrix initial(const OrthogonalityGraph& graph,
                                    const std::map<VertexPair, double>& eps_on_edges);
  double max_change(const EpsilonPrimeMatrix& other) const;
};

/// Certified enclosure of the context Gram eigenvalue range.
struct ContextGramBounds {
  std::vector<double> g_min_lb;
  std::vector<double> g_max_ub;
};

struct CertOptions {
  double tau_threshold = 1e-4;       // tau_ij below this fails orthogonality
  double eps_prime_precision = 1e-3; // tightening sweep convergence
  double bisection_tol = 1e-3;
  int max_sweeps = 5;
  bool printed_bound_form = false;   // true: eps'_ik eps'_kt eps'_tj; default: anchored eps'_ik eps'_kt eps'_it
  bool nu_completeness = false;      // gate completeness on the dimension-free SDP
  double solver_tol = 1e-6;          // residual gate on accepted iterates
  int threads = 0;                   // 0 = hardware concurrency
};

/// Value of a per-pair SDP; `infeasible` marks a certified empty feasible set
/// (the constraint system rules the candidate witness out entirely).
struct PairValue {
  double value = 0.0;
  bool infeasible = false;
};

ContextGramBounds context_gram_bounds(const MeasurementSet& set, const OrthogonalityGraph& graph,
                                      const EpsilonPrimeMatrix& eps_prime);

/// Minimizes X_ij over the (1+n)-dimensional Gram SDP anchored at i, for a
/// non-edge pair (i,j). Throws on solver failure (distinct from infeasibility).
PairValue tau_min(int i, int j, const EpsilonPrimeMatrix& eps_prime,
                  const ContextGramBounds& gram, double w_candidate, const MeasurementSet& set,
                  const OrthogonalityGraph& graph, const CertOptions& opts = {});

/// One-or-more Jacobi sweeps maximizing each off-edge X_ij and overwriting
/// eps', until the largest entry change drops below eps_prime_precision or
/// max_sweeps is hit. sweeps_out reports the count.
EpsilonPrimeMatrix tighten_eps_prime(const EpsilonPrimeMatrix& eps_prime,
                                     const ContextGramBounds& gram, double w_candidate,
                                     const MeasurementSet& set, const OrthogonalityGraph& graph,
                                     const CertOptions& opts = {}, int* sweeps_out = nullptr);

/// Dimension-free completeness: per context, minimizes the probability sum
/// Sum_{k in c} X_0k subject to the measured on-edge overlap bounds.
std::vector<PairValue> completeness_nu(const std::map<VertexPair, double>& eps_on_edges,
                                       double w_candidate, const MeasurementSet& set,
                                       const OrthogonalityGraph& graph,
                                       const CertOptions& opts = {});

struct SdpVerdict {
  double w_sdp = 0.0;
  bool reached_w_opt = false;  // no candidate <= W_opt verified
  bool orthogonality_ok = false;
  bool completeness_ok = false;
  int sweeps = 0;  // tightening sweeps at the returned candidate
  std::map<VertexPair, double> tau;   // at w_sdp; +inf for infeasible pairs
  std::vector<double> nu;             // per context at w_sdp; +inf if infeasible
  ContextGramBounds gram;
  EpsilonPrimeMatrix eps_prime;       // converged at w_sdp
};

/// Bisection search on [0, W_opt] for the smallest witness threshold at which
/// every non-edge tau clears tau_threshold and completeness holds.
SdpVerdict threshold_search(const std::map<VertexPair, double>& eps_on_edges,
                            const MeasurementSet& set, const OrthogonalityGraph& graph,
                            const CertOptions& opts = {});

struct NoiseFitSummary {
  NoiseChannelParams params;
  double residual = 0.0;
};

struct CertificationReport {
  std::string set_name;
  int dim = 0;
  double w_opt = 0.0;

  double mean_eps = 0.0, sigma_mean_eps = 0.0;
  double mean_p = 0.0, sigma_mean_p = 0.0;

  WitnessValue w_exp;
  WitnessValue w_worst;
  double w_sdp = 0.0;
  double w_sdp_sigma = 0.0;

  bool use_noise_fit = false;
  std::optional<NoiseFitSummary> noise_fit;
  std::optional<double> delta_theta_fit_deg;
  std::optional<double> delta_theta_fit_residual;

  SdpVerdict sdp;
  bool certified = false;
};

/// Full decision pipeline on one record: (optional) noise elimination, the
/// witness and its worst-case bound, the threshold search, and the verdict
/// W_worst > W_SDP with both sub-checks. stage_seconds, when given, collects
/// wall-clock per stage.
CertificationReport certify(const ExperimentRecord& record, const MeasurementSet& set,
                            const OrthogonalityGraph& graph, bool use_noise_fit,
                            const CertOptions& opts = {},
                            std::map<std::string, double>* stage_seconds = nullptr);

}  // namespace sicert
