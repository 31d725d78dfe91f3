#include "sicert/noisefit.hpp"

#include "sicert/neldermead.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace sicert {

namespace {

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

Vector4 to_model_space(const MeasurementSet& set, const Vector& v) {
  if (set.dim == 4) return Vector4(v);
  return embed_qutrit(Eigen::Vector3d(v));
}

struct FitModel {
  const MeasurementSet& set;
  std::vector<Vector> ideal_unit;                   // d-dim unit vectors
  std::vector<std::pair<VertexPair, double>> data;  // measured ordered edges
  std::vector<int> prepared;                        // vertices appearing first

  explicit FitModel(const MeasurementSet& s, const std::map<VertexPair, double>& eps)
      : set(s) {
    for (int i = 0; i < s.size(); ++i) ideal_unit.push_back(unit_vector_of(s, i));
    std::vector<bool> prep(s.size(), false);
    for (const auto& [e, v] : eps) {
      data.emplace_back(e, v);
      prep[e.first] = true;
    }
    for (int i = 0; i < s.size(); ++i)
      if (prep[i]) prepared.push_back(i);
  }

  int n_params() const { return 3 + set.size() * set.dim; }

  NoiseChannelParams unpack_channels(const Vector& u) const {
    NoiseChannelParams p;
    p.p_ba = sigmoid(u[0]);
    p.p_bb = sigmoid(u[1]);
    p.p_pa = 0.5 * sigmoid(u[2]);
    return p;
  }

  // Deviated unit vector: the component of Delta_i parallel to v_i only
  // rescales the state, so it is projected out before normalization.
  Vector deviated(const Vector& u, int i) const {
    const int d = set.dim;
    Vector delta = u.segment(3 + i * d, d);
    const Vector& v = ideal_unit[i];
    delta -= delta.dot(v) * v;
    Vector out = v + delta;
    return out / out.norm();
  }

  double objective(const Vector& u) const {
    const NoiseChannelParams ch = unpack_channels(u);
    const int n = set.size();
    std::vector<Vector4> w(n);
    for (int k = 0; k < n; ++k) w[k] = to_model_space(set, deviated(u, k));
    std::vector<Matrix4> rho(n);
    for (int i : prepared) rho[i] = apply_noise(w[i], ch);
    double r = 0.0;
    for (const auto& [e, eps] : data) {
      const double model = w[e.second].dot(rho[e.first] * w[e.second]);
      const double diff = model - eps;
      r += diff * diff;
    }
    return r;
  }
};

}  // namespace

NoiseFitResult fit_noise(const std::map<VertexPair, double>& eps_measured,
                         const MeasurementSet& set, const OrthogonalityGraph& graph,
                         const NoiseFitOptions& opts) {
  if (set.dim != 4 && set.dim != 3)
    throw Error("fit_noise: the channel model requires dimension 4 (or 3 embedded)");
  if (eps_measured.empty()) throw Error("fit_noise: no measured edges");
  for (const auto& [e, v] : eps_measured) {
    if (e.first < 0 || e.first >= graph.n || e.second < 0 || e.second >= graph.n ||
        !graph.has_edge(e.first, e.second))
      throw Error("fit_noise: eps key (" + std::to_string(e.first) + "," +
                  std::to_string(e.second) + ") is not an edge");
    if (v < 0.0 || v > 1.0) throw Error("fit_noise: eps value out of [0,1]");
  }

  const FitModel model(set, eps_measured);
  const int np = model.n_params();

  NelderMeadOptions nm;
  nm.max_iterations = opts.max_iterations;
  nm.initial_step = Vector::Constant(np, 0.01);
  nm.initial_step.head(3).setConstant(1.0);

  const int starts = std::max(1, opts.multi_starts);
  std::vector<Vector> x0(starts, Vector::Zero(np));
  for (int s = 0; s < starts; ++s) {
    x0[s].head(3).setConstant(logit(1e-4));
    if (s == 0) continue;  // start 0: zero deviations, channels ~ 0
    std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(s));
    std::normal_distribution<double> gauss(0.0, 0.01);
    std::uniform_real_distribution<double> uch(logit(1e-5), logit(0.05));
    for (int k = 0; k < 3; ++k) x0[s][k] = uch(rng);
    for (int k = 3; k < np; ++k) x0[s][k] = gauss(rng);
  }

  std::vector<NelderMeadResult> results(starts);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int s = next.fetch_add(1); s < starts; s = next.fetch_add(1))
      results[s] = nelder_mead([&](const Vector& u) { return model.objective(u); }, x0[s], nm);
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int nthreads =
      std::min<int>(starts, opts.threads > 0 ? opts.threads : static_cast<int>(hw));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int best = 0;
  for (int s = 1; s < starts; ++s)
    if (results[s].f < results[best].f) best = s;

  const Vector& u = results[best].x;
  NoiseFitResult out;
  out.params = model.unpack_channels(u);
  out.residual = results[best].f;
  std::vector<Vector> fitted(set.size());
  for (int i = 0; i < set.size(); ++i) {
    fitted[i] = model.deviated(u, i);
    out.deviations.push_back(fitted[i] - model.ideal_unit[i]);
  }
  for (const auto& [e, eps] : eps_measured) {
    const double ov = fitted[e.first].dot(fitted[e.second]);
    out.eps_prime[e] = ov * ov;
  }
  return out;
}

AngleFitResult fit_delta_theta(const std::map<VertexPair, double>& eps_prime,
                               const MeasurementSet& set, const OrthogonalityGraph& graph) {
  if (set.dim != 4 && set.dim != 3)
    throw Error("fit_delta_theta: the angle model requires dimension 4 (or 3 embedded)");
  for (const auto& [e, v] : eps_prime)
    if (e.first < 0 || e.first >= graph.n || e.second < 0 || e.second >= graph.n)
      throw Error("fit_delta_theta: bad eps key");

  std::vector<Vector4> prep(set.size());
  for (int i = 0; i < set.size(); ++i) prep[i] = to_model_space(set, unit_vector_of(set, i));

  auto objective = [&](double dt) {
    double r = 0.0;
    for (const auto& [e, eps] : eps_prime) {
      const Vector vj = measurement_vector(set, e.second, dt);
      const double ov = vj.dot(prep[e.first]);
      const double diff = ov * ov - eps;
      r += diff * diff;
    }
    return r;
  };

  // Coarse scan, then golden-section refinement around the best cell.
  double best_dt = 0.0, best_f = std::numeric_limits<double>::infinity();
  const double step = 0.05;
  for (double dt = -5.0; dt <= 5.0 + 1e-12; dt += step) {
    const double f = objective(dt);
    if (f < best_f) {
      best_f = f;
      best_dt = dt;
    }
  }
  double a = best_dt - step, b = best_dt + step;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  while (b - a > 1e-5) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = objective(x2);
    }
  }
  AngleFitResult out;
  out.delta_theta_deg = 0.5 * (a + b);
  out.residual = objective(out.delta_theta_deg);
  return out;
}

}  // namespace sicert
