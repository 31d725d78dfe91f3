#include "sicert/pipeline.hpp"

#include "sicert/noisefit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace sicert {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double population_sd(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size()));
}

// Rebuilds the ratio estimates of one Poisson-resampled record.
ExperimentRecord resample_record(const ExperimentRecord& rec, const OrthogonalityGraph& graph,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  auto draw = [&](long long mean) -> long long {
    if (mean <= 0) return 0;
    std::poisson_distribution<long long> po(static_cast<double>(mean));
    return po(rng);
  };

  ExperimentRecord out = rec;
  for (std::size_t b = 0; b < rec.m1_counts.size(); ++b) {
    const auto& basis = graph.measurement_bases[b];
    std::vector<long long> counts(rec.m1_counts[b].size());
    long long total = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      counts[k] = draw(rec.m1_counts[b][k]);
      total += counts[k];
    }
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const int idx = basis[k];
      if (is_aux(idx) || graph.basis_of(idx) != static_cast<int>(b)) continue;
      out.p[idx] = total > 0 ? static_cast<double>(counts[k]) / static_cast<double>(total) : 0.0;
    }
    out.m1_counts[b] = counts;
  }
  for (const auto& [e, m2] : rec.m2_counts) {
    const auto& basis = graph.measurement_bases[graph.basis_of(e.second)];
    std::vector<long long> counts(m2.size());
    long long total = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      counts[k] = draw(m2[k]);
      total += counts[k];
    }
    const std::size_t pos = static_cast<std::size_t>(
        std::find(basis.begin(), basis.end(), e.second) - basis.begin());
    out.eps[e] = total > 0 ? static_cast<double>(counts[pos]) / static_cast<double>(total) : 0.0;
    out.m2_counts[e] = counts;
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (bootstrap_resamples < 1) throw Error("config: bootstrap_resamples must be >= 1");
  if (bootstrap_resamples_sdp < 1) throw Error("config: bootstrap_resamples_sdp must be >= 1");
  if (sdp.tau_threshold <= 0 || sdp.eps_prime_precision <= 0 || sdp.bisection_tol <= 0)
    throw Error("config: tolerances must be positive");
  if (shots < 0) throw Error("config: shots must be >= 0");
  if (mode == Mode::Ingest && record_path.empty())
    throw Error("config: ingest mode needs a record path");
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    c.set = j.value("set", c.set);
    if (j.contains("mode")) {
      const std::string m = j["mode"].get<std::string>();
      if (m == "simulate")
        c.mode = RunConfig::Mode::Simulate;
      else if (m == "ingest")
        c.mode = RunConfig::Mode::Ingest;
      else
        throw Error("config: unknown mode '" + m + "'");
    }
    if (j.contains("noise")) {
      c.noise.p_ba = j["noise"].value("p_ba", 0.0);
      c.noise.p_bb = j["noise"].value("p_bb", 0.0);
      c.noise.p_pa = j["noise"].value("p_pa", 0.0);
    }
    c.delta_theta_deg = j.value("delta_theta_deg", c.delta_theta_deg);
    c.shots = j.value("shots", c.shots);
    c.exact = j.value("exact", c.exact);
    c.seed = j.value("seed", c.seed);
    c.both_orientations = j.value("both_orientations", c.both_orientations);
    c.bootstrap_resamples = j.value("bootstrap_resamples", c.bootstrap_resamples);
    c.bootstrap_resamples_sdp = j.value("bootstrap_resamples_sdp", c.bootstrap_resamples_sdp);
    c.bootstrap_sdp = j.value("bootstrap_sdp", c.bootstrap_sdp);
    c.use_noise_fit = j.value("use_noise_fit", c.use_noise_fit);
    c.record_path = j.value("record", c.record_path);
    c.out_path = j.value("out", c.out_path);
    if (j.contains("sdp")) {
      const auto& s = j["sdp"];
      c.sdp.tau_threshold = s.value("tau_threshold", c.sdp.tau_threshold);
      c.sdp.eps_prime_precision = s.value("eps_prime_precision", c.sdp.eps_prime_precision);
      c.sdp.bisection_tol = s.value("bisection_tol", c.sdp.bisection_tol);
      c.sdp.max_sweeps = s.value("max_sweeps", c.sdp.max_sweeps);
      c.sdp.printed_bound_form = s.value("printed_bound_form", c.sdp.printed_bound_form);
      c.sdp.nu_completeness = s.value("nu_completeness", c.sdp.nu_completeness);
      c.sdp.threads = s.value("threads", c.sdp.threads);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["set"] = c.set;
  j["mode"] = c.mode == RunConfig::Mode::Simulate ? "simulate" : "ingest";
  j["noise"] = {{"p_ba", c.noise.p_ba}, {"p_bb", c.noise.p_bb}, {"p_pa", c.noise.p_pa}};
  j["delta_theta_deg"] = c.delta_theta_deg;
  j["shots"] = c.shots;
  j["exact"] = c.exact;
  j["seed"] = c.seed;
  j["both_orientations"] = c.both_orientations;
  j["bootstrap_resamples"] = c.bootstrap_resamples;
  j["bootstrap_resamples_sdp"] = c.bootstrap_resamples_sdp;
  j["bootstrap_sdp"] = c.bootstrap_sdp;
  j["use_noise_fit"] = c.use_noise_fit;
  j["record"] = c.record_path;
  j["out"] = c.out_path;
  j["sdp"] = {{"tau_threshold", c.sdp.tau_threshold},
              {"eps_prime_precision", c.sdp.eps_prime_precision},
              {"bisection_tol", c.sdp.bisection_tol},
              {"max_sweeps", c.sdp.max_sweeps},
              {"printed_bound_form", c.sdp.printed_bound_form},
              {"nu_completeness", c.sdp.nu_completeness},
              {"threads", c.sdp.threads}};
  return j;
}

BootstrapSigmas bootstrap_errors(const ExperimentRecord& record, const MeasurementSet& set,
                                 const OrthogonalityGraph& graph, const RunConfig& config) {
  BootstrapSigmas out;
  if (record.exact_mode() || record.m1_counts.empty()) {
    out.exact_mode_flag = true;
    return out;
  }
  const Rational w_opt = ideal_witness_optimum(set);

  const int B = config.bootstrap_resamples;
  std::vector<double> w_exp_s(B), w_worst_s(B);
  for (int b = 0; b < B; ++b) {
    const ExperimentRecord r =
        resample_record(record, graph, config.seed ^ (0xB007'0000ULL + static_cast<std::uint64_t>(b)));
    WitnessInputs in{r.p, Vector(), r.eps, {}};
    const WitnessValue w = witness_value(set, graph, in);
    w_exp_s[b] = w.w;
    w_worst_s[b] = worst_case_bound(w, w_opt, set.dim).w;
  }
  out.w_exp = population_sd(w_exp_s);
  out.w_worst = population_sd(w_worst_s);

  if (config.bootstrap_sdp) {
    const int Bs = config.bootstrap_resamples_sdp;
    std::vector<double> w_sdp_s(Bs);
    for (int b = 0; b < Bs; ++b) {
      const ExperimentRecord r = resample_record(
          record, graph, config.seed ^ (0x5D9'0000ULL + static_cast<std::uint64_t>(b)));
      std::map<VertexPair, double> eps = r.eps;
      if (config.use_noise_fit) eps = fit_noise(r.eps, set, graph).eps_prime;
      w_sdp_s[b] = threshold_search(eps, set, graph, config.sdp).w_sdp;
    }
    out.w_sdp = population_sd(w_sdp_s);
    out.sdp_done = true;
  }
  return out;
}

PipelineResult run_pipeline(const RunConfig& config) {
  config.validate();
  const auto tick = [] { return std::chrono::steady_clock::now(); };
  PipelineResult result;
  auto mark = [&](const char* stage, auto t0) {
    result.stage_seconds[stage] = std::chrono::duration<double>(tick() - t0).count();
  };

  auto t0 = tick();
  const MeasurementSet set = load_set(config.set);
  const OrthogonalityGraph graph = build_graph(set);
  mark("setup", t0);

  t0 = tick();
  if (config.mode == RunConfig::Mode::Simulate) {
    result.record = simulate_experiment(set, graph, config.noise, config.delta_theta_deg,
                                        config.effective_shots(), config.seed,
                                        config.both_orientations);
    mark("simulate", t0);
  } else {
    result.record = load_record(config.record_path);
    if (result.record.set_name != set.name)
      throw Error("record is for set '" + result.record.set_name + "', config asks for '" +
                  set.name + "'");
    mark("ingest", t0);
  }

  result.report =
      certify(result.record, set, graph, config.use_noise_fit, config.sdp, &result.stage_seconds);

  t0 = tick();
  result.bootstrap = bootstrap_errors(result.record, set, graph, config);
  if (!result.bootstrap.exact_mode_flag) {
    result.report.w_exp.sigma = result.bootstrap.w_exp;
    result.report.w_worst.sigma = result.bootstrap.w_worst;
    if (result.bootstrap.sdp_done) result.report.w_sdp_sigma = result.bootstrap.w_sdp;
  }
  mark("bootstrap", t0);
  return result;
}

nlohmann::json pipeline_report_json(const RunConfig& config, const PipelineResult& result) {
  nlohmann::json j = report_to_json(result.report);
  j["config"] = config_to_json(config);
  j["record_summary"]["shots"] = result.record.shots;
  j["record_summary"]["seed"] = result.record.rng_seed;
  j["record_summary"]["exact_mode"] = result.record.exact_mode();
  j["record_summary"]["delta_theta_deg"] = result.record.delta_theta_deg;
  j["bootstrap"] = {{"resamples", config.bootstrap_resamples},
                    {"resamples_sdp", config.bootstrap_resamples_sdp},
                    {"sdp_done", result.bootstrap.sdp_done},
                    {"exact_mode_no_bootstrap", result.bootstrap.exact_mode_flag}};
  nlohmann::json t = nlohmann::json::object();
  for (const auto& [k, v] : result.stage_seconds) t[k] = v;
  j["timings_sec"] = t;
  return j;
}

std::vector<SweepRow> sweep(const RunConfig& config, const std::vector<double>& grid_deg) {
  if (grid_deg.empty()) throw Error("sweep: empty delta-theta grid");
  std::vector<SweepRow> rows;
  for (double dt : grid_deg) {
    SweepRow row;
    row.delta_theta_deg = dt;
    RunConfig c = config;
    c.delta_theta_deg = dt;
    c.out_path.clear();
    try {
      const PipelineResult r = run_pipeline(c);
      row.w_worst = r.report.w_worst.w;
      row.w_worst_sigma = r.report.w_worst.sigma;
      row.w_sdp = r.report.w_sdp;
      row.w_sdp_sigma = r.report.w_sdp_sigma;
      row.certified = r.report.certified;
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "delta_theta_deg,w_worst,w_worst_sigma,w_sdp,w_sdp_sigma,verdict\n";
  char buf[200];
  for (const auto& r : rows) {
    if (!r.ok) {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::snprintf(buf, sizeof(buf), "%.17g,,,,,error:%s\n", r.delta_theta_deg, msg.c_str());
      out += buf;
      continue;
    }
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", r.delta_theta_deg,
                  r.w_worst, r.w_worst_sigma, r.w_sdp, r.w_sdp_sigma,
                  r.certified ? "certified" : "not_certified");
    out += buf;
  }
  return out;
}

}  // namespace sicert
