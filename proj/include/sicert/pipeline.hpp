#pragma once

#include "sicert/certsdp.hpp"
#include "sicert/json_io.hpp"

#include <map>
#include <string>
#include <vector>

namespace sicert {

struct RunConfig {
  std::string set = "peres24";  // built-in name or set-definition path
  enum class Mode { Simulate, Ingest } mode = Mode::Simulate;

  NoiseChannelParams noise;
  double delta_theta_deg = 0.0;
  long long shots = 30000;
  bool exact = false;  // forces shots = 0 (analytic probabilities)
  std::uint64_t seed = 1;
  bool both_orientations = false;

  int bootstrap_resamples = 200;     // B for the witness-level sigmas
  int bootstrap_resamples_sdp = 20;  // reduced B for W_SDP
  bool bootstrap_sdp = false;        // every resample is a full threshold search

  bool use_noise_fit = false;
  CertOptions sdp;

  std::string record_path;  // ingest-mode input
  std::string out_path;     // report destination ("" = stdout)

  long long effective_shots() const { return exact ? 0 : shots; }
  void validate() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

struct BootstrapSigmas {
  double w_exp = 0.0;
  double w_worst = 0.0;
  double w_sdp = 0.0;
  bool exact_mode_flag = false;  // record had no counts; sigmas are zero
  bool sdp_done = false;
};

/// Poisson bootstrap: every raw count is resampled with the observed count as
/// mean, downstream quantities recomputed, sigma = sample standard deviation.
/// w_sdp resampling (config.bootstrap_sdp) uses the reduced B.
BootstrapSigmas bootstrap_errors(const ExperimentRecord& record, const MeasurementSet& set,
                                 const OrthogonalityGraph& graph, const RunConfig& config);

struct PipelineResult {
  ExperimentRecord record;
  CertificationReport report;
  BootstrapSigmas bootstrap;
  std::map<std::string, double> stage_seconds;
};

/// simulate-or-ingest -> certify -> bootstrap; the report JSON embeds the
/// config echo and per-stage wall clock.
PipelineResult run_pipeline(const RunConfig& config);
nlohmann::json pipeline_report_json(const RunConfig& config, const PipelineResult& result);

struct SweepRow {
  double delta_theta_deg = 0.0;
  double w_worst = 0.0, w_worst_sigma = 0.0;
  double w_sdp = 0.0, w_sdp_sigma = 0.0;
  bool certified = false;
  bool ok = false;
  std::string error;
};

/// One pipeline run per grid point; failures are carried per row.
std::vector<SweepRow> sweep(const RunConfig& config, const std::vector<double>& grid_deg);

/// Header: delta_theta_deg,w_worst,w_worst_sigma,w_sdp,w_sdp_sigma,verdict
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace sicert
