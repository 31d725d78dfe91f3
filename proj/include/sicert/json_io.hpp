#pragma once

#include "sicert/certsdp.hpp"
#include "sicert/noisefit.hpp"
#include "sicert/opticsim.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace sicert {

/// Edge keys are serialized as "i-j" with 1-based vertex numbers in measured
/// order (v5 measured before v6 is "5-6").
std::string edge_key(const VertexPair& e);
VertexPair parse_edge_key(const std::string& key);

nlohmann::json record_to_json(const ExperimentRecord& rec);
ExperimentRecord record_from_json(const nlohmann::json& j);
ExperimentRecord load_record(const std::string& path);
void save_json(const nlohmann::json& j, const std::string& path);

nlohmann::json report_to_json(const CertificationReport& rep);
nlohmann::json noise_fit_to_json(const NoiseFitResult& r);
nlohmann::json angle_fit_to_json(const AngleFitResult& r);
nlohmann::json set_to_json(const MeasurementSet& set, const OrthogonalityGraph& graph);

/// JSON text with every floating-point number printed to 17 significant
/// digits (exact double round trip), keys in deterministic order.
std::string dump_json(const nlohmann::json& j, int indent = 2);

}  // namespace sicert
