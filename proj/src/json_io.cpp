#include "sicert/json_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace sicert {

std::string edge_key(const VertexPair& e) {
  return std::to_string(e.first + 1) + "-" + std::to_string(e.second + 1);
}

VertexPair parse_edge_key(const std::string& key) {
  const auto dash = key.find('-');
  if (dash == std::string::npos) throw Error("bad edge key '" + key + "'");
  try {
    const int i = std::stoi(key.substr(0, dash));
    const int j = std::stoi(key.substr(dash + 1));
    if (i < 1 || j < 1) throw Error("bad edge key '" + key + "'");
    return {i - 1, j - 1};
  } catch (const std::exception&) {
    throw Error("bad edge key '" + key + "'");
  }
}

namespace {

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

Vector vector_from_json(const nlohmann::json& a) {
  Vector v(a.size());
  Eigen::Index k = 0;
  for (const auto& x : a) v[k++] = x.get<double>();
  return v;
}

nlohmann::json eps_map_to_json(const std::map<VertexPair, double>& m) {
  nlohmann::json o = nlohmann::json::object();
  for (const auto& [e, v] : m) o[edge_key(e)] = v;
  return o;
}

std::map<VertexPair, double> eps_map_from_json(const nlohmann::json& o) {
  std::map<VertexPair, double> m;
  for (auto it = o.begin(); it != o.end(); ++it) m[parse_edge_key(it.key())] = it.value().get<double>();
  return m;
}

}  // namespace

nlohmann::json record_to_json(const ExperimentRecord& rec) {
  nlohmann::json j;
  j["set"] = rec.set_name;
  j["shots"] = rec.shots;
  j["seed"] = rec.rng_seed;
  j["delta_theta_deg"] = rec.delta_theta_deg;
  j["noise"] = {{"p_ba", rec.noise.p_ba}, {"p_bb", rec.noise.p_bb}, {"p_pa", rec.noise.p_pa}};
  j["p"] = vector_to_json(rec.p);
  j["sigma_p"] = vector_to_json(rec.sigma_p);
  j["eps"] = eps_map_to_json(rec.eps);
  j["sigma_eps"] = eps_map_to_json(rec.sigma_eps);
  nlohmann::json counts;
  counts["m1"] = rec.m1_counts;
  nlohmann::json m2 = nlohmann::json::object();
  for (const auto& [e, c] : rec.m2_counts) m2[edge_key(e)] = c;
  counts["m2"] = m2;
  j["counts"] = counts;
  return j;
}

ExperimentRecord record_from_json(const nlohmann::json& j) {
  ExperimentRecord rec;
  try {
    rec.set_name = j.at("set").get<std::string>();
    rec.shots = j.at("shots").get<long long>();
    rec.rng_seed = j.value("seed", 0ULL);
    rec.delta_theta_deg = j.value("delta_theta_deg", 0.0);
    if (j.contains("noise")) {
      rec.noise.p_ba = j["noise"].value("p_ba", 0.0);
      rec.noise.p_bb = j["noise"].value("p_bb", 0.0);
      rec.noise.p_pa = j["noise"].value("p_pa", 0.0);
    }
    rec.p = vector_from_json(j.at("p"));
    rec.sigma_p = j.contains("sigma_p") ? vector_from_json(j["sigma_p"])
                                        : Vector::Zero(rec.p.size());
    rec.eps = eps_map_from_json(j.at("eps"));
    if (j.contains("sigma_eps")) rec.sigma_eps = eps_map_from_json(j["sigma_eps"]);
    if (j.contains("counts")) {
      const auto& counts = j["counts"];
      if (counts.contains("m1"))
        rec.m1_counts = counts["m1"].get<std::vector<std::vector<long long>>>();
      if (counts.contains("m2"))
        for (auto it = counts["m2"].begin(); it != counts["m2"].end(); ++it)
          rec.m2_counts[parse_edge_key(it.key())] = it.value().get<std::vector<long long>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed record: ") + e.what());
  }
  return rec;
}

ExperimentRecord load_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read record file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed record file '" + path + "': " + e.what());
  }
  return record_from_json(j);
}

void save_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << dump_json(j) << "\n";
}

nlohmann::json noise_fit_to_json(const NoiseFitResult& r) {
  nlohmann::json j;
  j["params"] = {{"p_ba", r.params.p_ba}, {"p_bb", r.params.p_bb}, {"p_pa", r.params.p_pa}};
  j["residual"] = r.residual;
  nlohmann::json dev = nlohmann::json::array();
  for (const auto& d : r.deviations) dev.push_back(vector_to_json(d));
  j["deviations"] = dev;
  j["eps_prime"] = eps_map_to_json(r.eps_prime);
  return j;
}

nlohmann::json angle_fit_to_json(const AngleFitResult& r) {
  return {{"delta_theta_deg", r.delta_theta_deg}, {"residual", r.residual}};
}

nlohmann::json report_to_json(const CertificationReport& rep) {
  nlohmann::json j;
  j["set"] = rep.set_name;
  j["dim"] = rep.dim;
  j["w_opt"] = rep.w_opt;
  j["record_summary"] = {{"mean_eps", rep.mean_eps},
                         {"sigma_mean_eps", rep.sigma_mean_eps},
                         {"mean_p", rep.mean_p},
                         {"sigma_mean_p", rep.sigma_mean_p}};
  j["w_exp"] = {{"value", rep.w_exp.w}, {"sigma", rep.w_exp.sigma}};
  j["w_worst"] = {{"value", rep.w_worst.w}, {"sigma", rep.w_worst.sigma}};
  j["w_sdp"] = {{"value", rep.w_sdp}, {"sigma", rep.w_sdp_sigma}};
  j["use_noise_fit"] = rep.use_noise_fit;
  if (rep.noise_fit) {
    j["noise_fit"] = {{"params",
                       {{"p_ba", rep.noise_fit->params.p_ba},
                        {"p_bb", rep.noise_fit->params.p_bb},
                        {"p_pa", rep.noise_fit->params.p_pa}}},
                      {"residual", rep.noise_fit->residual}};
  } else {
    j["noise_fit"] = nullptr;
  }
  if (rep.delta_theta_fit_deg) {
    j["delta_theta_fit"] = {{"delta_theta_deg", *rep.delta_theta_fit_deg},
                            {"residual", rep.delta_theta_fit_residual.value_or(0.0)}};
  } else {
    j["delta_theta_fit"] = nullptr;
  }
  j["gram_bounds"] = {{"g_min_lb", rep.sdp.gram.g_min_lb}, {"g_max_ub", rep.sdp.gram.g_max_ub}};
  nlohmann::json tau = nlohmann::json::object();
  for (const auto& [e, v] : rep.sdp.tau)
    tau[edge_key(e)] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("infeasible");
  j["tau"] = tau;
  nlohmann::json nu = nlohmann::json::array();
  for (double v : rep.sdp.nu) nu.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("infeasible"));
  j["nu"] = nu;
  j["sdp"] = {{"w_sdp", rep.sdp.w_sdp},
              {"reached_w_opt", rep.sdp.reached_w_opt},
              {"orthogonality_ok", rep.sdp.orthogonality_ok},
              {"completeness_ok", rep.sdp.completeness_ok},
              {"tightening_sweeps", rep.sdp.sweeps}};
  j["verdict"] = rep.certified ? "certified" : "not_certified";
  return j;
}

nlohmann::json set_to_json(const MeasurementSet& set, const OrthogonalityGraph& graph) {
  nlohmann::json j;
  j["name"] = set.name;
  j["dim"] = set.dim;
  j["n"] = set.size();
  nlohmann::json vecs = nlohmann::json::array();
  for (const auto& v : set.vectors) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) row.push_back(v[k]);
    vecs.push_back(row);
  }
  j["vectors"] = vecs;
  j["vertex_weights"] = set.vertex_weights;
  j["edge_weight"] = set.edge_weight;
  nlohmann::json aux = nlohmann::json::array();
  for (const auto& v : set.aux_vectors) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) row.push_back(v[k]);
    aux.push_back(row);
  }
  j["aux_vectors"] = aux;
  j["force_unit_context_gram"] = set.force_unit_context_gram;
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : graph.edges) edges.push_back(edge_key(e));
  j["edges"] = edges;
  j["n_edges"] = graph.edges.size();
  j["contexts"] = graph.contexts;
  j["measurement_bases"] = graph.measurement_bases;
  const Rational w = ideal_witness_optimum(set);
  j["w_opt"] = {{"num", w.num}, {"den", w.den}, {"value", w.value()}};
  return j;
}

namespace {

void dump_value(const nlohmann::json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + nlohmann::json(it.key()).dump() + ": ";
        dump_value(it.value(), out, indent, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump_value(v, out, indent, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
  std::string out;
  dump_value(j, out, indent, 0);
  return out;
}

}  // namespace sicert
