#include "rsgp/io.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace rsgp {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, std::span<const TrajectorySample> samples, std::size_t d,
                          const std::string& algorithm) {
  os << "round,node";
  for (std::size_t k = 0; k < d; ++k) os << ",x" << k;
  os << ",y,is_malicious,is_isolated,algorithm\n";
  for (const auto& s : samples) {
    os << s.round << ',' << s.node;
    for (Eigen::Index k = 0; k < s.x.size(); ++k) os << ',' << fmt17(s.x[k]);
    os << ',' << fmt17(s.y) << ',' << int(s.is_malicious) << ',' << int(s.is_isolated) << ',' << algorithm
       << '\n';
  }
}

void write_sever_log_csv(std::ostream& os, std::span<const SeverEvent> log) {
  os << "round,severer,severed\n";
  for (const auto& e : log) os << e.round << ',' << e.severer << ',' << e.severed << '\n';
}

nlohmann::json vector_to_json(const Vector& v) {
  auto j = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) j.push_back(v[k]);
  return j;
}

Vector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a JSON array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  return v;
}

nlohmann::json instance_to_json(const ObjectiveInstance& inst) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : inst.rows) rows.push_back({{"h", vector_to_json(r.h)}, {"s", r.s}});
  nlohmann::json attack = {{"kind", to_string(inst.attack.kind)},
                           {"delta_s", inst.attack.delta_s},
                           {"shift", inst.attack.shift},
                           {"gain", inst.attack.gain}};
  if (inst.attack.target.size() > 0) attack["target"] = vector_to_json(inst.attack.target);
  return {{"d", inst.d},
          {"x_o", vector_to_json(inst.x_o)},
          {"noise_sigma", inst.noise_sigma},
          {"rows", rows},
          {"malicious", std::vector<NodeId>(inst.malicious.begin(), inst.malicious.end())},
          {"attack", attack}};
}

ObjectiveInstance instance_from_json(const nlohmann::json& j) {
  ObjectiveInstance inst;
  inst.d = j.at("d").get<std::size_t>();
  inst.x_o = vector_from_json(j.at("x_o"));
  inst.noise_sigma = j.at("noise_sigma").get<double>();
  for (const auto& r : j.at("rows")) {
    Observation o{vector_from_json(r.at("h")), r.at("s").get<double>()};
    if (static_cast<std::size_t>(o.h.size()) != inst.d) throw std::invalid_argument("instance row has wrong dimension");
    inst.rows.push_back(std::move(o));
  }
  for (NodeId m : j.at("malicious").get<std::vector<NodeId>>()) {
    if (m >= inst.rows.size()) throw std::invalid_argument("instance malicious id out of range");
    inst.malicious.insert(m);
  }
  const auto& a = j.at("attack");
  inst.attack.kind = attack_kind_from_string(a.at("kind").get<std::string>());
  inst.attack.delta_s = a.value("delta_s", 0.0);
  inst.attack.shift = a.value("shift", 5.0);
  inst.attack.gain = a.value("gain", 1.0);
  if (a.contains("target")) inst.attack.target = vector_from_json(a["target"]);
  return inst;
}

nlohmann::json report_to_json(const TrialReport& r) {
  nlohmann::json j = {{"epsilon_p", r.epsilon_p},
                      {"varrho", r.varrho},
                      {"gamma_p", r.gamma_p},
                      {"xi_p", r.xi_p},
                      {"p", r.p},
                      {"attack_edges_remaining", r.attack_edges_remaining},
                      {"regular_isolated", r.regular_isolated},
                      {"false_severs", r.false_severs},
                      {"isolation_round", nullptr},
                      {"consensus_value", nullptr}};
  if (r.isolation_round) j["isolation_round"] = *r.isolation_round;
  if (r.consensus_value) j["consensus_value"] = vector_to_json(*r.consensus_value);
  return j;
}

}  // namespace rsgp
