#include "rsgp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsgp {

namespace {

void require_nonempty(std::span<const Vector> finals, const char* what) {
  if (finals.empty()) throw std::invalid_argument(std::string(what) + ": empty regular set");
}

Vector mean_of(std::span<const Vector> xs) {
  Vector m = Vector::Zero(xs.front().size());
  for (const auto& x : xs) m += x;
  return m / static_cast<double>(xs.size());
}

}  // namespace

double lp_norm(const Vector& x, double p) {
  if (std::isinf(p)) return x.cwiseAbs().maxCoeff();
  if (p == 2.0) return x.norm();
  if (p == 1.0) return x.cwiseAbs().sum();
  return std::pow(x.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

double avg_solution_difference(std::span<const Vector> finals, const Vector& x_star, double p) {
  require_nonempty(finals, "avg_solution_difference");
  double acc = 0.0;
  for (const auto& x : finals) acc += lp_norm(x - x_star, p);
  return acc / static_cast<double>(finals.size());
}

double avg_cost_increase(std::span<const NodeId> nodes, std::span<const Vector> finals,
                         const ObjectiveInstance& inst, const Vector& x_star,
                         CostIncreaseForm form) {
  require_nonempty(finals, "avg_cost_increase");
  if (nodes.size() != finals.size())
    throw std::invalid_argument("avg_cost_increase: nodes and finals differ in length");
  double at_final = 0.0, at_star = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    at_final += loss(inst, nodes[k], finals[k]);
    at_star += loss(inst, nodes[k], x_star);
  }
  const double n = static_cast<double>(nodes.size());
  if (form == CostIncreaseForm::per_node) return (at_final - at_star) / n;
  // F^r(x*) is the regular-average objective, which coincides with the same
  // mean when `nodes` is the regular set.
  return at_final / n - at_star / n;
}

double consensus_deviation(std::span<const Vector> finals, double p) {
  require_nonempty(finals, "consensus_deviation");
  const Vector mean = mean_of(finals);
  double acc = 0.0;
  for (const auto& x : finals) acc += lp_norm(x - mean, p);
  return acc / static_cast<double>(finals.size());
}

double degradation_ratio(std::span<const Vector> finals, const Vector& x_star, const Vector& x_o,
                         double p) {
  require_nonempty(finals, "degradation_ratio");
  const double denom = lp_norm(x_star - x_o, p);
  if (!(denom > 0.0)) throw UndefinedRatioError("degradation_ratio: x* equals x_o");
  return avg_solution_difference(finals, x_o, p) / denom;
}

std::size_t count_regular_isolated(const DynamicDigraph& g) {
  DynamicDigraph regular_only = g;
  for (NodeId m : g.malicious())
    for (NodeId j = 0; j < g.size(); ++j) regular_only.sever(m, j);
  std::size_t largest = 0, n_regular = 0;
  for (const auto& comp : strongly_connected_components(regular_only)) {
    if (g.is_malicious(comp.front())) continue;
    largest = std::max(largest, comp.size());
    n_regular += comp.size();
  }
  return n_regular - largest;
}

DetectionStats detection_stats(std::span<const SeverEvent> sever_log,
                               const DynamicDigraph& initial_graph) {
  DynamicDigraph g = initial_graph;
  DetectionStats out;
  std::size_t remaining = count_attack_edges(g);
  if (remaining == 0) out.isolation_round = 0;
  std::set<std::pair<NodeId, NodeId>> false_pairs;
  for (const auto& ev : sever_log) {
    const bool had_edge = g.has_edge(ev.severer, ev.severed) || g.has_edge(ev.severed, ev.severer);
    g.sever(ev.severer, ev.severed);
    if (!g.is_malicious(ev.severer) && !g.is_malicious(ev.severed) && had_edge)
      false_pairs.emplace(std::min(ev.severer, ev.severed), std::max(ev.severer, ev.severed));
    if (remaining > 0) {
      remaining = count_attack_edges(g);
      if (remaining == 0) out.isolation_round = ev.round;
    }
  }
  out.attack_edges_remaining = remaining;
  out.regular_isolated = count_regular_isolated(g);
  out.false_severs = false_pairs.size();
  return out;
}

}  // namespace rsgp
