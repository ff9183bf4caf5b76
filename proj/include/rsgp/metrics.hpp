#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rsgp/graph.hpp"
#include "rsgp/objective.hpp"
#include "rsgp/protocol.hpp"

namespace rsgp {

/// Final attack-impact metrics of one trial, computed over regular nodes.
struct TrialReport {
  double epsilon_p = 0.0;  // average solution difference
  double varrho = 0.0;     // average cost increase (per-node differences)
  double gamma_p = 0.0;    // average deviation from consensus
  double xi_p = 0.0;       // degradation ratio relative to x_o
  double p = 2.0;
  std::size_t attack_edges_remaining = 0;
  std::size_t regular_isolated = 0;
  std::size_t false_severs = 0;
  std::optional<Round> isolation_round;
  std::optional<Vector> consensus_value;
};

/// l_p norm; p = infinity gives the max norm.
double lp_norm(const Vector& x, double p);

double avg_solution_difference(std::span<const Vector> finals, const Vector& x_star, double p = 2.0);

enum class CostIncreaseForm {
  per_node,  // mean_i (f_i(x_i) - f_i(x*))
  global,    // mean_i f_i(x_i) - F^r(x*)
};

/// `nodes[k]` is the node whose final estimate is `finals[k]`.
double avg_cost_increase(std::span<const NodeId> nodes, std::span<const Vector> finals,
                         const ObjectiveInstance& inst, const Vector& x_star,
                         CostIncreaseForm form = CostIncreaseForm::per_node);

double consensus_deviation(std::span<const Vector> finals, double p = 2.0);

/// [mean_i |x_i - x_o|_p] / |x* - x_o|_p. Throws UndefinedRatioError when x* == x_o.
double degradation_ratio(std::span<const Vector> finals, const Vector& x_star, const Vector& x_o,
                         double p = 2.0);

struct DetectionStats {
  std::size_t attack_edges_remaining = 0;
  std::size_t regular_isolated = 0;
  std::optional<Round> isolation_round;
  std::size_t false_severs = 0;
};

/// Replays `sever_log` on the initial graph. isolation_round is the round of
/// the sever event that removed the last attack edge (0 when none existed);
/// absent when attack edges survive.
DetectionStats detection_stats(std::span<const SeverEvent> sever_log,
                               const DynamicDigraph& initial_graph);

/// Regular nodes outside the largest strongly connected component of the
/// regular-only subgraph.
std::size_t count_regular_isolated(const DynamicDigraph& g);

}  // namespace rsgp
