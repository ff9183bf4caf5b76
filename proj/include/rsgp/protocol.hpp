#pragma once

#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "rsgp/graph.hpp"
#include "rsgp/objective.hpp"

namespace rsgp {

enum class ScoreMode {
  literal,     // S~(t) = S~(t-1) + alpha^t S(t)
  forgetting,  // S~(t) = alpha S~(t-1) + S(t)
};

std::string to_string(ScoreMode m);
ScoreMode score_mode_from_string(const std::string& s);

struct ProtocolConfig {
  double eta0 = 1.0;
  double rho = 1.0;  // eta_t = eta0 / (t + 1)^rho, rho in (0.5, 1]
  double alpha = 0.9;
  double beta = 1.5;
  ScoreMode score_mode = ScoreMode::forgetting;
  Round detection_start = 0;
  bool detection_enabled = true;
  Round T = 5000;
  /// Push-sum weights below this abort the trial. With the step guard a tiny
  /// weight is harmless because v and y shrink together.
  double y_floor = 1e-300;
  /// Caps the ratio-space step eta / y_i at 1 / L_i (L_i the local
  /// curvature). Without it a node that receives nothing for a few rounds
  /// sees its weight halve each round and its estimate diverge.
  bool step_guard = true;

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;
};

struct NodeState {
  Vector z;
  Vector v;
  double y = 1.0;
  Vector x;
  /// Cumulative score per in-neighbor that has been scored at least once.
  std::map<NodeId, double> cum_scores;
  /// Nodes whose message reached this node in the last round (includes self).
  std::vector<NodeId> last_senders;
};

struct SeverEvent {
  Round round;
  NodeId severer;
  NodeId severed;
  friend bool operator==(const SeverEvent&, const SeverEvent&) = default;
};

struct SimState {
  Round round = 0;
  std::vector<NodeState> nodes;
  DynamicDigraph graph;
  std::mt19937_64 rng;
  std::vector<SeverEvent> sever_log;
  /// Largest gradient norm seen so far (bounded-subgradient monitor).
  double max_grad_norm = 0.0;

  std::size_t size() const { return nodes.size(); }
};

/// z_i(0) ~ N(0, I), y_i(0) = 1, no scores. The state takes ownership of
/// `rng` for the random out-neighbor choices of later rounds.
SimState init(DynamicDigraph graph, const ObjectiveInstance& inst, const ProtocolConfig& cfg,
              std::mt19937_64 rng);

double step_size(const ProtocolConfig& cfg, Round t);

/// Tracked neighbor estimate z / y. Throws NumericDegeneracyError for y <= 0.
Vector xhat(const Vector& z, double y);

/// (1/eta^2) || sum_{l in senders \ j} (xhat_j - xhat_l) ||^2, where `xhats` is
/// indexed by node id. Zero when j is the only sender.
double instantaneous_score(NodeId j, std::span<const NodeId> senders,
                           const std::vector<Vector>& xhats, double eta);

double update_cumulative_score(double prev, double inst_score, Round t,
                               const ProtocolConfig& cfg);

/// mean + beta * sample std; nullopt when fewer than two scores are given.
std::optional<double> threshold(std::span<const double> scores, double beta);

/// Severs every scored in-neighbor of `i` whose cumulative score is strictly
/// above node i's threshold. Returns the severed neighbors.
std::vector<NodeId> detect_and_sever(SimState& state, NodeId i, const ProtocolConfig& cfg);

/// One synchronous round; all time t+1 quantities are computed from the
/// frozen time-t snapshot.
void round_step(SimState& state, const ObjectiveInstance& inst, const ProtocolConfig& cfg);

struct TrajectorySample {
  Round round;
  NodeId node;
  Vector x;
  double y;
  bool is_malicious;
  bool is_isolated;
};

struct TrialRun {
  SimState state;
  std::vector<TrajectorySample> samples;
};

/// Runs cfg.T rounds. With sample_stride > 0 the per-node estimates are
/// recorded every `sample_stride` rounds and at the final round.
TrialRun run_trial(DynamicDigraph graph, const ObjectiveInstance& inst, const ProtocolConfig& cfg,
                   std::mt19937_64 rng, Round sample_stride = 0);

/// Estimates x_i of the nodes in `nodes`, in order.
std::vector<Vector> final_estimates(const SimState& state, std::span<const NodeId> nodes);

/// Node has no remaining link to any regular node.
bool is_isolated(const DynamicDigraph& g, NodeId i);

}  // namespace rsgp
