#include "rsgp/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>
#include <sstream>

namespace rsgp {

namespace {

constexpr NodeId kNoTarget = std::numeric_limits<NodeId>::max();

}  // namespace

std::string to_string(ScoreMode m) { return m == ScoreMode::literal ? "literal" : "forgetting"; }

ScoreMode score_mode_from_string(const std::string& s) {
  if (s == "literal") return ScoreMode::literal;
  if (s == "forgetting") return ScoreMode::forgetting;
  throw std::invalid_argument("unknown score_mode '" + s + "'");
}

void ProtocolConfig::validate() const {
  if (!(eta0 > 0.0)) throw std::invalid_argument("protocol.eta0 must be > 0");
  if (!(rho > 0.5 && rho <= 1.0)) throw std::invalid_argument("protocol.rho must lie in (0.5, 1]");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("protocol.alpha must lie in (0, 1)");
  if (!(beta >= 0.0)) throw std::invalid_argument("protocol.beta must be >= 0");
  if (detection_start < 0) throw std::invalid_argument("protocol.detection_start must be >= 0");
  if (T < 1) throw std::invalid_argument("protocol.T must be >= 1");
  if (!(y_floor > 0.0)) throw std::invalid_argument("protocol.y_floor must be > 0");
}

SimState init(DynamicDigraph graph, const ObjectiveInstance& inst, const ProtocolConfig& cfg,
              std::mt19937_64 rng) {
  cfg.validate();
  if (graph.size() != inst.size())
    throw PreconditionError("graph has " + std::to_string(graph.size()) +
                            " nodes but the instance has " + std::to_string(inst.size()));
  if (!is_strongly_connected(graph)) throw PreconditionError("graph is not strongly connected");

  SimState st;
  st.graph = std::move(graph);
  st.nodes.resize(inst.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& node : st.nodes) {
    node.z.resize(inst.d);
    for (std::size_t k = 0; k < inst.d; ++k) node.z[k] = normal(rng);
    node.v = node.z;
    node.y = 1.0;
    node.x = node.z;
  }
  st.rng = rng;
  return st;
}

double step_size(const ProtocolConfig& cfg, Round t) {
  return cfg.eta0 / std::pow(static_cast<double>(t) + 1.0, cfg.rho);
}

Vector xhat(const Vector& z, double y) {
  if (!(y > 0.0)) throw NumericDegeneracyError("xhat: non-positive push-sum weight");
  return z / y;
}

double instantaneous_score(NodeId j, std::span<const NodeId> senders,
                           const std::vector<Vector>& xhats, double eta) {
  const Vector& xj = xhats.at(j);
  Vector acc = Vector::Zero(xj.size());
  for (NodeId l : senders) {
    if (l == j) continue;
    acc += xj - xhats.at(l);
  }
  return acc.squaredNorm() / (eta * eta);
}

double update_cumulative_score(double prev, double inst_score, Round t,
                               const ProtocolConfig& cfg) {
  if (cfg.score_mode == ScoreMode::literal)
    return prev + std::pow(cfg.alpha, static_cast<double>(t)) * inst_score;
  return cfg.alpha * prev + inst_score;
}

std::optional<double> threshold(std::span<const double> scores, double beta) {
  const std::size_t n = scores.size();
  if (n < 2) return std::nullopt;
  const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double s : scores) ss += (s - mean) * (s - mean);
  return mean + beta * std::sqrt(ss / static_cast<double>(n - 1));
}

std::vector<NodeId> detect_and_sever(SimState& st, NodeId i, const ProtocolConfig& cfg) {
  auto& scores = st.nodes.at(i).cum_scores;
  std::vector<double> vals;
  vals.reserve(scores.size());
  for (const auto& [j, s] : scores) vals.push_back(s);
  const auto chi = threshold(vals, cfg.beta);
  if (!chi) return {};

  std::vector<NodeId> cut;
  for (const auto& [j, s] : scores)
    if (s > *chi) cut.push_back(j);
  for (NodeId j : cut) {
    st.graph.sever(i, j);
    st.nodes[i].cum_scores.erase(j);
    st.nodes[j].cum_scores.erase(i);
    st.sever_log.push_back({st.round, i, j});
  }
  return cut;
}

void round_step(SimState& st, const ObjectiveInstance& inst, const ProtocolConfig& cfg) {
  const std::size_t n = st.size();
  const Round t = st.round;
  const DynamicDigraph& g = st.graph;

  // (1) each node pushes to itself and to one out-neighbor chosen uniformly.
  std::vector<NodeId> target(n, kNoTarget);
  for (NodeId i = 0; i < n; ++i) {
    const NodeSet& out = g.out_nbrs(i);
    if (out.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, out.size() - 1);
    target[i] = *std::next(out.begin(), static_cast<std::ptrdiff_t>(pick(st.rng)));
  }
  for (NodeId i = 0; i < n; ++i) st.nodes[i].last_senders.assign(1, i);
  for (NodeId j = 0; j < n; ++j)
    if (target[j] != kNoTarget) st.nodes[target[j]].last_senders.push_back(j);

  const bool detect = cfg.detection_enabled && t >= cfg.detection_start;
  std::vector<Vector> xhats;
  if (detect) {
    xhats.reserve(n);
    for (const auto& node : st.nodes) xhats.push_back(xhat(node.z, node.y));
  }

  // (2) mix the frozen time-t values. A node without out-neighbors keeps its
  // whole mass, so the mixing stays column stochastic.
  std::vector<Vector> next_v(n, Vector::Zero(inst.d));
  std::vector<double> next_y(n, 0.0);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : st.nodes[i].last_senders) {
      const double w = target[j] == kNoTarget ? 1.0 : 0.5;
      next_v[i] += w * st.nodes[j].z;
      next_y[i] += w * st.nodes[j].y;
    }
  }

  // (3)-(4) ratio estimate and local subgradient step.
  const double eta_next = step_size(cfg, t + 1);
  Vector grad(inst.d);
  for (NodeId i = 0; i < n; ++i) {
    if (!(next_y[i] >= cfg.y_floor)) {
      std::ostringstream msg;
      msg << "push-sum weight of node " << i << " fell to " << next_y[i] << " at round " << t + 1;
      throw NumericDegeneracyError(msg.str());
    }
    NodeState& node = st.nodes[i];
    node.v = std::move(next_v[i]);
    node.y = next_y[i];
    node.x = node.v / node.y;
    gradient_into(inst, i, node.x, grad);
    st.max_grad_norm = std::max(st.max_grad_norm, grad.norm());
    double eta_i = eta_next;
    if (cfg.step_guard) {
      const double curv = local_curvature(inst, i);
      if (curv > 0.0) eta_i = std::min(eta_i, node.y / curv);
    }
    node.z = node.v - eta_i * grad;
  }

  // (5) regular nodes score this round's senders and cut outliers; events are
  // stamped with the new round index.
  ++st.round;
  if (detect) {
    const double eta = step_size(cfg, t);
    for (NodeId i = 0; i < n; ++i) {
      if (st.graph.is_malicious(i)) continue;
      NodeState& node = st.nodes[i];
      for (NodeId j : node.last_senders) {
        if (j == i || !st.graph.in_nbrs(i).count(j)) continue;
        const double s = instantaneous_score(j, node.last_senders, xhats, eta);
        auto [it, fresh] = node.cum_scores.try_emplace(j, 0.0);
        it->second = update_cumulative_score(it->second, s, t + 1, cfg);
      }
      detect_and_sever(st, i, cfg);
    }
  }
}

bool is_isolated(const DynamicDigraph& g, NodeId i) {
  for (NodeId j : g.out_nbrs(i))
    if (!g.is_malicious(j)) return false;
  return true;
}

namespace {

void record(const SimState& st, std::vector<TrajectorySample>& out) {
  for (NodeId i = 0; i < st.size(); ++i)
    out.push_back({st.round, i, st.nodes[i].x, st.nodes[i].y, st.graph.is_malicious(i),
                   is_isolated(st.graph, i)});
}

}  // namespace

TrialRun run_trial(DynamicDigraph graph, const ObjectiveInstance& inst, const ProtocolConfig& cfg,
                   std::mt19937_64 rng, Round sample_stride) {
  TrialRun run{init(std::move(graph), inst, cfg, std::move(rng)), {}};
  if (sample_stride > 0) record(run.state, run.samples);
  for (Round t = 0; t < cfg.T; ++t) {
    round_step(run.state, inst, cfg);
    if (sample_stride > 0 && (run.state.round % sample_stride == 0 || run.state.round == cfg.T))
      record(run.state, run.samples);
  }
  return run;
}

std::vector<Vector> final_estimates(const SimState& st, std::span<const NodeId> nodes) {
  std::vector<Vector> out;
  out.reserve(nodes.size());
  for (NodeId i : nodes) out.push_back(st.nodes.at(i).x);
  return out;
}

}  // namespace rsgp
