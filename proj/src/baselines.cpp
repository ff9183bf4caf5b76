#include "rsgp/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace rsgp {

namespace {

double step(double eta0, double rho, Round t) {
  return eta0 / std::pow(static_cast<double>(t) + 1.0, rho);
}

std::vector<Vector> initial_points(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> x(n, Vector(d));
  for (auto& xi : x)
    for (std::size_t k = 0; k < d; ++k) xi[k] = normal(rng);
  return x;
}

void record(Round t, const DynamicDigraph& g, const std::vector<Vector>& x,
            std::vector<TrajectorySample>& out) {
  for (NodeId i = 0; i < x.size(); ++i)
    out.push_back({t, i, x[i], 1.0, g.is_malicious(i), is_isolated(g, i)});
}

void check_sizes(const DynamicDigraph& g, const ObjectiveInstance& inst) {
  if (g.size() != inst.size())
    throw std::invalid_argument("graph and instance disagree on the node count");
}

double sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

void TVConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("tv.lambda must be finite and >= 0");
  if (!(eta0 > 0.0)) throw std::invalid_argument("tv.eta0 must be > 0");
  if (!(rho > 0.5 && rho <= 1.0)) throw std::invalid_argument("tv.rho must lie in (0.5, 1]");
  if (T < 1) throw std::invalid_argument("tv.T must be >= 1");
}

void TrimConfig::validate() const {
  if (!(eta0 > 0.0)) throw std::invalid_argument("trimmed.eta0 must be > 0");
  if (!(rho > 0.5 && rho <= 1.0)) throw std::invalid_argument("trimmed.rho must lie in (0.5, 1]");
  if (T < 1) throw std::invalid_argument("trimmed.T must be >= 1");
}

BaselineRun run_tv(const DynamicDigraph& g, const ObjectiveInstance& inst, const TVConfig& cfg,
                   std::mt19937_64 rng, Round sample_stride) {
  cfg.validate();
  check_sizes(g, inst);
  const std::size_t n = g.size(), d = inst.d;
  BaselineRun run{initial_points(n, d, rng), {}};
  auto& x = run.x;
  if (sample_stride > 0) record(0, g, x, run.samples);

  std::vector<Vector> next(n, Vector(d));
  Vector grad(d);
  for (Round t = 0; t < cfg.T; ++t) {
    const double eta = step(cfg.eta0, cfg.rho, t + 1);
    for (NodeId i = 0; i < n; ++i) {
      gradient_into(inst, i, x[i], grad);
      if (cfg.lambda > 0.0)
        for (NodeId j : g.in_nbrs(i))
          for (std::size_t k = 0; k < d; ++k) grad[k] += cfg.lambda * sign(x[i][k] - x[j][k]);
      next[i] = x[i] - eta * grad;
    }
    std::swap(x, next);
    if (sample_stride > 0 && ((t + 1) % sample_stride == 0 || t + 1 == cfg.T))
      record(t + 1, g, x, run.samples);
  }
  return run;
}

double trimmed_average(std::vector<double> received, double own, std::size_t kappa) {
  if (received.size() < 2 * kappa + 1) return own;
  std::sort(received.begin(), received.end());
  double acc = own;
  for (std::size_t k = kappa; k < received.size() - kappa; ++k) acc += received[k];
  return acc / static_cast<double>(received.size() - 2 * kappa + 1);
}

BaselineRun run_trimmed(const DynamicDigraph& g, const ObjectiveInstance& inst,
                        const TrimConfig& cfg, std::mt19937_64 rng, Round sample_stride) {
  cfg.validate();
  check_sizes(g, inst);
  const std::size_t n = g.size(), d = inst.d;
  BaselineRun run{initial_points(n, d, rng), {}};
  auto& x = run.x;
  if (sample_stride > 0) record(0, g, x, run.samples);

  std::vector<Vector> next(n, Vector(d));
  std::vector<double> received;
  Vector mixed(d), grad(d);
  for (Round t = 0; t < cfg.T; ++t) {
    const double eta = step(cfg.eta0, cfg.rho, t + 1);
    for (NodeId i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        received.clear();
        for (NodeId j : g.in_nbrs(i)) received.push_back(x[j][k]);
        mixed[k] = trimmed_average(received, x[i][k], cfg.kappa);
      }
      gradient_into(inst, i, mixed, grad);
      next[i] = mixed - eta * grad;
    }
    std::swap(x, next);
    if (sample_stride > 0 && ((t + 1) % sample_stride == 0 || t + 1 == cfg.T))
      record(t + 1, g, x, run.samples);
  }
  return run;
}

}  // namespace rsgp
