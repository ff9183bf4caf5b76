#pragma once

#include <random>
#include <vector>

#include "rsgp/graph.hpp"
#include "rsgp/objective.hpp"
#include "rsgp/protocol.hpp"

namespace rsgp {

/// Decentralized subgradient descent on f_i(x_i) + lambda * sum_j |x_i - x_j|_1.
struct TVConfig {
  double lambda = 0.1;
  double eta0 = 1.0;
  double rho = 1.0;
  Round T = 5000;
  void validate() const;
};

/// Coordinate-wise trimmed-mean consensus followed by a local subgradient step.
struct TrimConfig {
  std::size_t kappa = 3;
  double eta0 = 1.0;
  double rho = 1.0;
  Round T = 5000;
  void validate() const;
};

struct BaselineRun {
  std::vector<Vector> x;  // final estimate per node
  std::vector<TrajectorySample> samples;
};

/// Every node hears every in-neighbor each round; no severing. Initial
/// estimates are drawn N(0, I) from `rng`.
BaselineRun run_tv(const DynamicDigraph& graph, const ObjectiveInstance& inst, const TVConfig& cfg,
                   std::mt19937_64 rng, Round sample_stride = 0);

BaselineRun run_trimmed(const DynamicDigraph& graph, const ObjectiveInstance& inst,
                        const TrimConfig& cfg, std::mt19937_64 rng, Round sample_stride = 0);

/// Mean of the values left after dropping the kappa largest and kappa
/// smallest of `received`, pooled with `own`. Returns `own` when fewer than
/// 2 kappa + 1 values were received.
double trimmed_average(std::vector<double> received, double own, std::size_t kappa);

}  // namespace rsgp
