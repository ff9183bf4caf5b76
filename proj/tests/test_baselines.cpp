#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "rsgp/baselines.hpp"
#include "rsgp/metrics.hpp"

using namespace rsgp;
using testutil::vec;

namespace {

const double kP20 = 3.0 * std::log(20.0) / 20.0;

ObjectiveInstance reference_instance(std::uint64_t seed, bool attacked) {
  std::mt19937_64 rng(seed);
  auto inst = sample_instance(20, 2, vec({0.0859, -1.4916}), 1.0, rng);
  if (!attacked) return inst;
  return apply_attack(inst, {17, 18, 19}, AttackSpec{AttackKind::mean_shift, 0, 5, {}, 1});
}

std::vector<Vector> pick(const std::vector<Vector>& x, const std::vector<NodeId>& ids) {
  std::vector<Vector> out;
  for (NodeId i : ids) out.push_back(x[i]);
  return out;
}

}  // namespace

TEST_SUITE("baselines") {
  TEST_CASE("trimmed average") {
    CHECK(trimmed_average({1, 2, 3}, 2, 0) == doctest::Approx(2.0));
    // the outlier never enters
    CHECK(trimmed_average({1, 2, 1000}, 2, 1) == doctest::Approx(2.0));
    CHECK(trimmed_average({-1000, 1, 2, 3, 1000}, 0, 1) == doctest::Approx(1.5));
    // too few values: own value only
    CHECK(trimmed_average({5, 6}, 1, 1) == 1.0);
    CHECK(trimmed_average({}, 4, 0) == 4.0);
  }

  TEST_CASE("single-node TV with lambda = 0 is plain gradient descent") {
    auto inst = testutil::make_instance({vec({0.8, -0.3})}, {1.2});
    TVConfig cfg;
    cfg.lambda = 0.0;
    cfg.eta0 = 0.3;
    cfg.rho = 0.8;
    cfg.T = 3000;
    auto run = run_tv(DynamicDigraph(1), inst, cfg, std::mt19937_64(4));

    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd(0.0, 1.0);
    double x0 = nd(rng), x1 = nd(rng);
    const double h0 = 0.8, h1 = -0.3, s = 1.2;
    for (int t = 0; t < cfg.T; ++t) {
      const double eta = 0.3 / std::pow(t + 2.0, 0.8);
      const double r = h0 * x0 + h1 * x1 - s;
      x0 -= eta * 2 * h0 * r;
      x1 -= eta * 2 * h1 * r;
    }
    CHECK(std::abs(run.x[0][0] - x0) <= 1e-10);
    CHECK(std::abs(run.x[0][1] - x1) <= 1e-10);
  }

  TEST_CASE("TV: lambda = 0 leaves every node at its own minimizer, large lambda pulls them together") {
    auto inst = reference_instance(1, false);
    auto g = testutil::connected_er(20, kP20, 2);
    TVConfig cfg;
    cfg.T = 5000;
    cfg.lambda = 0.0;
    auto free = run_tv(g, inst, cfg, std::mt19937_64(3));
    const Vector xs = closed_form_solution(inst, all_nodes(20));
    double own = 0, shared = 0;
    for (NodeId i = 0; i < 20; ++i) {
      own += loss(inst, i, free.x[i]);
      shared += loss(inst, i, xs);
    }
    CHECK(own < 1e-2 * shared);
    cfg.lambda = 1.0;
    auto tied = run_tv(g, inst, cfg, std::mt19937_64(3));
    CHECK(consensus_deviation(tied.x) < 0.1 * consensus_deviation(free.x));
  }

  TEST_CASE("trimmed with kappa = 0 reaches consensus without attack") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto inst = reference_instance(seed, false);
      TrimConfig cfg;
      cfg.kappa = 0;
      cfg.T = 10000;
      auto run = run_trimmed(testutil::connected_er(20, kP20, seed + 30), inst, cfg, std::mt19937_64(seed));
      CHECK(consensus_deviation(run.x) < 1e-2);
    }
  }

  TEST_CASE("trimmed on a dense graph stays inside the regular minimizer hull") {
    auto inst = reference_instance(6, true);
    DynamicDigraph g(20, {17, 18, 19});
    for (NodeId i = 0; i < 20; ++i)
      for (NodeId j = i + 1; j < 20; ++j) g.add_undirected(i, j);
    TrimConfig cfg;
    cfg.kappa = 3;
    cfg.T = 10000;
    auto run = run_trimmed(g, inst, cfg, std::mt19937_64(7));
    const auto regs = complement(inst.malicious, 20);
    Vector lo = Vector::Constant(2, 1e300), hi = Vector::Constant(2, -1e300);
    for (NodeId i : regs) {
      Vector m = local_min_norm_minimizer(inst, i);
      lo = lo.cwiseMin(m);
      hi = hi.cwiseMax(m);
    }
    for (NodeId i : regs)
      for (int k = 0; k < 2; ++k) {
        CHECK(run.x[i][k] >= lo[k] - 1e-6);
        CHECK(run.x[i][k] <= hi[k] + 1e-6);
      }
    CHECK(consensus_deviation(pick(run.x, regs)) < 1e-2);
  }

  TEST_CASE("baselines are deterministic") {
    auto inst = reference_instance(8, true);
    auto g = testutil::connected_er(20, kP20, 9);
    TVConfig tv;
    tv.T = 500;
    CHECK(run_tv(g, inst, tv, std::mt19937_64(1)).x == run_tv(g, inst, tv, std::mt19937_64(1)).x);
    TrimConfig tr;
    tr.T = 500;
    CHECK(run_trimmed(g, inst, tr, std::mt19937_64(1)).x == run_trimmed(g, inst, tr, std::mt19937_64(1)).x);
  }

  TEST_CASE("validation") {
    TVConfig tv;
    tv.lambda = -1;
    CHECK_THROWS_WITH_AS(tv.validate(), doctest::Contains("lambda"), std::invalid_argument);
    tv.lambda = INFINITY;
    CHECK_THROWS_AS(tv.validate(), std::invalid_argument);
    TrimConfig tr;
    tr.T = 0;
    CHECK_THROWS_WITH_AS(tr.validate(), doctest::Contains("T"), std::invalid_argument);
  }

  TEST_CASE("trajectory samples carry the stride") {
    auto inst = reference_instance(10, false);
    TVConfig tv;
    tv.T = 100;
    auto run = run_tv(testutil::connected_er(20, kP20, 11), inst, tv, std::mt19937_64(1), 30);
    // rounds 0, 30, 60, 90, 100
    CHECK(run.samples.size() == 5 * 20);
    CHECK(run.samples.back().round == 100);
  }
}
