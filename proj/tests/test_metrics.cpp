#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "rsgp/metrics.hpp"

using namespace rsgp;
using testutil::vec;

namespace {

std::vector<Vector> random_points(std::mt19937_64& rng, std::size_t n, double spread) {
  std::normal_distribution<double> nd(0.0, spread);
  std::vector<Vector> xs;
  for (std::size_t k = 0; k < n; ++k) xs.push_back(vec({nd(rng), nd(rng)}));
  return xs;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("solution difference examples") {
    const Vector xs = vec({1, 1});
    std::vector<Vector> at{xs, xs};
    CHECK(avg_solution_difference(at, xs) == 0.0);
    std::vector<Vector> two{vec({2, 1}), vec({1, 4})};
    CHECK(avg_solution_difference(two, xs) == doctest::Approx(2.0));
    const Vector xa = vec({-0.5, 3});
    std::vector<Vector> cons(5, xa);
    CHECK(avg_solution_difference(cons, xs) == doctest::Approx((xa - xs).norm()));
    CHECK_THROWS_AS(avg_solution_difference(std::vector<Vector>{}, xs), std::invalid_argument);
  }

  TEST_CASE("cost increase") {
    auto inst = testutil::make_instance({vec({1, 0}), vec({0, 2})}, {1, 2});
    std::vector<NodeId> ids{0, 1};
    const Vector xs = vec({1, 1});
    std::vector<Vector> at{xs, xs};
    CHECK(avg_cost_increase(ids, at, inst, xs) == 0.0);

    auto single = testutil::make_instance({vec({2, 1})}, {3});
    std::vector<NodeId> one{0};
    std::vector<Vector> f{vec({0.5, 0.5})};
    CHECK(avg_cost_increase(one, f, single, vec({1, 1})) ==
          doctest::Approx(loss(single, 0, f[0]) - loss(single, 0, vec({1, 1}))));

    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<Vector> h = random_points(rng, 6, 1.0);
      std::vector<double> s;
      for (int k = 0; k < 6; ++k) s.push_back(h[k][0] - h[k][1]);
      auto in = testutil::make_instance(h, s);
      std::vector<NodeId> nodes{0, 1, 2, 3, 4, 5};
      auto finals = random_points(rng, 6, 2.0);
      const Vector star = random_points(rng, 1, 1.0)[0];
      double direct = 0;
      for (int k = 0; k < 6; ++k) {
        const double a = h[k].dot(finals[k]) - s[k], b = h[k].dot(star) - s[k];
        direct += a * a - b * b;
      }
      direct /= 6;
      CHECK(testutil::rel_err(avg_cost_increase(nodes, finals, in, star), direct) <= 1e-12);
      CHECK(testutil::rel_err(avg_cost_increase(nodes, finals, in, star, CostIncreaseForm::global), direct) <= 1e-12);
    }
  }

  TEST_CASE("consensus deviation") {
    std::vector<Vector> same(4, vec({3, -2}));
    CHECK(consensus_deviation(same) == 0.0);
    std::vector<Vector> pm{vec({-1}), vec({1})};
    CHECK(consensus_deviation(pm) == doctest::Approx(1.0));
    std::mt19937_64 rng(2);
    auto xs = random_points(rng, 9, 1.0);
    auto shifted = xs;
    for (auto& x : shifted) x += vec({10, -7});
    CHECK(consensus_deviation(shifted) == doctest::Approx(consensus_deviation(xs)).epsilon(1e-12));
  }

  TEST_CASE("degradation ratio") {
    const Vector xo = vec({0, 0}), xs = vec({1, 0}), xa = vec({3, 4});
    std::vector<Vector> at(3, xs);
    CHECK(degradation_ratio(at, xs, xo) == doctest::Approx(1.0));
    std::vector<Vector> attacked(3, xa);
    CHECK(degradation_ratio(attacked, xs, xo) == doctest::Approx(5.0));
    CHECK_THROWS_AS(degradation_ratio(at, xo, xo), UndefinedRatioError);
    double prev = 0;
    for (double r = 0.5; r < 5; r += 0.5) {
      std::vector<Vector> ring(2, vec({r, 0}));
      const double v = degradation_ratio(ring, xs, xo);
      CHECK(v > prev);
      prev = v;
    }
  }

  TEST_CASE("metrics agree with one-line formulas") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> up(1.0, 4.0);
    for (int rep = 0; rep < 100; ++rep) {
      auto xs = random_points(rng, 7, 1.5);
      const Vector star = random_points(rng, 1, 1.0)[0], xo = random_points(rng, 1, 1.0)[0];
      const double p = rep % 4 == 0 ? INFINITY : up(rng);
      auto norm = [&](const Vector& v) {
        if (std::isinf(p)) return v.lpNorm<Eigen::Infinity>();
        return std::pow(std::pow(std::abs(v[0]), p) + std::pow(std::abs(v[1]), p), 1 / p);
      };
      double eps = 0, gam = 0, num = 0;
      Vector mean = Vector::Zero(2);
      for (const auto& x : xs) mean += x / 7.0;
      for (const auto& x : xs) {
        eps += norm(x - star) / 7;
        gam += norm(x - mean) / 7;
        num += norm(x - xo) / 7;
      }
      CHECK(testutil::rel_err(avg_solution_difference(xs, star, p), eps) <= 1e-12);
      CHECK(testutil::rel_err(consensus_deviation(xs, p), gam) <= 1e-12);
      CHECK(testutil::rel_err(degradation_ratio(xs, star, xo, p), num / norm(star - xo)) <= 1e-12);
      // triangle relation
      CHECK(avg_solution_difference(xs, star, p) <= norm(mean - star) + consensus_deviation(xs, p) + 1e-12);
    }
  }

  TEST_CASE("zero solution difference means unit degradation") {
    const Vector xs = vec({0.2, 0.4}), xo = vec({1, -1});
    std::vector<Vector> at(6, xs);
    REQUIRE(avg_solution_difference(at, xs) == 0.0);
    CHECK(degradation_ratio(at, xs, xo) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("detection stats") {
    // K4 with node 3 malicious
    DynamicDigraph g(5, {3});
    for (NodeId i = 0; i < 4; ++i)
      for (NodeId j = i + 1; j < 4; ++j) g.add_undirected(i, j);
    g.add_undirected(4, 0);
    REQUIRE(count_attack_edges(g) == 3);

    std::vector<SeverEvent> perfect{{5, 0, 3}, {9, 1, 3}, {12, 2, 3}};
    auto s = detection_stats(perfect, g);
    CHECK(s.attack_edges_remaining == 0);
    CHECK(s.false_severs == 0);
    CHECK(s.isolation_round == Round{12});
    CHECK(s.regular_isolated == 0);

    auto none = detection_stats({}, g);
    CHECK(none.attack_edges_remaining == 3);
    CHECK_FALSE(none.isolation_round.has_value());

    std::vector<SeverEvent> sloppy{{1, 0, 4}, {2, 4, 0}, {3, 0, 3}};
    auto t = detection_stats(sloppy, g);
    CHECK(t.false_severs == 1);
    CHECK(t.regular_isolated == 1);
    CHECK(t.attack_edges_remaining == 2);

    DynamicDigraph clean(3);
    clean.add_undirected(0, 1);
    clean.add_undirected(1, 2);
    CHECK(detection_stats({}, clean).isolation_round == Round{0});
  }

  TEST_CASE("regular isolation ignores paths through malicious nodes") {
    DynamicDigraph g(4, {2});
    g.add_undirected(0, 1);
    g.add_undirected(1, 2);
    g.add_undirected(2, 3);
    CHECK(count_regular_isolated(g) == 1);
  }
}
