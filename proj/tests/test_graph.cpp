#include "doctest.h"

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "rsgp/graph.hpp"

using namespace rsgp;

namespace {

// Pairwise reachability by transitive closure.
std::vector<std::vector<bool>> closure(const DynamicDigraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (NodeId i = 0; i < n; ++i) {
    r[i][i] = true;
    for (NodeId j : g.out_nbrs(i)) r[i][j] = true;
  }
  for (NodeId k = 0; k < n; ++k)
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = true;
  return r;
}

}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("erdos-renyi extremes") {
    std::mt19937_64 rng(3);
    auto full = gen_erdos_renyi(2, 1.0, rng);
    CHECK(full.has_edge(0, 1));
    CHECK(full.has_edge(1, 0));
    CHECK(full.edge_count() == 2);
    CHECK(gen_erdos_renyi(5, 0.0, rng).edge_count() == 0);
    CHECK_THROWS_AS(gen_erdos_renyi(1, 0.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(gen_erdos_renyi(4, 1.5, rng), std::invalid_argument);
  }

  TEST_CASE("erdos-renyi edge count matches the binomial mean") {
    const std::size_t n = 20;
    const double p = 3.0 * std::log(20.0) / 20.0;
    const double expected = p * n * (n - 1) / 2.0;  // 85.4
    std::mt19937_64 rng(11);
    const int samples = 2000;
    double total = 0;
    for (int k = 0; k < samples; ++k) total += gen_erdos_renyi(n, p, rng).edge_count() / 2.0;
    const double sd = std::sqrt(n * (n - 1) / 2.0 * p * (1 - p) / samples);
    CHECK(std::abs(total / samples - expected) < 4 * sd);
  }

  TEST_CASE("erdos-renyi is a pure function of the seed") {
    std::mt19937_64 a(99), b(99);
    CHECK(gen_erdos_renyi(15, 0.3, a) == gen_erdos_renyi(15, 0.3, b));
  }

  TEST_CASE("strong connectivity basics") {
    DynamicDigraph cycle(3);
    cycle.add_edge(0, 1);
    cycle.add_edge(1, 2);
    cycle.add_edge(2, 0);
    CHECK(is_strongly_connected(cycle));

    DynamicDigraph path(3);
    path.add_edge(0, 1);
    path.add_edge(1, 2);
    CHECK_FALSE(is_strongly_connected(path));
    CHECK(is_strongly_connected(path, NodeSet{1}));
    CHECK_THROWS_AS(is_strongly_connected(path, NodeSet{}), std::invalid_argument);
  }

  TEST_CASE("bidirectional graphs: strong connectivity equals undirected connectivity") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 200; ++k) {
      auto g = gen_erdos_renyi(8, 0.25, rng);
      // union-find over undirected pairs
      std::vector<NodeId> parent(8);
      for (NodeId i = 0; i < 8; ++i) parent[i] = i;
      auto find = [&](NodeId x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
      };
      for (auto [a, b] : g.edges()) parent[find(a)] = find(b);
      bool one = true;
      for (NodeId i = 1; i < 8; ++i) one = one && find(i) == find(0);
      CHECK(is_strongly_connected(g) == one);
    }
  }

  TEST_CASE("scc examples") {
    DynamicDigraph g(3);
    g.add_undirected(0, 1);
    auto c = strongly_connected_components(g);
    REQUIRE(c.size() == 2);
    CHECK(c[0] == std::vector<NodeId>{0, 1});
    CHECK(c[1] == std::vector<NodeId>{2});

    DynamicDigraph k4(4);
    for (NodeId i = 0; i < 4; ++i)
      for (NodeId j = i + 1; j < 4; ++j) k4.add_undirected(i, j);
    CHECK(strongly_connected_components(k4).size() == 1);

    DynamicDigraph h(4);
    h.add_edge(0, 1);
    h.add_edge(1, 2);
    h.add_edge(2, 0);
    h.add_edge(3, 0);
    auto ch = strongly_connected_components(h);
    REQUIRE(ch.size() == 2);
    CHECK(ch[0] == std::vector<NodeId>{0, 1, 2});
    CHECK(ch[1] == std::vector<NodeId>{3});
  }

  TEST_CASE("scc agrees with pairwise reachability on small random digraphs") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
      const std::size_t n = 1 + trial % 6;
      DynamicDigraph g(n);
      for (NodeId i = 0; i < n; ++i)
        for (NodeId j = 0; j < n; ++j)
          if (i != j && u(rng) < 0.3) g.add_edge(i, j);
      auto r = closure(g);
      auto comps = strongly_connected_components(g);
      std::vector<int> label(n, -1);
      std::size_t covered = 0;
      for (std::size_t c = 0; c < comps.size(); ++c)
        for (NodeId v : comps[c]) {
          CHECK(label[v] == -1);
          label[v] = static_cast<int>(c);
          ++covered;
        }
      CHECK(covered == n);
      for (NodeId i = 0; i < n; ++i)
        for (NodeId j = 0; j < n; ++j) CHECK((label[i] == label[j]) == (r[i][j] && r[j][i]));
    }
  }

  TEST_CASE("sever is bidirectional and idempotent") {
    DynamicDigraph g(3);
    g.add_undirected(0, 1);
    g.add_undirected(1, 2);
    g.sever(0, 1);
    CHECK_FALSE(g.has_edge(0, 1));
    CHECK_FALSE(g.has_edge(1, 0));
    CHECK(g.mirror_consistent());
    auto once = g;
    g.sever(0, 1);
    CHECK(g == once);
    g.sever(2, 1);
    CHECK(strongly_connected_components(g).size() == 3);
  }

  TEST_CASE("mirror consistency survives random severing") {
    auto g = testutil::connected_er(12, 0.5, 8);
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<NodeId> pick(0, 11);
    for (int k = 0; k < 100; ++k) {
      g.sever(pick(rng), pick(rng));
      REQUIRE(g.mirror_consistent());
    }
  }

  TEST_CASE("attack edges") {
    DynamicDigraph star(4, NodeSet{0});
    for (NodeId j = 1; j < 4; ++j) star.add_edge(0, j);
    CHECK(count_attack_edges(star) == 3);

    DynamicDigraph k4(4, NodeSet{3});
    for (NodeId i = 0; i < 4; ++i)
      for (NodeId j = i + 1; j < 4; ++j) k4.add_undirected(i, j);
    CHECK(count_attack_edges(k4) == 3);
    for (NodeId j = 0; j < 3; ++j) k4.sever(j, 3);
    CHECK(count_attack_edges(k4) == 0);
    for (NodeId i = 0; i < 3; ++i)
      for (NodeId j : k4.in_nbrs(i)) CHECK_FALSE(k4.is_malicious(j));
  }

  TEST_CASE("malicious-malicious edges do not count as attack edges") {
    DynamicDigraph g(3, NodeSet{1, 2});
    g.add_undirected(1, 2);
    g.add_edge(1, 0);
    CHECK(count_attack_edges(g) == 1);
  }

  TEST_CASE("edge list round trip") {
    auto g = testutil::connected_er(10, 0.4, 21);
    g.set_malicious({7, 9});
    std::stringstream ss;
    write_edge_list(ss, g);
    CHECK(ss.str().rfind("# malicious: 7 9\n", 0) == 0);
    CHECK(read_edge_list(ss, 10) == g);
  }

  TEST_CASE("self-loops are not stored") {
    DynamicDigraph g(2);
    g.add_edge(1, 1);
    CHECK(g.edge_count() == 0);
  }
}
