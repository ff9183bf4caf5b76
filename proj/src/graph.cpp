#include "rsgp/graph.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace rsgp {

DynamicDigraph::DynamicDigraph(std::size_t n, NodeSet malicious) : in_(n), out_(n) {
  set_malicious(std::move(malicious));
}

void DynamicDigraph::check_node(NodeId i) const {
  if (i >= size())
    throw std::invalid_argument("node " + std::to_string(i) + " out of range [0, " +
                                std::to_string(size()) + ")");
}

void DynamicDigraph::set_malicious(NodeSet m) {
  for (NodeId i : m) check_node(i);
  malicious_ = std::move(m);
}

void DynamicDigraph::add_edge(NodeId from, NodeId to) {
  check_node(from);
  check_node(to);
  if (from == to) return;
  out_[from].insert(to);
  in_[to].insert(from);
}

void DynamicDigraph::add_undirected(NodeId a, NodeId b) {
  add_edge(a, b);
  add_edge(b, a);
}

bool DynamicDigraph::has_edge(NodeId from, NodeId to) const {
  check_node(from);
  check_node(to);
  return out_[from].count(to) != 0;
}

void DynamicDigraph::sever(NodeId i, NodeId j) {
  check_node(i);
  check_node(j);
  in_[i].erase(j);
  out_[i].erase(j);
  in_[j].erase(i);
  out_[j].erase(i);
}

std::size_t DynamicDigraph::edge_count() const {
  std::size_t m = 0;
  for (const auto& o : out_) m += o.size();
  return m;
}

std::vector<std::pair<NodeId, NodeId>> DynamicDigraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> e;
  e.reserve(edge_count());
  for (NodeId i = 0; i < size(); ++i)
    for (NodeId j : out_[i]) e.emplace_back(i, j);
  return e;
}

bool DynamicDigraph::mirror_consistent() const {
  for (NodeId i = 0; i < size(); ++i) {
    if (in_[i].count(i) || out_[i].count(i)) return false;
    for (NodeId j : in_[i])
      if (!out_[j].count(i)) return false;
    for (NodeId j : out_[i])
      if (!in_[j].count(i)) return false;
  }
  return true;
}

DynamicDigraph gen_erdos_renyi(std::size_t n, double p, std::mt19937_64& rng) {
  if (n < 2) throw std::invalid_argument("gen_erdos_renyi: n must be >= 2");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("gen_erdos_renyi: p must lie in [0, 1]");
  DynamicDigraph g(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (u(rng) < p) g.add_undirected(i, j);
  return g;
}

std::vector<std::vector<NodeId>> strongly_connected_components(const DynamicDigraph& g) {
  const std::size_t n = g.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<NodeId> stack;
  std::vector<std::vector<NodeId>> comps;
  std::size_t counter = 0;

  // Iterative Tarjan: each frame is (node, iterator into its out-set).
  struct Frame {
    NodeId v;
    NodeSet::const_iterator it;
  };
  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    std::vector<Frame> call;
    auto push = [&](NodeId v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack[v] = true;
      call.push_back({v, g.out_nbrs(v).begin()});
    };
    push(root);
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.it != g.out_nbrs(f.v).end()) {
        NodeId w = *f.it++;
        if (index[w] == kUnvisited) {
          push(w);
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      NodeId v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<NodeId> comp;
        NodeId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
    }
  }
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

bool is_strongly_connected(const DynamicDigraph& g, const std::optional<NodeSet>& restrict) {
  NodeSet nodes;
  if (restrict) {
    nodes = *restrict;
    for (NodeId i : nodes)
      if (i >= g.size()) throw std::invalid_argument("is_strongly_connected: node out of range");
  } else {
    for (NodeId i = 0; i < g.size(); ++i) nodes.insert(i);
  }
  if (nodes.empty()) throw std::invalid_argument("is_strongly_connected: empty restriction");

  // Forward and backward reachability from one member inside the restriction.
  auto reach = [&](bool forward) {
    NodeSet seen{*nodes.begin()};
    std::vector<NodeId> frontier{*nodes.begin()};
    while (!frontier.empty()) {
      NodeId v = frontier.back();
      frontier.pop_back();
      for (NodeId w : forward ? g.out_nbrs(v) : g.in_nbrs(v))
        if (nodes.count(w) && seen.insert(w).second) frontier.push_back(w);
    }
    return seen.size() == nodes.size();
  };
  return reach(true) && reach(false);
}

std::size_t count_attack_edges(const DynamicDigraph& g) {
  std::size_t c = 0;
  for (NodeId m : g.malicious())
    for (NodeId j : g.out_nbrs(m))
      if (!g.is_malicious(j)) ++c;
  return c;
}

void write_edge_list(std::ostream& os, const DynamicDigraph& g) {
  os << "# malicious:";
  for (NodeId m : g.malicious()) os << ' ' << m;
  os << '\n';
  for (auto [i, j] : g.edges()) os << i << ' ' << j << '\n';
}

DynamicDigraph read_edge_list(std::istream& is, std::size_t n) {
  DynamicDigraph g(n);
  NodeSet malicious;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string tag = "# malicious:";
      if (line.rfind(tag, 0) == 0) {
        std::istringstream ms(line.substr(tag.size()));
        NodeId m;
        while (ms >> m) malicious.insert(m);
      }
      continue;
    }
    std::istringstream es(line);
    NodeId i, j;
    if (!(es >> i >> j)) throw std::invalid_argument("read_edge_list: malformed line '" + line + "'");
    g.add_edge(i, j);
  }
  g.set_malicious(std::move(malicious));
  return g;
}

}  // namespace rsgp
