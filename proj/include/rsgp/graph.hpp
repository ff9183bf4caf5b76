#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "rsgp/types.hpp"

namespace rsgp {

/// Directed communication graph whose neighborhoods shrink as edges are
/// severed. Holds the regular/malicious partition of the nodes.
///
/// j in in_nbrs(i) iff i in out_nbrs(j). Self-loops are never stored; the
/// protocol's message to self is implicit.
class DynamicDigraph {
 public:
  DynamicDigraph() = default;
  explicit DynamicDigraph(std::size_t n, NodeSet malicious = {});

  std::size_t size() const { return in_.size(); }

  const NodeSet& in_nbrs(NodeId i) const { return in_.at(i); }
  const NodeSet& out_nbrs(NodeId i) const { return out_.at(i); }
  const NodeSet& malicious() const { return malicious_; }
  bool is_malicious(NodeId i) const { return malicious_.count(i) != 0; }
  std::vector<NodeId> regular() const { return complement(malicious_, size()); }

  void set_malicious(NodeSet m);

  /// Adds the directed edge from -> to. Self-loops are ignored.
  void add_edge(NodeId from, NodeId to);
  void add_undirected(NodeId a, NodeId b);
  bool has_edge(NodeId from, NodeId to) const;

  /// Removes every link between i and j in both directions. Idempotent.
  void sever(NodeId i, NodeId j);

  std::size_t edge_count() const;
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  /// Checks the in/out mirror invariant; used by tests after mutation.
  bool mirror_consistent() const;

  friend bool operator==(const DynamicDigraph&, const DynamicDigraph&) = default;

 private:
  void check_node(NodeId i) const;

  std::vector<NodeSet> in_;
  std::vector<NodeSet> out_;
  NodeSet malicious_;
};

/// G(n, p) on unordered pairs; each sampled pair becomes two directed edges.
DynamicDigraph gen_erdos_renyi(std::size_t n, double p, std::mt19937_64& rng);

/// Strongly connected components (Tarjan). Components are listed in order of
/// their smallest member; members are sorted.
std::vector<std::vector<NodeId>> strongly_connected_components(const DynamicDigraph& g);

/// Strong connectivity of the subgraph induced by `restrict` (all nodes when
/// absent). Throws std::invalid_argument for an empty restriction.
bool is_strongly_connected(const DynamicDigraph& g,
                           const std::optional<NodeSet>& restrict = std::nullopt);

/// Remaining directed edges from a malicious node to a regular node.
std::size_t count_attack_edges(const DynamicDigraph& g);

/// Edge-list text: "# malicious: a b c" header, then one "i j" per line.
void write_edge_list(std::ostream& os, const DynamicDigraph& g);
DynamicDigraph read_edge_list(std::istream& is, std::size_t n);

}  // namespace rsgp
