#ifndef BNCAUSAL_DAG_HPP_
#define BNCAUSAL_DAG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bncausal/dataset.hpp"

namespace bncausal {

// Directed graph over a fixed node list, stored as sorted parent sets.
// Mutators keep parent lists sorted and duplicate-free but do not enforce
// acyclicity; call topological_order() / is_acyclic() where that matters.
class Dag {
 public:
  explicit Dag(std::vector<VariableMeta> nodes);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const VariableMeta& node(int v) const { return nodes_[v]; }
  const std::vector<VariableMeta>& nodes() const { return nodes_; }

  const std::vector<int>& parents(int v) const { return parents_[v]; }
  void set_parents(int v, std::vector<int> parent_set);
  void add_arc(int from, int to);
  void remove_arc(int from, int to);
  bool has_arc(int from, int to) const;

  std::size_t num_arcs() const;
  // All arcs in lexicographic (from, to) order; also the canonical form.
  std::vector<std::pair<int, int>> arcs() const;

  // Kahn's algorithm; nullopt when a cycle exists. Ties are resolved by
  // smallest node index so the order is deterministic.
  std::optional<std::vector<int>> topological_order() const;

  // True if `to` is reachable from `from` along directed arcs.
  bool reachable(int from, int to) const;

  // FNV-1a over the canonical arc list; used by the tabu list.
  std::uint64_t structure_hash() const;

  bool operator==(const Dag& other) const { return parents_ == other.parents_; }

 private:
  void check_node(int v) const;

  std::vector<VariableMeta> nodes_;
  std::vector<std::vector<int>> parents_;
};

bool is_acyclic(const Dag& dag);

// Graphviz rendering with one node per variable.
std::string to_dot(const Dag& dag);

}  // namespace bncausal

#endif  // BNCAUSAL_DAG_HPP_
