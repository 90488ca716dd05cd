#include "bncausal/dag.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include "bncausal/errors.hpp"

namespace bncausal {

Dag::Dag(std::vector<VariableMeta> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) fail(ErrorCode::InvalidArgument, "graph needs at least one node");
  for (const auto& m : nodes_) m.check();
  parents_.resize(nodes_.size());
}

void Dag::check_node(int v) const {
  if (v < 0 || v >= num_nodes()) {
    fail(ErrorCode::InvalidArgument, "node index " + std::to_string(v) + " out of range");
  }
}

void Dag::set_parents(int v, std::vector<int> parent_set) {
  check_node(v);
  std::sort(parent_set.begin(), parent_set.end());
  parent_set.erase(std::unique(parent_set.begin(), parent_set.end()), parent_set.end());
  for (const int p : parent_set) {
    check_node(p);
    if (p == v) fail(ErrorCode::InvalidArgument, "node cannot be its own parent");
  }
  parents_[v] = std::move(parent_set);
}

void Dag::add_arc(int from, int to) {
  check_node(from);
  check_node(to);
  if (from == to) fail(ErrorCode::InvalidArgument, "self-arc rejected");
  auto& ps = parents_[to];
  const auto it = std::lower_bound(ps.begin(), ps.end(), from);
  if (it != ps.end() && *it == from) return;
  ps.insert(it, from);
}

void Dag::remove_arc(int from, int to) {
  check_node(from);
  check_node(to);
  auto& ps = parents_[to];
  const auto it = std::lower_bound(ps.begin(), ps.end(), from);
  if (it != ps.end() && *it == from) ps.erase(it);
}

bool Dag::has_arc(int from, int to) const {
  check_node(from);
  check_node(to);
  const auto& ps = parents_[to];
  return std::binary_search(ps.begin(), ps.end(), from);
}

std::size_t Dag::num_arcs() const {
  std::size_t total = 0;
  for (const auto& ps : parents_) total += ps.size();
  return total;
}

std::vector<std::pair<int, int>> Dag::arcs() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(num_arcs());
  for (int v = 0; v < num_nodes(); ++v) {
    for (const int p : parents_[v]) out.emplace_back(p, v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::vector<int>> Dag::topological_order() const {
  const int m = num_nodes();
  std::vector<int> indegree(m, 0);
  std::vector<std::vector<int>> children(m);
  for (int v = 0; v < m; ++v) {
    indegree[v] = static_cast<int>(parents_[v].size());
    for (const int p : parents_[v]) children[p].push_back(v);
  }
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (int v = 0; v < m; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<int> order;
  order.reserve(m);
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (const int c : children[v]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (static_cast<int>(order.size()) != m) return std::nullopt;
  return order;
}

bool Dag::reachable(int from, int to) const {
  check_node(from);
  check_node(to);
  if (from == to) return true;
  const int m = num_nodes();
  std::vector<std::vector<int>> children(m);
  for (int v = 0; v < m; ++v) {
    for (const int p : parents_[v]) children[p].push_back(v);
  }
  std::vector<char> seen(m, 0);
  std::vector<int> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const int c : children[v]) {
      if (c == to) return true;
      if (!seen[c]) {
        seen[c] = 1;
        stack.push_back(c);
      }
    }
  }
  return false;
}

std::uint64_t Dag::structure_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t x) {
    h ^= x;
    h *= 1099511628211ULL;
  };
  for (const auto& [from, to] : arcs()) {
    mix(static_cast<std::uint64_t>(from) + 1);
    mix(static_cast<std::uint64_t>(to) + 1);
  }
  return h;
}

bool is_acyclic(const Dag& dag) { return dag.topological_order().has_value(); }

std::string to_dot(const Dag& dag) {
  std::ostringstream out;
  out << "digraph bn {\n";
  for (int v = 0; v < dag.num_nodes(); ++v) {
    out << "  \"" << dag.node(v).name << "\";\n";
  }
  for (const auto& [from, to] : dag.arcs()) {
    out << "  \"" << dag.node(from).name << "\" -> \"" << dag.node(to).name << "\";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace bncausal
