#ifndef BNCAUSAL_TABU_HPP_
#define BNCAUSAL_TABU_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "bncausal/score.hpp"

namespace bncausal {

struct TabuConfig {
  int tabu_len = 10;
  int max_iter = 0;  // 0 -> 100 * node count
  std::uint64_t seed = 0;
  std::vector<std::pair<int, int>> required_arcs;
  std::vector<std::pair<int, int>> forbidden_arcs;
};

// Greedy ascent over single-arc moves (add, delete, reverse) with a tabu
// list of recently visited structures. Fully deterministic for fixed inputs:
// moves are enumerated in a fixed lexicographic order and score ties are
// broken toward the sparser graph, then the lexicographically smallest arc
// list. When no improving non-tabu move exists the best non-tabu move is
// taken anyway; the search stops after max_iter iterations or tabu_len
// consecutive iterations without a new best, and returns the best structure
// seen.
Dag tabu_search(const ColumnTable& data, ScoreKind kind, const TabuConfig& cfg = {});

}  // namespace bncausal

#endif  // BNCAUSAL_TABU_HPP_
