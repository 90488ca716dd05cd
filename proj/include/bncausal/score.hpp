#ifndef BNCAUSAL_SCORE_HPP_
#define BNCAUSAL_SCORE_HPP_

#include <map>
#include <utility>
#include <vector>

#include "bncausal/bayes_net.hpp"
#include "bncausal/dag.hpp"

namespace bncausal {

enum class ScoreKind { Aic, Bic };

const char* score_kind_name(ScoreKind kind);
ScoreKind parse_score_kind(const std::string& text);

// Decomposable penalized log-likelihood, higher is better:
//   AIC = logL - K,  BIC = logL - (K/2) * log n,
// with K the free-parameter count sum_l (r_l - 1) * prod_{j in pa(l)} r_j.
// The log-likelihood of a node given a parent set is evaluated at the MLE
// from counts alone; parent configurations never observed contribute zero
// to logL but their cells still count toward K.
class ScoreCache {
 public:
  ScoreCache(const ColumnTable& data, ScoreKind kind);

  // Local contribution of one (node, sorted parent set). Cached.
  double local(int node, const std::vector<int>& parents);

  double total(const Dag& dag);

  ScoreKind kind() const { return kind_; }
  const ColumnTable& data() const { return *data_; }

 private:
  double compute_local(int node, const std::vector<int>& parents) const;

  const ColumnTable* data_;
  ScoreKind kind_;
  double log_n_;
  std::map<std::pair<int, std::vector<int>>, double> cache_;
};

// One-shot scoring of a full graph against a data table.
double score(const Dag& dag, const ColumnTable& data, ScoreKind kind);

}  // namespace bncausal

#endif  // BNCAUSAL_SCORE_HPP_
