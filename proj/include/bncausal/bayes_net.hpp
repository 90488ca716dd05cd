#ifndef BNCAUSAL_BAYES_NET_HPP_
#define BNCAUSAL_BAYES_NET_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bncausal/dag.hpp"
#include "bncausal/dataset.hpp"

namespace bncausal {

// Full assignment of zero-based levels, one entry per node.
using Assignment = std::vector<Level>;

// Column-major view of categorical data aligned with a node list. Datasets
// are adapted through ps_table / outcome_table below; synthetic samples come
// straight out of BayesNet::sample.
struct ColumnTable {
  std::vector<VariableMeta> meta;
  std::vector<std::vector<Level>> cols;

  std::size_t n() const { return cols.empty() ? 0 : cols.front().size(); }
  int num_nodes() const { return static_cast<int>(cols.size()); }
  Assignment row(std::size_t i) const;
};

// Nodes [T, X1..XL]: the view a propensity model is fitted on.
ColumnTable ps_table(const Dataset& ds);
// Nodes [Y, T, X1..XL]: the view an outcome model is fitted on.
ColumnTable outcome_table(const Dataset& ds);

// Conditional probability table in flat mixed-radix layout:
//   index = parent_config * child_arity + child_level
// where parent_config enumerates the sorted parent list with the
// first-listed (lowest-index) parent most significant. The layout is part of
// the serialized model format.
struct Cpt {
  int node = 0;
  int child_arity = 0;
  std::vector<int> parents;         // sorted node indices
  std::vector<int> parent_arities;  // aligned with `parents`
  std::vector<double> table;
  std::vector<std::int64_t> counts;        // n(child level, parent config)
  std::vector<std::int64_t> parent_counts; // n(parent config)
  std::vector<char> row_observed;          // per parent config

  std::size_t num_parent_configs() const {
    return parent_counts.empty() ? 1 : parent_counts.size();
  }
  std::size_t parent_config_index(const Assignment& a) const;
  bool all_rows_observed() const;
};

struct FitOptions {
  // Laplace add-alpha smoothing. Off by default: with smoothing off, a
  // conditional is the exact empirical proportion and parent configurations
  // never seen in the data stay undefined (queries touching them throw).
  bool smooth = false;
  double alpha = 1.0;
};

struct LogLikelihood {
  double value = 0.0;
  // Set when some row has probability zero; `value` is -infinity then.
  std::optional<std::size_t> zero_row;
  bool finite() const { return !zero_row.has_value(); }
};

// Immutable discrete Bayesian network: DAG plus one CPT per node. All
// evaluation is pure; sampling takes an explicit seed and owns its
// generator, so concurrent use needs no synchronization.
class BayesNet {
 public:
  BayesNet(Dag dag, std::vector<Cpt> cpts);

  // Maximum-likelihood fit: every CPT cell is the empirical conditional
  // proportion n(x_l, x_pa) / n(x_pa); the counts are retained for scoring
  // and serialization.
  static BayesNet fit_mle(const Dag& dag, const ColumnTable& data,
                          const FitOptions& options = {});

  const Dag& dag() const { return dag_; }
  const Cpt& cpt(int v) const { return cpts_[v]; }
  int num_nodes() const { return dag_.num_nodes(); }

  // Factorized joint probability of a full assignment. Throws
  // UnobservedParentConfig when a required CPT row was never observed.
  double joint_prob(const Assignment& config) const;

  // P(target = value | all other nodes as in `evidence`); the target slot of
  // `evidence` is ignored. Throws ZeroEvidenceProbability when the evidence
  // has probability zero under the model.
  double conditional_prob(int target, Level value, Assignment evidence) const;

  // Ancestral sampling of n i.i.d. configurations. Identical (net, n, seed)
  // give identical output. Throws UndefinedCptRow if any reachable CPT row
  // is undefined.
  ColumnTable sample(std::size_t n, std::uint64_t seed) const;

  // Sum over rows of log joint probability. A row hitting an undefined CPT
  // row still throws; an observed-but-zero probability row is reported
  // through the sentinel instead of a silent large negative number.
  LogLikelihood log_likelihood(const ColumnTable& data) const;

  nlohmann::ordered_json to_json() const;
  static BayesNet from_json(const nlohmann::json& j);
  static BayesNet load(const std::string& path);
  void save(const std::string& path) const;

 private:
  Dag dag_;
  std::vector<Cpt> cpts_;
};

// Checks node names and arities of `data` against the dag, in order.
void check_table_matches(const Dag& dag, const ColumnTable& data);

}  // namespace bncausal

#endif  // BNCAUSAL_BAYES_NET_HPP_
