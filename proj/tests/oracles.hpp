// Test-only reference implementations, kept deliberately naive and separate
// from the library code paths they check.

#ifndef BNCAUSAL_TESTS_ORACLES_HPP_
#define BNCAUSAL_TESTS_ORACLES_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bncausal/bayes_net.hpp"
#include "bncausal/dag.hpp"
#include "bncausal/dataset.hpp"
#include "bncausal/rng.hpp"
#include "bncausal/score.hpp"

namespace oracles {

// Every acyclic directed graph over the given nodes, by filtering all arc
// subsets. Only feasible for <= 4 nodes (4096 candidate graphs).
std::vector<bncausal::Dag> enumerate_all_dags(const std::vector<bncausal::VariableMeta>& nodes);

// Row-by-row penalized log-likelihood: conditionals are recounted from
// scratch with map lookups, no shared indexing with the library scorer.
double brute_force_score(const bncausal::Dag& dag, const bncausal::ColumnTable& data,
                         bncausal::ScoreKind kind);

// Best score over all DAGs per enumerate_all_dags.
double exhaustive_best_score(const bncausal::ColumnTable& data, bncausal::ScoreKind kind);

// The six-row worked dataset used throughout the estimator tests:
// (Y,T,X) rows (1,1,1),(0,1,1),(1,0,1),(1,1,2),(0,0,2),(0,0,2).
bncausal::Dataset worked_dataset();

// Random dataset with binary T/Y and `num_cov` binary covariates where every
// observed stratum keeps both treatment arms (resampled until that holds).
bncausal::Dataset random_positive_dataset(bncausal::Rng& rng, std::size_t n, int num_cov);

// Random column table for structure-learning tests: rows sampled from a
// random network over the given arities.
bncausal::ColumnTable random_table(bncausal::Rng& rng, const std::vector<int>& arities,
                                   std::size_t n);

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

// Runs a shell command, capturing stdout; stderr passes through.
CommandResult run_command(const std::string& command);

}  // namespace oracles

#endif  // BNCAUSAL_TESTS_ORACLES_HPP_
