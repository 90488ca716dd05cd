#ifndef BNCAUSAL_DATASET_HPP_
#define BNCAUSAL_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bncausal {

// Zero-based category index. Covariate *codes* in reports are level + 1;
// treatment and outcome use their levels {0,1} directly.
using Level = std::uint8_t;

struct VariableMeta {
  std::string name;
  int arity = 0;
  std::vector<std::string> labels;  // labels[level] names that level

  void check() const;  // arity >= 2, labels distinct, count == arity
};

// Column roles for CSV ingestion. `levels` pins the label-to-level order for
// a column; columns not listed get levels assigned by first appearance.
// Treatment and outcome must either be literal 0/1 or carry a two-label
// `levels` entry (first label -> 0, second -> 1); they are never guessed.
struct Schema {
  std::string treatment;
  std::string outcome;
  std::vector<std::pair<std::string, std::vector<std::string>>> levels;

  static Schema from_json_file(const std::string& path);
  static Schema from_json_text(const std::string& text);
};

// Immutable encoded table of one binary treatment, one binary outcome and
// L categorical covariates. Safe for concurrent reads.
class Dataset {
 public:
  // Columns hold zero-based levels. Throws on length mismatch, out-of-range
  // levels, or a treatment column missing one of its two arms.
  Dataset(VariableMeta treatment_meta, std::vector<Level> treatment,
          VariableMeta outcome_meta, std::vector<Level> outcome,
          std::vector<VariableMeta> covariate_meta,
          std::vector<std::vector<Level>> covariates);

  std::size_t n() const { return treatment_.size(); }
  int num_covariates() const { return static_cast<int>(covariates_.size()); }

  int treatment(std::size_t i) const { return treatment_[i]; }
  int outcome(std::size_t i) const { return outcome_[i]; }
  Level covariate_level(int l, std::size_t i) const { return covariates_[l][i]; }
  int covariate_code(int l, std::size_t i) const { return covariates_[l][i] + 1; }

  const VariableMeta& treatment_meta() const { return treatment_meta_; }
  const VariableMeta& outcome_meta() const { return outcome_meta_; }
  const VariableMeta& covariate_meta(int l) const { return covariate_meta_[l]; }
  const std::vector<VariableMeta>& covariate_metas() const { return covariate_meta_; }

  const std::vector<Level>& treatment_column() const { return treatment_; }
  const std::vector<Level>& outcome_column() const { return outcome_; }
  const std::vector<Level>& covariate_column(int l) const { return covariates_[l]; }

  // Mixed-radix index of row i's covariate configuration, first covariate
  // most significant. Used for stratum grouping.
  std::size_t stratum_index(std::size_t i) const;
  std::size_t num_strata() const;  // product of covariate arities

  // Copy without row `drop`. Throws EmptyArm if the remainder loses an arm.
  Dataset drop_row(std::size_t drop) const;

 private:
  VariableMeta treatment_meta_;
  VariableMeta outcome_meta_;
  std::vector<VariableMeta> covariate_meta_;
  std::vector<Level> treatment_;
  std::vector<Level> outcome_;
  std::vector<std::vector<Level>> covariates_;
};

Dataset load_csv(const std::string& path, const Schema& schema);
Dataset parse_csv_text(const std::string& text, const Schema& schema);

// RFC 4180-style writer; decodes levels back to labels. load_csv of the
// output under the same schema reproduces the code matrix exactly.
void save_csv(const Dataset& ds, std::ostream& out);
std::string to_csv_text(const Dataset& ds);

struct StratumCount {
  std::vector<int> codes;  // covariate codes (1-based), one per covariate
  std::size_t treated = 0;
  std::size_t control = 0;
};

// Per-stratum arm counts over observed covariate configurations, plus the
// list of strata with an empty arm (finite-sample positivity screen).
struct PositivityReport {
  std::vector<StratumCount> strata;        // sorted by configuration index
  std::vector<std::size_t> violations;     // indices into `strata`
  bool ok() const { return violations.empty(); }
};

PositivityReport validate(const Dataset& ds);

}  // namespace bncausal

#endif  // BNCAUSAL_DATASET_HPP_
