#include "bncausal/score.hpp"

#include <cmath>
#include <string>

#include "bncausal/errors.hpp"

namespace bncausal {

const char* score_kind_name(ScoreKind kind) {
  return kind == ScoreKind::Aic ? "aic" : "bic";
}

ScoreKind parse_score_kind(const std::string& text) {
  if (text == "aic" || text == "AIC") return ScoreKind::Aic;
  if (text == "bic" || text == "BIC") return ScoreKind::Bic;
  fail(ErrorCode::InvalidArgument, "unknown score '" + text + "' (expected aic or bic)");
}

ScoreCache::ScoreCache(const ColumnTable& data, ScoreKind kind)
    : data_(&data), kind_(kind), log_n_(std::log(static_cast<double>(data.n()))) {
  if (data.n() == 0) fail(ErrorCode::EmptyFile, "cannot score an empty table");
}

double ScoreCache::local(int node, const std::vector<int>& parents) {
  const auto key = std::make_pair(node, parents);
  const auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const double value = compute_local(node, parents);
  cache_.emplace(key, value);
  return value;
}

double ScoreCache::compute_local(int node, const std::vector<int>& parents) const {
  const ColumnTable& d = *data_;
  const int r = d.meta[node].arity;
  std::size_t configs = 1;
  for (const int p : parents) configs *= static_cast<std::size_t>(d.meta[p].arity);
  const std::size_t cells = configs * static_cast<std::size_t>(r);

  std::vector<std::int64_t> counts(cells, 0);
  std::vector<std::int64_t> parent_counts(configs, 0);
  const std::vector<Level>& child = d.cols[node];
  const std::size_t n = d.n();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cfg = 0;
    for (const int p : parents) {
      cfg = cfg * static_cast<std::size_t>(d.meta[p].arity) + d.cols[p][i];
    }
    ++counts[cfg * static_cast<std::size_t>(r) + child[i]];
    ++parent_counts[cfg];
  }

  double ll = 0.0;
  for (std::size_t cfg = 0; cfg < configs; ++cfg) {
    const std::int64_t n_pa = parent_counts[cfg];
    if (n_pa == 0) continue;
    const double log_n_pa = std::log(static_cast<double>(n_pa));
    for (int x = 0; x < r; ++x) {
      const std::int64_t n_cell = counts[cfg * static_cast<std::size_t>(r) + x];
      if (n_cell == 0) continue;
      ll += static_cast<double>(n_cell) *
            (std::log(static_cast<double>(n_cell)) - log_n_pa);
    }
  }

  const double k = static_cast<double>(r - 1) * static_cast<double>(configs);
  return kind_ == ScoreKind::Aic ? ll - k : ll - 0.5 * k * log_n_;
}

double ScoreCache::total(const Dag& dag) {
  if (dag.num_nodes() != data_->num_nodes()) {
    fail(ErrorCode::ArityMismatch, "graph and data table disagree on node count");
  }
  double s = 0.0;
  for (int v = 0; v < dag.num_nodes(); ++v) s += local(v, dag.parents(v));
  return s;
}

double score(const Dag& dag, const ColumnTable& data, ScoreKind kind) {
  check_table_matches(dag, data);
  ScoreCache cache(data, kind);
  return cache.total(dag);
}

}  // namespace bncausal
