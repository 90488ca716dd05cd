#include "bncausal/bayes_net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "bncausal/errors.hpp"
#include "bncausal/rng.hpp"
#include "bncausal/version.hpp"

namespace bncausal {

Assignment ColumnTable::row(std::size_t i) const {
  Assignment a(cols.size());
  for (std::size_t v = 0; v < cols.size(); ++v) a[v] = cols[v][i];
  return a;
}

ColumnTable ps_table(const Dataset& ds) {
  ColumnTable t;
  t.meta.push_back(ds.treatment_meta());
  t.cols.push_back(ds.treatment_column());
  for (int l = 0; l < ds.num_covariates(); ++l) {
    t.meta.push_back(ds.covariate_meta(l));
    t.cols.push_back(ds.covariate_column(l));
  }
  return t;
}

ColumnTable outcome_table(const Dataset& ds) {
  ColumnTable t;
  t.meta.push_back(ds.outcome_meta());
  t.cols.push_back(ds.outcome_column());
  t.meta.push_back(ds.treatment_meta());
  t.cols.push_back(ds.treatment_column());
  for (int l = 0; l < ds.num_covariates(); ++l) {
    t.meta.push_back(ds.covariate_meta(l));
    t.cols.push_back(ds.covariate_column(l));
  }
  return t;
}

std::size_t Cpt::parent_config_index(const Assignment& a) const {
  std::size_t idx = 0;
  for (std::size_t j = 0; j < parents.size(); ++j) {
    idx = idx * static_cast<std::size_t>(parent_arities[j]) + a[parents[j]];
  }
  return idx;
}

bool Cpt::all_rows_observed() const {
  return std::all_of(row_observed.begin(), row_observed.end(),
                     [](char c) { return c != 0; });
}

void check_table_matches(const Dag& dag, const ColumnTable& data) {
  if (data.num_nodes() != dag.num_nodes()) {
    fail(ErrorCode::ArityMismatch, "data has " + std::to_string(data.num_nodes()) +
                                       " columns, graph has " +
                                       std::to_string(dag.num_nodes()) + " nodes");
  }
  for (int v = 0; v < dag.num_nodes(); ++v) {
    if (data.meta[v].arity != dag.node(v).arity) {
      fail(ErrorCode::ArityMismatch, "arity mismatch at node '" + dag.node(v).name + "'");
    }
    if (data.cols[v].size() != data.n()) {
      fail(ErrorCode::RaggedRow, "column length mismatch in data table");
    }
    for (const Level x : data.cols[v]) {
      if (x >= data.meta[v].arity) {
        fail(ErrorCode::ArityMismatch, "level out of range in column '" + data.meta[v].name + "'");
      }
    }
  }
}

BayesNet::BayesNet(Dag dag, std::vector<Cpt> cpts)
    : dag_(std::move(dag)), cpts_(std::move(cpts)) {
  if (static_cast<int>(cpts_.size()) != dag_.num_nodes()) {
    fail(ErrorCode::InvalidArgument, "one CPT per node required");
  }
  if (!is_acyclic(dag_)) fail(ErrorCode::InvalidArgument, "graph has a cycle");
  for (int v = 0; v < dag_.num_nodes(); ++v) {
    const Cpt& c = cpts_[v];
    if (c.node != v || c.child_arity != dag_.node(v).arity || c.parents != dag_.parents(v)) {
      fail(ErrorCode::InvalidArgument, "CPT " + std::to_string(v) + " inconsistent with graph");
    }
    std::size_t expected = static_cast<std::size_t>(c.child_arity);
    for (const int a : c.parent_arities) expected *= static_cast<std::size_t>(a);
    if (c.table.size() != expected) {
      fail(ErrorCode::InvalidArgument, "CPT " + std::to_string(v) + " has wrong table size");
    }
    for (std::size_t cfg = 0; cfg < c.num_parent_configs(); ++cfg) {
      if (!c.row_observed[cfg]) continue;
      double sum = 0.0;
      for (int x = 0; x < c.child_arity; ++x) {
        const double p = c.table[cfg * c.child_arity + x];
        if (p < 0.0 || p > 1.0) {
          fail(ErrorCode::InvalidArgument, "CPT probability outside [0,1]");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        fail(ErrorCode::InvalidArgument, "CPT row does not sum to 1");
      }
    }
  }
}

BayesNet BayesNet::fit_mle(const Dag& dag, const ColumnTable& data,
                           const FitOptions& options) {
  check_table_matches(dag, data);
  const std::size_t n = data.n();
  std::vector<Cpt> cpts;
  cpts.reserve(static_cast<std::size_t>(dag.num_nodes()));
  for (int v = 0; v < dag.num_nodes(); ++v) {
    Cpt c;
    c.node = v;
    c.child_arity = dag.node(v).arity;
    c.parents = dag.parents(v);
    c.parent_arities.reserve(c.parents.size());
    std::size_t configs = 1;
    for (const int p : c.parents) {
      c.parent_arities.push_back(dag.node(p).arity);
      configs *= static_cast<std::size_t>(dag.node(p).arity);
    }
    const std::size_t cells = configs * static_cast<std::size_t>(c.child_arity);
    c.counts.assign(cells, 0);
    c.parent_counts.assign(configs, 0);
    c.table.assign(cells, 0.0);
    c.row_observed.assign(configs, 0);

    const std::vector<Level>& child = data.cols[v];
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t cfg = 0;
      for (std::size_t j = 0; j < c.parents.size(); ++j) {
        cfg = cfg * static_cast<std::size_t>(c.parent_arities[j]) +
              data.cols[c.parents[j]][i];
      }
      ++c.counts[cfg * static_cast<std::size_t>(c.child_arity) + child[i]];
      ++c.parent_counts[cfg];
    }
    for (std::size_t cfg = 0; cfg < configs; ++cfg) {
      const std::int64_t n_pa = c.parent_counts[cfg];
      if (options.smooth) {
        const double denom =
            static_cast<double>(n_pa) + options.alpha * c.child_arity;
        for (int x = 0; x < c.child_arity; ++x) {
          const std::size_t cell = cfg * static_cast<std::size_t>(c.child_arity) + x;
          c.table[cell] = (static_cast<double>(c.counts[cell]) + options.alpha) / denom;
        }
        c.row_observed[cfg] = 1;
      } else if (n_pa > 0) {
        for (int x = 0; x < c.child_arity; ++x) {
          const std::size_t cell = cfg * static_cast<std::size_t>(c.child_arity) + x;
          c.table[cell] = static_cast<double>(c.counts[cell]) / static_cast<double>(n_pa);
        }
        c.row_observed[cfg] = 1;
      }
      // n_pa == 0 without smoothing: the conditional is undefined and the
      // row stays flagged unobserved.
    }
    cpts.push_back(std::move(c));
  }
  return BayesNet(Dag(dag), std::move(cpts));
}

double BayesNet::joint_prob(const Assignment& config) const {
  if (static_cast<int>(config.size()) != num_nodes()) {
    fail(ErrorCode::InvalidArgument, "assignment must cover every node");
  }
  for (int v = 0; v < num_nodes(); ++v) {
    if (config[v] >= dag_.node(v).arity) {
      fail(ErrorCode::ArityMismatch, "assignment level out of range at node '" +
                                         dag_.node(v).name + "'");
    }
  }
  // Every touched CPT row must be defined before any factor is taken, so a
  // zero factor cannot mask an undefined conditional later in the product.
  double prod = 1.0;
  for (const Cpt& c : cpts_) {
    const std::size_t cfg = c.parent_config_index(config);
    if (!c.row_observed[cfg]) {
      fail(ErrorCode::UnobservedParentConfig,
           "node '" + dag_.node(c.node).name + "' has no fitted row for this parent configuration");
    }
  }
  for (const Cpt& c : cpts_) {
    const std::size_t cfg = c.parent_config_index(config);
    prod *= c.table[cfg * static_cast<std::size_t>(c.child_arity) + config[c.node]];
  }
  return prod;
}

double BayesNet::conditional_prob(int target, Level value, Assignment evidence) const {
  if (target < 0 || target >= num_nodes()) {
    fail(ErrorCode::InvalidArgument, "target node out of range");
  }
  const int arity = dag_.node(target).arity;
  if (value >= arity) fail(ErrorCode::ArityMismatch, "target value out of range");
  double numer = 0.0;
  double denom = 0.0;
  for (int v = 0; v < arity; ++v) {
    evidence[target] = static_cast<Level>(v);
    const double p = joint_prob(evidence);
    denom += p;
    if (v == value) numer = p;
  }
  if (denom <= 0.0) {
    fail(ErrorCode::ZeroEvidenceProbability,
         "evidence configuration has probability zero under the model");
  }
  return numer / denom;
}

ColumnTable BayesNet::sample(std::size_t n, std::uint64_t seed) const {
  for (const Cpt& c : cpts_) {
    if (!c.all_rows_observed()) {
      fail(ErrorCode::UndefinedCptRow,
           "cannot sample: node '" + dag_.node(c.node).name + "' has undefined CPT rows");
    }
  }
  const auto order = dag_.topological_order();
  ColumnTable out;
  out.meta = dag_.nodes();
  out.cols.assign(static_cast<std::size_t>(num_nodes()), std::vector<Level>(n));
  Rng rng(seed);
  Assignment a(static_cast<std::size_t>(num_nodes()), 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const int v : *order) {
      const Cpt& c = cpts_[v];
      const std::size_t cfg = c.parent_config_index(a);
      const int x = rng.categorical(c.table.data() + cfg * static_cast<std::size_t>(c.child_arity),
                                    c.child_arity);
      a[v] = static_cast<Level>(x);
      out.cols[v][i] = a[v];
    }
  }
  return out;
}

LogLikelihood BayesNet::log_likelihood(const ColumnTable& data) const {
  check_table_matches(dag_, data);
  LogLikelihood ll;
  double total = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double p = joint_prob(data.row(i));
    if (p == 0.0) {
      ll.value = -std::numeric_limits<double>::infinity();
      ll.zero_row = i;
      return ll;
    }
    total += std::log(p);
  }
  ll.value = total;
  return ll;
}

nlohmann::ordered_json BayesNet::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = kModelFormatVersion;
  auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
  for (int v = 0; v < num_nodes(); ++v) {
    nlohmann::ordered_json nj;
    nj["name"] = dag_.node(v).name;
    nj["arity"] = dag_.node(v).arity;
    nj["labels"] = dag_.node(v).labels;
    nodes.push_back(std::move(nj));
  }
  auto& parents = j["parents"] = nlohmann::ordered_json::array();
  for (int v = 0; v < num_nodes(); ++v) parents.push_back(dag_.parents(v));
  auto& cpts = j["cpts"] = nlohmann::ordered_json::array();
  for (int v = 0; v < num_nodes(); ++v) {
    const Cpt& c = cpts_[v];
    nlohmann::ordered_json cj;
    cj["table"] = c.table;
    cj["counts"] = c.counts;
    std::vector<std::size_t> unobserved;
    for (std::size_t cfg = 0; cfg < c.num_parent_configs(); ++cfg) {
      if (!c.row_observed[cfg]) unobserved.push_back(cfg);
    }
    cj["unobserved_rows"] = unobserved;
    cpts.push_back(std::move(cj));
  }
  return j;
}

BayesNet BayesNet::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormatVersion) {
      fail(ErrorCode::ParseError, "unsupported model format '" +
                                      j.at("format").get<std::string>() + "'");
    }
    std::vector<VariableMeta> nodes;
    for (const auto& nj : j.at("nodes")) {
      VariableMeta m;
      m.name = nj.at("name").get<std::string>();
      m.arity = nj.at("arity").get<int>();
      m.labels = nj.at("labels").get<std::vector<std::string>>();
      nodes.push_back(std::move(m));
    }
    Dag dag(nodes);
    const auto& parents = j.at("parents");
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      dag.set_parents(static_cast<int>(v), parents.at(v).get<std::vector<int>>());
    }
    std::vector<Cpt> cpts;
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      Cpt c;
      c.node = static_cast<int>(v);
      c.child_arity = nodes[v].arity;
      c.parents = dag.parents(static_cast<int>(v));
      std::size_t configs = 1;
      for (const int p : c.parents) {
        c.parent_arities.push_back(nodes[p].arity);
        configs *= static_cast<std::size_t>(nodes[p].arity);
      }
      const auto& cj = j.at("cpts").at(v);
      c.table = cj.at("table").get<std::vector<double>>();
      c.counts = cj.at("counts").get<std::vector<std::int64_t>>();
      c.parent_counts.assign(configs, 0);
      for (std::size_t cfg = 0; cfg < configs; ++cfg) {
        std::int64_t s = 0;
        for (int x = 0; x < c.child_arity; ++x) {
          s += c.counts[cfg * static_cast<std::size_t>(c.child_arity) + x];
        }
        c.parent_counts[cfg] = s;
      }
      c.row_observed.assign(configs, 1);
      for (const auto& cfg : cj.at("unobserved_rows")) {
        c.row_observed[cfg.get<std::size_t>()] = 0;
      }
      cpts.push_back(std::move(c));
    }
    return BayesNet(std::move(dag), std::move(cpts));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("model JSON: ") + e.what());
  }
}

BayesNet BayesNet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open model file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("model JSON: ") + e.what());
  }
  return from_json(j);
}

void BayesNet::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, "cannot write model file " + path);
  out << to_json().dump(2) << '\n';
}

}  // namespace bncausal
