#include "bncausal/misspec.hpp"

#include <cmath>

#include "bncausal/errors.hpp"
#include "bncausal/rng.hpp"
#include "bncausal/stats.hpp"
#include "bncausal/threading.hpp"

namespace bncausal {

DiscreteDgp::DiscreteDgp(std::vector<VariableMeta> covariates, std::vector<double> prob,
                         std::vector<double> ps1, std::vector<double> theta0,
                         std::vector<double> theta1)
    : covariates_(std::move(covariates)),
      prob_(std::move(prob)),
      ps1_(std::move(ps1)),
      theta0_(std::move(theta0)),
      theta1_(std::move(theta1)) {
  if (covariates_.empty()) fail(ErrorCode::InvalidArgument, "DGP needs covariates");
  std::size_t configs = 1;
  for (const auto& m : covariates_) {
    m.check();
    configs *= static_cast<std::size_t>(m.arity);
  }
  if (prob_.size() != configs || ps1_.size() != configs || theta0_.size() != configs ||
      theta1_.size() != configs) {
    fail(ErrorCode::InvalidArgument, "DGP tables must cover all " +
                                         std::to_string(configs) + " configurations");
  }
  double total = 0.0;
  for (std::size_t c = 0; c < configs; ++c) {
    if (prob_[c] < 0.0) fail(ErrorCode::InvalidArgument, "negative configuration probability");
    total += prob_[c];
    if (prob_[c] > 0.0 && !(ps1_[c] > 0.0 && ps1_[c] < 1.0)) {
      fail(ErrorCode::InvalidArgument, "true propensity must lie strictly inside (0,1)");
    }
    if (theta0_[c] < 0.0 || theta0_[c] > 1.0 || theta1_[c] < 0.0 || theta1_[c] > 1.0) {
      fail(ErrorCode::InvalidArgument, "outcome probabilities must lie in [0,1]");
    }
  }
  if (std::abs(total - 1.0) > 1e-12) {
    fail(ErrorCode::InvalidArgument, "configuration probabilities must sum to 1");
  }
}

std::vector<Level> DiscreteDgp::config_levels(std::size_t config) const {
  std::vector<Level> levels(covariates_.size());
  for (std::size_t l = covariates_.size(); l-- > 0;) {
    const auto arity = static_cast<std::size_t>(covariates_[l].arity);
    levels[l] = static_cast<Level>(config % arity);
    config /= arity;
  }
  return levels;
}

std::size_t DiscreteDgp::config_index(const std::vector<Level>& levels) const {
  std::size_t idx = 0;
  for (std::size_t l = 0; l < covariates_.size(); ++l) {
    idx = idx * static_cast<std::size_t>(covariates_[l].arity) + levels[l];
  }
  return idx;
}

Dataset DiscreteDgp::sample(std::size_t n, std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<Level> t_col(n);
  std::vector<Level> y_col(n);
  std::vector<std::vector<Level>> x_cols(covariates_.size(), std::vector<Level>(n));
  for (std::size_t i = 0; i < n; ++i) {
    // Draw order per row: configuration, T, Y(0), Y(1).
    const double u = rng.uniform();
    std::size_t config = num_configs() - 1;
    double cum = 0.0;
    for (std::size_t c = 0; c < num_configs(); ++c) {
      cum += prob_[c];
      if (u < cum) {
        config = c;
        break;
      }
    }
    const auto levels = config_levels(config);
    for (std::size_t l = 0; l < covariates_.size(); ++l) x_cols[l][i] = levels[l];
    const bool treated = rng.bernoulli(ps1_[config]);
    const bool y0 = rng.bernoulli(theta0_[config]);
    const bool y1 = rng.bernoulli(theta1_[config]);
    t_col[i] = treated ? 1 : 0;
    y_col[i] = (treated ? y1 : y0) ? 1 : 0;
  }
  VariableMeta t_meta{"T", 2, {"0", "1"}};
  VariableMeta y_meta{"Y", 2, {"0", "1"}};
  return Dataset(t_meta, std::move(t_col), y_meta, std::move(y_col), covariates_,
                 std::move(x_cols));
}

nlohmann::ordered_json DiscreteDgp::to_json() const {
  nlohmann::ordered_json j;
  auto& covs = j["covariates"] = nlohmann::ordered_json::array();
  for (const auto& m : covariates_) {
    covs.push_back({{"name", m.name}, {"arity", m.arity}, {"labels", m.labels}});
  }
  j["prob"] = prob_;
  j["ps1"] = ps1_;
  j["theta0"] = theta0_;
  j["theta1"] = theta1_;
  return j;
}

DiscreteDgp DiscreteDgp::from_json(const nlohmann::json& j) {
  try {
    std::vector<VariableMeta> covs;
    for (const auto& cj : j.at("covariates")) {
      VariableMeta m;
      m.name = cj.at("name").get<std::string>();
      m.arity = cj.at("arity").get<int>();
      m.labels = cj.at("labels").get<std::vector<std::string>>();
      covs.push_back(std::move(m));
    }
    return DiscreteDgp(std::move(covs), j.at("prob").get<std::vector<double>>(),
                       j.at("ps1").get<std::vector<double>>(),
                       j.at("theta0").get<std::vector<double>>(),
                       j.at("theta1").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("DGP JSON: ") + e.what());
  }
}

TrueTheta true_theta(const DiscreteDgp& dgp) {
  TrueTheta t;
  for (std::size_t c = 0; c < dgp.num_configs(); ++c) {
    t.theta0 += dgp.prob(c) * dgp.theta_x(0, c);
    t.theta1 += dgp.prob(c) * dgp.theta_x(1, c);
  }
  t.delta = t.theta1 - t.theta0;
  return t;
}

WorkingPsModel kl_project(const DiscreteDgp& dgp, const Dag& dag_over_tx) {
  const int num_nodes = dag_over_tx.num_nodes();
  if (num_nodes != dgp.num_covariates() + 1) {
    fail(ErrorCode::ArityMismatch, "working structure must have one treatment node plus "
                                   "one node per covariate");
  }
  if (dag_over_tx.node(0).arity != 2) {
    fail(ErrorCode::ArityMismatch, "node 0 of the working structure must be binary");
  }
  for (int l = 0; l < dgp.num_covariates(); ++l) {
    if (dag_over_tx.node(l + 1).arity != dgp.covariates()[l].arity) {
      fail(ErrorCode::ArityMismatch, "covariate arity mismatch at node " + std::to_string(l + 1));
    }
  }

  const std::size_t x_configs = dgp.num_configs();
  // Exact joint over (t, x) and the full assignment per cell.
  std::vector<std::vector<Level>> assignment(2 * x_configs);
  std::vector<double> joint(2 * x_configs);
  for (std::size_t c = 0; c < x_configs; ++c) {
    const auto levels = dgp.config_levels(c);
    for (const int t : {0, 1}) {
      std::vector<Level> a(static_cast<std::size_t>(num_nodes));
      a[0] = static_cast<Level>(t);
      for (int l = 0; l < dgp.num_covariates(); ++l) a[l + 1] = levels[l];
      const std::size_t cell = c * 2 + static_cast<std::size_t>(t);
      assignment[cell] = std::move(a);
      joint[cell] = dgp.prob(c) * (t == 1 ? dgp.ps1(c) : 1.0 - dgp.ps1(c));
    }
  }

  // True conditional of each node given its parent set: the projected CPTs.
  struct LocalTable {
    std::vector<int> parents;
    std::vector<int> strides_arity;
    std::vector<double> cond;  // parent config * arity + value
    int arity = 0;
  };
  std::vector<LocalTable> locals(static_cast<std::size_t>(num_nodes));
  for (int v = 0; v < num_nodes; ++v) {
    LocalTable lt;
    lt.parents = dag_over_tx.parents(v);
    lt.arity = dag_over_tx.node(v).arity;
    std::size_t configs = 1;
    for (const int p : lt.parents) {
      lt.strides_arity.push_back(dag_over_tx.node(p).arity);
      configs *= static_cast<std::size_t>(dag_over_tx.node(p).arity);
    }
    std::vector<double> num(configs * static_cast<std::size_t>(lt.arity), 0.0);
    std::vector<double> den(configs, 0.0);
    for (std::size_t cell = 0; cell < joint.size(); ++cell) {
      const auto& a = assignment[cell];
      std::size_t cfg = 0;
      for (std::size_t j = 0; j < lt.parents.size(); ++j) {
        cfg = cfg * static_cast<std::size_t>(lt.strides_arity[j]) + a[lt.parents[j]];
      }
      num[cfg * static_cast<std::size_t>(lt.arity) + a[v]] += joint[cell];
      den[cfg] += joint[cell];
    }
    lt.cond.assign(num.size(), 0.0);
    for (std::size_t cfg = 0; cfg < configs; ++cfg) {
      if (den[cfg] <= 0.0) continue;  // unreachable parent event
      for (int x = 0; x < lt.arity; ++x) {
        lt.cond[cfg * static_cast<std::size_t>(lt.arity) + x] =
            num[cfg * static_cast<std::size_t>(lt.arity) + x] / den[cfg];
      }
    }
    locals[v] = std::move(lt);
  }

  auto projected_joint = [&](std::size_t cell) {
    const auto& a = assignment[cell];
    double prod = 1.0;
    for (int v = 0; v < num_nodes; ++v) {
      const LocalTable& lt = locals[v];
      std::size_t cfg = 0;
      for (std::size_t j = 0; j < lt.parents.size(); ++j) {
        cfg = cfg * static_cast<std::size_t>(lt.strides_arity[j]) + a[lt.parents[j]];
      }
      prod *= lt.cond[cfg * static_cast<std::size_t>(lt.arity) + a[v]];
    }
    return prod;
  };

  WorkingPsModel wm;
  wm.structure = dag_over_tx;
  wm.ps1_star.assign(x_configs, 0.5);
  for (std::size_t c = 0; c < x_configs; ++c) {
    const double q0 = projected_joint(c * 2);
    const double q1 = projected_joint(c * 2 + 1);
    if (q0 + q1 > 0.0) wm.ps1_star[c] = q1 / (q0 + q1);
  }
  return wm;
}

double asymptotic_bias(const DiscreteDgp& dgp, const WorkingPsModel& wm,
                       Estimator estimator, int arm) {
  if (arm != 0 && arm != 1) fail(ErrorCode::InvalidArgument, "arm must be 0 or 1");
  if (wm.ps1_star.size() != dgp.num_configs()) {
    fail(ErrorCode::InvalidArgument, "working model does not cover the covariate space");
  }
  const TrueTheta truth = true_theta(dgp);
  const double theta_k = arm == 1 ? truth.theta1 : truth.theta0;
  double e_ratio = 0.0;
  double e_ht = 0.0;
  double e_h = 0.0;
  for (std::size_t c = 0; c < dgp.num_configs(); ++c) {
    const double w = dgp.prob(c);
    if (w == 0.0) continue;
    const double pk = arm == 1 ? dgp.ps1(c) : 1.0 - dgp.ps1(c);
    const double pk_star = arm == 1 ? wm.ps1_star[c] : 1.0 - wm.ps1_star[c];
    if (pk_star <= 0.0 || pk_star >= 1.0) {
      fail(ErrorCode::InvalidArgument,
           "working propensity must stay strictly inside (0,1) on the support");
    }
    const double ratio = pk / pk_star;
    e_ratio += w * ratio;
    e_ht += w * dgp.theta_x(arm, c) * (ratio - 1.0);
    e_h += w * (dgp.theta_x(arm, c) - theta_k) * (ratio - 1.0);
  }
  return estimator == Estimator::HorvitzThompson ? e_ht : e_h / e_ratio;
}

double estimate_theta_under_working_model(const Dataset& ds, const DiscreteDgp& dgp,
                                          const WorkingPsModel& wm, Estimator estimator,
                                          int arm) {
  std::vector<double> p1(ds.n());
  if (wm.structure.has_value()) {
    const ColumnTable t = ps_table(ds);
    const BayesNet fit = BayesNet::fit_mle(*wm.structure, t);
    for (std::size_t i = 0; i < ds.n(); ++i) {
      p1[i] = fit.conditional_prob(0, 1, t.row(i));
    }
  } else {
    std::vector<Level> levels(static_cast<std::size_t>(ds.num_covariates()));
    for (std::size_t i = 0; i < ds.n(); ++i) {
      for (int l = 0; l < ds.num_covariates(); ++l) levels[l] = ds.covariate_level(l, i);
      p1[i] = wm.ps1_star[dgp.config_index(levels)];
    }
  }
  const PsVector ps = make_ps_vector(std::move(p1), 0.0);
  const ThetaPair pair =
      estimator == Estimator::Hajek ? theta_hajek(ds, ps) : theta_ht(ds, ps);
  return arm == 1 ? pair.theta1 : pair.theta0;
}

std::vector<ConvergenceRow> empirical_limit_check(const DiscreteDgp& dgp,
                                                  const WorkingPsModel& wm,
                                                  Estimator estimator, int arm,
                                                  const std::vector<std::size_t>& n_grid,
                                                  std::size_t runs, std::uint64_t seed,
                                                  int threads) {
  if (runs == 0) fail(ErrorCode::InvalidArgument, "need at least one run");
  const TrueTheta truth = true_theta(dgp);
  const double theta_k = arm == 1 ? truth.theta1 : truth.theta0;
  const double limit = asymptotic_bias(dgp, wm, estimator, arm);
  std::vector<ConvergenceRow> rows;
  rows.reserve(n_grid.size());
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    const std::size_t n = n_grid[g];
    std::vector<double> biases(runs);
    parallel_for_index(runs, threads, [&](std::size_t r) {
      const std::uint64_t run_seed = derive_run_seed(seed, g * runs + r);
      const Dataset ds = dgp.sample(n, run_seed);
      biases[r] = estimate_theta_under_working_model(ds, dgp, wm, estimator, arm) - theta_k;
    });
    ConvergenceRow row;
    row.n = n;
    row.mc_mean_bias = mean(biases);
    row.limit = limit;
    row.distance = std::abs(row.mc_mean_bias - limit);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bncausal
