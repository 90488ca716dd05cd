#include "bncausal/sim.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "bncausal/errors.hpp"
#include "bncausal/rng.hpp"
#include "bncausal/stats.hpp"
#include "bncausal/threading.hpp"

namespace bncausal {

const char* ps_method_name(PsMethod m) {
  switch (m) {
    case PsMethod::BnAic: return "bn-aic";
    case PsMethod::BnBic: return "bn-bic";
    case PsMethod::Saturated: return "saturated";
    case PsMethod::TruePs: return "true-ps";
  }
  return "?";
}

PsMethod parse_ps_method(const std::string& text) {
  if (text == "bn-aic") return PsMethod::BnAic;
  if (text == "bn-bic") return PsMethod::BnBic;
  if (text == "saturated") return PsMethod::Saturated;
  if (text == "true-ps") return PsMethod::TruePs;
  fail(ErrorCode::InvalidArgument, "unknown ps method '" + text + "'");
}

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::size_t indicator_count(const BayesNet& bn) {
  std::size_t count = 0;
  for (int v = 1; v < bn.num_nodes(); ++v) {
    count += static_cast<std::size_t>(bn.dag().node(v).arity - 1);
  }
  return count;
}

// Linear predictor for arm k at covariate levels x (node order, zero-based).
double linear_predictor(const SimConfig& cfg, const std::vector<Level>& x, int arm) {
  double eta = cfg.alpha0 + (arm == 1 ? cfg.alpha1 : 0.0);
  std::size_t offset = 0;
  for (int l = 1; l < cfg.dgp_bn.num_nodes(); ++l) {
    const int arity = cfg.dgp_bn.dag().node(l).arity;
    const Level level = x[static_cast<std::size_t>(l - 1)];
    if (level >= 1) eta += cfg.beta[offset + level - 1];
    offset += static_cast<std::size_t>(arity - 1);
  }
  return eta;
}

}  // namespace

void SimConfig::check() const {
  if (dgp_bn.num_nodes() < 2) {
    fail(ErrorCode::InvalidArgument, "dgp_bn needs a treatment node and covariates");
  }
  if (dgp_bn.dag().node(0).arity != 2) {
    fail(ErrorCode::InvalidArgument, "node 0 of dgp_bn must be the binary treatment");
  }
  if (beta.size() != indicator_count(dgp_bn)) {
    fail(ErrorCode::InvalidArgument,
         "beta must have one coefficient per non-baseline covariate level (" +
             std::to_string(indicator_count(dgp_bn)) + ")");
  }
  if (runs < 1) fail(ErrorCode::InvalidArgument, "runs must be >= 1");
  if (n < 50) fail(ErrorCode::InvalidArgument, "n must be >= 50");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha in (0,1)");
  if (delta_clip < 0.0 || delta_clip >= 0.5) {
    fail(ErrorCode::InvalidArgument, "delta_clip in [0, 0.5)");
  }
}

nlohmann::ordered_json SimConfig::to_json() const {
  nlohmann::ordered_json j;
  j["dgp_bn"] = dgp_bn.to_json();
  j["alpha0"] = alpha0;
  j["alpha1"] = alpha1;
  j["beta"] = beta;
  j["n"] = n;
  j["runs"] = runs;
  j["master_seed"] = master_seed;
  j["ps_method"] = ps_method_name(ps_method);
  j["estimator"] = estimator == Estimator::Hajek ? "h" : "ht";
  j["alpha"] = alpha;
  j["delta_clip"] = delta_clip;
  return j;
}

SimConfig SimConfig::from_json(const nlohmann::json& j) {
  try {
    SimConfig cfg{BayesNet::from_json(j.at("dgp_bn"))};
    cfg.alpha0 = j.at("alpha0").get<double>();
    cfg.alpha1 = j.at("alpha1").get<double>();
    cfg.beta = j.at("beta").get<std::vector<double>>();
    cfg.n = j.at("n").get<std::size_t>();
    cfg.runs = j.at("runs").get<std::size_t>();
    cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    cfg.ps_method = parse_ps_method(j.at("ps_method").get<std::string>());
    cfg.estimator = parse_estimator(j.at("estimator").get<std::string>());
    cfg.alpha = j.at("alpha").get<double>();
    cfg.delta_clip = j.value("delta_clip", 0.01);
    cfg.check();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("simulation config JSON: ") + e.what());
  }
}

SimConfig SimConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("simulation config JSON: ") + e.what());
  }
  return from_json(j);
}

DiscreteDgp dgp_from_config(const SimConfig& cfg) {
  cfg.check();
  const BayesNet& bn = cfg.dgp_bn;
  const int num_cov = bn.num_nodes() - 1;
  std::vector<VariableMeta> cov_meta;
  cov_meta.reserve(static_cast<std::size_t>(num_cov));
  std::size_t configs = 1;
  for (int l = 1; l < bn.num_nodes(); ++l) {
    cov_meta.push_back(bn.dag().node(l));
    configs *= static_cast<std::size_t>(bn.dag().node(l).arity);
  }

  std::vector<double> prob(configs, 0.0);
  std::vector<double> ps1(configs, 0.5);
  std::vector<double> theta0(configs, 0.0);
  std::vector<double> theta1(configs, 0.0);

  std::vector<Level> levels(static_cast<std::size_t>(num_cov), 0);
  Assignment a(static_cast<std::size_t>(bn.num_nodes()), 0);
  for (std::size_t c = 0; c < configs; ++c) {
    std::size_t rem = c;
    for (int l = num_cov; l-- > 0;) {
      const auto arity = static_cast<std::size_t>(cov_meta[l].arity);
      levels[l] = static_cast<Level>(rem % arity);
      rem /= arity;
    }
    for (int l = 0; l < num_cov; ++l) a[l + 1] = levels[l];
    a[0] = 0;
    const double j0 = bn.joint_prob(a);
    a[0] = 1;
    const double j1 = bn.joint_prob(a);
    prob[c] = j0 + j1;
    if (prob[c] > 0.0) ps1[c] = j1 / prob[c];
    theta0[c] = logistic(linear_predictor(cfg, levels, 0));
    theta1[c] = logistic(linear_predictor(cfg, levels, 1));
  }
  // The network's joint sums to 1 up to accumulated rounding; renormalize so
  // the exact-table invariant holds.
  double total = 0.0;
  for (const double p : prob) total += p;
  for (double& p : prob) p /= total;
  return DiscreteDgp(std::move(cov_meta), std::move(prob), std::move(ps1),
                     std::move(theta0), std::move(theta1));
}

Dataset generate_run(const SimConfig& cfg, std::size_t run_index) {
  cfg.check();
  const std::uint64_t run_seed = derive_run_seed(cfg.master_seed, run_index);
  const std::uint64_t seed_x = derive_run_seed(run_seed, 0);
  const std::uint64_t seed_y = derive_run_seed(run_seed, 1);

  const ColumnTable tx = cfg.dgp_bn.sample(cfg.n, seed_x);
  Rng y_rng(seed_y);
  const int num_cov = cfg.dgp_bn.num_nodes() - 1;
  std::vector<Level> y_col(cfg.n);
  std::vector<Level> x(static_cast<std::size_t>(num_cov));
  for (std::size_t i = 0; i < cfg.n; ++i) {
    for (int l = 0; l < num_cov; ++l) x[l] = tx.cols[l + 1][i];
    const bool y0 = y_rng.bernoulli(logistic(linear_predictor(cfg, x, 0)));
    const bool y1 = y_rng.bernoulli(logistic(linear_predictor(cfg, x, 1)));
    y_col[i] = (tx.cols[0][i] == 1 ? y1 : y0) ? 1 : 0;
  }

  std::vector<std::vector<Level>> cov_cols;
  cov_cols.reserve(static_cast<std::size_t>(num_cov));
  std::vector<VariableMeta> cov_meta;
  for (int l = 1; l < cfg.dgp_bn.num_nodes(); ++l) {
    cov_cols.push_back(tx.cols[l]);
    cov_meta.push_back(tx.meta[l]);
  }
  VariableMeta y_meta{"Y", 2, {"0", "1"}};
  return Dataset(tx.meta[0], tx.cols[0], y_meta, std::move(y_col), std::move(cov_meta),
                 std::move(cov_cols));
}

namespace {

RunRecord execute_run(const SimConfig& cfg, const DiscreteDgp& dgp, std::size_t run_index) {
  RunRecord rec;
  rec.run = run_index;
  try {
    const Dataset ds = generate_run(cfg, run_index);
    const std::uint64_t run_seed = derive_run_seed(cfg.master_seed, run_index);

    PsVector ps{};
    switch (cfg.ps_method) {
      case PsMethod::TruePs: {
        std::vector<double> p1(ds.n());
        std::vector<Level> levels(static_cast<std::size_t>(ds.num_covariates()));
        for (std::size_t i = 0; i < ds.n(); ++i) {
          for (int l = 0; l < ds.num_covariates(); ++l) levels[l] = ds.covariate_level(l, i);
          p1[i] = dgp.ps1(dgp.config_index(levels));
        }
        ps = make_ps_vector(std::move(p1), cfg.delta_clip);
        break;
      }
      case PsMethod::Saturated:
        ps = saturated_ps(ds, cfg.delta_clip);
        break;
      case PsMethod::BnAic:
      case PsMethod::BnBic: {
        const ScoreKind kind =
            cfg.ps_method == PsMethod::BnAic ? ScoreKind::Aic : ScoreKind::Bic;
        TabuConfig tabu;
        tabu.seed = derive_run_seed(run_seed, 2);
        const ColumnTable t = ps_table(ds);
        const Dag dag = tabu_search(t, kind, tabu);
        const BayesNet bn = BayesNet::fit_mle(dag, t);
        ps = propensity_scores(bn, ds, cfg.delta_clip);
        break;
      }
    }

    OutcomeProbs op;
    if (cfg.ps_method == PsMethod::TruePs) {
      // Oracle pipeline: use the exact outcome maps for the variance plug-in.
      op.theta0.resize(ds.n());
      op.theta1.resize(ds.n());
      std::vector<Level> levels(static_cast<std::size_t>(ds.num_covariates()));
      for (std::size_t i = 0; i < ds.n(); ++i) {
        for (int l = 0; l < ds.num_covariates(); ++l) levels[l] = ds.covariate_level(l, i);
        const std::size_t c = dgp.config_index(levels);
        op.theta0[i] = dgp.theta_x(0, c);
        op.theta1[i] = dgp.theta_x(1, c);
      }
    } else if (cfg.ps_method == PsMethod::Saturated) {
      OutcomeOptions oo;
      oo.method = OutcomeMethod::Saturated;
      op = outcome_probs(ds, oo);
    } else {
      OutcomeOptions oo;
      oo.method = OutcomeMethod::Bn;
      oo.score = cfg.ps_method == PsMethod::BnAic ? ScoreKind::Aic : ScoreKind::Bic;
      oo.tabu.seed = derive_run_seed(run_seed, 3);
      op = outcome_probs(ds, oo);
    }

    const AteReport report = ate_test(ds, ps, cfg.alpha, cfg.estimator, op);
    rec.d_n = report.d_n;
    rec.ci_lo = report.ci_lo;
    rec.ci_hi = report.ci_hi;
    rec.reject = report.reject;
    rec.sigma2 = report.sigma2;
    rec.delta_h = report.delta_h;
    rec.delta_ht = report.delta_ht;
    rec.clipped_rows = report.clipped_rows;
  } catch (const Error& e) {
    rec.failed = true;
    rec.fail_reason = e.what();
  }
  return rec;
}

}  // namespace

SimMetrics run_mc(const SimConfig& cfg, int threads) {
  cfg.check();
  const auto t0 = std::chrono::steady_clock::now();
  const DiscreteDgp dgp = dgp_from_config(cfg);
  const TrueTheta truth = true_theta(dgp);

  SimMetrics m;
  m.n = cfg.n;
  m.ps_method = cfg.ps_method;
  m.estimator = cfg.estimator;
  m.alpha = cfg.alpha;
  m.true_delta = truth.delta;
  m.records.resize(cfg.runs);
  parallel_for_index(cfg.runs, threads, [&](std::size_t r) {
    m.records[r] = execute_run(cfg, dgp, r);
  });

  // Aggregation is a fold in run-index order, independent of scheduling.
  std::vector<double> biases;
  std::size_t covered = 0;
  std::size_t rejected = 0;
  for (const RunRecord& rec : m.records) {
    if (rec.failed) {
      ++m.failures;
      continue;
    }
    biases.push_back(rec.d_n - m.true_delta);
    if (rec.ci_lo <= m.true_delta && m.true_delta <= rec.ci_hi) ++covered;
    if (rec.reject) ++rejected;
  }
  if (!biases.empty()) {
    m.mean_bias = mean(biases);
    m.median_bias = median(biases);
    const double ok = static_cast<double>(biases.size());
    m.ec = static_cast<double>(covered) / ok;
    m.err = static_cast<double>(rejected) / ok;
  }
  m.runtime_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return m;
}

nlohmann::ordered_json SimMetrics::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["ps_method"] = ps_method_name(ps_method);
  j["estimator"] = estimator == Estimator::Hajek ? "h" : "ht";
  j["alpha"] = alpha;
  j["true_delta"] = true_delta;
  j["runs"] = records.size();
  j["failures"] = failures;
  j["mean_bias"] = mean_bias;
  j["median_bias"] = median_bias;
  j["ec"] = ec;
  j["err"] = err;
  auto& rr = j["records"] = nlohmann::ordered_json::array();
  for (const RunRecord& rec : records) {
    nlohmann::ordered_json r;
    r["run"] = rec.run;
    if (rec.failed) {
      r["failed"] = true;
      r["reason"] = rec.fail_reason;
    } else {
      r["d_n"] = rec.d_n;
      r["ci"] = {rec.ci_lo, rec.ci_hi};
      r["reject"] = rec.reject;
      r["sigma2"] = rec.sigma2;
      r["delta_h"] = rec.delta_h;
      r["delta_ht"] = rec.delta_ht;
      r["clipped_rows"] = rec.clipped_rows;
    }
    rr.push_back(std::move(r));
  }
  return j;
}

namespace {

// Fixed shortest-round-trip float formatting so re-emission is byte-stable.
std::string fmt(double x) {
  nlohmann::json j = x;
  return j.dump();
}

}  // namespace

void emit_plot_data(const std::vector<SimMetrics>& metrics, std::ostream& runs_csv,
                    std::ostream& summary_csv) {
  if (metrics.empty()) fail(ErrorCode::InvalidArgument, "no metrics to emit");
  runs_csv << "n,ps_method,estimator,run,bias\n";
  summary_csv << "n,ps_method,estimator,ec,err,mean_bias,median_bias,failures,runs\n";
  for (const SimMetrics& m : metrics) {
    const char* est = m.estimator == Estimator::Hajek ? "h" : "ht";
    for (const RunRecord& rec : m.records) {
      if (rec.failed) continue;
      runs_csv << m.n << ',' << ps_method_name(m.ps_method) << ',' << est << ','
               << rec.run << ',' << fmt(rec.d_n - m.true_delta) << '\n';
    }
    summary_csv << m.n << ',' << ps_method_name(m.ps_method) << ',' << est << ','
                << fmt(m.ec) << ',' << fmt(m.err) << ',' << fmt(m.mean_bias) << ','
                << fmt(m.median_bias) << ',' << m.failures << ',' << m.records.size()
                << '\n';
  }
}

SimConfig reference_config(bool null_effect) {
  std::vector<VariableMeta> nodes;
  nodes.push_back({"T", 2, {"0", "1"}});
  nodes.push_back({"x1", 2, {"1", "2"}});
  nodes.push_back({"x2", 2, {"1", "2"}});
  nodes.push_back({"x3", 2, {"1", "2"}});
  nodes.push_back({"x4", 3, {"1", "2", "3"}});
  nodes.push_back({"x5", 4, {"1", "2", "3", "4"}});
  nodes.push_back({"x6", 5, {"1", "2", "3", "4", "5"}});
  Dag dag(nodes);
  dag.set_parents(0, {2, 4});  // T | x2, x4
  dag.set_parents(2, {1, 4});  // x2 | x1, x4
  dag.set_parents(3, {5});     // x3 | x5
  dag.set_parents(4, {6});     // x4 | x6
  dag.set_parents(5, {6});     // x5 | x6

  auto cpt = [&](int node, std::vector<double> table) {
    Cpt c;
    c.node = node;
    c.child_arity = dag.node(node).arity;
    c.parents = dag.parents(node);
    std::size_t configs = 1;
    for (const int p : c.parents) {
      c.parent_arities.push_back(dag.node(p).arity);
      configs *= static_cast<std::size_t>(dag.node(p).arity);
    }
    c.table = std::move(table);
    c.counts.assign(c.table.size(), 0);
    c.parent_counts.assign(configs, 0);
    c.row_observed.assign(configs, 1);
    return c;
  };

  std::vector<Cpt> cpts(7);
  // T | x2 (most significant), x4: P(T=1) per row.
  cpts[0] = cpt(0, {0.85, 0.15, 0.65, 0.35, 0.40, 0.60,
                    0.70, 0.30, 0.40, 0.60, 0.15, 0.85});
  cpts[1] = cpt(1, {0.55, 0.45});
  // x2 | x1 (most significant), x4.
  cpts[2] = cpt(2, {0.75, 0.25, 0.60, 0.40, 0.45, 0.55,
                    0.65, 0.35, 0.50, 0.50, 0.30, 0.70});
  // x3 | x5.
  cpts[3] = cpt(3, {0.70, 0.30, 0.60, 0.40, 0.45, 0.55, 0.35, 0.65});
  // x4 | x6.
  cpts[4] = cpt(4, {0.60, 0.25, 0.15, 0.50, 0.30, 0.20, 0.40, 0.35, 0.25,
                    0.30, 0.40, 0.30, 0.20, 0.40, 0.40});
  // x5 | x6.
  cpts[5] = cpt(5, {0.40, 0.30, 0.20, 0.10, 0.30, 0.30, 0.25, 0.15,
                    0.25, 0.30, 0.25, 0.20, 0.20, 0.25, 0.30, 0.25,
                    0.10, 0.20, 0.30, 0.40});
  cpts[6] = cpt(6, {0.25, 0.25, 0.20, 0.18, 0.12});

  SimConfig cfg{BayesNet(std::move(dag), std::move(cpts))};
  cfg.alpha0 = -0.9;
  // Calibrated so the exact marginal effect is ~0.09 (see dgp_from_config).
  cfg.alpha1 = null_effect ? 0.0 : 0.386;
  cfg.beta = {
      0.35,                      // x1 level 2
      -0.45,                     // x2 level 2
      0.30,                      // x3 level 2
      0.25, 0.50,                // x4 levels 2..3
      -0.20, 0.15, 0.35,         // x5 levels 2..4
      0.15, 0.30, -0.25, 0.40,   // x6 levels 2..5
  };
  cfg.n = 1000;
  cfg.runs = 100;
  cfg.master_seed = 20240901;
  cfg.ps_method = PsMethod::BnBic;
  cfg.estimator = Estimator::Hajek;
  cfg.alpha = 0.05;
  cfg.delta_clip = 0.01;
  return cfg;
}

}  // namespace bncausal
