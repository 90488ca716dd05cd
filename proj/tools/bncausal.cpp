// Command-line front end: learn structures, estimate and test treatment
// effects, check positivity, run Monte Carlo experiments, and evaluate
// misspecified propensity models. JSON results go to stdout, human-readable
// notes to stderr. Exit codes: 0 success, 1 usage error, 2 data error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bncausal/bayes_net.hpp"
#include "bncausal/dataset.hpp"
#include "bncausal/errors.hpp"
#include "bncausal/estimators.hpp"
#include "bncausal/misspec.hpp"
#include "bncausal/sim.hpp"
#include "bncausal/stats.hpp"
#include "bncausal/tabu.hpp"
#include "bncausal/version.hpp"

namespace {

using bncausal::Error;
using bncausal::ErrorCode;

struct LearnArgs {
  std::string data;
  std::string schema;
  std::string score = "bic";
  int tabu_len = 10;
  int max_iter = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> require_arcs;
  std::vector<std::string> forbid_arcs;
  std::string out;
  std::string dot;
  bool with_outcome = false;
};

struct AteArgs {
  std::string data;
  std::string schema;
  std::string ps_method = "bn";
  std::string score = "bic";
  std::string ps_model;
  std::string estimator = "h";
  std::string outcome_method = "bn";
  std::string center = "h";
  double alpha = 0.05;
  double clip = 0.01;
  std::uint64_t seed = 0;
  int tabu_len = 10;
  int max_iter = 0;
};

struct SimulateArgs {
  std::string config;
  std::uint64_t seed = 0;
  std::size_t runs_override = 0;
  std::size_t n_override = 0;
  std::string out_prefix;
};

struct MisspecArgs {
  std::string dgp;
  std::string working_model;
  std::string estimator = "h";
  int arm = 1;
  bool check = false;
  std::string n_grid = "1000,10000";
  std::size_t runs = 100;
  std::uint64_t seed = 0;
  std::string out;
};

// Resolves "A->B" against the node names of a fitted table.
std::pair<int, int> parse_arc(const std::string& text,
                              const std::vector<bncausal::VariableMeta>& nodes) {
  const auto pos = text.find("->");
  if (pos == std::string::npos) {
    bncausal::fail(ErrorCode::InvalidArgument, "arc '" + text + "' must look like A->B");
  }
  auto find = [&](const std::string& name) {
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      if (nodes[v].name == name) return static_cast<int>(v);
    }
    bncausal::fail(ErrorCode::InvalidArgument, "unknown node '" + name + "' in arc");
  };
  return {find(text.substr(0, pos)), find(text.substr(pos + 2))};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) bncausal::fail(ErrorCode::ParseError, "cannot write " + path);
  out << content;
}

int cmd_learn(const LearnArgs& args, int threads) {
  (void)threads;
  const auto schema = bncausal::Schema::from_json_file(args.schema);
  const auto ds = bncausal::load_csv(args.data, schema);
  const bncausal::ColumnTable table =
      args.with_outcome ? bncausal::outcome_table(ds) : bncausal::ps_table(ds);

  bncausal::TabuConfig cfg;
  cfg.tabu_len = args.tabu_len;
  cfg.max_iter = args.max_iter;
  cfg.seed = args.seed;
  for (const auto& a : args.require_arcs) cfg.required_arcs.push_back(parse_arc(a, table.meta));
  for (const auto& a : args.forbid_arcs) cfg.forbidden_arcs.push_back(parse_arc(a, table.meta));

  const auto kind = bncausal::parse_score_kind(args.score);
  const bncausal::Dag dag = bncausal::tabu_search(table, kind, cfg);
  const bncausal::BayesNet bn = bncausal::BayesNet::fit_mle(dag, table);

  const std::string model = bn.to_json().dump(2) + "\n";
  if (args.out.empty()) {
    std::cout << model;
  } else {
    write_file(args.out, model);
  }
  if (!args.dot.empty()) write_file(args.dot, bncausal::to_dot(dag));

  std::cerr << "learned " << dag.num_arcs() << " arcs over " << dag.num_nodes()
            << " nodes (" << bncausal::score_kind_name(kind)
            << " score = " << bncausal::score(dag, table, kind) << ")\n";
  return 0;
}

int cmd_ate(const AteArgs& args, int threads) {
  (void)threads;
  const auto schema = bncausal::Schema::from_json_file(args.schema);
  const auto ds = bncausal::load_csv(args.data, schema);
  const auto kind = bncausal::parse_score_kind(args.score);

  bncausal::PsVector ps;
  if (!args.ps_model.empty()) {
    const auto bn = bncausal::BayesNet::load(args.ps_model);
    ps = bncausal::propensity_scores(bn, ds, args.clip);
  } else if (args.ps_method == "saturated") {
    ps = bncausal::saturated_ps(ds, args.clip);
  } else if (args.ps_method == "bn") {
    bncausal::TabuConfig cfg;
    cfg.tabu_len = args.tabu_len;
    cfg.max_iter = args.max_iter;
    cfg.seed = args.seed;
    const auto table = bncausal::ps_table(ds);
    const auto dag = bncausal::tabu_search(table, kind, cfg);
    const auto bn = bncausal::BayesNet::fit_mle(dag, table);
    ps = bncausal::propensity_scores(bn, ds, args.clip);
  } else {
    bncausal::fail(ErrorCode::InvalidArgument,
                   "ps-method must be bn or saturated (or use --ps-model)");
  }

  bncausal::OutcomeOptions oo;
  oo.method = bncausal::parse_outcome_method(args.outcome_method);
  oo.score = kind;
  oo.tabu.seed = args.seed + 1;
  oo.tabu.tabu_len = args.tabu_len;
  oo.tabu.max_iter = args.max_iter;
  const auto op = bncausal::outcome_probs(ds, oo);

  const auto estimator = bncausal::parse_estimator(args.estimator);
  const auto centering = bncausal::parse_estimator(args.center) == bncausal::Estimator::Hajek
                             ? bncausal::Centering::Hajek
                             : bncausal::Centering::HorvitzThompson;
  const auto report = bncausal::ate_test(ds, ps, args.alpha, estimator, op, centering);
  std::cout << report.to_json().dump(2) << "\n";
  std::cerr << "delta = " << report.d_n << ", 95-type CI [" << report.ci_lo << ", "
            << report.ci_hi << "], p = " << report.p_value
            << (report.reject ? " -> reject" : " -> no rejection") << "\n";
  return 0;
}

int cmd_diagnose(const std::string& data, const std::string& schema_path) {
  const auto schema = bncausal::Schema::from_json_file(schema_path);
  const auto ds = bncausal::load_csv(data, schema);
  const auto report = bncausal::validate(ds);
  nlohmann::ordered_json j;
  j["n"] = ds.n();
  j["covariates"] = ds.num_covariates();
  auto& strata = j["strata"] = nlohmann::ordered_json::array();
  for (const auto& s : report.strata) {
    strata.push_back({{"codes", s.codes}, {"treated", s.treated}, {"control", s.control}});
  }
  auto& viol = j["positivity_violations"] = nlohmann::ordered_json::array();
  for (const auto idx : report.violations) viol.push_back(report.strata[idx].codes);
  j["ok"] = report.ok();
  std::cout << j.dump(2) << "\n";
  std::cerr << report.strata.size() << " observed strata, " << report.violations.size()
            << " with an empty arm\n";
  return 0;
}

int cmd_simulate(const SimulateArgs& args, int threads) {
  auto cfg = bncausal::SimConfig::load(args.config);
  cfg.master_seed = args.seed;
  if (args.runs_override > 0) cfg.runs = args.runs_override;
  if (args.n_override > 0) cfg.n = args.n_override;

  const auto metrics = bncausal::run_mc(cfg, threads);
  const std::string metrics_json = metrics.to_json().dump(2) + "\n";
  std::ostringstream runs_csv;
  std::ostringstream summary_csv;
  bncausal::emit_plot_data({metrics}, runs_csv, summary_csv);

  if (!args.out_prefix.empty()) {
    write_file(args.out_prefix + "_runs.csv", runs_csv.str());
    write_file(args.out_prefix + "_summary.csv", summary_csv.str());
    write_file(args.out_prefix + "_metrics.json", metrics_json);
  }
  std::cout << metrics_json;
  std::cerr << "ec = " << metrics.ec << ", err = " << metrics.err << ", failures = "
            << metrics.failures << ", runtime = " << metrics.runtime_sec << " s\n";
  return 0;
}

int cmd_misspec(const MisspecArgs& args, int threads) {
  std::ifstream in(args.dgp);
  if (!in) bncausal::fail(ErrorCode::ParseError, "cannot open DGP file " + args.dgp);
  nlohmann::json dj;
  try {
    in >> dj;
  } catch (const nlohmann::json::exception& e) {
    bncausal::fail(ErrorCode::ParseError, std::string("DGP JSON: ") + e.what());
  }
  const auto dgp = bncausal::DiscreteDgp::from_json(dj);
  const auto truth = bncausal::true_theta(dgp);

  nlohmann::ordered_json j;
  j["theta0"] = truth.theta0;
  j["theta1"] = truth.theta1;
  j["delta"] = truth.delta;

  if (!args.working_model.empty()) {
    std::ifstream win(args.working_model);
    if (!win) bncausal::fail(ErrorCode::ParseError, "cannot open " + args.working_model);
    nlohmann::json wj;
    try {
      win >> wj;
    } catch (const nlohmann::json::exception& e) {
      bncausal::fail(ErrorCode::ParseError, std::string("working model JSON: ") + e.what());
    }
    std::vector<bncausal::VariableMeta> nodes;
    nodes.push_back({"T", 2, {"0", "1"}});
    for (const auto& m : dgp.covariates()) nodes.push_back(m);
    bncausal::Dag dag(nodes);
    try {
      for (const auto& arc : wj.at("arcs")) {
        const auto pair = parse_arc(arc.at(0).get<std::string>() + "->" +
                                        arc.at(1).get<std::string>(),
                                    nodes);
        dag.add_arc(pair.first, pair.second);
      }
    } catch (const nlohmann::json::exception& e) {
      bncausal::fail(ErrorCode::ParseError, std::string("working model JSON: ") + e.what());
    }
    if (!bncausal::is_acyclic(dag)) {
      bncausal::fail(ErrorCode::InvalidArgument, "working model arcs contain a cycle");
    }
    const auto wm = bncausal::kl_project(dgp, dag);
    const auto estimator = bncausal::parse_estimator(args.estimator);
    j["working_ps"] = wm.ps1_star;
    nlohmann::ordered_json bias;
    for (const int arm : {0, 1}) {
      bias["hajek_arm" + std::to_string(arm)] =
          bncausal::asymptotic_bias(dgp, wm, bncausal::Estimator::Hajek, arm);
      bias["horvitz_thompson_arm" + std::to_string(arm)] =
          bncausal::asymptotic_bias(dgp, wm, bncausal::Estimator::HorvitzThompson, arm);
    }
    j["asymptotic_bias"] = bias;

    if (args.check) {
      std::vector<std::size_t> grid;
      std::stringstream ss(args.n_grid);
      std::string tok;
      while (std::getline(ss, tok, ',')) grid.push_back(std::stoul(tok));
      const auto rows = bncausal::empirical_limit_check(dgp, wm, estimator, args.arm, grid,
                                                        args.runs, args.seed, threads);
      std::ostringstream csv;
      csv << "n,mc_mean_bias,limit,distance\n";
      for (const auto& row : rows) {
        csv << row.n << ',' << row.mc_mean_bias << ',' << row.limit << ',' << row.distance
            << '\n';
      }
      if (args.out.empty()) {
        std::cerr << csv.str();
      } else {
        write_file(args.out, csv.str());
      }
    }
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Treatment-effect estimation for discrete data with "
               "network-based propensity scores"};
  app.set_version_flag("--version", std::string(bncausal::kModelFormatVersion));
  app.fallthrough();  // global flags may follow a subcommand
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: hardware)");
  app.require_subcommand(1);

  LearnArgs learn;
  auto* learn_cmd = app.add_subcommand("learn", "learn a network structure from data");
  learn_cmd->add_option("--data", learn.data, "CSV file")->required();
  learn_cmd->add_option("--schema", learn.schema, "schema JSON")->required();
  learn_cmd->add_option("--score", learn.score, "aic or bic");
  learn_cmd->add_option("--tabu-len", learn.tabu_len, "tabu list length");
  learn_cmd->add_option("--max-iter", learn.max_iter, "iteration cap (0 = default)");
  learn_cmd->add_option("--seed", learn.seed, "search seed (default 0)");
  learn_cmd->add_option("--require-arc", learn.require_arcs, "arc A->B to force");
  learn_cmd->add_option("--forbid-arc", learn.forbid_arcs, "arc A->B to exclude");
  learn_cmd->add_option("--out", learn.out, "model JSON path (default stdout)");
  learn_cmd->add_option("--dot", learn.dot, "write a DOT rendering here");
  learn_cmd->add_flag("--with-outcome", learn.with_outcome,
                      "include the outcome as a node");

  AteArgs ate;
  auto* ate_cmd = app.add_subcommand("ate", "estimate and test the treatment effect");
  ate_cmd->add_option("--data", ate.data, "CSV file")->required();
  ate_cmd->add_option("--schema", ate.schema, "schema JSON")->required();
  ate_cmd->add_option("--ps-method", ate.ps_method, "bn or saturated");
  ate_cmd->add_option("--score", ate.score, "aic or bic (bn method)");
  ate_cmd->add_option("--ps-model", ate.ps_model, "pre-learned model JSON");
  ate_cmd->add_option("--estimator", ate.estimator, "h or ht");
  ate_cmd->add_option("--outcome-method", ate.outcome_method, "bn or saturated");
  ate_cmd->add_option("--center", ate.center, "variance centering: h or ht");
  ate_cmd->add_option("--alpha", ate.alpha, "test level");
  ate_cmd->add_option("--clip", ate.clip, "propensity clipping bound");
  ate_cmd->add_option("--seed", ate.seed, "search seed (default 0)");
  ate_cmd->add_option("--tabu-len", ate.tabu_len, "tabu list length");
  ate_cmd->add_option("--max-iter", ate.max_iter, "iteration cap (0 = default)");

  std::string diag_data;
  std::string diag_schema;
  auto* diag_cmd = app.add_subcommand("diagnose", "per-stratum positivity check");
  diag_cmd->add_option("--data", diag_data, "CSV file")->required();
  diag_cmd->add_option("--schema", diag_schema, "schema JSON")->required();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo experiment");
  sim_cmd->add_option("--config", sim.config, "simulation config JSON")->required();
  sim_cmd->add_option("--seed", sim.seed, "master seed")->required();
  sim_cmd->add_option("--runs", sim.runs_override, "override run count");
  sim_cmd->add_option("--n", sim.n_override, "override sample size");
  sim_cmd->add_option("--out-prefix", sim.out_prefix, "write CSV/JSON files here");

  MisspecArgs mis;
  auto* mis_cmd = app.add_subcommand("misspec", "misspecified-propensity analysis");
  mis_cmd->add_option("--dgp", mis.dgp, "DGP JSON")->required();
  mis_cmd->add_option("--working-model", mis.working_model, "working structure JSON");
  mis_cmd->add_option("--estimator", mis.estimator, "h or ht (for --check)");
  mis_cmd->add_option("--arm", mis.arm, "arm 0 or 1 (for --check)");
  mis_cmd->add_flag("--check", mis.check, "run the finite-sample convergence check");
  mis_cmd->add_option("--n-grid", mis.n_grid, "comma-separated sample sizes");
  mis_cmd->add_option("--runs", mis.runs, "runs per sample size");
  mis_cmd->add_option("--seed", mis.seed, "seed (for --check)");
  mis_cmd->add_option("--out", mis.out, "convergence CSV path");

  try {
    app.parse(argc, argv);
    if (learn_cmd->parsed()) return cmd_learn(learn, threads);
    if (ate_cmd->parsed()) return cmd_ate(ate, threads);
    if (diag_cmd->parsed()) return cmd_diagnose(diag_data, diag_schema);
    if (sim_cmd->parsed()) return cmd_simulate(sim, threads);
    if (mis_cmd->parsed()) return cmd_misspec(mis, threads);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool usage = e.code() == ErrorCode::ParseError ||
                       e.code() == ErrorCode::InvalidArgument;
    return usage ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
