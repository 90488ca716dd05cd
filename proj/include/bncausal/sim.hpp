#ifndef BNCAUSAL_SIM_HPP_
#define BNCAUSAL_SIM_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "bncausal/bayes_net.hpp"
#include "bncausal/estimators.hpp"
#include "bncausal/misspec.hpp"

namespace bncausal {

enum class PsMethod { BnAic, BnBic, Saturated, TruePs };
const char* ps_method_name(PsMethod m);
PsMethod parse_ps_method(const std::string& text);

// Full description of one Monte Carlo experiment. Treatment and covariates
// are drawn from `dgp_bn` (a network over [T, X1..XL]); the two potential
// outcomes follow logistic models
//   logit P(Y(0)=1 | x) = alpha0 + beta' ind(x)
//   logit P(Y(1)=1 | x) = alpha0 + alpha1 + beta' ind(x)
// where ind(x) stacks baseline indicators per covariate: level 1 is the
// baseline and each level j >= 2 contributes one coefficient, laid out
// covariate by covariate in node order.
struct SimConfig {
  explicit SimConfig(BayesNet bn) : dgp_bn(std::move(bn)) {}

  BayesNet dgp_bn;
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  std::vector<double> beta;
  std::size_t n = 1000;
  std::size_t runs = 100;
  std::uint64_t master_seed = 0;
  PsMethod ps_method = PsMethod::BnBic;
  Estimator estimator = Estimator::Hajek;
  double alpha = 0.05;
  double delta_clip = 0.01;

  void check() const;
  nlohmann::ordered_json to_json() const;
  static SimConfig from_json(const nlohmann::json& j);
  static SimConfig load(const std::string& path);
};

// Exact finite DGP implied by a config: covariate marginal and propensity
// from the network, outcome maps from the logistic models. Ground truth for
// coverage and bias metrics.
DiscreteDgp dgp_from_config(const SimConfig& cfg);

struct RunRecord {
  std::size_t run = 0;
  bool failed = false;
  std::string fail_reason;
  double d_n = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool reject = false;
  double sigma2 = 0.0;
  double delta_h = 0.0;
  double delta_ht = 0.0;
  std::size_t clipped_rows = 0;
};

struct SimMetrics {
  std::size_t n = 0;
  PsMethod ps_method = PsMethod::BnBic;
  Estimator estimator = Estimator::Hajek;
  double alpha = 0.05;
  double true_delta = 0.0;
  std::vector<RunRecord> records;
  double mean_bias = 0.0;
  double median_bias = 0.0;
  double ec = 0.0;   // share of CIs containing true_delta
  double err = 0.0;  // share of CIs excluding zero
  std::size_t failures = 0;
  double runtime_sec = 0.0;  // informational; kept out of serialized output

  nlohmann::ordered_json to_json() const;
};

// Dataset for one run. The per-run seed is splitmix64(master_seed XOR
// splitmix64(run_index + 1)); identical (config, run_index) give
// byte-identical datasets.
Dataset generate_run(const SimConfig& cfg, std::size_t run_index);

// Runs the experiment. Structure is re-learned inside every run for the
// model-based propensity methods. Failed runs (e.g. a lost treatment arm at
// small n) are recorded and excluded from the aggregates. Results do not
// depend on the thread count.
SimMetrics run_mc(const SimConfig& cfg, int threads = 1);

// Long-format per-run bias rows and one summary row per metrics object.
void emit_plot_data(const std::vector<SimMetrics>& metrics, std::ostream& runs_csv,
                    std::ostream& summary_csv);

// Frozen six-covariate demonstration DGP with arities {2,2,2,3,4,5} and a
// true effect of about 0.09 (exactly zero for the null variant). Ships with
// the repository and anchors the long-running test suites.
SimConfig reference_config(bool null_effect);

}  // namespace bncausal

#endif  // BNCAUSAL_SIM_HPP_
