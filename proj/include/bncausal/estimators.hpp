#ifndef BNCAUSAL_ESTIMATORS_HPP_
#define BNCAUSAL_ESTIMATORS_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bncausal/bayes_net.hpp"
#include "bncausal/dataset.hpp"
#include "bncausal/tabu.hpp"

namespace bncausal {

enum class Estimator { Hajek, HorvitzThompson };
const char* estimator_name(Estimator e);
Estimator parse_estimator(const std::string& text);

// Per-row treated propensity P(T=1 | X = x_i), clipped into
// [delta_clip, 1 - delta_clip]. p0 is 1 - p1 by construction. Clipping is
// always flagged because it biases the weighted estimators.
struct PsVector {
  std::vector<double> p1;
  std::vector<std::uint8_t> clipped;
  double delta_clip = 0.0;

  std::size_t clip_count() const;
  double p_arm(int arm, std::size_t i) const { return arm == 1 ? p1[i] : 1.0 - p1[i]; }
};

// Clips raw propensities into the admissible band and flags the rows.
PsVector make_ps_vector(std::vector<double> p1, double delta_clip);

// Model-based propensity: evaluates P(T=1 | X=x_i) from a network fitted
// over [T, X1..XL]. Errors from rows whose query touches an unfitted part
// of the model carry the row index.
PsVector propensity_scores(const BayesNet& bn, const Dataset& ds,
                           double delta_clip = 0.01);

// Empirical treated share within each exact covariate stratum: the richest
// discrete propensity model and the reference point for the
// Hajek / Horvitz-Thompson equivalence identity.
PsVector saturated_ps(const Dataset& ds, double delta_clip = 0.0);

struct ThetaPair {
  double theta0 = 0.0;
  double theta1 = 0.0;
  double delta() const { return theta1 - theta0; }
};

// Inverse-probability-weighted outcome-rate estimators per arm.
// theta_hajek normalizes by the realized weight sum (always in [0,1]);
// theta_ht normalizes by n and may exceed 1, which is reported as-is.
ThetaPair theta_hajek(const Dataset& ds, const PsVector& ps);
ThetaPair theta_ht(const Dataset& ds, const PsVector& ps);

enum class OutcomeMethod { Bn, Saturated };
const char* outcome_method_name(OutcomeMethod m);
OutcomeMethod parse_outcome_method(const std::string& text);

struct OutcomeOptions {
  OutcomeMethod method = OutcomeMethod::Bn;
  ScoreKind score = ScoreKind::Bic;  // structure score for the Bn method
  TabuConfig tabu;
};

// Per-row estimates of P(Y=1 | T=k, X=x_i) for both arms, used by the
// variance plug-in. Cells that cannot be estimated (empty stratum-arm cell,
// or a model query touching unfitted rows) fall back to the arm-level
// outcome rate; every fallback is counted.
struct OutcomeProbs {
  std::vector<double> theta0;
  std::vector<double> theta1;
  std::size_t fallbacks = 0;
};

OutcomeProbs outcome_probs(const Dataset& ds, const OutcomeOptions& options = {});

enum class Centering { Hajek, HorvitzThompson };

// Plug-in estimate of the asymptotic variance of sqrt(n) * (delta-hat):
//   h_i1 = (I(T=1)/p * I(Y=1) - theta1) - theta1(x_i)/p * (I(T=1) - p)
//   h_i0 = (I(T=0)/(1-p) * I(Y=1) - theta0) - theta0(x_i)/(1-p) * (I(T=0) - (1-p))
//   sigma2 = mean of (h_i1 - h_i0)^2
// with p the (clipped) treated propensity and theta-k the centering point
// estimates.
double sigma2_hat(const Dataset& ds, const PsVector& ps, const OutcomeProbs& op,
                  const ThetaPair& center);

struct ArmPsSummary {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

struct AteReport {
  ThetaPair theta_h;
  ThetaPair theta_ht;
  double delta_h = 0.0;
  double delta_ht = 0.0;
  Estimator estimator = Estimator::Hajek;
  double d_n = 0.0;          // point estimate for the chosen estimator
  double sigma2 = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  std::size_t n = 0;
  std::size_t clipped_rows = 0;
  std::size_t outcome_fallbacks = 0;
  ArmPsSummary ps_treated;
  ArmPsSummary ps_control;

  nlohmann::ordered_json to_json() const;
};

// Two-sided test of zero average treatment effect at level alpha:
//   CI = d_n +/- z_{alpha/2} * sigma / sqrt(n), reject iff 0 is outside,
//   p = 2 * (1 - Phi(sqrt(n) * |d_n| / sigma)).
// A degenerate sigma = 0 gives the point interval [d_n, d_n] with p = 1
// when d_n = 0 and p = 0 otherwise.
AteReport ate_test(const Dataset& ds, const PsVector& ps, double alpha,
                   Estimator estimator, const OutcomeProbs& op,
                   Centering centering = Centering::Hajek);

struct JackknifeResult {
  double variance = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;  // replicates that lost an arm
};

// Delete-one jackknife of the statistic computed by `delta_fn` (slow path:
// refits everything n times; replicates run concurrently when threads > 1,
// so delta_fn must be pure). Replicates whose reduced dataset loses a
// treatment arm are skipped and counted.
JackknifeResult jackknife_variance(const Dataset& ds,
                                   const std::function<double(const Dataset&)>& delta_fn,
                                   int threads = 1);

// Weighted-vs-raw mean discrepancy of a bounded row function f for arm k:
//   | (1/n) sum I(T_i=k) f(x_i)/p_k(x_i) - (1/n) sum f(x_i) |
// Zero (to rounding) under saturated propensities.
double imbalance(const Dataset& ds, const PsVector& ps,
                 const std::function<double(std::size_t)>& f, int arm);

}  // namespace bncausal

#endif  // BNCAUSAL_ESTIMATORS_HPP_
