#ifndef BNCAUSAL_MISSPEC_HPP_
#define BNCAUSAL_MISSPEC_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bncausal/dag.hpp"
#include "bncausal/dataset.hpp"
#include "bncausal/estimators.hpp"

namespace bncausal {

// Exact data-generating process over a finite covariate space: a probability
// table over covariate configurations, the true treated propensity, and the
// true per-arm outcome probabilities. Configurations are indexed mixed-radix
// with the first covariate most significant.
class DiscreteDgp {
 public:
  DiscreteDgp(std::vector<VariableMeta> covariates, std::vector<double> prob,
              std::vector<double> ps1, std::vector<double> theta0,
              std::vector<double> theta1);

  std::size_t num_configs() const { return prob_.size(); }
  int num_covariates() const { return static_cast<int>(covariates_.size()); }
  const std::vector<VariableMeta>& covariates() const { return covariates_; }

  double prob(std::size_t config) const { return prob_[config]; }
  double ps1(std::size_t config) const { return ps1_[config]; }
  double theta_x(int arm, std::size_t config) const {
    return arm == 1 ? theta1_[config] : theta0_[config];
  }

  std::vector<Level> config_levels(std::size_t config) const;
  std::size_t config_index(const std::vector<Level>& levels) const;

  // i.i.d. draws of (X, T, Y) with Y assembled from the two simulated
  // potential outcomes. Deterministic in the seed.
  Dataset sample(std::size_t n, std::uint64_t seed) const;

  static DiscreteDgp from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;

 private:
  std::vector<VariableMeta> covariates_;
  std::vector<double> prob_;
  std::vector<double> ps1_;
  std::vector<double> theta0_;
  std::vector<double> theta1_;
};

struct TrueTheta {
  double theta0 = 0.0;
  double theta1 = 0.0;
  double delta = 0.0;
};

// Marginal outcome probabilities theta_k = sum_x P(x) theta_k(x), exactly.
TrueTheta true_theta(const DiscreteDgp& dgp);

// A (possibly wrong) propensity model: the limiting fitted propensity per
// covariate configuration, plus the structure it came from when the model
// is a network to be refitted on data.
struct WorkingPsModel {
  std::vector<double> ps1_star;   // per covariate configuration
  std::optional<Dag> structure;   // over [T, X1..XL] when model-shaped
};

// Information projection of the exact (T, X) joint onto a network structure:
// every CPT becomes the true conditional given that node's parent set, which
// is the probability limit of the maximum-likelihood fit under the wrong
// structure. Returns the implied treated propensity per configuration.
WorkingPsModel kl_project(const DiscreteDgp& dgp, const Dag& dag_over_tx);

// Exact limiting bias of the arm-k estimator under the working model:
//   HT:    E[ theta_k(X) (p_k(X)/p*_k(X) - 1) ]
//   Hajek: E[ (theta_k(X) - theta_k)(p_k(X)/p*_k(X) - 1) ] / E[ p_k(X)/p*_k(X) ]
double asymptotic_bias(const DiscreteDgp& dgp, const WorkingPsModel& wm,
                       Estimator estimator, int arm);

struct ConvergenceRow {
  std::size_t n = 0;
  double mc_mean_bias = 0.0;
  double limit = 0.0;
  double distance = 0.0;  // |mc_mean_bias - limit|
};

// Monte Carlo check that finite-sample estimates approach the computed
// limit: for each sample size, average theta-hat_k - theta_k over `runs`
// datasets. Model-shaped working models are refitted per run; explicit maps
// are plugged in directly.
std::vector<ConvergenceRow> empirical_limit_check(const DiscreteDgp& dgp,
                                                  const WorkingPsModel& wm,
                                                  Estimator estimator, int arm,
                                                  const std::vector<std::size_t>& n_grid,
                                                  std::size_t runs, std::uint64_t seed,
                                                  int threads = 1);

// Arm-k estimate on one dataset under the working model (refit when
// model-shaped). Exposed for tests and the convergence check.
double estimate_theta_under_working_model(const Dataset& ds, const DiscreteDgp& dgp,
                                          const WorkingPsModel& wm, Estimator estimator,
                                          int arm);

}  // namespace bncausal

#endif  // BNCAUSAL_MISSPEC_HPP_
