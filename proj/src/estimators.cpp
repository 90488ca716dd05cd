#include "bncausal/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "bncausal/errors.hpp"
#include "bncausal/stats.hpp"
#include "bncausal/threading.hpp"

namespace bncausal {

const char* estimator_name(Estimator e) {
  return e == Estimator::Hajek ? "hajek" : "horvitz-thompson";
}

Estimator parse_estimator(const std::string& text) {
  if (text == "h" || text == "hajek") return Estimator::Hajek;
  if (text == "ht" || text == "horvitz-thompson") return Estimator::HorvitzThompson;
  fail(ErrorCode::InvalidArgument, "unknown estimator '" + text + "' (expected h or ht)");
}

const char* outcome_method_name(OutcomeMethod m) {
  return m == OutcomeMethod::Bn ? "bn" : "saturated";
}

OutcomeMethod parse_outcome_method(const std::string& text) {
  if (text == "bn") return OutcomeMethod::Bn;
  if (text == "saturated") return OutcomeMethod::Saturated;
  fail(ErrorCode::InvalidArgument, "unknown outcome method '" + text + "'");
}

std::size_t PsVector::clip_count() const {
  std::size_t c = 0;
  for (const auto flag : clipped) c += flag;
  return c;
}

PsVector make_ps_vector(std::vector<double> p1, double delta_clip) {
  if (delta_clip < 0.0 || delta_clip >= 0.5) {
    fail(ErrorCode::InvalidArgument, "delta_clip must lie in [0, 0.5)");
  }
  PsVector ps;
  ps.delta_clip = delta_clip;
  ps.clipped.assign(p1.size(), 0);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (!(p1[i] >= 0.0 && p1[i] <= 1.0)) {
      fail(ErrorCode::InvalidArgument,
           "propensity outside [0,1] at row " + std::to_string(i));
    }
    if (p1[i] < delta_clip) {
      p1[i] = delta_clip;
      ps.clipped[i] = 1;
    } else if (p1[i] > 1.0 - delta_clip) {
      p1[i] = 1.0 - delta_clip;
      ps.clipped[i] = 1;
    }
  }
  ps.p1 = std::move(p1);
  return ps;
}

PsVector propensity_scores(const BayesNet& bn, const Dataset& ds, double delta_clip) {
  const ColumnTable t = ps_table(ds);
  check_table_matches(bn.dag(), t);
  std::vector<double> p1(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    try {
      p1[i] = bn.conditional_prob(0, 1, t.row(i));
    } catch (const Error& e) {
      throw Error(e.code(), "row " + std::to_string(i) + ": " + e.what());
    }
  }
  return make_ps_vector(std::move(p1), delta_clip);
}

PsVector saturated_ps(const Dataset& ds, double delta_clip) {
  std::unordered_map<std::size_t, std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    auto& [treated, total] = cells[ds.stratum_index(i)];
    treated += static_cast<std::size_t>(ds.treatment(i) == 1);
    ++total;
  }
  std::vector<double> p1(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto& [treated, total] = cells[ds.stratum_index(i)];
    p1[i] = static_cast<double>(treated) / static_cast<double>(total);
  }
  return make_ps_vector(std::move(p1), delta_clip);
}

namespace {

void check_rows(const Dataset& ds, const PsVector& ps) {
  if (ps.p1.size() != ds.n()) {
    fail(ErrorCode::InvalidArgument, "propensity vector is not row-aligned");
  }
}

double inverse_weight(const PsVector& ps, int arm, std::size_t i) {
  const double p = ps.p_arm(arm, i);
  if (p <= 0.0) {
    fail(ErrorCode::ZeroEvidenceProbability,
         "zero propensity for the observed arm at row " + std::to_string(i));
  }
  return 1.0 / p;
}

}  // namespace

ThetaPair theta_hajek(const Dataset& ds, const PsVector& ps) {
  check_rows(ds, ps);
  ThetaPair out;
  for (const int arm : {0, 1}) {
    double weight_sum = 0.0;
    double weighted_ones = 0.0;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (ds.treatment(i) != arm) continue;
      const double w = inverse_weight(ps, arm, i);
      weight_sum += w;
      if (ds.outcome(i) == 1) weighted_ones += w;
    }
    if (weight_sum == 0.0) {
      fail(ErrorCode::EmptyArm, std::string("no units in arm ") + std::to_string(arm));
    }
    (arm == 1 ? out.theta1 : out.theta0) = weighted_ones / weight_sum;
  }
  return out;
}

ThetaPair theta_ht(const Dataset& ds, const PsVector& ps) {
  check_rows(ds, ps);
  ThetaPair out;
  const double n = static_cast<double>(ds.n());
  for (const int arm : {0, 1}) {
    double weighted_ones = 0.0;
    bool arm_seen = false;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (ds.treatment(i) != arm) continue;
      arm_seen = true;
      if (ds.outcome(i) == 1) weighted_ones += inverse_weight(ps, arm, i);
    }
    if (!arm_seen) {
      fail(ErrorCode::EmptyArm, std::string("no units in arm ") + std::to_string(arm));
    }
    (arm == 1 ? out.theta1 : out.theta0) = weighted_ones / n;
  }
  return out;
}

OutcomeProbs outcome_probs(const Dataset& ds, const OutcomeOptions& options) {
  OutcomeProbs out;
  out.theta0.resize(ds.n());
  out.theta1.resize(ds.n());

  // Arm-level outcome rates, the fallback when a cell is not estimable.
  double arm_rate[2] = {0.0, 0.0};
  {
    std::size_t ones[2] = {0, 0};
    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < ds.n(); ++i) {
      const int t = ds.treatment(i);
      ++count[t];
      ones[t] += static_cast<std::size_t>(ds.outcome(i) == 1);
    }
    for (const int arm : {0, 1}) {
      arm_rate[arm] = static_cast<double>(ones[arm]) / static_cast<double>(count[arm]);
    }
  }

  if (options.method == OutcomeMethod::Saturated) {
    std::unordered_map<std::size_t, std::array<std::pair<std::size_t, std::size_t>, 2>> cells;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      auto& cell = cells[ds.stratum_index(i)][ds.treatment(i)];
      cell.first += static_cast<std::size_t>(ds.outcome(i) == 1);
      ++cell.second;
    }
    for (std::size_t i = 0; i < ds.n(); ++i) {
      const auto& per_arm = cells[ds.stratum_index(i)];
      for (const int arm : {0, 1}) {
        double value;
        if (per_arm[arm].second == 0) {
          value = arm_rate[arm];
          ++out.fallbacks;
        } else {
          value = static_cast<double>(per_arm[arm].first) /
                  static_cast<double>(per_arm[arm].second);
        }
        (arm == 1 ? out.theta1 : out.theta0)[i] = value;
      }
    }
    return out;
  }

  // Model-based: learn a structure over [Y, T, X], fit, and read off the
  // conditional outcome probability for both arms of every row.
  const ColumnTable table = outcome_table(ds);
  const Dag dag = tabu_search(table, options.score, options.tabu);
  const BayesNet bn = BayesNet::fit_mle(dag, table);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    Assignment evidence = table.row(i);
    for (const int arm : {0, 1}) {
      evidence[1] = static_cast<Level>(arm);
      double value;
      try {
        value = bn.conditional_prob(0, 1, evidence);
      } catch (const Error&) {
        value = arm_rate[arm];
        ++out.fallbacks;
      }
      (arm == 1 ? out.theta1 : out.theta0)[i] = value;
    }
  }
  return out;
}

double sigma2_hat(const Dataset& ds, const PsVector& ps, const OutcomeProbs& op,
                  const ThetaPair& center) {
  check_rows(ds, ps);
  if (op.theta0.size() != ds.n() || op.theta1.size() != ds.n()) {
    fail(ErrorCode::InvalidArgument, "outcome probabilities are not row-aligned");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double p = ps.p1[i];
    const double q = 1.0 - p;
    if (p <= 0.0 || q <= 0.0) {
      fail(ErrorCode::ZeroEvidenceProbability,
           "degenerate propensity at row " + std::to_string(i) +
               " (increase delta_clip)");
    }
    const double t1 = ds.treatment(i) == 1 ? 1.0 : 0.0;
    const double y1 = ds.outcome(i) == 1 ? 1.0 : 0.0;
    const double h1 = (t1 / p * y1 - center.theta1) - op.theta1[i] / p * (t1 - p);
    const double h0 =
        ((1.0 - t1) / q * y1 - center.theta0) - op.theta0[i] / q * ((1.0 - t1) - q);
    const double d = h1 - h0;
    acc += d * d;
  }
  return acc / static_cast<double>(ds.n());
}

namespace {

ArmPsSummary arm_summary(const Dataset& ds, const PsVector& ps, int arm) {
  std::vector<double> values;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (ds.treatment(i) == arm) values.push_back(ps.p1[i]);
  }
  ArmPsSummary s;
  if (values.empty()) return s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.median = median(values);
  return s;
}

}  // namespace

AteReport ate_test(const Dataset& ds, const PsVector& ps, double alpha,
                   Estimator estimator, const OutcomeProbs& op, Centering centering) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorCode::InvalidArgument, "alpha must be in (0,1)");
  }
  AteReport r;
  r.theta_h = theta_hajek(ds, ps);
  r.theta_ht = theta_ht(ds, ps);
  r.delta_h = r.theta_h.delta();
  r.delta_ht = r.theta_ht.delta();
  r.estimator = estimator;
  r.d_n = estimator == Estimator::Hajek ? r.delta_h : r.delta_ht;
  const ThetaPair& center = centering == Centering::Hajek ? r.theta_h : r.theta_ht;
  r.sigma2 = sigma2_hat(ds, ps, op, center);
  r.alpha = alpha;
  r.n = ds.n();
  const double sigma = std::sqrt(r.sigma2);
  const double root_n = std::sqrt(static_cast<double>(ds.n()));
  const double half_width = z_two_sided(alpha) * sigma / root_n;
  r.ci_lo = r.d_n - half_width;
  r.ci_hi = r.d_n + half_width;
  r.reject = (r.ci_lo > 0.0) || (r.ci_hi < 0.0);
  if (sigma > 0.0) {
    r.p_value = 2.0 * (1.0 - normal_cdf(root_n * std::abs(r.d_n) / sigma));
  } else {
    r.p_value = r.d_n == 0.0 ? 1.0 : 0.0;
  }
  r.clipped_rows = ps.clip_count();
  r.outcome_fallbacks = op.fallbacks;
  r.ps_treated = arm_summary(ds, ps, 1);
  r.ps_control = arm_summary(ds, ps, 0);
  return r;
}

nlohmann::ordered_json AteReport::to_json() const {
  nlohmann::ordered_json j;
  j["estimator"] = estimator_name(estimator);
  j["theta_hajek"] = {{"theta0", theta_h.theta0}, {"theta1", theta_h.theta1}};
  j["theta_horvitz_thompson"] = {{"theta0", theta_ht.theta0}, {"theta1", theta_ht.theta1}};
  j["delta_hajek"] = delta_h;
  j["delta_horvitz_thompson"] = delta_ht;
  j["d_n"] = d_n;
  j["sigma2"] = sigma2;
  j["ci"] = {ci_lo, ci_hi};
  j["p_value"] = p_value;
  j["reject"] = reject;
  j["alpha"] = alpha;
  j["n"] = n;
  j["clipped_rows"] = clipped_rows;
  j["outcome_fallbacks"] = outcome_fallbacks;
  auto arm_json = [](const ArmPsSummary& s) {
    return nlohmann::ordered_json{{"min", s.min}, {"median", s.median}, {"max", s.max}};
  };
  j["ps_summary"] = {{"treated", arm_json(ps_treated)}, {"control", arm_json(ps_control)}};
  return j;
}

JackknifeResult jackknife_variance(
    const Dataset& ds, const std::function<double(const Dataset&)>& delta_fn,
    int threads) {
  if (ds.n() < 3) fail(ErrorCode::InvalidArgument, "jackknife needs n >= 3");
  std::vector<double> values(ds.n(), 0.0);
  std::vector<char> keep(ds.n(), 0);
  parallel_for_index(ds.n(), threads, [&](std::size_t i) {
    try {
      values[i] = delta_fn(ds.drop_row(i));
      keep[i] = 1;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyArm) throw;
    }
  });
  JackknifeResult result;
  std::vector<double> replicates;
  replicates.reserve(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (keep[i]) {
      replicates.push_back(values[i]);
    } else {
      ++result.skipped;
    }
  }
  result.used = replicates.size();
  if (result.used < 2) {
    fail(ErrorCode::EmptyArm, "too few jackknife replicates survived");
  }
  const double m = static_cast<double>(result.used);
  const double mu = mean(replicates);
  double ss = 0.0;
  for (const double d : replicates) ss += (d - mu) * (d - mu);
  result.variance = (m - 1.0) / m * ss;
  return result;
}

double imbalance(const Dataset& ds, const PsVector& ps,
                 const std::function<double(std::size_t)>& f, int arm) {
  check_rows(ds, ps);
  if (arm != 0 && arm != 1) fail(ErrorCode::InvalidArgument, "arm must be 0 or 1");
  double weighted = 0.0;
  double raw = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double fi = f(i);
    if (!std::isfinite(fi)) {
      fail(ErrorCode::InvalidArgument, "f must be finite on all rows");
    }
    raw += fi;
    if (ds.treatment(i) == arm) weighted += fi * inverse_weight(ps, arm, i);
  }
  const double n = static_cast<double>(ds.n());
  return std::abs(weighted / n - raw / n);
}

}  // namespace bncausal
