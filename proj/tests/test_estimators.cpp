#include <doctest.h>

#include <cmath>
#include <map>

#include "bncausal/errors.hpp"
#include "bncausal/estimators.hpp"
#include "bncausal/misspec.hpp"
#include "bncausal/rng.hpp"
#include "bncausal/stats.hpp"
#include "oracles.hpp"

using namespace bncausal;

namespace {

// Hajek estimate recomputed from first principles with map-based strata.
ThetaPair hajek_by_hand(const Dataset& ds) {
  std::map<std::vector<int>, std::pair<double, double>> strata;  // treated, total
  for (std::size_t i = 0; i < ds.n(); ++i) {
    std::vector<int> key;
    for (int l = 0; l < ds.num_covariates(); ++l) key.push_back(ds.covariate_code(l, i));
    strata[key].first += ds.treatment(i) == 1 ? 1.0 : 0.0;
    strata[key].second += 1.0;
  }
  ThetaPair out;
  for (const int arm : {0, 1}) {
    double wsum = 0.0;
    double wones = 0.0;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (ds.treatment(i) != arm) continue;
      std::vector<int> key;
      for (int l = 0; l < ds.num_covariates(); ++l) key.push_back(ds.covariate_code(l, i));
      const auto& [treated, total] = strata.at(key);
      const double p1 = treated / total;
      const double w = 1.0 / (arm == 1 ? p1 : 1.0 - p1);
      wsum += w;
      if (ds.outcome(i) == 1) wones += w;
    }
    (arm == 1 ? out.theta1 : out.theta0) = wones / wsum;
  }
  return out;
}

Dataset two_row_dataset(Level y0, Level y1) {
  VariableMeta t{"T", 2, {"0", "1"}};
  VariableMeta y{"Y", 2, {"0", "1"}};
  VariableMeta x{"X", 2, {"1", "2"}};
  return Dataset(t, {1, 0}, y, {y1, y0}, {x}, {{0, 0}});
}

}  // namespace

TEST_CASE("worked example: saturated propensities") {
  const Dataset ds = oracles::worked_dataset();
  const PsVector ps = saturated_ps(ds);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double expect = ds.covariate_code(0, i) == 1 ? 2.0 / 3.0 : 1.0 / 3.0;
    CHECK(ps.p1[i] == doctest::Approx(expect).epsilon(1e-15));
  }
  CHECK(ps.clip_count() == 0);

  // Same values through the model route with a saturated net.
  const ColumnTable t = ps_table(ds);
  Dag dag(t.meta);
  dag.add_arc(1, 0);
  const BayesNet bn = BayesNet::fit_mle(dag, t);
  const PsVector ps2 = propensity_scores(bn, ds, 0.0);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    CHECK(ps2.p1[i] == doctest::Approx(ps.p1[i]).epsilon(1e-12));
  }
}

TEST_CASE("disconnected treatment gives the marginal share everywhere") {
  const Dataset ds = oracles::worked_dataset();
  const ColumnTable t = ps_table(ds);
  const BayesNet bn = BayesNet::fit_mle(Dag(t.meta), t);
  const PsVector ps = propensity_scores(bn, ds, 0.0);
  for (std::size_t i = 0; i < ds.n(); ++i) CHECK(ps.p1[i] == doctest::Approx(0.5));
}

TEST_CASE("clipping flags out-of-band propensities") {
  // One stratum fully treated: saturated share 1.0 clips to 0.95.
  VariableMeta t{"T", 2, {"0", "1"}};
  VariableMeta y{"Y", 2, {"0", "1"}};
  VariableMeta x{"X", 2, {"1", "2"}};
  const Dataset ds(t, {1, 0, 1, 1, 1}, y, {1, 0, 0, 1, 1}, {x}, {{0, 0, 1, 1, 1}});
  const PsVector ps = saturated_ps(ds, 0.05);
  CHECK(ps.p1[2] == doctest::Approx(0.95));
  CHECK(ps.clipped[2] == 1);
  CHECK(ps.clipped[0] == 0);
  CHECK(ps.clip_count() == 3);
}

TEST_CASE("worked example: point estimates") {
  const Dataset ds = oracles::worked_dataset();
  const PsVector ps = saturated_ps(ds);
  const ThetaPair h = theta_hajek(ds, ps);
  const ThetaPair ht = theta_ht(ds, ps);
  CHECK(h.theta1 == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(h.theta0 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ht.theta1 == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(ht.theta0 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(h.delta() == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("constant propensity reduces the hajek estimate to raw arm means") {
  Rng rng(19);
  const Dataset ds = oracles::random_positive_dataset(rng, 30, 2);
  const PsVector ps = make_ps_vector(std::vector<double>(ds.n(), 0.37), 0.0);
  const ThetaPair h = theta_hajek(ds, ps);
  double ones[2] = {0, 0};
  double count[2] = {0, 0};
  for (std::size_t i = 0; i < ds.n(); ++i) {
    count[ds.treatment(i)] += 1;
    ones[ds.treatment(i)] += ds.outcome(i);
  }
  CHECK(h.theta0 == doctest::Approx(ones[0] / count[0]).epsilon(1e-12));
  CHECK(h.theta1 == doctest::Approx(ones[1] / count[1]).epsilon(1e-12));
}

TEST_CASE("all-ones outcomes push hajek to exactly one in both arms") {
  VariableMeta t{"T", 2, {"0", "1"}};
  VariableMeta y{"Y", 2, {"0", "1"}};
  VariableMeta x{"X", 2, {"1", "2"}};
  const Dataset ds(t, {1, 0, 1, 0}, y, {1, 1, 1, 1}, {x}, {{0, 0, 1, 1}});
  const PsVector ps = make_ps_vector({0.3, 0.6, 0.8, 0.2}, 0.0);
  const ThetaPair h = theta_hajek(ds, ps);
  CHECK(h.theta0 == 1.0);
  CHECK(h.theta1 == 1.0);
}

TEST_CASE("horvitz-thompson arithmetic and unboundedness") {
  VariableMeta t{"T", 2, {"0", "1"}};
  VariableMeta y{"Y", 2, {"0", "1"}};
  VariableMeta x{"X", 2, {"1", "2"}};
  SUBCASE("four rows at the true half propensity") {
    const Dataset ds(t, {1, 1, 0, 0}, y, {1, 0, 1, 0}, {x}, {{0, 0, 0, 0}});
    const PsVector ps = make_ps_vector(std::vector<double>(4, 0.5), 0.0);
    const ThetaPair ht = theta_ht(ds, ps);
    CHECK(ht.theta1 == doctest::Approx(0.5));
    CHECK(ht.theta0 == doctest::Approx(0.5));
  }
  SUBCASE("a single low-propensity treated success exceeds one") {
    const Dataset ds(t, {1, 0, 0, 0}, y, {1, 0, 0, 0}, {x}, {{0, 0, 0, 0}});
    const PsVector ps = make_ps_vector({0.1, 0.1, 0.1, 0.1}, 0.0);
    const ThetaPair ht = theta_ht(ds, ps);
    CHECK(ht.theta1 == doctest::Approx(2.5));
    CHECK(theta_hajek(ds, ps).theta1 <= 1.0);
  }
}

TEST_CASE("hajek equals horvitz-thompson under saturated propensities") {
  Rng rng(101);
  for (int rep = 0; rep < 40; ++rep) {
    const Dataset ds = oracles::random_positive_dataset(rng, 10 + rep, 1 + rep % 3);
    const PsVector ps = saturated_ps(ds);
    const ThetaPair h = theta_hajek(ds, ps);
    const ThetaPair ht = theta_ht(ds, ps);
    CHECK(h.theta0 == doctest::Approx(ht.theta0).epsilon(1e-12));
    CHECK(h.theta1 == doctest::Approx(ht.theta1).epsilon(1e-12));
    CHECK(h.theta0 >= 0.0);
    CHECK(h.theta1 <= 1.0);
    // Cross-check against the map-based reference.
    const ThetaPair ref = hajek_by_hand(ds);
    CHECK(h.theta0 == doctest::Approx(ref.theta0).epsilon(1e-12));
    CHECK(h.theta1 == doctest::Approx(ref.theta1).epsilon(1e-12));
  }
}

TEST_CASE("worked example: saturated outcome probabilities") {
  const Dataset ds = oracles::worked_dataset();
  OutcomeOptions oo;
  oo.method = OutcomeMethod::Saturated;
  const OutcomeProbs op = outcome_probs(ds, oo);
  CHECK(op.fallbacks == 0);
  // Hand counts: theta1(x=1)=1/2, theta1(x=2)=1, theta0(x=1)=1, theta0(x=2)=0.
  CHECK(op.theta1[0] == doctest::Approx(0.5));
  CHECK(op.theta1[3] == doctest::Approx(1.0));
  CHECK(op.theta0[0] == doctest::Approx(1.0));
  CHECK(op.theta0[4] == doctest::Approx(0.0));
}

TEST_CASE("outcome model with disconnected outcome is the marginal share") {
  const Dataset ds = oracles::worked_dataset();
  OutcomeOptions oo;
  oo.method = OutcomeMethod::Bn;
  // Forbid everything touching Y (node 0 of [Y,T,X]).
  for (int v = 1; v < 3; ++v) {
    oo.tabu.forbidden_arcs.push_back({0, v});
    oo.tabu.forbidden_arcs.push_back({v, 0});
  }
  const OutcomeProbs op = outcome_probs(ds, oo);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    CHECK(op.theta0[i] == doctest::Approx(0.5));
    CHECK(op.theta1[i] == doctest::Approx(0.5));
  }
}

TEST_CASE("saturated and model-based outcome probabilities agree at scale") {
  // Data from a dense ground truth; both estimators converge to it.
  std::vector<VariableMeta> cov{{"X1", 2, {"1", "2"}}, {"X2", 2, {"1", "2"}}};
  const DiscreteDgp dgp(cov, {0.3, 0.2, 0.25, 0.25}, {0.4, 0.6, 0.3, 0.7},
                        {0.2, 0.5, 0.4, 0.3}, {0.6, 0.7, 0.5, 0.8});
  const Dataset ds = dgp.sample(20000, 909);
  OutcomeOptions sat;
  sat.method = OutcomeMethod::Saturated;
  OutcomeOptions bn;
  bn.method = OutcomeMethod::Bn;
  const OutcomeProbs a = outcome_probs(ds, sat);
  const OutcomeProbs b = outcome_probs(ds, bn);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    max_diff = std::max(max_diff, std::abs(a.theta1[i] - b.theta1[i]));
    max_diff = std::max(max_diff, std::abs(a.theta0[i] - b.theta0[i]));
  }
  CHECK(max_diff < 0.05);
}

TEST_CASE("worked example: variance plug-in") {
  const Dataset ds = oracles::worked_dataset();
  const PsVector ps = saturated_ps(ds);
  OutcomeOptions oo;
  oo.method = OutcomeMethod::Saturated;
  const OutcomeProbs op = outcome_probs(ds, oo);
  const ThetaPair h = theta_hajek(ds, ps);
  CHECK(sigma2_hat(ds, ps, op, h) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("variance is the squared value when all influence terms coincide") {
  const Dataset ds = two_row_dataset(0, 1);  // (Y=1,T=1), (Y=0,T=0)
  const PsVector ps = saturated_ps(ds);
  OutcomeOptions oo;
  oo.method = OutcomeMethod::Saturated;
  const OutcomeProbs op = outcome_probs(ds, oo);
  const ThetaPair h = theta_hajek(ds, ps);
  // Every d_i is 0 here, so sigma2 = 0 exactly.
  CHECK(sigma2_hat(ds, ps, op, h) == 0.0);
}

TEST_CASE("sigma2 is invariant to row permutations") {
  Rng rng(113);
  const Dataset ds = oracles::random_positive_dataset(rng, 25, 2);
  const PsVector ps = saturated_ps(ds);
  OutcomeOptions oo;
  oo.method = OutcomeMethod::Saturated;
  const OutcomeProbs op = outcome_probs(ds, oo);
  const ThetaPair h = theta_hajek(ds, ps);
  const double base = sigma2_hat(ds, ps, op, h);

  // Rebuild with rows reversed.
  std::vector<Level> t_col, y_col, x1, x2;
  for (std::size_t i = ds.n(); i-- > 0;) {
    t_col.push_back(static_cast<Level>(ds.treatment(i)));
    y_col.push_back(static_cast<Level>(ds.outcome(i)));
    x1.push_back(ds.covariate_level(0, i));
    x2.push_back(ds.covariate_level(1, i));
  }
  const Dataset rev(ds.treatment_meta(), t_col, ds.outcome_meta(), y_col,
                    ds.covariate_metas(), {x1, x2});
  const PsVector ps2 = saturated_ps(rev);
  const OutcomeProbs op2 = outcome_probs(rev, oo);
  const ThetaPair h2 = theta_hajek(rev, ps2);
  CHECK(sigma2_hat(rev, ps2, op2, h2) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("worked example: full test report") {
  const Dataset ds = oracles::worked_dataset();
  const PsVector ps = saturated_ps(ds);
  OutcomeOptions oo;
  oo.method = OutcomeMethod::Saturated;
  const OutcomeProbs op = outcome_probs(ds, oo);
  const AteReport r = ate_test(ds, ps, 0.05, Estimator::Hajek, op);
  CHECK(r.d_n == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r.sigma2 == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r.ci_lo == doctest::Approx(-0.442951).epsilon(1e-3));
  CHECK(r.ci_hi == doctest::Approx(0.942951).epsilon(1e-3));
  CHECK(r.p_value == doctest::Approx(0.4795).epsilon(1e-2));
  CHECK_FALSE(r.reject);
  CHECK(r.theta_ht.theta1 == doctest::Approx(0.75));
  // Coherence between the interval and the p-value at the same level.
  CHECK(r.reject == (r.p_value < r.alpha));
}

TEST_CASE("degenerate variance boundary conventions") {
  SUBCASE("sigma 0 with zero effect: unit p-value, point interval") {
    const Dataset ds = two_row_dataset(1, 1);  // all outcomes 1
    const PsVector ps = saturated_ps(ds);
    OutcomeOptions oo;
    oo.method = OutcomeMethod::Saturated;
    const AteReport r = ate_test(ds, ps, 0.05, Estimator::Hajek, outcome_probs(ds, oo));
    CHECK(r.sigma2 == 0.0);
    CHECK(r.d_n == 0.0);
    CHECK(r.ci_lo == 0.0);
    CHECK(r.ci_hi == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK_FALSE(r.reject);
  }
  SUBCASE("sigma 0 with nonzero effect rejects with zero p-value") {
    const Dataset ds = two_row_dataset(0, 1);
    const PsVector ps = saturated_ps(ds);
    OutcomeOptions oo;
    oo.method = OutcomeMethod::Saturated;
    const AteReport r = ate_test(ds, ps, 0.05, Estimator::Hajek, outcome_probs(ds, oo));
    CHECK(r.sigma2 == 0.0);
    CHECK(r.d_n == 1.0);
    CHECK(r.reject);
    CHECK(r.p_value == 0.0);
  }
}

TEST_CASE("interval width formula") {
  // d = 0.094, sigma = 1, n = 100: half width is 1.959964 / 10.
  CHECK(z_two_sided(0.05) == doctest::Approx(1.959964).epsilon(1e-6));
  const double half = z_two_sided(0.05) * 1.0 / std::sqrt(100.0);
  CHECK(half == doctest::Approx(0.196).epsilon(1e-3));
  CHECK(0.094 - half == doctest::Approx(-0.102).epsilon(1e-3));
}

TEST_CASE("normalized test statistic is approximately standard normal under the null") {
  // No covariate effect and no treatment effect.
  std::vector<VariableMeta> cov{{"X1", 2, {"1", "2"}}};
  const DiscreteDgp dgp(cov, {0.5, 0.5}, {0.5, 0.5}, {0.4, 0.4}, {0.4, 0.4});
  std::vector<double> zs;
  for (std::size_t run = 0; run < 200; ++run) {
    const Dataset ds = dgp.sample(500, derive_run_seed(512, run));
    const PsVector ps = saturated_ps(ds);
    OutcomeOptions oo;
    oo.method = OutcomeMethod::Saturated;
    const AteReport r = ate_test(ds, ps, 0.05, Estimator::Hajek, outcome_probs(ds, oo));
    zs.push_back(std::sqrt(500.0) * r.d_n / std::sqrt(r.sigma2));
    CHECK(r.reject == (r.p_value < r.alpha));
  }
  // KS critical value at the 1% level for 200 draws is about 0.115.
  CHECK(ks_distance_normal(zs) < 0.115);
}

TEST_CASE("jackknife: identical replicates give zero variance") {
  const Dataset ds = oracles::worked_dataset();
  const JackknifeResult r = jackknife_variance(ds, [](const Dataset&) { return 0.42; });
  CHECK(r.variance == 0.0);
  CHECK(r.used == 6);
  CHECK(r.skipped == 0);
}

TEST_CASE("jackknife on the worked example matches direct enumeration") {
  const Dataset ds = oracles::worked_dataset();
  auto delta_fn = [](const Dataset& sub) {
    return theta_hajek(sub, saturated_ps(sub)).delta();
  };
  const JackknifeResult r = jackknife_variance(ds, delta_fn);

  // Reference: recompute the six leave-one-out deltas by hand.
  std::vector<double> deltas;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    deltas.push_back(hajek_by_hand(ds.drop_row(i)).delta());
  }
  const double mu = mean(deltas);
  double ss = 0.0;
  for (const double d : deltas) ss += (d - mu) * (d - mu);
  const double expect = (deltas.size() - 1.0) / deltas.size() * ss;
  CHECK(r.used == 6);
  CHECK(r.variance == doctest::Approx(expect).epsilon(1e-12));

  // Concurrent replicates change nothing.
  const JackknifeResult r4 = jackknife_variance(ds, delta_fn, 4);
  CHECK(r4.variance == r.variance);
  CHECK(r4.used == r.used);
}

TEST_CASE("jackknife skips replicates that lose an arm") {
  // Only one control row: dropping it empties the arm.
  VariableMeta t{"T", 2, {"0", "1"}};
  VariableMeta y{"Y", 2, {"0", "1"}};
  VariableMeta x{"X", 2, {"1", "2"}};
  const Dataset ds(t, {1, 1, 1, 0}, y, {1, 0, 1, 0}, {x}, {{0, 0, 1, 1}});
  const JackknifeResult r = jackknife_variance(ds, [](const Dataset& sub) {
    return theta_hajek(sub, make_ps_vector(std::vector<double>(sub.n(), 0.5), 0.0)).delta();
  });
  CHECK(r.skipped == 1);
  CHECK(r.used == 3);
}

TEST_CASE("scaled jackknife agrees with the variance plug-in at moderate n") {
  std::vector<VariableMeta> cov{{"X1", 2, {"1", "2"}}};
  const DiscreteDgp dgp(cov, {0.5, 0.5}, {0.35, 0.65}, {0.3, 0.5}, {0.55, 0.75});
  const std::size_t n = 600;
  const Dataset ds = dgp.sample(n, 2024);
  const PsVector ps = saturated_ps(ds);
  OutcomeOptions oo;
  oo.method = OutcomeMethod::Saturated;
  const AteReport r = ate_test(ds, ps, 0.05, Estimator::Hajek, outcome_probs(ds, oo));
  const JackknifeResult jk = jackknife_variance(ds, [](const Dataset& sub) {
    return theta_hajek(sub, saturated_ps(sub)).delta();
  });
  CHECK(jk.variance * static_cast<double>(n) ==
        doctest::Approx(r.sigma2).epsilon(0.15));
}

TEST_CASE("imbalance identities") {
  SUBCASE("saturated propensities balance any function exactly") {
    Rng rng(131);
    for (int rep = 0; rep < 20; ++rep) {
      const Dataset ds = oracles::random_positive_dataset(rng, 15 + rep, 2);
      const PsVector ps = saturated_ps(ds);
      auto f = [&](std::size_t i) {
        return 0.5 * ds.covariate_code(0, i) - 1.3 * ds.covariate_code(1, i);
      };
      CHECK(imbalance(ds, ps, f, 1) <= 1e-12);
      CHECK(imbalance(ds, ps, f, 0) <= 1e-12);
    }
  }
  SUBCASE("constant half propensity with three of four treated") {
    VariableMeta t{"T", 2, {"0", "1"}};
    VariableMeta y{"Y", 2, {"0", "1"}};
    VariableMeta x{"X", 2, {"1", "2"}};
    const Dataset ds(t, {1, 1, 1, 0}, y, {0, 0, 0, 0}, {x}, {{0, 0, 1, 1}});
    const PsVector ps = make_ps_vector(std::vector<double>(4, 0.5), 0.0);
    CHECK(imbalance(ds, ps, [](std::size_t) { return 1.0; }, 1) ==
          doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("imbalance shrinks roughly like root n") {
  // Uses the exact (fixed, consistent) propensity: the saturated fit would
  // telescope to zero identically.
  std::vector<VariableMeta> cov{{"X1", 2, {"1", "2"}}};
  const DiscreteDgp dgp(cov, {0.5, 0.5}, {0.35, 0.65}, {0.3, 0.3}, {0.3, 0.3});
  std::vector<double> medians;
  const std::vector<std::size_t> sizes{400, 1600, 6400};
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    std::vector<double> vals;
    for (std::size_t run = 0; run < 60; ++run) {
      const Dataset ds = dgp.sample(sizes[g], derive_run_seed(77, g * 100 + run));
      std::vector<double> p1(ds.n());
      for (std::size_t i = 0; i < ds.n(); ++i) {
        p1[i] = dgp.ps1(ds.covariate_level(0, i));
      }
      const PsVector ps = make_ps_vector(std::move(p1), 0.0);
      vals.push_back(
          imbalance(ds, ps, [&](std::size_t i) { return ds.covariate_code(0, i) == 2; }, 1));
    }
    medians.push_back(median(vals));
  }
  CHECK(medians[0] > medians[1]);
  CHECK(medians[1] > medians[2]);
}

TEST_CASE("inverse-probability weight sums concentrate at one") {
  std::vector<VariableMeta> cov{{"X1", 2, {"1", "2"}}};
  const DiscreteDgp dgp(cov, {0.45, 0.55}, {0.3, 0.7}, {0.4, 0.4}, {0.5, 0.5});
  std::vector<double> mads;
  for (const std::size_t n : {300u, 3000u}) {
    std::vector<double> devs;
    for (std::size_t run = 0; run < 50; ++run) {
      const Dataset ds = dgp.sample(n, derive_run_seed(303, n + run));
      std::vector<double> p1(ds.n());
      for (std::size_t i = 0; i < ds.n(); ++i) p1[i] = dgp.ps1(ds.covariate_level(0, i));
      const PsVector ps = make_ps_vector(std::move(p1), 0.0);
      for (const int arm : {0, 1}) {
        double wsum = 0.0;
        for (std::size_t i = 0; i < ds.n(); ++i) {
          if (ds.treatment(i) == arm) wsum += 1.0 / ps.p_arm(arm, i);
        }
        devs.push_back(std::abs(wsum / static_cast<double>(ds.n()) - 1.0));
      }
    }
    mads.push_back(median(devs));
  }
  CHECK(mads[0] < 0.2);
  CHECK(mads[1] < mads[0]);
}

TEST_CASE("empty arm surfaces as the dedicated error") {
  const Dataset ds = oracles::worked_dataset();
  const PsVector short_ps = make_ps_vector(std::vector<double>(3, 0.5), 0.0);
  CHECK_THROWS_AS((void)theta_hajek(ds, short_ps), Error);
  try {
    VariableMeta t{"T", 2, {"0", "1"}};
    VariableMeta y{"Y", 2, {"0", "1"}};
    VariableMeta x{"X", 2, {"1", "2"}};
    const Dataset bad(t, {1, 1}, y, {1, 0}, {x}, {{0, 1}});
    FAIL("construction should have thrown");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyArm);
  }
}
