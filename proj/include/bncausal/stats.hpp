#ifndef BNCAUSAL_STATS_HPP_
#define BNCAUSAL_STATS_HPP_

#include <cstddef>
#include <vector>

namespace bncausal {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile: normal_quantile(p) = Phi^{-1}(p), p in (0, 1).
// Acklam's rational approximation polished with one Halley step; absolute
// error below 1e-13 over the open interval.
double normal_quantile(double p);

// Upper z-value used for two-sided intervals: z_{alpha/2} = Phi^{-1}(1 - alpha/2).
double z_two_sided(double alpha);

double mean(const std::vector<double>& xs);

// Median with the usual midpoint convention for even sizes. Copies its input.
double median(std::vector<double> xs);

// Slope of the least-squares line through (x_i, y_i).
double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys);

// Kolmogorov-Smirnov distance between the sample and the standard normal.
double ks_distance_normal(std::vector<double> xs);

}  // namespace bncausal

#endif  // BNCAUSAL_STATS_HPP_
