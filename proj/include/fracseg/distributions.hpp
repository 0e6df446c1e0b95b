#pragma once

#include <functional>
#include <span>

namespace fracseg {

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

double chi2_cdf(double x, double df);
/// Upper tail P(X > x).
double chi2_sf(double x, double df);
double chi2_quantile(double p, double df);

double normal_cdf(double x);
/// Inverse standard normal CDF, accurate to about 1e-15 after refinement.
double normal_quantile(double p);

/// Kolmogorov-Smirnov distance between the empirical CDF of a sample and cdf.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);
/// Asymptotic p-value with the Stephens small-sample correction.
double ks_pvalue(double d, std::size_t n);

}  // namespace fracseg
