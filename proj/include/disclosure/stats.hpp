#pragma once

// Small statistics toolkit: simple/multiple-free OLS on one regressor,
// Gaussian AIC, moment-based normality diagnostics, and the handful of
// special functions those need. Self-contained on purpose.

#include <cstddef>
#include <span>
#include <vector>

namespace disclosure {

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_se = 0.0;
  double slope_se = 0.0;
  double intercept_t = 0.0;
  double slope_t = 0.0;
  double intercept_p = 1.0;  // two-sided, against 0
  double slope_p = 1.0;
  double rss = 0.0;
  double tss = 0.0;
  double r_squared = 0.0;
  double r_squared_adj = 0.0;
  std::size_t n = 0;
  std::vector<double> residuals;
};

// OLS of y on (1, x). Throws std::invalid_argument on size mismatch,
// n < 3, or a degenerate (constant) regressor.
LinearFit fit_linear(std::span<const double> x, std::span<const double> y);

// Gaussian log-likelihood AIC with k estimated parameters
// (slope, intercept, sigma -> k = 3 for a simple regression).
double aic_gaussian(double rss, std::size_t n, std::size_t k);

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;  // population (1/n) variance
  double skewness = 0.0;
  double kurtosis = 0.0;  // raw, normal reference value 3
  std::size_t n = 0;
};

MomentSummary moment_summary(std::span<const double> v);

struct JarqueBera {
  double statistic = 0.0;
  double p_value = 1.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
};

JarqueBera jarque_bera(std::span<const double> v);

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
};

// Equal-width bins over [min, max]; right edge of the last bin inclusive.
std::vector<HistogramBin> histogram(std::span<const double> v, std::size_t bins);

// --- special functions -----------------------------------------------------

double normal_cdf(double z);
// Acklam's rational approximation, |error| < 1.2e-9 over (0, 1).
double normal_quantile(double p);
// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);
// Two-sided p-value for a t statistic with nu degrees of freedom.
double student_t_p_two_sided(double t, double nu);
// Upper tail of the chi-squared distribution.
double chi_squared_survival(double x, double k);

}  // namespace disclosure
