#include "disclosure/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "disclosure/types.hpp"

namespace disclosure {

// ===========================================================================
// special functions
// ===========================================================================

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p outside (0,1)");

  // Acklam 2003 coefficients.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;

  double q, r, x;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    q = p - 0.5;
    r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // one Halley refinement step
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

namespace {

// Lentz's algorithm for the incomplete-beta continued fraction.
double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  const double eps = 1e-15;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) to stay where the
  // continued fraction converges fast
  const bool flip = x >= (a + 1.0) / (a + b + 2.0);
  if (flip) {
    std::swap(a, b);
    x = 1.0 - x;
  }
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double direct = std::exp(ln_front) * beta_cf(a, b, x) / a;
  return flip ? 1.0 - direct : direct;
}

double student_t_p_two_sided(double t, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("student_t_p_two_sided: nu must be positive");
  if (!std::isfinite(t)) return 0.0;
  const double x = nu / (nu + t * t);
  return incomplete_beta(nu / 2.0, 0.5, x);
}

namespace {

// Regularized lower incomplete gamma P(a, x) by series (x < a+1) or the
// continued fraction for Q (otherwise).
double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  const double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
  return 1.0 - q;
}

}  // namespace

double chi_squared_survival(double x, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("chi_squared_survival: k must be positive");
  if (x <= 0.0) return 1.0;
  return 1.0 - gamma_p(k / 2.0, x / 2.0);
}

// ===========================================================================
// fits and summaries
// ===========================================================================

LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_linear: size mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("fit_linear: need at least 3 points");

  KahanSum sx, sy;
  for (std::size_t i = 0; i < n; ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / double(n);
  const double my = sy.value() / double(n);

  KahanSum sxx, sxy;
  for (std::size_t i = 0; i < n; ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
  }
  if (sxx.value() <= 0.0) throw std::invalid_argument("fit_linear: constant regressor");

  LinearFit fit;
  fit.n = n;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;

  fit.residuals.resize(n);
  KahanSum rss, tss;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.residuals[i] = r;
    rss.add(r * r);
    tss.add((y[i] - my) * (y[i] - my));
  }
  fit.rss = rss.value();
  fit.tss = tss.value();
  fit.r_squared = fit.tss > 0.0 ? 1.0 - fit.rss / fit.tss : 0.0;
  fit.r_squared_adj = 1.0 - (1.0 - fit.r_squared) * double(n - 1) / double(n - 2);

  const double sigma2 = fit.rss / double(n - 2);
  fit.slope_se = std::sqrt(sigma2 / sxx.value());
  fit.intercept_se = std::sqrt(sigma2 * (1.0 / double(n) + mx * mx / sxx.value()));
  const double nu = double(n - 2);
  fit.slope_t = fit.slope_se > 0.0 ? fit.slope / fit.slope_se : 0.0;
  fit.intercept_t = fit.intercept_se > 0.0 ? fit.intercept / fit.intercept_se : 0.0;
  fit.slope_p = fit.slope_se > 0.0 ? student_t_p_two_sided(fit.slope_t, nu) : 1.0;
  fit.intercept_p = fit.intercept_se > 0.0 ? student_t_p_two_sided(fit.intercept_t, nu) : 1.0;
  return fit;
}

double aic_gaussian(double rss, std::size_t n, std::size_t k) {
  if (n == 0 || rss < 0.0)
    throw std::invalid_argument("aic_gaussian: need n > 0 and rss >= 0");
  const double dn = double(n);
  // a perfect fit has unbounded likelihood; -inf is the limiting value and
  // wins every comparison, which is the right call
  if (rss == 0.0) return -std::numeric_limits<double>::infinity();
  return 2.0 * double(k) + dn * std::log(rss / dn) + dn * (std::log(2.0 * M_PI) + 1.0);
}

MomentSummary moment_summary(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("moment_summary: empty sample");
  MomentSummary s;
  s.n = v.size();
  KahanSum sum;
  for (double t : v) sum.add(t);
  s.mean = sum.value() / double(s.n);
  KahanSum m2, m3, m4;
  for (double t : v) {
    const double d = t - s.mean;
    m2.add(d * d);
    m3.add(d * d * d);
    m4.add(d * d * d * d);
  }
  s.variance = m2.value() / double(s.n);
  if (s.variance > 0.0) {
    const double sd = std::sqrt(s.variance);
    s.skewness = m3.value() / double(s.n) / (sd * sd * sd);
    s.kurtosis = m4.value() / double(s.n) / (s.variance * s.variance);
  } else {
    s.kurtosis = 3.0;
  }
  return s;
}

JarqueBera jarque_bera(std::span<const double> v) {
  const auto m = moment_summary(v);
  JarqueBera jb;
  jb.skewness = m.skewness;
  jb.kurtosis = m.kurtosis;
  jb.statistic = double(m.n) *
                 (m.skewness * m.skewness / 6.0 +
                  (m.kurtosis - 3.0) * (m.kurtosis - 3.0) / 24.0);
  jb.p_value = chi_squared_survival(jb.statistic, 2.0);
  return jb;
}

std::vector<HistogramBin> histogram(std::span<const double> v, std::size_t bins) {
  if (v.empty() || bins == 0) throw std::invalid_argument("histogram: empty input");
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi <= lo) hi = lo + 1.0;  // all-equal sample: one synthetic unit-width span
  const double width = (hi - lo) / double(bins);
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].left = lo + width * double(b);
    out[b].right = b + 1 == bins ? hi : lo + width * double(b + 1);
  }
  for (double t : v) {
    auto idx = std::size_t((t - lo) / width);
    if (idx >= bins) idx = bins - 1;
    ++out[idx].count;
  }
  return out;
}

}  // namespace disclosure
