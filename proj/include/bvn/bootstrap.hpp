#pragma once

// Bias-corrected and accelerated percentile bootstrap for the mean, plus the
// standard-normal helpers it needs.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "bvn/rng.hpp"

namespace bvn {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// Inverse standard-normal CDF: rational initial guess (Acklam) polished with
// one Halley step against erfc, good to ~1e-15 on (0, 1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: need p in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

struct BcaResult {
  double lo = 0.0;
  double hi = 0.0;
  bool percentile_fallback = false;  // acceleration undefined, plain percentile used
};

// Equal-tail BCA interval for the mean of `samples` at confidence `level`.
// Degenerate input (all values equal) yields the point interval.
inline BcaResult bca_ci(std::span<const double> samples, double level, int n_boot, Rng& rng) {
  const int n = static_cast<int>(samples.size());
  if (n < 2) throw std::invalid_argument("bca_ci: need at least 2 samples");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("bca_ci: need level in (0,1)");
  if (n_boot < 100) throw std::invalid_argument("bca_ci: need n_boot >= 100");

  double total = 0.0;
  for (double x : samples) total += x;
  const double estimate = total / n;

  bool degenerate = true;
  for (double x : samples)
    if (x != samples[0]) {
      degenerate = false;
      break;
    }
  if (degenerate) return {estimate, estimate, false};

  std::vector<double> boot(n_boot);
  for (int b = 0; b < n_boot; ++b) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += samples[static_cast<std::size_t>(uniform01(rng) * n)];
    boot[b] = s / n;
  }
  std::sort(boot.begin(), boot.end());

  // Bias correction from the fraction of bootstrap means below the estimate,
  // kept off 0 and 1 so the quantile is finite.
  int below = 0;
  for (double b : boot) below += (b < estimate);
  double frac = static_cast<double>(below) / n_boot;
  frac = std::clamp(frac, 0.5 / n_boot, 1.0 - 0.5 / n_boot);
  const double z0 = normal_quantile(frac);

  // Acceleration from the jackknife skewness of the mean.
  double jk_mean = 0.0;
  std::vector<double> jk(n);
  for (int i = 0; i < n; ++i) {
    jk[i] = (total - samples[i]) / (n - 1);
    jk_mean += jk[i];
  }
  jk_mean /= n;
  double sq = 0.0, cu = 0.0;
  for (double v : jk) {
    const double d = jk_mean - v;
    sq += d * d;
    cu += d * d * d;
  }

  const double alpha = 1.0 - level;
  double lo_q = alpha / 2.0;
  double hi_q = 1.0 - alpha / 2.0;
  BcaResult out;
  if (sq <= 0.0) {
    out.percentile_fallback = true;
  } else {
    const double accel = cu / (6.0 * std::pow(sq, 1.5));
    auto adjust = [&](double q) {
      const double z = z0 + normal_quantile(q);
      return normal_cdf(z0 + z / (1.0 - accel * z));
    };
    lo_q = adjust(lo_q);
    hi_q = adjust(hi_q);
  }

  auto quantile = [&](double q) {
    const int idx = std::clamp(static_cast<int>(std::ceil(q * n_boot)) - 1, 0, n_boot - 1);
    return boot[idx];
  };
  out.lo = quantile(lo_q);
  out.hi = quantile(hi_q);
  return out;
}

}  // namespace bvn
