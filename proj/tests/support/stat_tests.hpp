#pragma once

// Statistical goodness-of-fit helpers for the test suites: chi-square and
// Kolmogorov-Smirnov p-values. Self-contained on purpose; nothing here may
// call into the library under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace testsupport {

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x),
// series for x < a+1, continued fraction otherwise.
inline double gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  double b = x + 1.0 - a;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

inline double chisq_pvalue(double stat, int dof) {
  if (dof < 1) throw std::invalid_argument("chisq_pvalue: need dof >= 1");
  return gamma_q(dof / 2.0, stat / 2.0);
}

// Chi-square goodness of fit of observed counts against expected
// probabilities. Cells with expected count below `pool_min` are pooled into
// one remainder cell. Returns the p-value.
inline double chisq_gof_pvalue(std::span<const long> counts, std::span<const double> probs,
                               double pool_min = 5.0) {
  if (counts.size() != probs.size()) throw std::invalid_argument("chisq_gof: size mismatch");
  long total = 0;
  for (long c : counts) total += c;
  double stat = 0.0;
  int cells = 0;
  double pooled_obs = 0.0, pooled_exp = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expect = probs[i] * total;
    if (expect < pool_min) {
      pooled_obs += counts[i];
      pooled_exp += expect;
      continue;
    }
    const double d = counts[i] - expect;
    stat += d * d / expect;
    ++cells;
  }
  if (pooled_exp >= pool_min && pooled_exp > 0.0) {
    const double d = pooled_obs - pooled_exp;
    stat += d * d / pooled_exp;
    ++cells;
  }
  if (cells < 2) throw std::invalid_argument("chisq_gof: too few usable cells");
  return chisq_pvalue(stat, cells - 1);
}

// Asymptotic Kolmogorov distribution tail.
inline double kolmogorov_q(double lambda) {
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * std::pow(-1.0, j - 1) * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

// One-sample KS test p-value of samples against a continuous CDF.
inline double ks_pvalue(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 10) throw std::invalid_argument("ks_pvalue: too few samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - i / n));
    d = std::max(d, std::abs((i + 1) / n - f));
  }
  const double sn = std::sqrt(n);
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace testsupport
