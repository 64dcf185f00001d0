#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bvn {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// log C(n,k) p^k (1-p)^(n-k). Out-of-range k has zero mass, not an error.
inline double binom_log_pmf(int k, int n, double p) {
  if (n < 0 || p < 0.0 || p > 1.0) throw std::invalid_argument("binom_log_pmf: need n >= 0 and p in [0,1]");
  if (k < 0 || k > n) return neg_inf;
  if (p == 0.0) return k == 0 ? 0.0 : neg_inf;
  if (p == 1.0) return k == n ? 0.0 : neg_inf;
  const double log_choose =
      std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return log_choose + k * std::log(p) + (n - k) * std::log1p(-p);
}

inline double binom_pmf(int k, int n, double p) { return std::exp(binom_log_pmf(k, n, p)); }

// Finite distribution on consecutive integers. Weights are linear,
// rescaled so the largest is 1; log_scale carries the true magnitude.
// Supports here are short (at most the vertex count), so convolution is the
// direct double sum of nonnegative terms.
class Pmf {
 public:
  Pmf() = default;
  Pmf(int offset, std::vector<double> weights, double log_scale = 0.0)
      : offset_(offset), w_(std::move(weights)), log_scale_(log_scale) {}

  static Pmf point_mass(int k) { return Pmf(k, {1.0}, 0.0); }

  static Pmf binomial(int n, double p) {
    if (n < 0 || p < 0.0 || p > 1.0) throw std::invalid_argument("Pmf::binomial: need n >= 0 and p in [0,1]");
    if (n == 0 || p == 0.0) return point_mass(0);
    if (p == 1.0) return point_mass(n);
    std::vector<double> logw(n + 1);
    double peak = neg_inf;
    for (int k = 0; k <= n; ++k) {
      logw[k] = binom_log_pmf(k, n, p);
      peak = std::max(peak, logw[k]);
    }
    std::vector<double> w(n + 1);
    for (int k = 0; k <= n; ++k) w[k] = std::exp(logw[k] - peak);
    return Pmf(0, std::move(w), peak);
  }

  bool empty() const { return w_.empty(); }
  int min_support() const { return offset_; }
  int max_support() const { return offset_ + static_cast<int>(w_.size()) - 1; }
  double log_scale() const { return log_scale_; }
  const std::vector<double>& weights() const { return w_; }

  double at(int k) const {
    const int i = k - offset_;
    if (i < 0 || i >= static_cast<int>(w_.size())) return 0.0;
    return w_[i] * std::exp(log_scale_);
  }

  double log_at(int k) const {
    const int i = k - offset_;
    if (i < 0 || i >= static_cast<int>(w_.size()) || w_[i] <= 0.0) return neg_inf;
    return std::log(w_[i]) + log_scale_;
  }

  double total_mass() const {
    double s = 0.0;
    for (double w : w_) s += w;
    return s * std::exp(log_scale_);
  }

  // Log-mass table over [0, max_support()], for cached lookups.
  // Requires min_support() >= 0, which holds for every distribution built here.
  std::vector<double> log_table() const {
    std::vector<double> t(static_cast<std::size_t>(max_support()) + 1, neg_inf);
    for (int k = offset_; k <= max_support(); ++k) t[k] = log_at(k);
    return t;
  }

 private:
  int offset_ = 0;
  std::vector<double> w_;
  double log_scale_ = 0.0;
};

inline Pmf convolve(const Pmf& g, const Pmf& h) {
  if (g.empty() || h.empty()) throw std::invalid_argument("convolve: empty operand");
  const auto& gw = g.weights();
  const auto& hw = h.weights();
  std::vector<double> out(gw.size() + hw.size() - 1, 0.0);
  for (std::size_t i = 0; i < gw.size(); ++i) {
    const double gi = gw[i];
    if (gi == 0.0) continue;
    for (std::size_t j = 0; j < hw.size(); ++j) out[i + j] += gi * hw[j];
  }
  double peak = 0.0;
  for (double v : out) peak = std::max(peak, v);
  double log_scale = g.log_scale() + h.log_scale();
  if (peak > 0.0) {
    for (double& v : out) v /= peak;
    log_scale += std::log(peak);
  }
  return Pmf(g.min_support() + h.min_support(), std::move(out), log_scale);
}

inline Pmf double_convolve(const Pmf& f, const Pmf& g, const Pmf& h) {
  return convolve(convolve(f, g), h);
}

}  // namespace bvn
