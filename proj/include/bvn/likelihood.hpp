#pragma once

// Joint mass functions of the (r, s) statistics for the three vertex roles
// (latent green, latent red, observed red), the prior stack on
// (p1, p2, q2, psi), the unnormalized posterior kernel, and the conditional
// inverse CDFs used as Metropolis proposals.
//
// Everything is evaluated in log space. The s-distributions are binomial
// convolutions on short supports; ConvCache memoizes them per (role, m, r)
// while the parameters are fixed, which is what makes a Gibbs sweep cheap.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "bvn/constants.hpp"
#include "bvn/graph.hpp"
#include "bvn/pmf.hpp"

namespace bvn {

// Beta hyperprior on psi, the prior red-probability of a latent vertex.
// The Dirichlet weights behind the (p1, p2, q2) prior are fixed to ones.
struct PriorConfig {
  double alpha = 2.0;
  double beta = 10.0;

  // Reserved: a prior that forbids "zero latent reds". Rejected by the
  // sampler; only the unrestricted Bernoulli prior is implemented.
  bool require_latent_red = false;

  void validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("prior: need alpha > 0 and beta > 0");
  }
};

namespace detail {

// Number of red edges among the r connected observed-red vertices, given the
// per-edge red probability ratio. A vertex with ratio denominator 0 can only
// arise on the support boundary, where no such edge exists.
inline Pmf red_among_connected(int r, double red_prob, double any_prob) {
  if (any_prob <= 0.0) return Pmf::point_mass(0);
  return Pmf::binomial(r, red_prob / any_prob);
}

}  // namespace detail

// s | r for a latent green vertex: red edges to the n - m' - 1 other
// non-observed vertices plus red edges among the r connected observed reds.
inline Pmf s_cond_green_pmf(int r, const ModelParams& pr, int n, int mprime) {
  return convolve(Pmf::binomial(n - mprime - 1, pr.p2),
                  detail::red_among_connected(r, pr.p2, pr.p1 + pr.p2));
}

// s | r for a latent red vertex when m vertices are red in total.
inline Pmf s_cond_latent_red_pmf(int r, int m, const ModelParams& pr, int n, int mprime) {
  if (m < mprime + 1) throw std::invalid_argument("latent red vertex requires m >= m' + 1");
  return double_convolve(Pmf::binomial(n - m, pr.p2), Pmf::binomial(m - mprime - 1, pr.q2),
                         detail::red_among_connected(r, pr.q2, pr.p1 + pr.q2));
}

// s | r for an observed red vertex when m vertices are red in total.
inline Pmf s_cond_observed_red_pmf(int r, int m, const ModelParams& pr, int n, int mprime) {
  if (m < mprime) throw std::invalid_argument("observed red vertex requires m >= m'");
  return double_convolve(Pmf::binomial(n - m, pr.p2), Pmf::binomial(m - mprime, pr.q2),
                         detail::red_among_connected(r, pr.q2, pr.p1 + pr.q2));
}

// log joint mass of (r, s) for a latent green vertex.
inline double log_pmf_green(VertexStats t, const ModelParams& pr, int n, int mprime) {
  const double lr = binom_log_pmf(t.r, mprime, pr.p1 + pr.p2);
  if (lr == neg_inf) return neg_inf;
  return s_cond_green_pmf(t.r, pr, n, mprime).log_at(t.s) + lr;
}

// log joint mass of (r, s) for a latent red vertex.
inline double log_pmf_latent_red(VertexStats t, int m, const ModelParams& pr, int n, int mprime) {
  const double lr = binom_log_pmf(t.r, mprime, pr.p1 + pr.q2);
  if (lr == neg_inf) return neg_inf;
  return s_cond_latent_red_pmf(t.r, m, pr, n, mprime).log_at(t.s) + lr;
}

// log joint mass of (r, s) for an observed red vertex.
inline double log_pmf_observed_red(VertexStats t, int m, const ModelParams& pr, int n, int mprime) {
  const double lr = binom_log_pmf(t.r, mprime - 1, pr.p1 + pr.q2);
  if (lr == neg_inf) return neg_inf;
  return s_cond_observed_red_pmf(t.r, m, pr, n, mprime).log_at(t.s) + lr;
}

// Marginal of s for a red vertex (latent or observed): red edges to the n - m
// greens plus red edges to the m - 1 other reds.
inline double log_s_marginal_red(int s, int m, const ModelParams& pr, int n) {
  return convolve(Pmf::binomial(n - m, pr.p2), Pmf::binomial(m - 1, pr.q2)).log_at(s);
}

// Marginal of s for a green vertex. Unused by the sampler; test surface only.
inline double log_s_marginal_green(int s, const ModelParams& pr, int n) {
  return binom_log_pmf(s, n - 1, pr.p2);
}

// ---------------------------------------------------------------------------
// Memoized evaluation. Valid while the parameters are unchanged; reset() on
// every accepted Metropolis move. Tables are keyed by (role, m, r); the m
// axis exists because the latent red count changes during a sweep.
class ConvCache {
 public:
  ConvCache(int n, int mprime) : n_(n), mprime_(mprime) {
    green_cond_.resize(mprime_ + 1);
    lred_cond_.resize(static_cast<std::size_t>(n_ + 1) * (mprime_ + 1));
    ored_cond_.resize(static_cast<std::size_t>(n_ + 1) * (mprime_ + 1));
    lred_base_.resize(n_ + 1);
    ored_base_.resize(n_ + 1);
    green_r_.assign(mprime_ + 1, nan_);
    red_r_.assign(mprime_ + 1, nan_);
    obs_r_.assign(mprime_, nan_);
  }

  void set_params(const ModelParams& pr) {
    require_inference_valid(pr);
    pr_ = pr;
    for (auto& v : green_cond_) v.clear();
    for (auto& v : lred_cond_) v.clear();
    for (auto& v : ored_cond_) v.clear();
    for (auto& p : lred_base_) p = Pmf();
    for (auto& p : ored_base_) p = Pmf();
    green_r_.assign(green_r_.size(), nan_);
    red_r_.assign(red_r_.size(), nan_);
    obs_r_.assign(obs_r_.size(), nan_);
  }

  const ModelParams& params() const { return pr_; }
  int n() const { return n_; }
  int mprime() const { return mprime_; }

  double log_s_cond_green(VertexStats t) {
    auto& tab = green_cond_[t.r];
    if (tab.empty()) tab = s_cond_green_pmf(t.r, pr_, n_, mprime_).log_table();
    return lookup(tab, t.s);
  }

  double log_s_cond_latent_red(VertexStats t, int m) {
    auto& tab = lred_cond_[key(m, t.r)];
    if (tab.empty()) {
      auto& base = lred_base_[m];
      if (base.empty())
        base = convolve(Pmf::binomial(n_ - m, pr_.p2), Pmf::binomial(m - mprime_ - 1, pr_.q2));
      tab = convolve(base, detail::red_among_connected(t.r, pr_.q2, pr_.p1 + pr_.q2)).log_table();
    }
    return lookup(tab, t.s);
  }

  double log_s_cond_observed_red(VertexStats t, int m) {
    auto& tab = ored_cond_[key(m, t.r)];
    if (tab.empty()) {
      auto& base = ored_base_[m];
      if (base.empty())
        base = convolve(Pmf::binomial(n_ - m, pr_.p2), Pmf::binomial(m - mprime_, pr_.q2));
      tab = convolve(base, detail::red_among_connected(t.r, pr_.q2, pr_.p1 + pr_.q2)).log_table();
    }
    return lookup(tab, t.s);
  }

  double log_r_green(int r) {
    double& v = green_r_[r];
    if (std::isnan(v)) v = binom_log_pmf(r, mprime_, pr_.p1 + pr_.p2);
    return v;
  }

  double log_r_latent_red(int r) {
    double& v = red_r_[r];
    if (std::isnan(v)) v = binom_log_pmf(r, mprime_, pr_.p1 + pr_.q2);
    return v;
  }

  double log_r_observed_red(int r) {
    double& v = obs_r_[r];
    if (std::isnan(v)) v = binom_log_pmf(r, mprime_ - 1, pr_.p1 + pr_.q2);
    return v;
  }

  double log_green(VertexStats t) { return log_s_cond_green(t) + log_r_green(t.r); }
  double log_latent_red(VertexStats t, int m) { return log_s_cond_latent_red(t, m) + log_r_latent_red(t.r); }
  double log_observed_red(VertexStats t, int m) {
    return log_s_cond_observed_red(t, m) + log_r_observed_red(t.r);
  }

  // Full data log-likelihood for the given latent colors.
  double log_likelihood(const StatsBundle& stats, std::span<const std::uint8_t> latent_colors) {
    int m = mprime_;
    for (std::uint8_t c : latent_colors) m += (c == 2);
    double ll = 0.0;
    for (std::size_t i = 0; i < stats.latent.size(); ++i)
      ll += latent_colors[i] == 2 ? log_latent_red(stats.latent[i], m) : log_green(stats.latent[i]);
    for (const VertexStats& t : stats.observed) ll += log_observed_red(t, m);
    return ll;
  }

 private:
  static double lookup(const std::vector<double>& tab, int s) {
    return (s >= 0 && s < static_cast<int>(tab.size())) ? tab[s] : neg_inf;
  }
  std::size_t key(int m, int r) const { return static_cast<std::size_t>(m) * (mprime_ + 1) + r; }

  static constexpr double nan_ = std::numeric_limits<double>::quiet_NaN();

  int n_;
  int mprime_;
  ModelParams pr_{0.25, 0.15, 0.25};  // placeholder until set_params
  std::vector<std::vector<double>> green_cond_;            // [r]
  std::vector<std::vector<double>> lred_cond_, ored_cond_;  // [m * (m'+1) + r]
  std::vector<Pmf> lred_base_, ored_base_;                  // [m]
  std::vector<double> green_r_, red_r_, obs_r_;
};

// Convenience wrapper over a throwaway cache.
inline double log_likelihood(const StatsBundle& stats, std::span<const std::uint8_t> latent_colors,
                             const ModelParams& pr) {
  ConvCache cache(stats.n, stats.mprime);
  cache.set_params(pr);
  return cache.log_likelihood(stats, latent_colors);
}

// ---------------------------------------------------------------------------
// Prior stack.

// log of the (p1, p2, q2) prior density 2 / (1 - p1 - p2) on its open support.
inline double log_prior_pq(const ModelParams& pr) {
  if (!pr.inference_valid()) return neg_inf;
  return std::log(2.0) - std::log1p(-pr.p1 - pr.p2);
}

// Marginal prior density of p1 (and of p2): beta(1, 2).
inline double prior_p_marginal(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return 2.0 * (1.0 - p);
}

// Marginal prior density of q2.
inline double prior_q2_marginal(double q2) {
  if (q2 <= 0.0 || q2 >= 1.0) return 0.0;
  return 2.0 * (q2 * std::log((1.0 - q2) / q2) - std::log1p(-q2));
}

// Unnormalized log posterior over (latent colors, params, psi).
inline double log_posterior_kernel(const StatsBundle& stats, std::span<const std::uint8_t> latent_colors,
                                   const ModelParams& pr, double psi, const PriorConfig& prior) {
  prior.validate();
  if (!(psi > 0.0 && psi < 1.0)) return neg_inf;
  const double lp = log_prior_pq(pr);
  if (lp == neg_inf) return neg_inf;
  int m = stats.mprime;
  for (std::uint8_t c : latent_colors) m += (c == 2);
  return log_likelihood(stats, latent_colors, pr) + (m - stats.mprime + prior.alpha - 1.0) * std::log(psi) +
         (stats.n - m + prior.beta - 1.0) * std::log1p(-psi) + lp;
}

// ---------------------------------------------------------------------------
// Conditional distributions of one edge parameter given the other two, under
// the joint prior. Each is sampled exactly by inverse transform; the sampler
// uses them as Metropolis proposals, so the prior terms cancel in the
// acceptance ratio.

inline void check_cond_p1(double p2, double q2) {
  if (!(p2 > 0.0 && q2 > p2 && q2 < 1.0)) throw std::invalid_argument("conditioning: need 0 < p2 < q2 < 1");
}

inline void check_cond_p2(double p1, double q2) {
  if (!(p1 > 0.0 && q2 > 0.0 && p1 + q2 < 1.0))
    throw std::invalid_argument("conditioning: need p1 > 0, q2 > 0, p1 + q2 < 1");
}

inline void check_cond_q2(double p1, double p2) {
  if (!(p1 > 0.0 && p2 > 0.0 && p1 + p2 < 1.0))
    throw std::invalid_argument("conditioning: need p1 > 0, p2 > 0, p1 + p2 < 1");
}

// p1 | p2, q2 on (0, 1 - q2), density proportional to 1 / (1 - p1 - p2).
inline double cdf_p1_given(double p1, double p2, double q2) {
  check_cond_p1(p2, q2);
  if (p1 <= 0.0) return 0.0;
  if (p1 >= 1.0 - q2) return 1.0;
  return (std::log1p(-p2) - std::log(1.0 - p1 - p2)) / (std::log1p(-p2) - std::log(q2 - p2));
}

inline double inv_cdf_p1_given(double u, double p2, double q2) {
  check_cond_p1(p2, q2);
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("inverse cdf: need u in [0,1]");
  return 1.0 - p2 - std::exp(u * std::log(q2 - p2) - (u - 1.0) * std::log1p(-p2));
}

// p2 | p1, q2 on (0, q2), density proportional to 1 / (1 - p1 - p2).
inline double cdf_p2_given(double p2, double p1, double q2) {
  check_cond_p2(p1, q2);
  if (p2 <= 0.0) return 0.0;
  if (p2 >= q2) return 1.0;
  return (std::log1p(-p1) - std::log(1.0 - p1 - p2)) / (std::log1p(-p1) - std::log(1.0 - p1 - q2));
}

inline double inv_cdf_p2_given(double u, double p1, double q2) {
  check_cond_p2(p1, q2);
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("inverse cdf: need u in [0,1]");
  return 1.0 - p1 - std::exp(u * std::log(1.0 - p1 - q2) - (u - 1.0) * std::log1p(-p1));
}

// q2 | p1, p2: uniform on (p2, 1 - p1).
inline double cdf_q2_given(double q2, double p1, double p2) {
  check_cond_q2(p1, p2);
  if (q2 <= p2) return 0.0;
  if (q2 >= 1.0 - p1) return 1.0;
  return (q2 - p2) / (1.0 - p1 - p2);
}

inline double inv_cdf_q2_given(double u, double p1, double p2) {
  check_cond_q2(p1, p2);
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("inverse cdf: need u in [0,1]");
  return p2 + u * (1.0 - p1 - p2);
}

}  // namespace bvn
