#pragma once

// Independent oracles. Everything here recomputes model quantities from
// first principles (per-edge enumeration, naive long-double convolution,
// exhaustive coloring enumeration with tensor-grid quadrature) without
// touching the library's Pmf/ConvCache machinery, so agreement is evidence
// rather than tautology.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "bvn/graph.hpp"
#include "bvn/likelihood.hpp"
#include "bvn/rng.hpp"

namespace testsupport {

// ---------------------------------------------------------------------------
// Per-edge enumeration of the joint (r, s) distribution of one vertex.
// Each incident edge belongs to a group with its own (absent, green, red)
// probabilities; r counts present edges to observed-red vertices, s counts
// red edges to anyone.

struct EdgeGroup {
  int count = 0;
  long double probs[3] = {0.0L, 0.0L, 0.0L};
  bool observed = false;
};

namespace detail {

inline void enumerate_rec(const std::vector<const EdgeGroup*>& edges, std::size_t idx, long double prob,
                          int r, int s, std::vector<std::vector<long double>>& joint) {
  if (idx == edges.size()) {
    joint[r][s] += prob;
    return;
  }
  const EdgeGroup& g = *edges[idx];
  for (int a = 0; a < 3; ++a) {
    if (g.probs[a] == 0.0L) continue;
    enumerate_rec(edges, idx + 1, prob * g.probs[a], r + (g.observed && a != 0),
                  s + (a == 2), joint);
  }
}

}  // namespace detail

// joint[r][s], dimensions (max_r + 1) x (max_s + 1).
inline std::vector<std::vector<long double>> enumerate_rs(std::span<const EdgeGroup> groups) {
  std::vector<const EdgeGroup*> edges;
  int max_r = 0, max_s = 0;
  for (const EdgeGroup& g : groups) {
    for (int i = 0; i < g.count; ++i) edges.push_back(&g);
    if (g.observed) max_r += g.count;
    max_s += g.count;
  }
  std::vector<std::vector<long double>> joint(max_r + 1, std::vector<long double>(max_s + 1, 0.0L));
  detail::enumerate_rec(edges, 0, 1.0L, 0, 0, joint);
  return joint;
}

// Group layouts for the three vertex roles.
inline std::vector<EdgeGroup> groups_green(const bvn::ModelParams& pr, int n, int mprime) {
  const long double p[3] = {(long double)pr.p0(), (long double)pr.p1, (long double)pr.p2};
  return {{mprime, {p[0], p[1], p[2]}, true}, {n - mprime - 1, {p[0], p[1], p[2]}, false}};
}

inline std::vector<EdgeGroup> groups_latent_red(const bvn::ModelParams& pr, int n, int mprime, int m) {
  const long double p[3] = {(long double)pr.p0(), (long double)pr.p1, (long double)pr.p2};
  const long double q[3] = {(long double)pr.q0(), (long double)pr.q1(), (long double)pr.q2};
  return {{mprime, {q[0], q[1], q[2]}, true},
          {m - mprime - 1, {q[0], q[1], q[2]}, false},
          {n - m, {p[0], p[1], p[2]}, false}};
}

inline std::vector<EdgeGroup> groups_observed_red(const bvn::ModelParams& pr, int n, int mprime, int m) {
  const long double p[3] = {(long double)pr.p0(), (long double)pr.p1, (long double)pr.p2};
  const long double q[3] = {(long double)pr.q0(), (long double)pr.q1(), (long double)pr.q2};
  return {{mprime - 1, {q[0], q[1], q[2]}, true},
          {m - mprime, {q[0], q[1], q[2]}, false},
          {n - m, {p[0], p[1], p[2]}, false}};
}

// ---------------------------------------------------------------------------
// Naive re-implementation of the published mass functions: binomials via the
// multiplicative recurrence and convolutions as direct nested sums, all in
// long double and in linear space.

inline std::vector<long double> naive_binom(int n, long double p) {
  std::vector<long double> w(n + 1, 0.0L);
  if (p <= 0.0L) {
    w[0] = 1.0L;
    return w;
  }
  if (p >= 1.0L) {
    w[n] = 1.0L;
    return w;
  }
  w[0] = std::pow(1.0L - p, (long double)n);
  for (int k = 0; k < n; ++k) w[k + 1] = w[k] * (long double)(n - k) / (k + 1) * p / (1.0L - p);
  return w;
}

inline std::vector<long double> naive_conv(const std::vector<long double>& a,
                                           const std::vector<long double>& b) {
  std::vector<long double> out(a.size() + b.size() - 1, 0.0L);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline long double at_or_zero(const std::vector<long double>& v, int k) {
  return (k >= 0 && k < (int)v.size()) ? v[k] : 0.0L;
}

inline long double naive_green(int r, int s, const bvn::ModelParams& pr, int n, int mprime) {
  const auto cond =
      naive_conv(naive_binom(n - mprime - 1, pr.p2), naive_binom(r, pr.p2 / (pr.p1 + pr.p2)));
  return at_or_zero(cond, s) * at_or_zero(naive_binom(mprime, pr.p1 + pr.p2), r);
}

inline long double naive_latent_red(int r, int s, int m, const bvn::ModelParams& pr, int n, int mprime) {
  const auto cond = naive_conv(naive_conv(naive_binom(n - m, pr.p2), naive_binom(m - mprime - 1, pr.q2)),
                               naive_binom(r, pr.q2 / (pr.p1 + pr.q2)));
  return at_or_zero(cond, s) * at_or_zero(naive_binom(mprime, pr.p1 + pr.q2), r);
}

inline long double naive_observed_red(int r, int s, int m, const bvn::ModelParams& pr, int n,
                                      int mprime) {
  const auto cond = naive_conv(naive_conv(naive_binom(n - m, pr.p2), naive_binom(m - mprime, pr.q2)),
                               naive_binom(r, pr.q2 / (pr.p1 + pr.q2)));
  return at_or_zero(cond, s) * at_or_zero(naive_binom(mprime - 1, pr.p1 + pr.q2), r);
}

// Likelihood of the whole bundle under a latent coloring, naive route.
inline long double naive_likelihood(const bvn::StatsBundle& stats,
                                    std::span<const std::uint8_t> colors, const bvn::ModelParams& pr) {
  int m = stats.mprime;
  for (std::uint8_t c : colors) m += (c == 2);
  long double lik = 1.0L;
  for (std::size_t i = 0; i < stats.latent.size(); ++i) {
    const bvn::VertexStats t = stats.latent[i];
    lik *= colors[i] == 2 ? naive_latent_red(t.r, t.s, m, pr, stats.n, stats.mprime)
                          : naive_green(t.r, t.s, pr, stats.n, stats.mprime);
  }
  for (const bvn::VertexStats& t : stats.observed)
    lik *= naive_observed_red(t.r, t.s, m, pr, stats.n, stats.mprime);
  return lik;
}

// ---------------------------------------------------------------------------
// Exact posterior marginals P(color(i) = red | data) on tiny graphs:
// exhaustive enumeration of the 2^L colorings combined with midpoint
// tensor-grid quadrature over (p1, p2, q2) on the prior support and over psi
// on (0, 1). The psi axis factorizes by red count, which keeps the full
// tensor sum exact while avoiding a literal 4-deep loop.

struct ExactPosterior {
  std::vector<double> marginal_red;
  long double total_weight = 0.0L;
};

inline ExactPosterior exact_posterior(const bvn::StatsBundle& stats, const bvn::PriorConfig& prior,
                                      double step = 0.02) {
  const int latent = static_cast<int>(stats.latent.size());
  if (latent > 12) throw std::invalid_argument("exact_posterior: too many latent vertices");
  const int n = stats.n;
  const int mprime = stats.mprime;
  const std::size_t n_colorings = std::size_t{1} << latent;

  // psi quadrature per red count m.
  const int psi_cells = static_cast<int>(std::round(1.0 / step));
  std::vector<long double> psi_int(n + 1, 0.0L);
  for (int m = mprime; m <= n; ++m) {
    long double acc = 0.0L;
    for (int i = 0; i < psi_cells; ++i) {
      const long double psi = (i + 0.5L) * step;
      acc += std::pow(psi, (long double)(m - mprime + prior.alpha - 1.0)) *
             std::pow(1.0L - psi, (long double)(n - m + prior.beta - 1.0));
    }
    psi_int[m] = acc * (long double)step;
  }

  const int cells = static_cast<int>(std::round(1.0 / step));
  std::vector<long double> weight(n_colorings, 0.0L);
  std::vector<long double> green_val(latent), lred_val(latent), ored_val(stats.mprime);

  for (int a = 0; a < cells; ++a) {
    const double p1 = (a + 0.5) * step;
    for (int b = 0; b < cells; ++b) {
      const double p2 = (b + 0.5) * step;
      if (p1 + p2 >= 1.0) continue;
      for (int c = 0; c < cells; ++c) {
        const double q2 = (c + 0.5) * step;
        if (!(q2 > p2 && q2 < 1.0 - p1)) continue;
        const bvn::ModelParams pr{p1, p2, q2};
        const long double prior_density = 1.0L / (1.0L - (long double)p1 - (long double)p2);

        for (int i = 0; i < latent; ++i)
          green_val[i] = naive_green(stats.latent[i].r, stats.latent[i].s, pr, n, mprime);

        for (std::size_t mask = 0; mask < n_colorings; ++mask) {
          const int reds = std::popcount(mask);
          const int m = mprime + reds;
          if (reds > 0) {
            for (int i = 0; i < latent; ++i)
              if (mask & (std::size_t{1} << i))
                lred_val[i] = naive_latent_red(stats.latent[i].r, stats.latent[i].s, m, pr, n, mprime);
          }
          for (int k = 0; k < mprime; ++k)
            ored_val[k] = naive_observed_red(stats.observed[k].r, stats.observed[k].s, m, pr, n, mprime);

          long double lik = 1.0L;
          for (int i = 0; i < latent; ++i)
            lik *= (mask & (std::size_t{1} << i)) ? lred_val[i] : green_val[i];
          for (int k = 0; k < mprime; ++k) lik *= ored_val[k];
          weight[mask] += lik * prior_density * psi_int[m];
        }
      }
    }
  }

  ExactPosterior out;
  long double total = 0.0L;
  for (long double w : weight) total += w;
  out.total_weight = total;
  out.marginal_red.assign(latent, 0.0);
  for (int i = 0; i < latent; ++i) {
    long double red = 0.0L;
    for (std::size_t mask = 0; mask < n_colorings; ++mask)
      if (mask & (std::size_t{1} << i)) red += weight[mask];
    out.marginal_red[i] = static_cast<double>(red / total);
  }
  return out;
}

// Exact conditional distribution of the latent coloring at fixed parameters
// and psi; weights indexed by coloring bitmask.
inline std::vector<long double> exact_coloring_weights(const bvn::StatsBundle& stats,
                                                       const bvn::ModelParams& pr, double psi) {
  const int latent = static_cast<int>(stats.latent.size());
  const std::size_t n_colorings = std::size_t{1} << latent;
  std::vector<long double> w(n_colorings, 0.0L);
  std::vector<std::uint8_t> colors(latent, 1);
  for (std::size_t mask = 0; mask < n_colorings; ++mask) {
    int reds = 0;
    for (int i = 0; i < latent; ++i) {
      const bool red = mask & (std::size_t{1} << i);
      colors[i] = red ? 2 : 1;
      reds += red;
    }
    w[mask] = naive_likelihood(stats, colors, pr) * std::pow((long double)psi, (long double)reds) *
              std::pow(1.0L - (long double)psi, (long double)(latent - reds));
  }
  return w;
}

}  // namespace testsupport
