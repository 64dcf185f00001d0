#pragma once

// From a chain trace to a decision: marginal red-probabilities, posterior
// parameter means, the argmax nominee, and the context/content fusion
// baseline it is compared against.

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "bvn/graph.hpp"
#include "bvn/mcmc.hpp"

namespace bvn {

struct PosteriorSummary {
  std::vector<int> latent_ids;
  std::vector<double> marginal_red;  // aligned with latent_ids
  double p1_mean = 0.0, p2_mean = 0.0, q2_mean = 0.0, psi_mean = 0.0;
  int nominee = -1;  // vertex id
  double nominee_prob = 0.0;
};

inline PosteriorSummary summarize(const ChainTrace& trace) {
  const int h = trace.retained();
  if (h == 0) throw std::invalid_argument("summarize: empty trace");
  PosteriorSummary out;
  out.latent_ids = trace.latent_ids;
  out.marginal_red.resize(trace.red_count.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < trace.red_count.size(); ++i) {
    out.marginal_red[i] = static_cast<double>(trace.red_count[i]) / h;
    if (out.marginal_red[i] > out.marginal_red[best]) best = i;  // ties keep the lowest id
  }
  auto mean = [h](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / h;
  };
  out.p1_mean = mean(trace.p1);
  out.p2_mean = mean(trace.p2);
  out.q2_mean = mean(trace.q2);
  out.psi_mean = mean(trace.psi);
  out.nominee = trace.latent_ids[best];
  out.nominee_prob = out.marginal_red[best];
  return out;
}

struct FusionConfig {
  double lambda = 0.5;
  std::vector<double> sweep_grid;

  void validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("fusion: need lambda in [0,1]");
    for (double l : sweep_grid)
      if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("fusion: need grid values in [0,1]");
  }
};

inline std::vector<double> default_lambda_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i) g.push_back(i * 0.05);
  return g;
}

// (1 - lambda) * r + lambda * s for each latent vertex.
inline std::vector<double> fusion_scores(const StatsBundle& stats, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("fusion: need lambda in [0,1]");
  std::vector<double> tau(stats.latent.size());
  for (std::size_t i = 0; i < stats.latent.size(); ++i)
    tau[i] = (1.0 - lambda) * stats.latent[i].r + lambda * stats.latent[i].s;
  return tau;
}

// Latent vertex with the largest fusion score; ties go to the lowest id.
inline int fusion_nominate(const StatsBundle& stats, double lambda) {
  const auto tau = fusion_scores(stats, lambda);
  if (tau.empty()) throw std::invalid_argument("fusion: no latent vertices");
  std::size_t best = 0;
  for (std::size_t i = 1; i < tau.size(); ++i)
    if (tau[i] > tau[best]) best = i;
  return stats.latent_ids[best];
}

// A graph's statistics plus the ground truth needed to score a nomination.
struct LabeledStats {
  StatsBundle stats;
  std::vector<int> latent_red_ids;
};

struct FusionSweep {
  std::vector<double> grid;
  std::vector<double> rates;  // correct-nomination rate per grid value
  double best_lambda = 0.0;   // lowest maximizer
  double best_rate = 0.0;
};

// Oracle-tuned baseline: evaluates the whole grid against known truth and
// reports the best grid point. Simulation use only.
inline FusionSweep fusion_oracle_sweep(std::span<const LabeledStats> graphs,
                                       std::span<const double> grid) {
  if (graphs.empty()) throw std::invalid_argument("fusion sweep: no graphs");
  if (grid.empty()) throw std::invalid_argument("fusion sweep: empty grid");
  FusionSweep out;
  out.grid.assign(grid.begin(), grid.end());
  out.rates.assign(grid.size(), 0.0);
  for (const LabeledStats& g : graphs) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const int nominee = fusion_nominate(g.stats, grid[k]);
      const bool correct = std::find(g.latent_red_ids.begin(), g.latent_red_ids.end(), nominee) !=
                           g.latent_red_ids.end();
      out.rates[k] += correct;
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out.rates[k] /= graphs.size();
    if (out.rates[k] > out.rates[best]) best = k;  // ties keep the lowest lambda
  }
  out.best_lambda = out.grid[best];
  out.best_rate = out.rates[best];
  return out;
}

}  // namespace bvn
