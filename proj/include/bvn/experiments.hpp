#pragma once

// Monte Carlo study harness: repeated generate -> infer -> nominate trials,
// correct-nomination rates with BCA intervals, conditional-success threshold
// curves, chance/odds arithmetic, and side-by-side comparison against the
// oracle-tuned fusion baseline.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bvn/bootstrap.hpp"
#include "bvn/graph.hpp"
#include "bvn/io_detail.hpp"
#include "bvn/mcmc.hpp"
#include "bvn/nomination.hpp"
#include "bvn/rng.hpp"

namespace bvn {

struct StudySpec {
  int n = 0;
  int m = 0;
  int mprime = 0;
  ModelParams params;
  int n_graphs = 1000;
  SamplerConfig sampler;  // per-trial seeds are derived from master_seed
  PriorConfig prior;
  std::vector<double> fusion_grid = default_lambda_grid();
  std::vector<double> thresholds;  // defaulted in validate() when empty
  int n_boot = 10000;
  double ci_level = 0.95;
  std::uint64_t master_seed = 0;

  void validate() {
    if (mprime < 2) throw std::invalid_argument("study: need m' >= 2");
    if (m <= mprime)
      throw std::invalid_argument("study: need m > m' (with no latent red vertex there is nothing to nominate)");
    if (m > n) throw std::invalid_argument("study: need m <= n");
    if (n_graphs < 1) throw std::invalid_argument("study: need at least 1 graph");
    require_generation_valid(params);
    sampler.validate();
    prior.validate();
    if (thresholds.empty())
      for (int i = 0; i <= 18; ++i) thresholds.push_back(i * 0.05);
  }
};

struct TrialRecord {
  int trial = 0;
  bool correct = false;
  int nominee = -1;
  double nominee_prob = 0.0;
  double p1_mean = 0.0, p2_mean = 0.0, q2_mean = 0.0, psi_mean = 0.0;
  std::vector<std::uint8_t> fusion_correct;  // one flag per fusion-grid point
};

struct ThresholdPoint {
  double threshold = 0.0;
  double rate = std::numeric_limits<double>::quiet_NaN();
  double ci_lo = std::numeric_limits<double>::quiet_NaN();
  double ci_hi = std::numeric_limits<double>::quiet_NaN();
  int n_support = 0;
};

struct StudyResult {
  StudySpec spec;
  std::vector<TrialRecord> trials;
  double rate = 0.0;
  BcaResult ci;
  std::vector<ThresholdPoint> curve;
  FusionSweep fusion;
  double chance = 0.0;
  double odds_vs_chance = 0.0;
};

// (m - m') / (n - m'): picking a latent vertex uniformly at random.
inline double chance_rate(int n, int m, int mprime) {
  if (!(mprime < m && m <= n)) throw std::invalid_argument("chance_rate: need m' < m <= n");
  return static_cast<double>(m - mprime) / static_cast<double>(n - mprime);
}

// Odds of a against odds of b; undefined when either rate is 0 or 1.
inline double odds_ratio(double rate_a, double rate_b) {
  if (!(rate_a > 0.0 && rate_a < 1.0 && rate_b > 0.0 && rate_b < 1.0))
    return std::numeric_limits<double>::quiet_NaN();
  return (rate_a / (1.0 - rate_a)) / (rate_b / (1.0 - rate_b));
}

// Conditional correct-nomination rate among trials whose nominee probability
// exceeds each threshold. Thresholds with no qualifying trials come back
// with n_support = 0 and NaN rates.
inline std::vector<ThresholdPoint> threshold_curve(std::span<const TrialRecord> records,
                                                   std::span<const double> thresholds, double level,
                                                   int n_boot, Rng& rng) {
  if (records.empty()) throw std::invalid_argument("threshold_curve: no trial records");
  std::vector<ThresholdPoint> out;
  out.reserve(thresholds.size());
  for (double p : thresholds) {
    ThresholdPoint pt;
    pt.threshold = p;
    std::vector<double> flags;
    for (const TrialRecord& r : records)
      if (r.nominee_prob > p) flags.push_back(r.correct ? 1.0 : 0.0);
    pt.n_support = static_cast<int>(flags.size());
    if (pt.n_support > 0) {
      double s = 0.0;
      for (double f : flags) s += f;
      pt.rate = s / pt.n_support;
      if (pt.n_support >= 2) {
        const BcaResult ci = bca_ci(flags, level, n_boot, rng);
        pt.ci_lo = ci.lo;
        pt.ci_hi = ci.hi;
      } else {
        pt.ci_lo = pt.ci_hi = pt.rate;
      }
    }
    out.push_back(pt);
  }
  return out;
}

namespace detail {

inline TrialRecord run_trial(const StudySpec& spec, int trial) {
  const std::uint64_t trial_seed = derive_seed(spec.master_seed, static_cast<std::uint64_t>(trial));
  Rng gen_rng(derive_seed(trial_seed, 0));

  const FullColoring coloring = make_coloring_first_reds(spec.n, spec.m, spec.mprime);
  const AttributedGraph graph = generate_graph(coloring, spec.params, gen_rng);
  StatsBundle stats = compute_stats(graph);
  const std::vector<int> latent_ids = stats.latent_ids;
  const std::vector<int> truth = coloring.latent_red_ids();

  SamplerConfig cfg = spec.sampler;
  cfg.seed = derive_seed(trial_seed, 1);
  cfg.record_traces = false;
  Sampler sampler(std::move(stats), spec.prior);
  const ChainTrace trace = sampler.run(cfg, latent_ids);
  const PosteriorSummary summary = summarize(trace);

  auto is_latent_red = [&](int v) {
    return std::find(truth.begin(), truth.end(), v) != truth.end();
  };

  TrialRecord rec;
  rec.trial = trial;
  rec.nominee = summary.nominee;
  rec.nominee_prob = summary.nominee_prob;
  rec.correct = is_latent_red(summary.nominee);
  rec.p1_mean = summary.p1_mean;
  rec.p2_mean = summary.p2_mean;
  rec.q2_mean = summary.q2_mean;
  rec.psi_mean = summary.psi_mean;
  rec.fusion_correct.resize(spec.fusion_grid.size());
  const StatsBundle& st = sampler.stats();
  for (std::size_t k = 0; k < spec.fusion_grid.size(); ++k)
    rec.fusion_correct[k] = is_latent_red(fusion_nominate(st, spec.fusion_grid[k]));
  return rec;
}

}  // namespace detail

// Runs the trials (optionally across threads; results are identical for any
// jobs value because every trial derives its own stream) and aggregates.
// A failing trial aborts the whole study.
inline StudyResult run_study(StudySpec spec, int jobs = 1) {
  spec.validate();
  if (jobs < 1) jobs = 1;

  StudyResult result;
  result.spec = spec;
  result.trials.resize(spec.n_graphs);

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&]() {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= spec.n_graphs || failed.load()) return;
      try {
        result.trials[t] = detail::run_trial(spec, t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  std::vector<double> flags(spec.n_graphs);
  for (int t = 0; t < spec.n_graphs; ++t) flags[t] = result.trials[t].correct ? 1.0 : 0.0;
  double s = 0.0;
  for (double f : flags) s += f;
  result.rate = s / spec.n_graphs;

  Rng boot_rng(derive_seed(spec.master_seed, 0x626f6f74));
  result.ci = spec.n_graphs >= 2 ? bca_ci(flags, spec.ci_level, spec.n_boot, boot_rng)
                                 : BcaResult{result.rate, result.rate, false};

  Rng curve_rng(derive_seed(spec.master_seed, 0x63757276));
  result.curve = threshold_curve(result.trials, spec.thresholds, spec.ci_level, spec.n_boot, curve_rng);

  result.fusion.grid = spec.fusion_grid;
  result.fusion.rates.assign(spec.fusion_grid.size(), 0.0);
  for (const TrialRecord& r : result.trials)
    for (std::size_t k = 0; k < r.fusion_correct.size(); ++k)
      result.fusion.rates[k] += r.fusion_correct[k];
  std::size_t best = 0;
  for (std::size_t k = 0; k < result.fusion.rates.size(); ++k) {
    result.fusion.rates[k] /= spec.n_graphs;
    if (result.fusion.rates[k] > result.fusion.rates[best]) best = k;
  }
  result.fusion.best_lambda = result.fusion.grid.empty() ? 0.0 : result.fusion.grid[best];
  result.fusion.best_rate = result.fusion.rates.empty() ? 0.0 : result.fusion.rates[best];

  result.chance = chance_rate(spec.n, spec.m, spec.mprime);
  result.odds_vs_chance = odds_ratio(result.rate, result.chance);
  return result;
}

// One column of a BVN vs fusion-baseline comparison.
struct ComparisonColumn {
  int m = 0;
  int mprime = 0;
  double bvn_rate = 0.0;
  double bvn_lo = 0.0;
  double bvn_hi = 0.0;
  double cp_rate = 0.0;
  double cp_lambda = 0.0;
  double odds_bvn_cp = 0.0;
};

struct ComparisonReport {
  std::vector<ComparisonColumn> columns;
};

inline ComparisonReport comparison_table(std::span<const StudySpec> specs, int jobs = 1) {
  ComparisonReport report;
  for (const StudySpec& spec : specs) {
    const StudyResult res = run_study(spec, jobs);
    ComparisonColumn col;
    col.m = spec.m;
    col.mprime = spec.mprime;
    col.bvn_rate = res.rate;
    col.bvn_lo = res.ci.lo;
    col.bvn_hi = res.ci.hi;
    col.cp_rate = res.fusion.best_rate;
    col.cp_lambda = res.fusion.best_lambda;
    col.odds_bvn_cp = odds_ratio(res.rate, res.fusion.best_rate);
    report.columns.push_back(col);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Named study presets.

inline StudySpec preset_toy12() {
  StudySpec s;
  s.n = 12;
  s.m = 5;
  s.mprime = 2;
  s.params = {0.25, 0.15, 0.25};
  s.n_graphs = 1000;
  s.sampler = SamplerConfig{1000, 1000, 0, false};
  s.prior = PriorConfig{2.0, 10.0};
  return s;
}

inline StudySpec preset_table3_m8(int mprime = 2) {
  StudySpec s;
  s.n = 184;
  s.m = 8;
  s.mprime = mprime;
  s.params = {0.2, 0.2, 0.4};
  s.n_graphs = 1000;
  s.sampler = SamplerConfig{1000, 1000, 0, false};
  s.prior = PriorConfig{2.0, static_cast<double>(184 - mprime)};
  return s;
}

inline StudySpec preset_table3_m32(int mprime = 8) {
  StudySpec s = preset_table3_m8(mprime);
  s.m = 32;
  return s;
}

inline StudySpec preset_enron_sim() {
  StudySpec s;
  s.n = 184;
  s.m = 10;
  s.mprime = 5;
  s.params = {0.0168, 0.0111, 0.1298};
  s.n_graphs = 1000;
  s.sampler = SamplerConfig{1000, 1000, 0, false};
  s.prior = PriorConfig{2.0, 179.0};
  return s;
}

// Lookup by CLI name; unknown names throw.
inline StudySpec study_preset(const std::string& name) {
  if (name == "toy-12") return preset_toy12();
  if (name == "table3-m8") return preset_table3_m8();
  if (name == "table3-m32") return preset_table3_m32();
  if (name == "enron-sim") return preset_enron_sim();
  throw std::invalid_argument("unknown study preset: " + name +
                              " (available: toy-12, table3-m8, table3-m32, enron-sim)");
}

// ---------------------------------------------------------------------------
// Plot-ready exports.

inline void write_trials_csv(const StudyResult& result, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "trial,correct,nominee,nominee_prob,p1_mean,p2_mean,q2_mean,psi_mean\n";
  for (const TrialRecord& r : result.trials) {
    f << r.trial << ',' << (r.correct ? 1 : 0) << ',' << r.nominee << ','
      << detail::fmt_double(r.nominee_prob) << ',' << detail::fmt_double(r.p1_mean) << ','
      << detail::fmt_double(r.p2_mean) << ',' << detail::fmt_double(r.q2_mean) << ','
      << detail::fmt_double(r.psi_mean) << '\n';
  }
}

inline void write_threshold_csv(std::span<const ThresholdPoint> curve, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "threshold,rate,ci_lo,ci_hi,n_support\n";
  for (const ThresholdPoint& pt : curve) {
    f << detail::fmt_double(pt.threshold) << ',';
    if (pt.n_support > 0)
      f << detail::fmt_double(pt.rate) << ',' << detail::fmt_double(pt.ci_lo) << ','
        << detail::fmt_double(pt.ci_hi);
    else
      f << ",,";
    f << ',' << pt.n_support << '\n';
  }
}

}  // namespace bvn
