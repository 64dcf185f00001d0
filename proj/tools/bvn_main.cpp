// bvn: Bayesian vertex nomination on attributed graphs.
//
// Subcommands:
//   infer     run the sampler on one graph file and nominate a vertex
//   study     Monte Carlo study: generate graphs, infer, aggregate rates
//   simulate  write synthetic graph files (ground truth in sidecar files)
//   baseline  context/content fusion score nomination
//
// Exit codes: 0 success, 1 usage or validation error, 2 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bvn/bootstrap.hpp"
#include "bvn/experiments.hpp"
#include "bvn/graph.hpp"
#include "bvn/graph_io.hpp"
#include "bvn/io_detail.hpp"
#include "bvn/likelihood.hpp"
#include "bvn/mcmc.hpp"
#include "bvn/nomination.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw bvn::IoError("cannot create output directory: " + out);
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw bvn::IoError("cannot open for writing: " + path);
  f << j.dump(2) << '\n';
}

json summary_to_json(const bvn::PosteriorSummary& s, int id_offset) {
  json marg = json::object();
  for (std::size_t i = 0; i < s.latent_ids.size(); ++i)
    marg[std::to_string(s.latent_ids[i] + id_offset)] = s.marginal_red[i];
  json j;
  j["nominee"] = s.nominee + id_offset;
  j["nominee_prob"] = s.nominee_prob;
  j["marginals"] = std::move(marg);
  j["param_means"] = {{"p1", s.p1_mean}, {"p2", s.p2_mean}, {"q2", s.q2_mean}, {"psi", s.psi_mean}};
  return j;
}

json ci_to_json(const bvn::BcaResult& ci) {
  json j;
  j["lo"] = ci.lo;
  j["hi"] = ci.hi;
  if (ci.percentile_fallback) j["percentile_fallback"] = true;
  return j;
}

struct InferOptions {
  std::string input;
  std::string out = ".";
  std::uint64_t seed = 0;
  std::string preset = "default";
  std::optional<int> burn_in, samples, autocorr_lags;
  std::optional<double> alpha, beta;
  bool require_latent_red = false;
};

int cmd_infer(const InferOptions& opt) {
  const bvn::LoadedGraph loaded = bvn::load_graph(opt.input);
  const bvn::AttributedGraph& g = loaded.graph;

  bvn::SamplerConfig cfg;
  if (opt.preset == "long")
    cfg = bvn::sampler_preset_long();
  else if (opt.preset != "default")
    throw std::invalid_argument("unknown sampler preset: " + opt.preset + " (available: default, long)");
  if (opt.burn_in) cfg.burn_in = *opt.burn_in;
  if (opt.samples) cfg.samples = *opt.samples;
  cfg.seed = opt.seed;
  cfg.record_traces = true;
  cfg.validate();

  bvn::PriorConfig prior;
  prior.alpha = opt.alpha.value_or(2.0);
  prior.beta = opt.beta.value_or(static_cast<double>(g.n() - g.mprime()));
  prior.require_latent_red = opt.require_latent_red;
  prior.validate();

  const bvn::ChainTrace trace = bvn::run_chain(g, prior, cfg);
  const bvn::PosteriorSummary summary = bvn::summarize(trace);
  const int base = loaded.index_base;

  ensure_out_dir(opt.out);
  const fs::path out(opt.out);
  write_json_file(summary_to_json(summary, base), (out / "summary.json").string());
  bvn::write_trace_csv(trace, (out / "trace.csv").string());
  bvn::write_running_marginals_csv(trace, (out / "running_marginals.csv").string(), base);
  if (opt.autocorr_lags) {
    const int lags = std::min(*opt.autocorr_lags, trace.retained() - 1);
    std::ofstream f(out / "autocorr.csv");
    if (!f) throw bvn::IoError("cannot open for writing: " + (out / "autocorr.csv").string());
    std::vector<std::vector<double>> rho;
    for (std::size_t i = 0; i < trace.latent_ids.size(); ++i) {
      std::vector<double> series(trace.retained());
      for (int h = 0; h < trace.retained(); ++h)
        series[h] = trace.y_snapshots[trace.burn_in + h][i] == 2 ? 1.0 : 0.0;
      rho.push_back(bvn::autocorrelation(series, lags));
    }
    f << "lag";
    for (int id : trace.latent_ids) f << ",v" << (id + base);
    f << '\n';
    for (int k = 0; k <= lags; ++k) {
      f << k;
      for (const auto& r : rho) f << ',' << bvn::detail::fmt_double(r[k]);
      f << '\n';
    }
  }

  json cfg_echo;
  cfg_echo["command"] = "infer";
  cfg_echo["input"] = opt.input;
  cfg_echo["seed"] = cfg.seed;
  cfg_echo["burn_in"] = cfg.burn_in;
  cfg_echo["samples"] = cfg.samples;
  cfg_echo["alpha"] = prior.alpha;
  cfg_echo["beta"] = prior.beta;
  cfg_echo["index_base"] = base;
  write_json_file(cfg_echo, (out / "effective_config.json").string());

  for (const std::string& w : trace.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "nominee: " << (summary.nominee + base) << '\n';
  std::cout << "nominee_prob: " << bvn::detail::fmt_double(summary.nominee_prob) << '\n';
  return 0;
}

struct StudyOptions {
  std::string preset;
  std::string out = ".";
  std::string format = "json";
  std::uint64_t seed = 0;
  int jobs = 1;
  std::optional<int> trials, n, m, mprime, burn_in, samples;
  std::optional<double> p1, p2, q2, alpha, beta;
};

int cmd_study(const StudyOptions& opt) {
  bvn::StudySpec spec;
  if (!opt.preset.empty()) {
    spec = bvn::study_preset(opt.preset);
  } else {
    if (!(opt.n && opt.m && opt.mprime && opt.p1 && opt.p2 && opt.q2))
      throw std::invalid_argument("study: give --preset or all of --n --m --mprime --p1 --p2 --q2");
  }
  if (opt.n) spec.n = *opt.n;
  if (opt.m) spec.m = *opt.m;
  if (opt.mprime) spec.mprime = *opt.mprime;
  if (opt.p1) spec.params.p1 = *opt.p1;
  if (opt.p2) spec.params.p2 = *opt.p2;
  if (opt.q2) spec.params.q2 = *opt.q2;
  if (opt.trials) spec.n_graphs = *opt.trials;
  if (opt.burn_in) spec.sampler.burn_in = *opt.burn_in;
  if (opt.samples) spec.sampler.samples = *opt.samples;
  spec.prior.alpha = opt.alpha.value_or(2.0);
  spec.prior.beta = opt.beta.value_or(static_cast<double>(spec.n - spec.mprime));
  spec.master_seed = opt.seed;
  if (opt.format != "json" && opt.format != "csv")
    throw std::invalid_argument("study: --format must be json or csv");
  spec.validate();

  const bvn::StudyResult result = bvn::run_study(spec, opt.jobs);

  ensure_out_dir(opt.out);
  const fs::path out(opt.out);
  bvn::write_trials_csv(result, (out / "study_trials.csv").string());
  bvn::write_threshold_csv(result.curve, (out / "threshold_curve.csv").string());

  json fusion;
  fusion["grid"] = result.fusion.grid;
  fusion["rates"] = result.fusion.rates;
  fusion["best_lambda"] = result.fusion.best_lambda;
  fusion["best_rate"] = result.fusion.best_rate;

  json j;
  j["n"] = spec.n;
  j["m"] = spec.m;
  j["mprime"] = spec.mprime;
  j["params"] = {{"p1", spec.params.p1}, {"p2", spec.params.p2}, {"q2", spec.params.q2}};
  j["trials"] = spec.n_graphs;
  j["burn_in"] = spec.sampler.burn_in;
  j["samples"] = spec.sampler.samples;
  j["alpha"] = spec.prior.alpha;
  j["beta"] = spec.prior.beta;
  j["seed"] = spec.master_seed;
  j["rate"] = result.rate;
  j["ci"] = ci_to_json(result.ci);
  j["chance"] = result.chance;
  j["odds_vs_chance"] = result.odds_vs_chance;
  j["fusion"] = std::move(fusion);
  j["odds_bvn_vs_fusion"] = bvn::odds_ratio(result.rate, result.fusion.best_rate);
  write_json_file(j, (out / "study_summary.json").string());

  if (opt.format == "csv") {
    std::ofstream f(out / "study_summary.csv");
    if (!f) throw bvn::IoError("cannot open for writing: " + (out / "study_summary.csv").string());
    f << "rate,ci_lo,ci_hi,chance,odds_vs_chance,fusion_best_lambda,fusion_best_rate\n";
    f << bvn::detail::fmt_double(result.rate) << ',' << bvn::detail::fmt_double(result.ci.lo) << ','
      << bvn::detail::fmt_double(result.ci.hi) << ',' << bvn::detail::fmt_double(result.chance) << ','
      << bvn::detail::fmt_double(result.odds_vs_chance) << ','
      << bvn::detail::fmt_double(result.fusion.best_lambda) << ','
      << bvn::detail::fmt_double(result.fusion.best_rate) << '\n';
  }

  json cfg_echo = j;
  cfg_echo.erase("rate");
  cfg_echo.erase("ci");
  cfg_echo.erase("odds_vs_chance");
  cfg_echo.erase("fusion");
  cfg_echo.erase("odds_bvn_vs_fusion");
  cfg_echo["command"] = "study";
  cfg_echo["jobs"] = opt.jobs;
  write_json_file(cfg_echo, (out / "effective_config.json").string());

  std::cout << "rate: " << bvn::detail::fmt_double(result.rate) << '\n';
  std::cout << "ci: [" << bvn::detail::fmt_double(result.ci.lo) << ", "
            << bvn::detail::fmt_double(result.ci.hi) << "]\n";
  return 0;
}

struct SimulateOptions {
  int n = 0, m = 0, mprime = 0, count = 1;
  double p1 = 0.0, p2 = 0.0, q2 = 0.0;
  std::uint64_t seed = 0;
  std::string out = ".";
};

int cmd_simulate(const SimulateOptions& opt) {
  const bvn::ModelParams params{opt.p1, opt.p2, opt.q2};
  bvn::require_generation_valid(params);
  if (opt.count < 1) throw std::invalid_argument("simulate: need --count >= 1");
  const bvn::FullColoring coloring = bvn::make_coloring_first_reds(opt.n, opt.m, opt.mprime);

  ensure_out_dir(opt.out);
  const fs::path out(opt.out);
  for (int k = 0; k < opt.count; ++k) {
    bvn::Rng rng(bvn::derive_seed(opt.seed, static_cast<std::uint64_t>(k)));
    const bvn::AttributedGraph g = bvn::generate_graph(coloring, params, rng);
    char name[32];
    std::snprintf(name, sizeof(name), "graph_%04d.json", k);
    bvn::write_graph_json(g, (out / name).string());
    std::snprintf(name, sizeof(name), "truth_%04d.json", k);
    write_json_file(bvn::truth_to_json(coloring), (out / name).string());
  }
  std::cout << "wrote " << opt.count << " graph(s) to " << opt.out << '\n';
  return 0;
}

struct BaselineOptions {
  std::string input;
  std::string truth;
  std::string out;
  std::string format = "text";
  double lambda = 0.5;
  bool grid = false;
};

int cmd_baseline(const BaselineOptions& opt) {
  if (!(opt.lambda >= 0.0 && opt.lambda <= 1.0))
    throw std::invalid_argument("baseline: need --lambda in [0,1]");
  const bvn::LoadedGraph loaded = bvn::load_graph(opt.input);
  const bvn::StatsBundle stats = bvn::compute_stats(loaded.graph);
  const int base = loaded.index_base;

  json report;
  if (opt.grid) {
    if (opt.truth.empty())
      throw std::invalid_argument("baseline: a grid sweep needs ground truth; pass --truth <file>");
    const std::vector<int> red = bvn::load_truth(opt.truth);
    bvn::LabeledStats labeled;
    labeled.stats = stats;
    for (int v : red)
      if (!loaded.graph.is_observed_red(v)) labeled.latent_red_ids.push_back(v);
    const std::vector<double> grid = bvn::default_lambda_grid();
    const bvn::FusionSweep sweep = bvn::fusion_oracle_sweep({&labeled, 1}, grid);
    std::cout << "lambda,correct\n";
    for (std::size_t k = 0; k < sweep.grid.size(); ++k)
      std::cout << bvn::detail::fmt_double(sweep.grid[k]) << ',' << sweep.rates[k] << '\n';
    std::cout << "best_lambda: " << bvn::detail::fmt_double(sweep.best_lambda) << '\n';
    report["grid"] = sweep.grid;
    report["rates"] = sweep.rates;
    report["best_lambda"] = sweep.best_lambda;
  } else {
    const std::vector<double> tau = bvn::fusion_scores(stats, opt.lambda);
    const int nominee = bvn::fusion_nominate(stats, opt.lambda);
    std::cout << "vertex,r,s,tau\n";
    for (std::size_t i = 0; i < tau.size(); ++i)
      std::cout << (stats.latent_ids[i] + base) << ',' << stats.latent[i].r << ',' << stats.latent[i].s
                << ',' << bvn::detail::fmt_double(tau[i]) << '\n';
    std::cout << "nominee: " << (nominee + base) << '\n';
    report["lambda"] = opt.lambda;
    report["nominee"] = nominee + base;
    json taus = json::object();
    for (std::size_t i = 0; i < tau.size(); ++i)
      taus[std::to_string(stats.latent_ids[i] + base)] = tau[i];
    report["tau"] = std::move(taus);
  }
  if (!opt.out.empty()) {
    ensure_out_dir(opt.out);
    write_json_file(report, (fs::path(opt.out) / "baseline.json").string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian vertex nomination on attributed graphs"};
  app.require_subcommand(1);
  app.set_config("--config");

  InferOptions infer_opt;
  auto* infer = app.add_subcommand("infer", "Run the sampler on a graph file and nominate a vertex");
  infer->add_option("--input,-i", infer_opt.input, "Graph file (JSON or triangular text)")->required();
  infer->add_option("--out,-o", infer_opt.out, "Output directory (default: .)");
  infer->add_option("--seed", infer_opt.seed, "RNG seed (default 0)");
  infer->add_option("--preset", infer_opt.preset,
                    "Sampler preset: default (1000 burn-in + 1000 samples) or long (10000 + 10000)");
  infer->add_option("--burn-in", infer_opt.burn_in, "Burn-in iterations (overrides preset)");
  infer->add_option("--samples", infer_opt.samples, "Retained iterations (overrides preset)");
  infer->add_option("--alpha", infer_opt.alpha, "Beta hyperprior alpha (default 2)");
  infer->add_option("--beta", infer_opt.beta, "Beta hyperprior beta (default n - m')");
  infer->add_option("--autocorr", infer_opt.autocorr_lags, "Also write autocorr.csv up to this lag");
  infer->add_flag("--require-latent-red", infer_opt.require_latent_red,
                  "Reserved prior variant (rejected with a diagnostic)");

  StudyOptions study_opt;
  auto* study = app.add_subcommand(
      "study",
      "Monte Carlo nomination study. Presets: toy-12 (n=12, m=5, m'=2, p1=.25, p2=.15, q2=.25); "
      "table3-m8 / table3-m32 (n=184, p1=p2=.2, q2=.4); enron-sim (n=184, m=10, m'=5, "
      "p1=.0168, p2=.0111, q2=.1298). All presets: 1000 graphs, 1000+1000 iterations, alpha=2, "
      "beta=n-m'.");
  study->add_option("--preset", study_opt.preset, "toy-12 | table3-m8 | table3-m32 | enron-sim");
  study->add_option("--trials", study_opt.trials, "Number of graphs (overrides preset)");
  study->add_option("--n", study_opt.n, "Vertex count");
  study->add_option("--m", study_opt.m, "Total red vertices");
  study->add_option("--mprime", study_opt.mprime, "Observed red vertices");
  study->add_option("--p1", study_opt.p1, "Green-edge probability (non-red pair)");
  study->add_option("--p2", study_opt.p2, "Red-edge probability (non-red pair)");
  study->add_option("--q2", study_opt.q2, "Red-edge probability (red pair)");
  study->add_option("--burn-in", study_opt.burn_in, "Burn-in iterations");
  study->add_option("--samples", study_opt.samples, "Retained iterations");
  study->add_option("--alpha", study_opt.alpha, "Beta hyperprior alpha (default 2)");
  study->add_option("--beta", study_opt.beta, "Beta hyperprior beta (default n - m')");
  study->add_option("--seed", study_opt.seed, "Master seed; per-trial streams are derived");
  study->add_option("--jobs", study_opt.jobs, "Worker threads (results independent of this)");
  study->add_option("--out,-o", study_opt.out, "Output directory (default: .)");
  study->add_option("--format", study_opt.format, "Summary format: json (default) or csv (writes both)");

  SimulateOptions sim_opt;
  auto* sim = app.add_subcommand("simulate", "Write synthetic graphs plus ground-truth sidecars");
  sim->add_option("--n", sim_opt.n, "Vertex count")->required();
  sim->add_option("--m", sim_opt.m, "Total red vertices")->required();
  sim->add_option("--mprime", sim_opt.mprime, "Observed red vertices")->required();
  sim->add_option("--p1", sim_opt.p1, "Green-edge probability (non-red pair)")->required();
  sim->add_option("--p2", sim_opt.p2, "Red-edge probability (non-red pair)")->required();
  sim->add_option("--q2", sim_opt.q2, "Red-edge probability (red pair)")->required();
  sim->add_option("--count", sim_opt.count, "Number of graphs (default 1)");
  sim->add_option("--seed", sim_opt.seed, "Master seed");
  sim->add_option("--out,-o", sim_opt.out, "Output directory (default: .)");

  BaselineOptions base_opt;
  auto* baseline = app.add_subcommand("baseline", "Fusion-score nomination (context/content baseline)");
  baseline->add_option("--input,-i", base_opt.input, "Graph file")->required();
  baseline->add_option("--lambda", base_opt.lambda, "Fusion weight in [0,1] (default 0.5)");
  baseline->add_flag("--grid", base_opt.grid, "Sweep the default 21-point lambda grid (needs --truth)");
  baseline->add_option("--truth", base_opt.truth, "Ground-truth sidecar file");
  baseline->add_option("--out,-o", base_opt.out, "Optional directory for baseline.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (infer->parsed()) return cmd_infer(infer_opt);
    if (study->parsed()) return cmd_study(study_opt);
    if (sim->parsed()) return cmd_simulate(sim_opt);
    if (baseline->parsed()) return cmd_baseline(base_opt);
  } catch (const bvn::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
