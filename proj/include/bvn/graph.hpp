#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bvn/rng.hpp"

namespace bvn {

// Edge attributes: 0 = no edge, 1 = green edge, 2 = red edge.
// Vertex colors: 1 = green, 2 = red. Vertex ids are 0-based internally.

// Edge-probability parameters. (p0, p1, p2) governs pairs with at least one
// green endpoint, (q0, q1, q2) pairs of red vertices, with q1 tied to p1.
struct ModelParams {
  double p1 = 0.0;
  double p2 = 0.0;
  double q2 = 0.0;

  double p0() const { return 1.0 - p1 - p2; }
  double q1() const { return p1; }
  double q0() const { return 1.0 - p1 - q2; }

  // Open support required for inference: 0 < p1 < 1, 0 < p2 < 1 - p1,
  // p2 < q2 < 1 - p1.
  bool inference_valid() const {
    return p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0 - p1 && q2 > p2 && q2 < 1.0 - p1;
  }

  // Closure of the support; enough to generate graphs (degenerate corners
  // included), not enough to run the sampler.
  bool generation_valid() const {
    return p1 >= 0.0 && p2 >= 0.0 && p1 + p2 <= 1.0 && q2 >= p2 && p1 + q2 <= 1.0;
  }
};

inline void require_inference_valid(const ModelParams& pr) {
  if (!(pr.p1 > 0.0 && pr.p1 < 1.0)) throw std::invalid_argument("params: need 0 < p1 < 1");
  if (!(pr.p2 > 0.0 && pr.p2 < 1.0 - pr.p1)) throw std::invalid_argument("params: need 0 < p2 < 1 - p1");
  if (!(pr.q2 > pr.p2 && pr.q2 < 1.0 - pr.p1)) throw std::invalid_argument("params: need p2 < q2 < 1 - p1");
}

inline void require_generation_valid(const ModelParams& pr) {
  if (!(pr.p1 >= 0.0 && pr.p2 >= 0.0 && pr.p1 + pr.p2 <= 1.0))
    throw std::invalid_argument("params: need p1, p2 >= 0 and p1 + p2 <= 1");
  if (!(pr.q2 >= pr.p2)) throw std::invalid_argument("params: need q2 >= p2");
  if (!(pr.p1 + pr.q2 <= 1.0)) throw std::invalid_argument("params: need p1 + q2 <= 1");
}

// Context statistic r (observed-red neighbours) and content statistic s
// (incident red edges) of one vertex.
struct VertexStats {
  int r = 0;
  int s = 0;
  friend bool operator==(const VertexStats&, const VertexStats&) = default;
};

class AttributedGraph {
 public:
  AttributedGraph() = default;
  AttributedGraph(int n, std::vector<int> observed_red)
      : n_(n), attr_(static_cast<std::size_t>(n) * n, 0), observed_red_(std::move(observed_red)) {
    validate_observed();
  }

  int n() const { return n_; }
  int mprime() const { return static_cast<int>(observed_red_.size()); }
  const std::vector<int>& observed_red() const { return observed_red_; }

  std::uint8_t attr(int u, int v) const { return attr_[idx(u, v)]; }

  void set_attr(int u, int v, std::uint8_t a) {
    if (u == v) throw std::invalid_argument("graph: self-loops are not allowed");
    if (a > 2) throw std::invalid_argument("graph: edge attribute must be 0, 1 or 2");
    attr_[idx(u, v)] = a;
    attr_[idx(v, u)] = a;
  }

  bool is_observed_red(int v) const {
    return std::find(observed_red_.begin(), observed_red_.end(), v) != observed_red_.end();
  }

  // Latent vertex ids in ascending order.
  std::vector<int> latent_ids() const {
    std::vector<int> out;
    out.reserve(n_ - mprime());
    for (int v = 0; v < n_; ++v)
      if (!is_observed_red(v)) out.push_back(v);
    return out;
  }

  friend bool operator==(const AttributedGraph&, const AttributedGraph&) = default;

 private:
  std::size_t idx(int u, int v) const {
    if (u < 0 || u >= n_ || v < 0 || v >= n_) throw std::out_of_range("graph: vertex id out of range");
    return static_cast<std::size_t>(u) * n_ + v;
  }

  void validate_observed() const {
    if (n_ < 2) throw std::invalid_argument("graph: need at least 2 vertices");
    std::set<int> seen;
    for (int v : observed_red_) {
      if (v < 0 || v >= n_) throw std::invalid_argument("graph: observed-red id out of range");
      if (!seen.insert(v).second) throw std::invalid_argument("graph: duplicate observed-red id");
    }
    if (observed_red_.size() < 2)
      throw std::invalid_argument("graph: need at least 2 observed red vertices (m' >= 2)");
  }

  int n_ = 0;
  std::vector<std::uint8_t> attr_;
  std::vector<int> observed_red_;
};

// Ground-truth coloring of all n vertices, with the subset of reds that are
// treated as observed.
struct FullColoring {
  std::vector<std::uint8_t> y;  // length n, entries 1 (green) / 2 (red)
  std::vector<int> observed_red;

  int n() const { return static_cast<int>(y.size()); }

  int red_count() const {
    int m = 0;
    for (std::uint8_t c : y) m += (c == 2);
    return m;
  }

  std::vector<int> red_ids() const {
    std::vector<int> out;
    for (int v = 0; v < n(); ++v)
      if (y[v] == 2) out.push_back(v);
    return out;
  }

  std::vector<int> latent_red_ids() const {
    std::vector<int> out;
    for (int v = 0; v < n(); ++v)
      if (y[v] == 2 && std::find(observed_red.begin(), observed_red.end(), v) == observed_red.end())
        out.push_back(v);
    return out;
  }

  void validate() const {
    for (std::uint8_t c : y)
      if (c != 1 && c != 2) throw std::invalid_argument("coloring: entries must be 1 or 2");
    for (int v : observed_red) {
      if (v < 0 || v >= n()) throw std::invalid_argument("coloring: observed-red id out of range");
      if (y[v] != 2) throw std::invalid_argument("coloring: observed-red vertex must be red");
    }
    if (observed_red.size() < 2)
      throw std::invalid_argument("coloring: need at least 2 observed red vertices (m' >= 2)");
  }
};

// Convention used by the study harness: vertices 0..m-1 red, of which the
// first m' are observed.
inline FullColoring make_coloring_first_reds(int n, int m, int mprime) {
  if (!(2 <= mprime && mprime <= m && m <= n))
    throw std::invalid_argument("coloring: need 2 <= m' <= m <= n");
  FullColoring c;
  c.y.assign(n, 1);
  for (int v = 0; v < m; ++v) c.y[v] = 2;
  c.observed_red.resize(mprime);
  for (int v = 0; v < mprime; ++v) c.observed_red[v] = v;
  return c;
}

// (r, s) statistics split into the observed-red part (ordered as
// observed_red) and the latent part (ordered by vertex id).
struct StatsBundle {
  int n = 0;
  int mprime = 0;
  std::vector<int> observed_ids;
  std::vector<int> latent_ids;
  std::vector<VertexStats> observed;
  std::vector<VertexStats> latent;
};

inline StatsBundle compute_stats(const AttributedGraph& g) {
  StatsBundle b;
  b.n = g.n();
  b.mprime = g.mprime();
  b.observed_ids = g.observed_red();
  b.latent_ids = g.latent_ids();

  std::vector<char> obs(g.n(), 0);
  for (int v : b.observed_ids) obs[v] = 1;

  auto stats_of = [&](int v) {
    VertexStats t;
    for (int u = 0; u < g.n(); ++u) {
      if (u == v) continue;
      const std::uint8_t a = g.attr(u, v);
      if (a != 0 && obs[u]) ++t.r;
      if (a == 2) ++t.s;
    }
    return t;
  };

  b.observed.reserve(b.observed_ids.size());
  for (int v : b.observed_ids) b.observed.push_back(stats_of(v));
  b.latent.reserve(b.latent_ids.size());
  for (int v : b.latent_ids) b.latent.push_back(stats_of(v));
  return b;
}

// Samples edge attributes independently per unordered pair: red-red pairs use
// (q0, q1 = p1, q2), every other pair (p0, p1, p2). The observed-red set is
// whatever the coloring declares observed; that choice is the caller's.
inline AttributedGraph generate_graph(const FullColoring& coloring, const ModelParams& params, Rng& rng) {
  coloring.validate();
  require_generation_valid(params);

  AttributedGraph g(coloring.n(), coloring.observed_red);
  const double p_cut0 = params.p0();
  const double p_cut1 = params.p0() + params.p1;
  const double q_cut0 = params.q0();
  const double q_cut1 = params.q0() + params.q1();
  for (int u = 0; u < g.n(); ++u) {
    for (int v = u + 1; v < g.n(); ++v) {
      const bool red_pair = coloring.y[u] == 2 && coloring.y[v] == 2;
      const double c0 = red_pair ? q_cut0 : p_cut0;
      const double c1 = red_pair ? q_cut1 : p_cut1;
      const double x = uniform01(rng);
      std::uint8_t a = 0;
      if (x >= c0) a = (x < c1) ? 1 : 2;
      if (a != 0) g.set_attr(u, v, a);
    }
  }
  return g;
}

}  // namespace bvn
