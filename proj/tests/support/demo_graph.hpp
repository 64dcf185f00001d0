#pragma once

// The 12-vertex demo graph used across the tests: two observed red vertices
// (1 and 2 in the file's 1-based labels), three latent reds (3, 4, 5) and
// seven latent greens. Drawn from the toy model n=12, m=5, m'=2,
// p1=0.25, p2=0.15, q2=0.25.

#include <sstream>
#include <string>

#include "bvn/graph.hpp"
#include "bvn/graph_io.hpp"

namespace testsupport {

inline const char* demo12_text =
    "observed_red: 1 2\n"
    "2 2 0 2 2 0 1 0 1 1 0\n"
    "0 0 0 0 0 0 0 0 0 1\n"
    "2 0 0 0 1 2 2 0 1\n"
    "0 0 1 0 1 1 0 0\n"
    "2 1 0 1 0 1 0\n"
    "0 0 0 0 0 0\n"
    "0 0 0 0 2\n"
    "1 0 0 0\n"
    "1 0 1\n"
    "0 1\n"
    "0\n";

inline bvn::AttributedGraph demo12_graph() {
  std::istringstream in(demo12_text);
  return bvn::graph_from_text(in).graph;
}

// True full coloring behind the demo graph (1-based reds 1..5).
inline bvn::FullColoring demo12_truth() {
  bvn::FullColoring c;
  c.y.assign(12, 1);
  for (int v = 0; v < 5; ++v) c.y[v] = 2;
  c.observed_red = {0, 1};
  return c;
}

inline bvn::ModelParams demo12_params() { return {0.25, 0.15, 0.25}; }

}  // namespace testsupport
