#pragma once

// Graph file formats.
//
// JSON:  {"n": 12, "observed_red": [0, 1], "edges": [[u, v, attr], ...]}
//        with attr in {1, 2}; optional "index_base": 0 or 1 (default 0).
// Text:  a header line listing the observed-red ids, then the upper triangle
//        row by row (row i holds entries for columns i+1 .. n). The text
//        layout is 1-based, matching how such tables are usually printed.
//
// Both formats describe the same data and round-trip losslessly.

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bvn/graph.hpp"

namespace bvn {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoadedGraph {
  AttributedGraph graph;
  int index_base = 0;  // how ids were written in the file; internal ids are 0-based
};

inline nlohmann::json graph_to_json(const AttributedGraph& g, int index_base = 0) {
  if (index_base != 0 && index_base != 1) throw std::invalid_argument("graph json: index_base must be 0 or 1");
  nlohmann::json j;
  j["n"] = g.n();
  j["index_base"] = index_base;
  nlohmann::json obs = nlohmann::json::array();
  for (int v : g.observed_red()) obs.push_back(v + index_base);
  j["observed_red"] = std::move(obs);
  nlohmann::json edges = nlohmann::json::array();
  for (int u = 0; u < g.n(); ++u)
    for (int v = u + 1; v < g.n(); ++v)
      if (g.attr(u, v) != 0)
        edges.push_back(nlohmann::json::array({u + index_base, v + index_base, int(g.attr(u, v))}));
  j["edges"] = std::move(edges);
  return j;
}

inline LoadedGraph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("observed_red") || !j.contains("edges"))
    throw IoError("graph json: expected object with fields n, observed_red, edges");
  const int base = j.value("index_base", 0);
  if (base != 0 && base != 1) throw IoError("graph json: index_base must be 0 or 1");
  const int n = j.at("n").get<int>();
  std::vector<int> obs;
  for (const auto& v : j.at("observed_red")) obs.push_back(v.get<int>() - base);
  LoadedGraph out{AttributedGraph(n, std::move(obs)), base};
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 3) throw IoError("graph json: each edge must be [u, v, attr]");
    const int u = e[0].get<int>() - base;
    const int v = e[1].get<int>() - base;
    const int a = e[2].get<int>();
    if (a != 1 && a != 2) throw IoError("graph json: edge attribute must be 1 or 2");
    if (out.graph.attr(u, v) != 0) throw IoError("graph json: duplicate edge");
    out.graph.set_attr(u, v, static_cast<std::uint8_t>(a));
  }
  return out;
}

inline void write_graph_json(const AttributedGraph& g, const std::string& path, int index_base = 0) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << graph_to_json(g, index_base).dump(2) << '\n';
}

inline std::string graph_to_text(const AttributedGraph& g) {
  std::ostringstream out;
  out << "observed_red:";
  for (int v : g.observed_red()) out << ' ' << (v + 1);
  out << '\n';
  for (int u = 0; u < g.n() - 1; ++u) {
    for (int v = u + 1; v < g.n(); ++v) {
      if (v > u + 1) out << ' ';
      out << int(g.attr(u, v));
    }
    out << '\n';
  }
  return out.str();
}

// Parses the triangular text layout. Reports 1-based line numbers on errors.
inline LoadedGraph graph_from_text(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::vector<int> obs;
  bool have_header = false;
  std::vector<std::vector<int>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = line;
    if (auto hash = body.find('#'); hash != std::string::npos) body.erase(hash);
    if (body.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(body);
    if (!have_header) {
      std::string tag;
      ls >> tag;
      if (tag != "observed_red:")
        throw IoError("line " + std::to_string(lineno) + ": expected 'observed_red:' header");
      int v = 0;
      while (ls >> v) obs.push_back(v - 1);
      have_header = true;
      continue;
    }
    std::vector<int> row;
    int a = 0;
    while (ls >> a) {
      if (a < 0 || a > 2)
        throw IoError("line " + std::to_string(lineno) + ": entries must be 0, 1 or 2");
      row.push_back(a);
    }
    if (!ls.eof())
      throw IoError("line " + std::to_string(lineno) + ": malformed entry");
    rows.push_back(std::move(row));
  }
  if (!have_header) throw IoError("missing 'observed_red:' header line");
  const int n = static_cast<int>(rows.size()) + 1;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (static_cast<int>(rows[i].size()) != n - 1 - static_cast<int>(i))
      throw IoError("triangle row " + std::to_string(i + 1) + ": expected " +
                    std::to_string(n - 1 - static_cast<int>(i)) + " entries, found " +
                    std::to_string(rows[i].size()));
  LoadedGraph out{AttributedGraph(n, std::move(obs)), 1};
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      if (rows[i][k] != 0)
        out.graph.set_attr(static_cast<int>(i), static_cast<int>(i + 1 + k),
                           static_cast<std::uint8_t>(rows[i][k]));
  return out;
}

inline void write_graph_text(const AttributedGraph& g, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << graph_to_text(g);
}

// Sniffs JSON vs text by the first non-space byte.
inline LoadedGraph load_graph(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open graph file: " + path);
  char c = 0;
  while (f.get(c) && std::isspace(static_cast<unsigned char>(c))) {
  }
  if (!f) throw IoError("empty graph file: " + path);
  f.unget();
  if (c == '{') {
    nlohmann::json j;
    try {
      f >> j;
    } catch (const nlohmann::json::exception& e) {
      throw IoError("graph file " + path + ": " + e.what());
    }
    return graph_from_json(j);
  }
  return graph_from_text(f);
}

// Ground truth sidecar (kept out of graph files so inference cannot see it):
// {"n": ..., "red": [ids], "index_base": ...}.
inline nlohmann::json truth_to_json(const FullColoring& c, int index_base = 0) {
  nlohmann::json j;
  j["n"] = c.n();
  j["index_base"] = index_base;
  nlohmann::json red = nlohmann::json::array();
  for (int v : c.red_ids()) red.push_back(v + index_base);
  j["red"] = std::move(red);
  return j;
}

// Red ids from a truth sidecar, normalized to 0-based.
inline std::vector<int> truth_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("red")) throw IoError("truth json: expected object with field 'red'");
  const int base = j.value("index_base", 0);
  std::vector<int> red;
  for (const auto& v : j.at("red")) red.push_back(v.get<int>() - base);
  return red;
}

inline std::vector<int> load_truth(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open truth file: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("truth file " + path + ": " + e.what());
  }
  return truth_from_json(j);
}

}  // namespace bvn
