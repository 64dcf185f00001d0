#include "bvn/graph_io.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bvn/graph.hpp"
#include "support/demo_graph.hpp"

using bvn::AttributedGraph;
using bvn::graph_from_json;
using bvn::graph_from_text;
using bvn::graph_to_json;
using bvn::graph_to_text;
using bvn::LoadedGraph;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("bvn_io_test_" + name);
}

}  // namespace

TEST(GraphIo, JsonRoundTrip) {
  const AttributedGraph g = testsupport::demo12_graph();
  const LoadedGraph back = graph_from_json(graph_to_json(g));
  EXPECT_EQ(back.graph, g);
  EXPECT_EQ(back.index_base, 0);
}

TEST(GraphIo, JsonOneBasedIds) {
  const AttributedGraph g = testsupport::demo12_graph();
  const nlohmann::json j = graph_to_json(g, 1);
  EXPECT_EQ(j["observed_red"][0], 1);
  const LoadedGraph back = graph_from_json(j);
  EXPECT_EQ(back.graph, g);
  EXPECT_EQ(back.index_base, 1);
}

TEST(GraphIo, TextRoundTrip) {
  const AttributedGraph g = testsupport::demo12_graph();
  const std::string text = graph_to_text(g);
  std::istringstream in(text);
  EXPECT_EQ(graph_from_text(in).graph, g);
  EXPECT_EQ(text, testsupport::demo12_text);
}

TEST(GraphIo, CrossFormatLossless) {
  const AttributedGraph g = testsupport::demo12_graph();
  // text -> json -> text preserves bytes, so nothing is lost either way.
  const LoadedGraph via_json = graph_from_json(graph_to_json(g, 1));
  EXPECT_EQ(graph_to_text(via_json.graph), testsupport::demo12_text);
}

TEST(GraphIo, LoadSniffsFormat) {
  const AttributedGraph g = testsupport::demo12_graph();
  const auto jpath = temp_file("g.json");
  const auto tpath = temp_file("g.txt");
  bvn::write_graph_json(g, jpath.string());
  bvn::write_graph_text(g, tpath.string());
  EXPECT_EQ(bvn::load_graph(jpath.string()).graph, g);
  EXPECT_EQ(bvn::load_graph(tpath.string()).graph, g);
  std::filesystem::remove(jpath);
  std::filesystem::remove(tpath);
}

TEST(GraphIo, ShippedDemoFileMatchesFixture) {
  const LoadedGraph loaded = bvn::load_graph(std::string(BVN_DATA_DIR) + "/toy12.txt");
  EXPECT_EQ(loaded.graph, testsupport::demo12_graph());
  EXPECT_EQ(loaded.index_base, 1);
}

TEST(GraphIo, TextErrorsCarryLineNumbers) {
  std::istringstream no_header("1 2 0\n0 1\n2\n");
  try {
    graph_from_text(no_header);
    FAIL() << "expected IoError";
  } catch (const bvn::IoError& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }

  std::istringstream bad_entry("observed_red: 1 2\n0 3 0\n0 1\n2\n");
  try {
    graph_from_text(bad_entry);
    FAIL() << "expected IoError";
  } catch (const bvn::IoError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }

  std::istringstream ragged("observed_red: 1 2\n0 1\n0 1\n2\n");
  EXPECT_THROW(graph_from_text(ragged), bvn::IoError);
}

TEST(GraphIo, JsonValidation) {
  EXPECT_THROW(graph_from_json(nlohmann::json::parse("{\"n\": 4}")), bvn::IoError);
  EXPECT_THROW(graph_from_json(nlohmann::json::parse(
                   R"({"n": 4, "observed_red": [0, 1], "edges": [[0, 1, 7]]})")),
               bvn::IoError);
  EXPECT_THROW(graph_from_json(nlohmann::json::parse(
                   R"({"n": 4, "observed_red": [0, 1], "edges": [[0, 1, 2], [1, 0, 1]]})")),
               bvn::IoError);
  EXPECT_THROW(graph_from_json(nlohmann::json::parse(R"({"n": 4, "observed_red": [0], "edges": []})")),
               std::exception);
}

TEST(GraphIo, MissingFile) { EXPECT_THROW(bvn::load_graph("/nonexistent/graph.json"), bvn::IoError); }

TEST(GraphIo, TruthSidecarRoundTrip) {
  const bvn::FullColoring truth = testsupport::demo12_truth();
  const std::vector<int> red = bvn::truth_from_json(bvn::truth_to_json(truth));
  EXPECT_EQ(red, truth.red_ids());
  const std::vector<int> red1 = bvn::truth_from_json(bvn::truth_to_json(truth, 1));
  EXPECT_EQ(red1, truth.red_ids());
}
