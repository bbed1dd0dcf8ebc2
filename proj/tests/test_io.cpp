#include <gtest/gtest.h>

#include <cmath>

#include "graphonlab.hpp"

using namespace graphonlab;
using nlohmann::json;

TEST(Format, ShortestRoundTripDecimals) {
  for (double v : {0.1, 1.0 / 3.0, 0.125, 1e-300, 0.0, 123456.789, std::nextafter(0.5, 1.0)}) {
    const auto s = io::fmt_double(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
  EXPECT_EQ(io::fmt_double(0.1), "0.1");
  EXPECT_EQ(io::fmt_double(0.25), "0.25");
}

TEST(Profile, JsonAndCsvRoundTrip) {
  const GraphonHandle w = AnalyticGraphon::counterexample();
  const json config{{"seed", 7}};
  for (const auto& data : {io::to_data(degree(w, 1000)), io::to_data(level_functional(w, 1000, 0.0))}) {
    const auto doc = io::profile_to_json(data, config);
    EXPECT_EQ(doc["format"], "profile-v1");
    EXPECT_EQ(doc["config"], config);
    EXPECT_EQ(io::profile_from_json(json::parse(doc.dump())), data);
    const auto csv = io::profile_to_csv(data, config);
    EXPECT_EQ(csv.rfind("# config: ", 0), 0u);
    EXPECT_EQ(io::profile_from_csv(csv), data);
  }
}

TEST(Profile, RejectsBadInput) {
  EXPECT_THROW(io::profile_from_json(json{{"format", "dist-v1"}}), ValidationError);
  EXPECT_THROW(io::profile_from_csv("x,value\n0.5,abc\n"), ValidationError);
  json doc = io::profile_to_json(io::to_data(degree(AnalyticGraphon::product(), 4)));
  doc["m"] = 5;
  EXPECT_THROW(io::profile_from_json(doc), ValidationError);
}

TEST(Dist, ScalarAndJointRoundTrip) {
  const GraphonHandle w = AnalyticGraphon::counterexample();
  const auto s = degree_level_samples(w, 512, 0.0);
  const auto dl = degree_law(s.degree);
  EXPECT_TRUE(io::dist_from_json(json::parse(io::dist_to_json(dl).dump())) == dl);
  EXPECT_TRUE(io::dist_from_csv(io::dist_to_csv(dl)) == dl);
  const auto jl = joint_law(s);
  EXPECT_TRUE(io::joint_from_json(json::parse(io::dist_to_json(jl).dump())) == jl);
  EXPECT_TRUE(io::joint_from_csv(io::dist_to_csv(jl)) == jl);
  EXPECT_THROW(io::joint_from_json(io::dist_to_json(dl)), ValidationError);
}

TEST(Map, DocumentedOpsFormat) {
  const auto doc = json::parse(
      R"({"format":"mpm-v1", "ops":[{"kind":"exchange","k":4,"perm":[3,1,4,2]},{"kind":"expand","m":2}]})");
  const auto phi = io::map_from_json(doc);
  ASSERT_EQ(phi.ops().size(), 2u);
  EXPECT_EQ(std::get<Exchange>(phi.ops()[0]).perm, (std::vector<int>{2, 0, 3, 1}));
  EXPECT_EQ(std::get<Expand>(phi.ops()[1]).m, 2);
  EXPECT_EQ(io::map_to_json(phi), doc);
  EXPECT_THROW(io::map_from_json(json::parse(R"({"format":"mpm-v1","ops":[{"kind":"rotate"}]})")), ValidationError);
  EXPECT_THROW(io::map_from_json(json::parse(R"({"format":"mpm-v1","ops":[{"kind":"exchange","k":2,"perm":[1,1]}]})")),
               ValidationError);
}

TEST(Cut, SubsetsAreOneBasedAndSorted) {
  const StepKernel k(2, {0.5, -0.5, -0.5, 0.5});
  const auto doc = io::cut_to_json(cut_norm(k, CutMethod::exhaustive));
  EXPECT_EQ(doc["S"], json::array({1}));
  EXPECT_EQ(doc["T"], json::array({1}));
  EXPECT_EQ(doc["method"], "exhaustive");
  EXPECT_DOUBLE_EQ(doc["value"].get<double>(), 0.125);
}

TEST(Graph, EdgeListRoundTrip) {
  const auto g = sample_graph(AnalyticGraphon::counterexample(), 200, 3);
  const auto text = io::edge_list(g);
  std::istringstream in(text);
  std::size_t i = 0, j = 0;
  while (in >> i >> j) {
    ASSERT_GE(i, 1u);
    ASSERT_LT(i, j);
    ASSERT_LE(j, 200u);
  }
  const auto meta = io::graph_metadata(g, "counterexample");
  const auto back = io::graph_from_files(text, json::parse(meta.dump()));
  EXPECT_EQ(back.edges(), g.edges());
  EXPECT_EQ(back.positions(), g.positions());
  EXPECT_EQ(back.seed(), 3u);
  EXPECT_THROW(io::graph_from_files("2 1\n", meta), ValidationError);
}

TEST(Verify, ReportShape) {
  VerifyConfig cfg;
  cfg.m = 4096;
  const auto r = ProofPipeline(AnalyticGraphon::counterexample(), {}, cfg).run();
  const auto doc = io::verify_to_json(r, {{"seed", 1}});
  EXPECT_EQ(doc["steps"].size(), r.steps.size());
  EXPECT_EQ(doc["certificate"]["verdict"], "CONTRADICTION");
  EXPECT_EQ(doc["certificate"]["tv_distance"], 1.0);
  EXPECT_EQ(doc["certificate"]["forced_h1"], 0.25);
  for (const auto& s : doc["steps"])
    for (const char* key : {"id", "claimed", "computed", "tolerance", "pass"}) EXPECT_TRUE(s.contains(key)) << key;
  EXPECT_NE(io::verify_table(r).find("CONTRADICTION"), std::string::npos);
}
