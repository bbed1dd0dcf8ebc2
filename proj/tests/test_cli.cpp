#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "graphonlab.hpp"

using namespace graphonlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + GRAPHONLAB_TOOL + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe) != nullptr) r.out += buf;
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("graphonlab_cli_" + name);
  fs::remove_all(dir);
  return dir.string();
}

}  // namespace

TEST(Cli, HelpListsEverySubcommand) {
  const auto r = run("--help");
  EXPECT_EQ(r.status, 0);
  for (const char* sub : {"build", "degrees", "levels", "laws", "pullback", "sort", "cutnorm", "distance", "verify",
                          "sample", "diverge"}) {
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
    const auto h = run(std::string(sub) + " --help");
    EXPECT_EQ(h.status, 0) << sub;
    EXPECT_NE(h.out.find("--seed"), std::string::npos) << sub;
  }
}

TEST(Cli, VerifyCounterexample) {
  const auto dir = scratch("verify");
  const auto r = run("verify --graphon counterexample --m 65536 -o " + dir);
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("verdict CONTRADICTION"), std::string::npos);
  const auto doc = io::read_json_file(dir + "/verify.json");
  EXPECT_EQ(doc["certificate"]["verdict"], "CONTRADICTION");
  EXPECT_EQ(doc["config"]["seed"], 20240001);
  EXPECT_EQ(doc["config"]["m"], 65536);
  for (const auto& s : doc["steps"]) EXPECT_TRUE(s["pass"].get<bool>()) << s["id"];
}

TEST(Cli, VerifyControlsExitZero) {
  for (const char* g : {"constant --p 0.3", "product", "threshold --t 0.6"}) {
    const auto r = run(std::string("verify --m 8192 -o ") + scratch("control") + " --graphon " + g);
    EXPECT_EQ(r.status, 0) << g << "\n" << r.out;
    EXPECT_NE(r.out.find("verdict NO-CONTRADICTION"), std::string::npos) << g;
  }
}

TEST(Cli, DegreesConstantProfile) {
  const auto dir = scratch("degrees");
  const auto r = run("degrees --graphon constant --p 0.3 --m 100 -o " + dir);
  EXPECT_EQ(r.status, 0) << r.out;
  const auto p = io::profile_from_json(io::read_json_file(dir + "/degrees.json"));
  ASSERT_EQ(p.values.size(), 100u);
  for (double v : p.values) EXPECT_EQ(v, 0.3);
}

TEST(Cli, DivergeMatchesFrozenBaseline) {
  const auto dir = scratch("diverge");
  const auto r = run("diverge --graphon counterexample --n 128,256,512,1024 -o " + dir + " --baseline " +
                     GRAPHONLAB_TEST_DATA + "/diverge_baseline.json");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("match within 1e-9"), std::string::npos);
  // A different family cannot match the counterexample baseline.
  const auto bad = run("diverge --graphon product -o " + dir + " --baseline " + GRAPHONLAB_TEST_DATA +
                       "/diverge_baseline.json");
  EXPECT_EQ(bad.status, 4);
}

TEST(Cli, ArtifactsDeterministicAndEmbedConfig) {
  const auto dir = scratch("det");
  const std::string args = "laws --graphon counterexample --m 2048 --format csv -o " + dir;
  ASSERT_EQ(run(args, "GRAPHONLAB_THREADS=1").status, 0);
  std::ifstream first(dir + "/joint_law.csv");
  const std::string a((std::istreambuf_iterator<char>(first)), {});
  ASSERT_EQ(run(args, "GRAPHONLAB_THREADS=4").status, 0);
  std::ifstream second(dir + "/joint_law.csv");
  const std::string b((std::istreambuf_iterator<char>(second)), {});
  EXPECT_EQ(a, b);
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto text = io::read_text(e.path().string());
    EXPECT_EQ(text.rfind("# config: {", 0), 0u) << e.path();
  }
  const auto joint = io::joint_from_csv(a);
  EXPECT_EQ(joint.atoms().size(), 2048u);
  const auto level = io::dist_from_csv(io::read_text(dir + "/level_law.csv"));
  EXPECT_EQ(level.atoms().size(), 2u);
}

TEST(Cli, CsvProfilesRoundTrip) {
  const auto dir = scratch("csv");
  ASSERT_EQ(run("levels --graphon counterexample --m 64 --format csv -o " + dir).status, 0);
  const auto p = io::profile_from_csv(io::read_text(dir + "/levels.csv"));
  EXPECT_EQ(p.m, 64u);
  EXPECT_EQ(p.values.front(), 0.5);
  EXPECT_EQ(p.values.back(), 0.0);
}

TEST(Cli, BuildSortPullbackChain) {
  const auto dir = scratch("chain");
  ASSERT_EQ(run("build --graphon counterexample -n 16 -o " + dir).status, 0);
  const auto grid = load_grid(dir + "/grid.json");
  EXPECT_EQ(grid.n(), 16u);
  EXPECT_EQ(io::read_json_file(dir + "/grid.json")["config"]["subcommand"], "build");
  ASSERT_EQ(run("sort --graphon " + dir + "/grid.json -o " + dir).status, 0);
  const auto sorted = load_grid(dir + "/sorted_grid.json");
  EXPECT_TRUE(std::is_sorted(sorted.row_means().begin(), sorted.row_means().end()));
  std::ofstream(dir + "/map.in.json") << R"({"format":"mpm-v1","ops":[{"kind":"exchange","k":4,"perm":[3,1,4,2]}]})";
  const auto r = run("pullback --graphon " + dir + "/grid.json --map " + dir + "/map.in.json -o " + dir);
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("KS distance to the original: 0"), std::string::npos);
  const auto pulled = load_grid(dir + "/pullback_grid.json");
  EXPECT_NEAR(hom_density(SmallGraph::triangle(), pulled).value, hom_density(SmallGraph::triangle(), grid).value, 1e-12);
}

TEST(Cli, CutnormAndDistance) {
  const auto dir = scratch("cut");
  const auto r = run("cutnorm --graphon counterexample -n 12 --other constant:0.125 -o " + dir);
  ASSERT_EQ(r.status, 0) << r.out;
  const auto doc = io::read_json_file(dir + "/cutnorm.json");
  const auto a = discretize(AnalyticGraphon::counterexample(), 12);
  std::vector<std::size_t> S, T;
  for (auto i : doc["S"]) S.push_back(i.get<std::size_t>() - 1);
  for (auto j : doc["T"]) T.push_back(j.get<std::size_t>() - 1);
  EXPECT_NEAR(cut_value(StepKernel::difference(a, GridGraphon::constant(12, 0.125)), S, T), doc["value"].get<double>(),
              1e-12);
  const auto d = run("distance --graphon counterexample -n 6 --other constant:0.125 -o " + dir);
  ASSERT_EQ(d.status, 0) << d.out;
  const auto dist = io::read_json_file(dir + "/distance.json");
  EXPECT_LE(dist["lower"]["value"].get<double>(), dist["upper"]["value"].get<double>());
  EXPECT_TRUE(dist["lower"]["inequivalent"].get<bool>());
}

TEST(Cli, SampleWritesEdgeListAndMetadata) {
  const auto dir = scratch("sample");
  const auto r = run("sample --graphon counterexample -n 2000 --seed 1 -o " + dir);
  ASSERT_EQ(r.status, 0) << r.out;
  const auto meta = io::read_json_file(dir + "/graph.json");
  EXPECT_EQ(meta["seed"], 1);
  EXPECT_LE(meta["degree_law_ks"].get<double>(), 0.05);
  const auto g = io::graph_from_files(io::read_text(dir + "/edges.txt"), meta);
  EXPECT_EQ(g.edges(), sample_graph(AnalyticGraphon::counterexample(), 2000, 1).edges());
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("codes");
  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("frobnicate").status, 1);
  EXPECT_EQ(run("degrees --bogus").status, 1);
  EXPECT_EQ(run("degrees --graphon nonsense -o " + dir).status, 1);
  EXPECT_EQ(run("degrees --graphon constant --p 1.5 -o " + dir).status, 1);
  EXPECT_EQ(run("build -n 0 -o " + dir).status, 1);
  fs::create_directories(dir);
  std::ofstream(dir + "/asym.json") << R"({"format":"gridgraphon-v1","n":2,"values":[0,0.1,0.2,0]})";
  const auto v = run("degrees --graphon " + dir + "/asym.json -o " + dir);
  EXPECT_EQ(v.status, 2);
  EXPECT_NE(v.out.find("symmetry error"), std::string::npos);
  EXPECT_EQ(run("cutnorm --graphon counterexample -n 30 -o " + dir).status, 3);
  EXPECT_EQ(run("build -n 5000 -o " + dir).status, 3);
}
