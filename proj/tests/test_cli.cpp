#include <gtest/gtest.h>

#include <filesystem>

#include "cli.hpp"

using namespace cftg;
using namespace cftg::cli;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("cftg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int call(std::vector<std::string> args, std::string* out_text = nullptr) {
    args.insert(args.begin(), "cftg");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    RunConfig c;
    std::ostringstream out;
    std::ostringstream err;
    int code = 0;
    if (auto early = parse_args(static_cast<int>(argv.size()), argv.data(), c, out, err)) {
      code = *early;
    } else {
      code = run(c, out, err);
    }
    last_err_ = err.str();
    if (out_text) *out_text = out.str();
    return code;
  }

  std::filesystem::path dir_;
  std::string last_err_;
};

}  // namespace

TEST(CliHelpers, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(CliHelpers, PairsAndModes) {
  EXPECT_EQ(parse_pairs("1-4,2-7"), (std::vector<std::pair<Vertex, Vertex>>{{1, 4}, {2, 7}}));
  EXPECT_THROW((void)parse_pairs("1:4"), ConfigError);
  EXPECT_EQ(parse_mode("edge"), FaultMode::Edge);
  EXPECT_THROW((void)parse_mode("vertex"), ConfigError);
}

TEST(CliHelpers, BenchRatioDenominator) {
  // delta = 1, sigma = 1: n^{1.5} ln n
  const double expect = 1000.0 / (std::pow(256.0, 1.5) * std::log(256.0));
  EXPECT_NEAR(cli_detail::bench_ratio(1000, 256, 1, 1), expect, 1e-12);
  const double expect2 = 500.0 / (std::pow(64.0, 2.0 - 1.0 / 3.0) * std::pow(4.0, 1.0 / 3.0) * 2.0 * std::log(64.0));
  EXPECT_NEAR(cli_detail::bench_ratio(500, 64, 4, 2), expect2, 1e-12);
}

TEST_F(CliTest, BuildThenVerifyPassesForEveryKind) {
  ASSERT_EQ(call({"gen", "--kind", "random", "--n", "24", "--extra", "30", "--delta", "2", "--seed", "5",
                  path("g.cftg")}),
            0)
      << last_err_;
  ASSERT_EQ(call({"gen", "--kind", "random", "--n", "20", "--extra", "25", "--delta", "3", "--max-weight", "4",
                  "--seed", "6", path("w.cftg")}),
            0)
      << last_err_;
  struct Case {
    std::vector<std::string> build;
    std::vector<std::string> verify;
    std::string graph;
  };
  const std::vector<Case> cases{
      {{"--kind", "cft-sourcewise", "--sources", "0,1"}, {"--kind", "distance", "--sources", "0,1", "--f", "1"}, "g"},
      {{"--kind", "eft-sourcewise", "--sources", "3", "--f", "1"},
       {"--kind", "distance", "--sources", "3", "--f", "1", "--mode", "edge"},
       "g"},
      {{"--kind", "pairwise", "--pairs", "0-5,2-9,4-11"}, {"--kind", "distance", "--pairs", "0-5,2-9,4-11"}, "g"},
      {{"--kind", "spanner"}, {"--kind", "spanner", "--stretch", "2"}, "g"},
      {{"--kind", "single-pair", "--pairs", "0-13"}, {"--kind", "distance", "--pairs", "0-13"}, "w"},
  };
  for (const auto& cs : cases) {
    std::vector<std::string> b{"build"};
    b.insert(b.end(), cs.build.begin(), cs.build.end());
    b.insert(b.end(), {"--seed", "7", "--verify", path(cs.graph + ".cftg"), path("h.edges")});
    std::string stats;
    EXPECT_EQ(call(b, &stats), 0) << cs.build[1] << ": " << last_err_;
    EXPECT_NE(stats.find("verdict=PASS"), std::string::npos) << cs.build[1];
    std::vector<std::string> v{"verify"};
    v.insert(v.end(), cs.verify.begin(), cs.verify.end());
    v.insert(v.end(), {"--csv", path("r.csv"), path(cs.graph + ".cftg"), path("h.edges")});
    EXPECT_EQ(call(v), 0) << cs.build[1] << ": " << last_err_;
    EXPECT_NE(read_file(path("r.csv")).find("verdict=PASS"), std::string::npos);
  }
}

TEST_F(CliTest, IdenticalConfigGivesIdenticalBytes) {
  ASSERT_EQ(call({"gen", "--kind", "random", "--n", "30", "--extra", "40", "--seed", "9", path("a.cftg")}), 0);
  ASSERT_EQ(call({"gen", "--kind", "random", "--n", "30", "--extra", "40", "--seed", "9", path("b.cftg")}), 0);
  EXPECT_EQ(read_file(path("a.cftg")), read_file(path("b.cftg")));
  std::string s1;
  std::string s2;
  ASSERT_EQ(call({"build", "--kind", "cft-sourcewise", "--sources", "0", "--seed", "3", path("a.cftg"), path("h1")}, &s1), 0);
  ASSERT_EQ(call({"build", "--kind", "cft-sourcewise", "--sources", "0", "--seed", "3", path("a.cftg"), path("h2")}, &s2), 0);
  EXPECT_EQ(read_file(path("h1")), read_file(path("h2")));
  EXPECT_EQ(s1, s2);
  const auto h = read_file(path("h1"));
  EXPECT_EQ(h.rfind("cfth 1 parent=" + sha256_hex(read_file(path("a.cftg"))) + "\n", 0), 0u);
  std::string c1;
  std::string c2;
  ASSERT_EQ(call({"bench", "--kind", "cft-sourcewise", "--n", "32,16", "--seeds", "2"}, &c1), 0);
  ASSERT_EQ(call({"bench", "--kind", "cft-sourcewise", "--n", "32,16", "--seeds", "2"}, &c2), 0);
  EXPECT_EQ(c1, c2);
}

TEST_F(CliTest, GenSourcewiseLbThenVerifyMandatory) {
  std::string stats;
  ASSERT_EQ(call({"gen", "--kind", "sourcewise-lb", "--sigma", "1", "--delta", "1", "--n", "16", path("lb.cftg")}, &stats), 0)
      << last_err_;
  EXPECT_NE(stats.find("mandatory=64\n"), std::string::npos);
  const auto manifest = read_file(path("lb.cftg.manifest"));
  EXPECT_EQ(std::count(manifest.begin(), manifest.end(), '\n'), 5 + 64);
  EXPECT_EQ(call({"verify", "--kind", "mandatory", path("lb.cftg"), path("lb.cftg.manifest")}), 0) << last_err_;
  ASSERT_EQ(call({"gen", "--kind", "tree-dq", "--delta", "2", "--q", "3", path("t.cftg")}, &stats), 0);
  EXPECT_NE(stats.find("leaves=9\n"), std::string::npos);
  EXPECT_NE(stats.find("properties=PASS"), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  ASSERT_EQ(call({"gen", "--kind", "random", "--n", "12", "--extra", "10", "--seed", "1", path("g.cftg")}), 0);
  // bad config
  EXPECT_EQ(call({"build", "--kind", "nope", path("g.cftg"), path("h")}), kBadConfig);
  EXPECT_EQ(call({"build", "--kind", "cft-sourcewise", path("g.cftg"), path("h")}), kBadConfig);
  EXPECT_EQ(call({"verify", "--kind", "distance", path("g.cftg"), path("missing")}), kBadConfig);
  EXPECT_EQ(call({"frobnicate"}), kBadConfig);
  ASSERT_EQ(call({"gen", "--kind", "random", "--n", "12", "--extra", "10", "--directed", "--seed", "1", path("d.cftg")}), 0);
  EXPECT_EQ(call({"build", "--kind", "single-pair", "--pairs", "0-3", path("d.cftg"), path("h")}), kBadConfig);
  // a subgraph of another parent is rejected
  ASSERT_EQ(call({"build", "--kind", "spanner", path("g.cftg"), path("h")}), 0);
  EXPECT_EQ(call({"verify", "--kind", "spanner", path("d.cftg"), path("h")}), kBadConfig);
  // verification failure: empty subgraph
  write_file(path("empty"), "cfth 1 parent=" + sha256_hex(read_file(path("g.cftg"))) + "\n");
  EXPECT_EQ(call({"verify", "--kind", "distance", "--sources", "0", "--f", "0", path("g.cftg"), path("empty")}),
            kVerifyFailed);
  // enumeration cap
  EXPECT_EQ(call({"verify", "--kind", "distance", "--sources", "0", "--f", "2", "--mode", "edge", "--cap", "10",
                  path("g.cftg"), path("empty")}),
            kCapped);
}
