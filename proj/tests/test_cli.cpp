#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "cli.hpp"

namespace {

namespace fs = std::filesystem;
using obddproof::cli::run;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("obddproof_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }
  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::string gen(int n) {
    const std::string p = path("php" + std::to_string(n) + ".cnf");
    EXPECT_EQ(cli({"gen", "--n", std::to_string(n), "--out", p}).code, 0);
    return p;
  }

  fs::path dir_;
};

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

TEST_F(CliTest, GenWritesDimacsAndSidecar) {
  const auto r = cli({"gen", "--n", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("p cnf 6 9"), std::string::npos);
  gen(2);
  EXPECT_TRUE(fs::exists(path("php2.cnf.map.json")));
  EXPECT_NE(read("php2.cnf.map.json").find("\"pigeon\""), std::string::npos);
}

TEST_F(CliTest, GenPcStarAndInvalidN) {
  const auto r = cli({"gen", "--n", "3", "--pc-star"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("p cnf 12 3"), std::string::npos);
  EXPECT_EQ(cli({"gen", "--n", "0"}).code, 2);
  EXPECT_EQ(cli({"gen"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
}

TEST_F(CliTest, HelpExitsZero) {
  const auto r = cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("refute"), std::string::npos);
}

TEST_F(CliTest, RefuteSummaryLine) {
  const std::string cnf = gen(2);
  const auto r = cli({"refute", cnf, "--schedule", "linear"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("refuted=true max=", 0), 0u);
  EXPECT_NE(r.out.find(" steps=17"), std::string::npos);
}

TEST_F(CliTest, RefuteProjectionHasSmallerMax) {
  const std::string cnf = gen(4);
  auto max_of = [](const std::string& line) {
    const auto p = line.find("max=") + 4;
    return std::stoul(line.substr(p, line.find(' ', p) - p));
  };
  const auto gz = cli({"refute", cnf, "--schedule", "gz2003"});
  const auto bucket = cli({"refute", cnf, "--schedule", "bucket_projection", "--projection"});
  EXPECT_EQ(gz.code, 0);
  EXPECT_EQ(bucket.code, 0);
  EXPECT_LT(max_of(bucket.out), max_of(gz.out));
}

TEST_F(CliTest, RefuteUsageErrors) {
  const std::string cnf = gen(2);
  EXPECT_EQ(cli({"refute", cnf, "--schedule", "random"}).code, 2);
  EXPECT_EQ(cli({"refute", cnf, "--schedule", "bucket_projection"}).code, 2);
  EXPECT_EQ(cli({"refute", cnf, "--schedule", "nope"}).code, 2);
  EXPECT_EQ(cli({"refute", cnf, "--order", "diagonal"}).code, 2);
  EXPECT_EQ(cli({"refute", path("missing.cnf")}).code, 2);
  EXPECT_EQ(cli({"refute", cnf, "--node-budget", "0"}).code, 2);
  write("bad.cnf", "p cnf 1 1\n2 0\n");
  const auto bad = cli({"refute", path("bad.cnf")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("line 2"), std::string::npos);
}

TEST_F(CliTest, RefuteExitCodes) {
  const std::string cnf = gen(5);
  EXPECT_EQ(cli({"refute", cnf, "--schedule", "gz2003", "--node-budget", "100"}).code, 3);
  write("nc.json", R"([{"op":"axiom","clause":6},{"op":"axiom","clause":7},{"op":"join","left":0,"right":1}])");
  const auto r = cli({"refute", cnf, "--schedule-file", path("nc.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "refuted=false max=3 total=7 steps=3\n");
}

TEST_F(CliTest, RefuteColumnMajorUsesSidecar) {
  const std::string cnf = gen(3);
  EXPECT_EQ(cli({"refute", cnf, "--order", "column-major", "--verify"}).code, 0);
  write("lonely.cnf", read("php3.cnf"));
  EXPECT_EQ(cli({"refute", path("lonely.cnf"), "--order", "column-major"}).code, 2);
  EXPECT_EQ(cli({"refute", path("lonely.cnf"), "--order", "column-major", "--map", path("php3.cnf.map.json")}).code,
            0);
}

TEST_F(CliTest, TraceAndVerifyRoundTrip) {
  const std::string cnf = gen(3);
  const auto r = cli({"refute", cnf, "--schedule", "bucket_projection", "--projection", "--order", "random:5",
                      "--trace", path("t.jsonl"), "--csv", path("t.csv"), "--emit-schedule", path("s.json")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(read("t.csv").rfind("step,kind,size,cum_size,clauses\n", 0), 0u);
  const auto v = cli({"verify", cnf, "--trace", path("t.jsonl"), "--order", "random:5"});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, "{\"valid\":true,\"refuted\":true,\"violations\":[]}\n");
  const auto wrong = cli({"verify", cnf, "--trace", path("t.jsonl"), "--order", "random:6"});
  EXPECT_EQ(wrong.code, 1);
  const auto replay =
      cli({"refute", cnf, "--schedule-file", path("s.json"), "--projection", "--order", "random:5"});
  EXPECT_EQ(replay.out, r.out);
}

TEST_F(CliTest, SweepCsv) {
  const auto r = cli({"sweep", "--php-range", "2..5", "--schedules", "linear,gz2003"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(count_lines(r.out), 9u);
  EXPECT_EQ(r.out.rfind("n,order,schedule,seed,refuted,max_intermediate,total_size,steps\n", 0), 0u);
  EXPECT_NE(r.out.find("\n2,row-major,linear,,true,"), std::string::npos);
  const auto again = cli({"sweep", "--php-range", "2..5", "--schedules", "linear,gz2003", "--jobs", "3"});
  EXPECT_EQ(again.out, r.out);
}

TEST_F(CliTest, SweepSeedsAndFiles) {
  const std::string cnf = gen(3);
  const auto r = cli({"sweep", cnf, "--orders", "row-major,column-major,random:1", "--schedules",
                      "random:4,random,greedy_min_size", "--seed", "9", "--csv", path("out.csv")});
  EXPECT_EQ(r.code, 0);
  const std::string csv = read("out.csv");
  EXPECT_EQ(count_lines(csv), 10u);
  EXPECT_NE(csv.find("3,random:1,random,4,true"), std::string::npos);
  EXPECT_NE(csv.find("3,column-major,random,9,true"), std::string::npos);
  EXPECT_EQ(cli({"sweep", cnf, "--schedules", "random"}).code, 2);
  EXPECT_EQ(cli({"sweep", "--php-range", "3..2"}).code, 2);
  EXPECT_EQ(cli({"sweep"}).code, 2);
}

TEST_F(CliTest, BoundCheckFunctionFile) {
  // x0·x2 ∨ x1·x3, rows little-endian in the variable index.
  std::string bits;
  for (int row = 0; row < 16; ++row) bits += (((row & 1) && (row & 4)) || ((row & 2) && (row & 8))) ? '1' : '0';
  write("f.json", "{\"vars\":4,\"table\":\"" + bits + "\"}");
  write("cert.json", R"({"k":2,"A":[1,2],"z":[0,0]})");
  const auto r = cli({"bound-check", path("f.json"), "--cert", path("cert.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out,
            "{\"certificate\":{\"k\":2,\"A\":[1,2],\"z\":[0,0]},\"verdict\":\"certified\",\"bound\":4,"
            "\"actual_size\":6}\n");
}

TEST_F(CliTest, BoundCheckParityAndErrors) {
  write("parity.json", "{\"vars\":4,\"table\":\"0110100110010110\"}");
  write("cert.json", R"({"k":2,"A":[1,2],"z":[0,0]})");
  const auto r = cli({"bound-check", path("parity.json"), "--cert", path("cert.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"verdict\":\"refuted\""), std::string::npos);
  EXPECT_NE(r.out.find("\"counterexample\":{\"x1\":[0,0],\"x2\":[1,1]}"), std::string::npos);
  write("broken.json", "{\"k\":2,");
  EXPECT_EQ(cli({"bound-check", path("parity.json"), "--cert", path("broken.json")}).code, 2);
  write("wide.json", R"({"k":2,"A":[1,5],"z":[0,0]})");
  EXPECT_EQ(cli({"bound-check", path("parity.json"), "--cert", path("wide.json")}).code, 2);
  const std::string cnf = gen(2);
  EXPECT_EQ(cli({"bound-check", cnf, "--cert", path("cert.json")}).code, 0);
}

TEST_F(CliTest, LemmaCommands) {
  const auto eight = cli({"lemma", "--n", "8", "--order", "row-major"});
  EXPECT_EQ(eight.code, 0);
  EXPECT_EQ(eight.out,
            "{\"n\":8,\"m\":1,\"kind\":\"columns\",\"indices\":[1],"
            "\"pairs\":[{\"white\":[1,1],\"black\":[5,1]}],\"verified\":true}\n");
  const auto six = cli({"lemma", "--n", "6"});
  EXPECT_EQ(six.code, 0);
  EXPECT_EQ(six.out, "infeasible: floor(c n)=0\n");
  write("unbalanced.txt", "WWW\nWWW\nWWB\n");
  EXPECT_EQ(cli({"lemma", "--coloring", path("unbalanced.txt")}).code, 2);
  std::string board;
  for (int r = 0; r < 7; ++r) {
    for (int c = 0; c < 7; ++c) board += (r + c) % 2 ? 'B' : 'W';
    board += '\n';
  }
  write("board.txt", board);
  const auto b = cli({"lemma", "--coloring", path("board.txt")});
  EXPECT_EQ(b.code, 0);
  EXPECT_NE(b.out.find("\"kind\":\"rows\""), std::string::npos);
}

TEST_F(CliTest, HiddenOracle) {
  const std::string cnf = gen(1);
  const auto r = cli({"oracle", cnf});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"satisfiable\":false"), std::string::npos);
}

TEST_F(CliTest, BinaryExitCodesAndStreams) {
  const std::string cnf = gen(2);
  const std::string base = std::string(OBDDPROOF_CLI_PATH) + " refute " + cnf;
  auto status = [](const std::string& cmd) {
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status(base + " >" + path("o.txt") + " 2>" + path("e.txt")), 0);
  EXPECT_EQ(read("o.txt").rfind("refuted=true", 0), 0u);
  EXPECT_EQ(status(base + " --schedule random >/dev/null 2>&1"), 2);
}

}  // namespace
