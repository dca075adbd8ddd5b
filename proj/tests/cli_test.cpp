#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int status = -1;
  std::string output;
};

CliRun run(const std::string& args) {
  const std::string command = std::string(CARDBENCH_CLI) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return r;
  char buffer[4096];
  while (std::fgets(buffer, sizeof(buffer), pipe)) r.output += buffer;
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "cardbench_cli_test";
    fs::remove_all(dir_);
    ASSERT_EQ(run("synth --out-dir " + dir_.string() + " --seed 3 --scale 0.2").status, 0);
    ASSERT_EQ(run("gen " + catalog() + " --out " + (dir_ / "w.sql").string() +
                  " --max-tables 4 --templates 4 --per-template 1 --seed 3")
                  .status,
              0);
  }
  static std::string catalog() {
    return "--schema " + (dir_ / "schema.txt").string() + " --data " + (dir_ / "data").string();
  }
  static fs::path dir_;
};

fs::path CliTest::dir_;

TEST_F(CliTest, GenWritesWorkloadAndManifest) {
  EXPECT_TRUE(fs::exists(dir_ / "w.sql"));
  EXPECT_TRUE(fs::exists(dir_ / "w.sql.manifest.csv"));
}

TEST_F(CliTest, BenchWritesReports) {
  const fs::path out = dir_ / "bench";
  const CliRun r = run("bench " + catalog() + " --workload " + (dir_ / "w.sql").string() +
                    " --methods true,indep_hist --seed 1 --out " + out.string());
  EXPECT_EQ(r.status, 0) << r.output;
  for (const char* f : {"report.json", "report.csv", "timings.json", "report.txt"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  EXPECT_NE(slurp(out / "report.txt").find("indep_hist"), std::string::npos);
}

TEST_F(CliTest, TrueCardsCacheIsStable) {
  const std::string cache = (dir_ / "cache.csv").string();
  const std::string args = "truecards " + catalog() + " --workload " + (dir_ / "w.sql").string() + " --out " + cache;
  ASSERT_EQ(run(args).status, 0);
  const std::string first = slurp(cache);
  ASSERT_EQ(run(args + " --verify").status, 0);
  EXPECT_EQ(slurp(cache), first);
}

TEST_F(CliTest, ExplainWithTruthHasNoDivergence) {
  const CliRun r = run("explain " + catalog() + " --query-file " + (dir_ / "w.sql").string() + " --method true");
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("first divergence: none"), std::string::npos) << r.output;
}

TEST_F(CliTest, TrainThenExplainFromModel) {
  const std::string model = (dir_ / "hist.model").string();
  ASSERT_EQ(run("train " + catalog() + " --method indep_hist --out " + model).status, 0);
  const CliRun r = run("explain " + catalog() + " --query-file " + (dir_ / "w.sql").string() + " --model " + model);
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("P-Error"), std::string::npos) << r.output;
}

TEST_F(CliTest, InputErrorsExitWithThree) {
  EXPECT_EQ(run("explain " + catalog() + " --query \"SELECT COUNT(*) FROM nowhere\" --method true").status, 3);
  EXPECT_EQ(run("bench " + catalog() + " --workload /nonexistent.sql").status, 3);
  EXPECT_EQ(run("bench --bogus-flag").status, 3);
  EXPECT_EQ(run("explain " + catalog() + " --query \"SELECT COUNT(*) FROM users\" --method magic").status, 3);
}

TEST_F(CliTest, InspectListsTables) {
  const CliRun r = run("inspect " + catalog());
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.output.find("post_history"), std::string::npos);
}

}  // namespace
