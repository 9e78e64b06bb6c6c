#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(PARCELL_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Cli, RedundantTwoNeedsThreeSteps) {
  const Result r = run("sched --variant redundant --n 2 --mode exhaustive");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("makespan 3"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("speedup 8/3"), std::string::npos) << r.out;
}

TEST(Cli, SchedJson) {
  const Result r = run("sched --variant split --format json");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"makespan\": 4"), std::string::npos) << r.out;
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run("sched --variant split --bogus").code, 1);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("sched --variant nonsense").code, 1);
  EXPECT_EQ(run("sweep --config /nonexistent/cfg.json --trials 1").code, 2);
}

TEST(Cli, SweepWritesThreeFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "parcell_cli_sweep";
  std::filesystem::remove_all(dir);
  const auto cfg = std::filesystem::temp_directory_path() / "parcell_cli_sweep.json";
  std::ofstream(cfg) << R"({"sweep": {"n_values": [1, 2]}})";
  const Result r = run("sweep --seed 42 --trials 2 --baseline-trials 0 --quiet --config " + cfg.string() + " --out " +
                       dir.string());
  EXPECT_EQ(r.code, 0);
  for (const char* f : {"rows.csv", "stats.csv", "figure.svg"}) EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  std::string rows = slurp(dir / "rows.csv");
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 5);
  const auto first = rows;
  run("sweep --seed 42 --trials 2 --baseline-trials 0 --quiet --config " + cfg.string() + " --out " + dir.string());
  EXPECT_EQ(slurp(dir / "rows.csv"), first);
  std::filesystem::remove_all(dir);
  std::filesystem::remove(cfg);
}

TEST(Cli, BaselineRows) {
  const auto dir = std::filesystem::temp_directory_path() / "parcell_cli_baseline";
  std::filesystem::remove_all(dir);
  const Result r = run("baseline --trials 10 --quiet --out " + dir.string());
  EXPECT_EQ(r.code, 0);
  const std::string rows = slurp(dir / "rows.csv");
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 11);
  std::filesystem::remove_all(dir);
}

TEST(Cli, SimulateWithTrace) {
  const auto trace = std::filesystem::temp_directory_path() / "parcell_cli_trace.ndjson";
  const Result r = run("simulate --n 2 --seed 5 --max-events 500 --trace " + trace.string());
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"events\": 500"), std::string::npos) << r.out;
  const std::string t = slurp(trace);
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 500);
  std::filesystem::remove(trace);
}
