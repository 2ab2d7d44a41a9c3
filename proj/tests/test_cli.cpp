#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kCli = RSPDE_CLI_PATH;

fs::path workdir() {
  const fs::path p = fs::path(testing::TempDir()) / "rspde_cli";
  fs::create_directories(p);
  return p;
}

fs::path write_config(const std::string& name, const json& cfg) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << cfg.dump(2);
  return p;
}

json small_config() {
  return {{"experiment", "ex1-periodic"},
          {"seed", 5},
          {"problem", {{"K", 8}}},
          {"driver", {{"m", 256}}},
          {"solver", {{"chi", 4.0}}}};
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = kCli.string() + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Every output file except the manifest (wall time) must match byte for byte.
void expect_same_outputs(const fs::path& a, const fs::path& b) {
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const std::string name = e.path().filename().string();
    if (name == "manifest.json") continue;
    ASSERT_TRUE(fs::exists(b / name)) << name;
    EXPECT_EQ(slurp(e.path()), slurp(b / name)) << name;
    ++compared;
  }
  EXPECT_GT(compared, 0u);
}

}  // namespace

TEST(Cli, SolveIsDeterministicForAFixedSeed) {
  const fs::path dir = workdir();
  const fs::path cfg = write_config("solve.json", small_config());
  fs::remove_all(dir / "a");
  fs::remove_all(dir / "b");
  ASSERT_EQ(run("--config " + cfg.string() + " --out " + (dir / "a").string() + " solve", dir / "a.log"), 0)
      << slurp(dir / "a.log");
  ASSERT_EQ(run("--config " + cfg.string() + " --out " + (dir / "b").string() + " solve", dir / "b.log"), 0);
  expect_same_outputs(dir / "a", dir / "b");
  const json manifest = json::parse(slurp(dir / "a" / "manifest.json"));
  EXPECT_EQ(manifest["command"], "solve");
  EXPECT_EQ(manifest["config"]["seed"], 5);
  EXPECT_TRUE(manifest.contains("wall_time_seconds"));
  EXPECT_TRUE(fs::exists(dir / "a" / "trajectory.csv"));
  EXPECT_TRUE(json::parse(slurp(dir / "a" / "bound.json"))["holds"].get<bool>());
}

TEST(Cli, ThreadCountDoesNotChangeResults) {
  const fs::path dir = workdir();
  json c = small_config();
  c["experiment"] = "greedy-stats";
  const fs::path cfg = write_config("greedy.json", c);
  fs::remove_all(dir / "t1");
  fs::remove_all(dir / "t2");
  const std::string base = "--config " + cfg.string() + " --replicates 24 --out ";
  ASSERT_EQ(run(base + (dir / "t1").string() + " --threads 1 greedy-stats", dir / "t1.log"), 0) << slurp(dir / "t1.log");
  ASSERT_EQ(run(base + (dir / "t2").string() + " --threads 2 greedy-stats", dir / "t2.log"), 0);
  expect_same_outputs(dir / "t1", dir / "t2");
}

TEST(Cli, SeedChangesTheDriver) {
  const fs::path dir = workdir();
  const fs::path cfg = write_config("sample.json", small_config());
  fs::remove_all(dir / "s1");
  fs::remove_all(dir / "s2");
  ASSERT_EQ(run("--config " + cfg.string() + " --out " + (dir / "s1").string() + " sample", dir / "s1.log"), 0)
      << slurp(dir / "s1.log");
  ASSERT_EQ(run("--config " + cfg.string() + " --seed 6 --out " + (dir / "s2").string() + " sample", dir / "s2.log"), 0);
  EXPECT_NE(slurp(dir / "s1" / "path_0.csv"), slurp(dir / "s2" / "path_0.csv"));
}

TEST(Cli, ValidateReportsViolations) {
  const fs::path dir = workdir();
  json bad = small_config();
  bad["problem"]["eta"] = 0.45;
  const fs::path cfg = write_config("bad.json", bad);
  EXPECT_EQ(run("--config " + cfg.string() + " validate", dir / "v.log"), 2);
  const json rep = json::parse(slurp(dir / "v.log"));
  EXPECT_FALSE(rep["valid"].get<bool>());
  EXPECT_EQ(rep["violations"][0]["constraint"], "η<γ");
  EXPECT_EQ(run("--config " + write_config("good.json", small_config()).string() + " validate", dir / "g.log"), 0);
  EXPECT_EQ(json::parse(slurp(dir / "g.log"))["growth_degrees"]["drift"], 2);
  fs::remove_all(dir / "bad");
  EXPECT_EQ(run("--config " + cfg.string() + " --out " + (dir / "bad").string() + " solve", dir / "bad.log"), 2);
  EXPECT_TRUE(fs::exists(dir / "bad" / "error.json"));
}

TEST(Cli, ExitCodes) {
  const fs::path dir = workdir();
  json noseed = small_config();
  noseed.erase("seed");
  EXPECT_EQ(run("--config " + write_config("noseed.json", noseed).string() + " solve", dir / "n.log"), 2);
  json blow = small_config();
  blow["solver"]["ceiling"] = 1e-3;
  fs::remove_all(dir / "blow");
  EXPECT_EQ(run("--config " + write_config("blow.json", blow).string() + " --out " + (dir / "blow").string() + " solve",
                dir / "blow.log"),
            3);
  const json err = json::parse(slurp(dir / "blow" / "error.json"));
  EXPECT_EQ(err["kind"], "numerical");
  EXPECT_EQ(run("--bogus solve", dir / "p.log"), 2);
}
