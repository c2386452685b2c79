// Drives the installed `disf` executable as a child process, so exit codes,
// stdout and stderr are checked exactly as a shell would see them.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "disf/io.hpp"

namespace fs = std::filesystem;
using disf::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "disf_cli_process_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Result run(const std::string& args, const std::string& env = "") {
  const auto err_path = scratch_dir() / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" DISF_CLI_PATH "\" " +
                          args + " 2>\"" + err_path.string() + "\"";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err_path);
  return r;
}

}  // namespace

TEST(CliProcess, PlanSlabPrintsJsonPlan) {
  const auto r = run("plan --scene slab");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_LT(j["trace"].back()["e_geom"].get<double>(), 1e-8);
}

TEST(CliProcess, MissingSceneExitsTwo) {
  const auto r = run("plan --scene /does/not/exist.json");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/does/not/exist.json"), std::string::npos);
}

TEST(CliProcess, DisabledCorrespondencesExitThree) {
  // A lone face whose normals match one pad's: that pad has no partner.
  const auto dir = scratch_dir();
  {
    std::ofstream ply(dir / "face.ply");
    ply << "ply\nformat ascii 1.0\nelement vertex 4\n"
           "property float x\nproperty float y\nproperty float z\n"
           "property float nx\nproperty float ny\nproperty float nz\nend_header\n"
           "0 0 0 0 1 0\n0.01 0 0 0 1 0\n0 0 0.01 0 1 0\n0.01 0 0.01 0 1 0\n";
  }
  std::ofstream(dir / "face.json") << R"({"object": {"file": "face.ply"}, "n_app": [0, 0, 1]})";
  const auto r =
      run("plan --scene \"" + (dir / "face.json").string() + "\" --max-normal-angle 0");
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("no correspondence"), std::string::npos);
}

TEST(CliProcess, PlanThenEvalAgreeAcrossProcesses) {
  const auto plan_path = scratch_dir() / "box_plan.json";
  ASSERT_EQ(run("plan --scene box --out \"" + plan_path.string() + "\"").code, 0);
  const auto r = run("eval --plan \"" + plan_path.string() + "\" --scene box");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_LE(j["trace_delta"]["e_geom"].get<double>(), 1e-10);
  EXPECT_LE(j["trace_delta"]["e_com"].get<double>(), 1e-10);
}

TEST(CliProcess, BenchCsvIsByteIdenticalAcrossRunsAndThreads) {
  const std::string args =
      "bench --scene slab,sphere --planner disf,visf,cmaes --generations 10 --reps 2 --seed 9";
  const auto a = run(args);
  const auto b = run(args + " --threads 2");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 1 + 2 * 3 * 2);
}

TEST(CliProcess, GenWritesReloadablePly) {
  const auto path = scratch_dir() / "cyl.ply";
  ASSERT_EQ(run("gen --generator cylinder --out \"" + path.string() + "\"").code, 0);
  EXPECT_GT(disf::load_cloud(path).size(), 100u);
  EXPECT_EQ(run("gen --generator cylinder --dims 0.1").code, 2);
}

TEST(CliProcess, LogLevelControlsStderr) {
  const auto quiet = run("plan --scene slab", "DISF_LOG=quiet");
  const auto info = run("plan --scene slab", "DISF_LOG=info");
  ASSERT_EQ(quiet.code, 0);
  EXPECT_TRUE(quiet.err.empty()) << quiet.err;
  EXPECT_NE(info.err.find("[disf info]"), std::string::npos);
}

TEST(CliProcess, UsageErrorsExitOne) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("plan").code, 1);
  EXPECT_EQ(run("plan --scene slab --bogus").code, 1);
}
