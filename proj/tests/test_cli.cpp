#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "hsl/json_io.hpp"

using hsl::Json;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string("\"") + HSL_CLI_PATH + "\" " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Json run_json(const std::string& args, int expected_code = 0) {
  const CliRun r = run(args);
  EXPECT_EQ(r.code, expected_code) << args;
  return Json::parse(r.out);
}

const char* k2I3 = R"('[[["2","0"],["0","0"],["0","0"]],[["0","0"],["2","0"],["0","0"]],[["0","0"],["0","0"],["2","0"]]]')";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / ("hsl_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
    unsetenv("HSL_CACHE_DIR");
  }
  void TearDown() override {
    unsetenv("HSL_CACHE_DIR");
    std::filesystem::remove_all(dir_);
  }
  std::filesystem::path dir_;
};

}  // namespace

TEST_F(CliTest, Enumerate) {
  const Json a = run_json("--no-cache enumerate --lattice 1 --norm 2");
  EXPECT_EQ(a["count"], 480);
  EXPECT_FALSE(a.contains("cache"));
  EXPECT_EQ(run_json("--no-cache enumerate --lattice 3 --norm 0")["count"], 1);
  const Json odd = run_json("--no-cache enumerate --lattice 2 --norm 3");
  EXPECT_EQ(odd["count"], 0);
  EXPECT_TRUE(odd.contains("note"));
}

TEST_F(CliTest, EnumerateWritesTheCache) {
  const Json a = run_json("--cache-dir " + dir_.string() + " enumerate --lattice 2 --norm 2");
  ASSERT_TRUE(a.contains("cache"));
  const std::filesystem::path file = a["cache"].get<std::string>();
  EXPECT_EQ(file.parent_path(), dir_);
  EXPECT_TRUE(std::filesystem::exists(file));
  // A second run reads the file back and reports the same count.
  EXPECT_EQ(run_json("--cache-dir " + dir_.string() + " enumerate --lattice 2 --norm 2")["count"], 480);
}

TEST_F(CliTest, CacheDirectoryPrecedence) {
  const auto env_dir = dir_ / "env";
  const auto flag_dir = dir_ / "flag";
  setenv("HSL_CACHE_DIR", env_dir.c_str(), 1);
  const Json from_env = run_json("enumerate --lattice 1 --norm 0");
  EXPECT_EQ(std::filesystem::path(from_env["cache"].get<std::string>()).parent_path(), env_dir);
  const Json from_flag = run_json("--cache-dir " + flag_dir.string() + " enumerate --lattice 1 --norm 0");
  EXPECT_EQ(std::filesystem::path(from_flag["cache"].get<std::string>()).parent_path(), flag_dir);
}

TEST_F(CliTest, Coefficients) {
  const Json d = run_json(std::string("--no-cache coeff --kind deriv --matrix ") + k2I3 + " --m 1 --alpha '[4,0,0]'");
  EXPECT_EQ(d["value"], "1981808640");
  EXPECT_EQ(d["normalization"], "tuple-sum");
  EXPECT_EQ(d["fourier_coeff"], "123863040");
  const Json y =
      run_json(std::string("--no-cache coeff --kind deriv --matrix ") + k2I3 + " --m 1 --alpha '[4,0,0]' --side y");
  EXPECT_EQ(y["value"], "1981808640");

  const Json f = run_json(R"(--no-cache coeff --kind f --matrix '[[["2","0"],["0","0"]],[["0","0"],["2","0"]]]')");
  EXPECT_EQ(f["value"], "0");
  const Json t = run_json(R"(--no-cache coeff --kind theta --lattice 2 --matrix '[[["2","0"]]]')");
  EXPECT_EQ(t["value"], "480");
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run("--no-cache coeff --kind theta --lattice 1 --matrix '[[[\"2\"'").code, 2);
  EXPECT_EQ(run(R"(--no-cache coeff --kind theta --lattice 1 --matrix '[[["3","0"]]]')").code, 2);
  EXPECT_EQ(run(R"(--no-cache coeff --kind theta --lattice 4 --matrix '[[["2","0"]]]')").code, 2);
  EXPECT_EQ(run(R"(--no-cache coeff --kind nope --matrix '[[["2","0"]]]')").code, 2);
  EXPECT_EQ(run(std::string("--no-cache coeff --kind deriv --matrix ") + k2I3 + " --alpha '[0,0,0]'").code, 2);
  EXPECT_EQ(run("--no-cache verify --suite nope").code, 2);
  EXPECT_EQ(run("--no-cache verify --suite shells --cusp-trace 3").code, 2);
  EXPECT_EQ(run("--no-cache enumerate --lattice 1").code, 2);
  EXPECT_EQ(run("--no-cache enumerate --lattice 1 --norm -2").code, 2);
  EXPECT_EQ(run("--no-cache m-table --trace-bound 3").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST_F(CliTest, VerifyShells) {
  const CliRun r = run("--no-cache --threads 1 verify --suite shells");
  EXPECT_EQ(r.code, 0);
  const Json doc = Json::parse(r.out);
  EXPECT_EQ(doc["report"]["suite"], "shells");
  EXPECT_TRUE(doc["header"].contains("generated"));
  EXPECT_FALSE(doc["report"]["checks"].empty());
}

TEST_F(CliTest, OutputFile) {
  const auto file = dir_ / "out.json";
  const CliRun r = run("--no-cache --output " + file.string() + " enumerate --lattice 1 --norm 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::FILE* f = std::fopen(file.c_str(), "r");
  ASSERT_NE(f, nullptr);
  char buf[256] = {};
  const std::size_t n = std::fread(buf, 1, sizeof buf - 1, f);
  std::fclose(f);
  EXPECT_EQ(Json::parse(std::string(buf, n))["count"], 480);
}
