// End-to-end checks of the covspec command-line tool: exit codes and
// artifact files, driven through std::system.  The binary path comes in
// via the COVSPEC_CLI_PATH compile definition.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const std::string kCli = COVSPEC_CLI_PATH;
const fs::path kWork = "/tmp/covspec_cli_checks";

int run(const std::string& args) {
  const int status = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = kWork / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  REQUIRE(f.good());
  f << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// 4x4 real data matrix (p = n) written as CSV
fs::path square_data(const fs::path& dir) {
  const fs::path p = dir / "square.csv";
  write_file(p,
             "1.2,-0.3,0.8,2.1\n"
             "-0.5,0.9,1.4,-1.1\n"
             "0.3,2.2,-0.7,0.4\n"
             "1.0,-1.6,0.2,0.6\n");
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("malformed config exits 2 and writes nothing") {
  const auto dir = fresh_dir("malformed");
  write_file(dir / "bad.json", "{\"p\": 10,,}");
  CHECK(run("lsd --config " + (dir / "bad.json").string() + " --out " +
            dir.string()) == 2);
  CHECK(!fs::exists(dir / "lsd_result.json"));
  CHECK(!fs::exists(dir / "lsd_density.csv"));
}

TEST_CASE("unknown config key exits 2") {
  const auto dir = fresh_dir("unknown-key");
  write_file(dir / "cfg.json", "{\"p\": 10, \"n\": 10, \"bogus\": 1}");
  CHECK(run("lsd --config " + (dir / "cfg.json").string() + " --out " +
            dir.string()) == 2);
}

TEST_CASE("lsd writes density, cdf, and provenance") {
  const auto dir = fresh_dir("lsd-ok");
  write_file(dir / "cfg.json",
             "{\"p\": 100, \"n\": 400,"
             " \"grid\": {\"lo\": 0.0, \"hi\": 1.05, \"points\": 64}}");
  CHECK(run("lsd --config " + (dir / "cfg.json").string() + " --out " +
            dir.string()) == 0);
  REQUIRE(fs::exists(dir / "lsd_result.json"));
  REQUIRE(fs::exists(dir / "lsd_density.csv"));
  const auto body = slurp(dir / "lsd_result.json");
  CHECK(body.find("\"zero_atom\"") != std::string::npos);
  CHECK(body.find("\"config_hash\"") != std::string::npos);
  CHECK(body.find("\"total_mass\"") != std::string::npos);
}

TEST_CASE("log functional with a zero atom exits 2") {
  const auto dir = fresh_dir("log-zero-atom");
  write_file(dir / "cfg.json",
             "{\"p\": 400, \"n\": 100, \"functions\": [\"log\"]}");
  CHECK(run("lss-moments --config " + (dir / "cfg.json").string() + " --out " +
            dir.string()) == 2);
}

TEST_CASE("lrt alone on square data exits 2") {
  const auto dir = fresh_dir("lrt-square");
  const auto data = square_data(dir);
  write_file(dir / "cfg.json",
             "{\"test\": \"lrt\","
             " \"moments\": {\"alpha\": 1.0, \"delta\": 0.0}}");
  CHECK(run("test --config " + (dir / "cfg.json").string() + " --data " +
            data.string() + " --out " + dir.string()) == 2);
}

TEST_CASE("both on square data exits 0 with partial results") {
  const auto dir = fresh_dir("both-square");
  const auto data = square_data(dir);
  write_file(dir / "cfg.json",
             "{\"test\": \"both\","
             " \"moments\": {\"alpha\": 1.0, \"delta\": 0.0}}");
  CHECK(run("test --config " + (dir / "cfg.json").string() + " --data " +
            data.string() + " --out " + dir.string()) == 0);
  const auto body = slurp(dir / "test_report.json");
  CHECK(body.find("\"partial_results\": true") != std::string::npos);
  CHECK(body.find("\"frobenius\"") != std::string::npos);
}

TEST_CASE("test without --data exits 2") {
  CHECK(run("test") == 2);
}

TEST_CASE("verify rejects nonpositive replicates and unknown suites") {
  const auto dir = fresh_dir("verify-bad");
  CHECK(run("verify --replicates 0 --out " + dir.string()) == 2);
  CHECK(run("verify --suite no-such-suite --out " + dir.string()) == 2);
  CHECK(!fs::exists(dir / "verify_summary.json"));
}

TEST_CASE("small simulate study runs end to end") {
  const auto dir = fresh_dir("simulate");
  write_file(dir / "cfg.json",
             "{\"p\": 10, \"n\": 40, \"dist\": \"rademacher\","
             " \"replicates\": 3, \"functions\": [\"x\"]}");
  CHECK(run("simulate --config " + (dir / "cfg.json").string() + " --out " +
            dir.string() + " --seed 7") == 0);
  REQUIRE(fs::exists(dir / "study.csv"));
  REQUIRE(fs::exists(dir / "study_summary.json"));
  const auto body = slurp(dir / "study_summary.json");
  CHECK(body.find("\"seed\": 7") != std::string::npos);
}

}  // TEST_SUITE
