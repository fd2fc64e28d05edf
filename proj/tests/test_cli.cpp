#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nsqa/io.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(NSQA_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("nsqa-test-" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("round-trip number formatting") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    CHECK(std::stod(nsqa::io::format_double(v)) == v);
  }
}

TEST_CASE("exit codes") {
  const auto d = scratch("codes");
  CHECK(run("landscape --mode stoquastic --s-steps 0 --out-dir " + d.string()) == 2);
  CHECK(run("gap --n-list 1,2,3,4 --out-dir " + d.string()) == 2);
  CHECK(run("landscape --no-such-flag") == 2);
  CHECK(run("environment --s-b-list 0 --out-dir " + d.string()) == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("landscape output, manifest and determinism") {
  const auto a = scratch("det-a"), b = scratch("det-b");
  const std::string args = "landscape --mode stoquastic --p 5 --s-list 0.2,0.47,0.6 --theta-points 201 --out-dir ";
  REQUIRE(run(args + a.string()) == 0);
  REQUIRE(run(args + b.string()) == 0);
  REQUIRE(fs::exists(a / "manifest.json"));
  for (const char* f : {"landscape.csv", "minima.csv"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["subcommand"] == "landscape");
  CHECK(m["config"]["p"] == "5");
  CHECK(m["config"].contains("seed"));
}

TEST_CASE("config file, flags win") {
  const auto d = scratch("cfg");
  fs::create_directories(d);
  {
    std::ofstream cfg(d / "run.cfg");
    cfg << "# classical curves\nmode = classical\np = 3\ntemperatures = 0.9,1.5\n";
  }
  REQUIRE(run("landscape --config " + (d / "run.cfg").string() + " --p 4 --out-dir " + (d / "out").string()) == 0);
  const auto m = nlohmann::json::parse(slurp(d / "out" / "manifest.json"));
  CHECK(m["config"]["p"] == "4");
  CHECK(m["config"]["mode"] == "classical");
}

TEST_CASE("environment Lambda table") {
  const auto d = scratch("env");
  REQUIRE(run("environment --s-b-list 1 --a 0.5 --omega-c 2 --Lambda-steps 0 --out-dir " + d.string()) == 0);
  const std::string table = slurp(d / "lambda_table.csv");
  CHECK(table.find(",1\n") != std::string::npos);
}
