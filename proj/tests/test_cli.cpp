#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "harvestrl/runner.hpp"

using namespace harvestrl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("harvestrl_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::size_t n = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    ++n;
  }
  return n;
}

config::ExperimentConfig cfg_for(const std::string& text, const fs::path& out) {
  auto cfg = config::parse_config(text);
  cfg.out_dir = out.string();
  return cfg;
}

}  // namespace

TEST_CASE("default wban run writes the expected files") {
  const auto dir = scratch("wban");
  std::ostringstream log;
  REQUIRE(cli::run(cfg_for("scenario = wban\n", dir), log, true) == cli::kExitOk);
  const auto trace = slurp(dir / "trace.csv");
  CHECK(trace.rfind(cli::kTraceSchema, 0) == 0);
  CHECK(trace.find(std::string("\n") + cli::kTraceColumns + "\n") != std::string::npos);
  CHECK(trace.find('\r') == std::string::npos);
  CHECK(data_rows(trace) == 504);
  CHECK(slurp(dir / "summary.csv").rfind(cli::kSummarySchema, 0) == 0);
  CHECK_FALSE(fs::exists(dir / "compare.csv"));

  // The echoed config reproduces the run.
  const auto again = scratch("wban_again");
  auto echo = config::load_config((dir / "effective_config.ini").string());
  echo.out_dir = again.string();
  REQUIRE(cli::run(echo, log, true) == cli::kExitOk);
  CHECK(slurp(again / "trace.csv") == trace);
  CHECK(slurp(again / "summary.csv") == slurp(dir / "summary.csv"));
}

TEST_CASE("default buoy run and byte-identical reruns") {
  const auto a = scratch("buoy_a");
  const auto b = scratch("buoy_b");
  std::ostringstream log;
  REQUIRE(cli::run(cfg_for("scenario = buoy\n[reward]\nname = R7\n", a), log, true) == cli::kExitOk);
  REQUIRE(cli::run(cfg_for("scenario = buoy\n[reward]\nname = R7\n", b), log, true) == cli::kExitOk);
  const auto trace = slurp(a / "trace.csv");
  CHECK(data_rows(trace) == 1008);
  CHECK(trace == slurp(b / "trace.csv"));
  CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
}

TEST_CASE("several rewards produce a comparison") {
  const auto dir = scratch("compare");
  std::ostringstream log;
  const auto cfg = cfg_for("[reward]\nname = R1, R3\n[output]\nsweep = 2\n", dir);
  REQUIRE(cli::run(cfg, log, true) == cli::kExitOk);
  const auto compare = slurp(dir / "compare.csv");
  CHECK(compare.rfind(cli::kCompareSchema, 0) == 0);
  CHECK(data_rows(compare) == 2);
  CHECK(data_rows(slurp(dir / "summary.csv")) == 4);
}

TEST_CASE("write failures remove partial output") {
  const auto dir = scratch("partial");
  fs::create_directories(dir / "trace.csv");  // a directory where the file should go
  std::ostringstream log;
  CHECK(cli::run(cfg_for("", dir), log, true) == cli::kExitIoError);
  CHECK_FALSE(fs::exists(dir / "effective_config.ini"));
  CHECK_FALSE(fs::exists(dir / "summary.csv"));

  const auto blocked = scratch("blocked");
  std::ofstream(blocked.string()) << "not a directory";
  CHECK(cli::run(cfg_for("", blocked / "sub"), log, true) == cli::kExitIoError);
}

TEST_CASE("invalid config at run time") {
  auto cfg = config::parse_config("");
  cfg.sweep = 0;
  std::ostringstream log;
  CHECK(cli::run(cfg, log, true) == cli::kExitConfigError);
  CHECK(log.str().find("output.sweep") != std::string::npos);
}

TEST_CASE("output directory resolution") {
  config::ExperimentConfig cfg;
  cfg.out_dir = "explicit";
  CHECK(cli::resolve_out_dir(cfg) == "explicit");
  cfg.out_dir.clear();
  ::setenv("HARVESTRL_OUT", "from_env", 1);
  CHECK(cli::resolve_out_dir(cfg) == "from_env");
  ::unsetenv("HARVESTRL_OUT");
  CHECK(cli::resolve_out_dir(cfg) == "harvestrl_out");
}
