#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(RIESZ_LAB_EXE) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("riesz_cli_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(d);
  return d;
}

const std::string kCfg = std::string(RIESZ_CONFIG_DIR) + "/";

}  // namespace

TEST_CASE("two runs with the same seed write identical samples") {
  const auto a = scratch("a"), b = scratch("b");
  const auto ra = run("run " + kCfg + "eta.cfg -n 40 -o " + a.string());
  const auto rb = run("run " + kCfg + "eta.cfg -n 40 -j 1 -o " + b.string());
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  const auto sa = slurp(a / "samples.csv");
  CHECK(!sa.empty());
  CHECK(sa == slurp(b / "samples.csv"));
  const auto rc = run("run " + kCfg + "eta.cfg -n 40 -s 8 -o " + b.string());
  REQUIRE(rc.code == 0);
  CHECK(sa != slurp(b / "samples.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("manifest records config, seeds and results") {
  const auto d = scratch("m");
  const auto r = run("run " + kCfg + "eta.cfg -n 30 --set steps=64 -o " + d.string());
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(d / "manifest.json"));
  CHECK(j["kind"] == "eta");
  CHECK(j["config"]["steps"] == "64");
  CHECK(j["seeds"]["base_seed"] == 7);
  CHECK(j["seeds"]["replica_count"] == 30);
  CHECK(j["results"].contains("exact_mean"));
  CHECK(j.contains("version"));
  for (const auto& f : j["files"]) CHECK(fs::exists(d / f.get<std::string>()));
  fs::remove_all(d);
}

TEST_CASE("regime violations exit nonzero and name the inequality") {
  const auto d = scratch("r");
  const auto r = run("run " + kCfg + "eta.cfg -n 10 --set d=3 --set sigma=2 -o " + d.string());
  CHECK(r.code == 3);
  CHECK(r.output.find("sigma < beta") != std::string::npos);
  CHECK_FALSE(fs::exists(d / "samples.csv"));
  const auto bad = run("run " + kCfg + "eta.cfg --set nokey=1 -o " + d.string());
  CHECK(bad.code == 2);
  CHECK(bad.output.find("nokey") != std::string::npos);
  CHECK(run("run /nonexistent.cfg").code != 0);
  fs::remove_all(d);
}

TEST_CASE("rho run writes the sequence and the trace") {
  const auto d = scratch("rho");
  const auto r = run("run " + kCfg + "rho.cfg --set M_list=8,16,24 -o " + d.string());
  REQUIRE(r.code == 0);
  for (const char* f : {"manifest.json", "rho.csv", "rho_M.dat", "rho_trace.dat"}) CHECK(fs::exists(d / f));
  const auto j = nlohmann::json::parse(slurp(d / "manifest.json"));
  CHECK(j["results"]["rho_last"].get<double>() > 0.0);
  std::istringstream dat(slurp(d / "rho_M.dat"));
  std::string line;
  int rows = 0;
  while (std::getline(dat, line))
    if (!line.empty() && line[0] != '#') ++rows;
  CHECK(rows == 3);
  fs::remove_all(d);
}

TEST_CASE("keys and show subcommands") {
  const auto k = run("keys");
  CHECK(k.code == 0);
  CHECK(k.output.find("sigma = ") != std::string::npos);
  const auto s = run("show " + kCfg + "gamma.cfg --set sigma=1.5");
  CHECK(s.code == 0);
  CHECK(s.output.find("sigma = 1.5") != std::string::npos);
}
