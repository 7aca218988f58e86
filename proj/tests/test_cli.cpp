#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gibbs/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string binary() {
  const char* env = std::getenv("GIBBSLAB_BIN");
  return env ? env : "./build/gibbslab";
}

int run_cmd(const std::string& args, std::string* output = nullptr) {
  std::string cmd = binary() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[512];
  while (fgets(buf, sizeof buf, pipe)) out += buf;
  int status = pclose(pipe);
  if (output) *output = out;
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gibbslab-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int counter;
};
int TempDir::counter = 0;

fs::path write_config(const TempDir& dir, const json& j,
                      const std::string& name = "config.json") {
  fs::path p = dir.path / name;
  std::ofstream f(p);
  f << j.dump(2);
  return p;
}

json chain_config() {
  return json{
      {"graph", {{"kind", "box"}, {"d", 2}, {"n", 6}, {"topology", "free"}}},
      {"model", {{"name", "ising"}, {"h", 0.0}, {"beta", 0.45}}},
      {"algorithm", "heat-bath"},
      {"grid", {{"beta", {0.3, 0.5}}}},
      {"replicas", 2},
      {"sweeps", 120},
      {"burn_in", 20},
      {"thinning", 1},
      {"seed", 4242},
      {"boundary", {{"margin", 1}, {"spin", 1}}},
      {"snapshots", 1}};
}

}  // namespace

TEST_CASE("identical config and seed reproduce byte-identical outputs") {
  TempDir dir;
  json cfg = chain_config();
  cfg["out"] = (dir.path / "runs").string();
  fs::path cfg_path = write_config(dir, cfg);
  std::string out1, out2;
  CHECK(run_cmd("run --config " + cfg_path.string(), &out1) == 0);
  fs::path run_dir;
  for (auto& entry : fs::directory_iterator(dir.path / "runs"))
    run_dir = entry.path();
  REQUIRE(!run_dir.empty());
  std::string series1 = slurp(run_dir / "series.csv");
  std::string summary1 = slurp(run_dir / "summary.jsonl");
  CHECK(run_cmd("run --config " + cfg_path.string(), &out2) == 0);
  CHECK(slurp(run_dir / "series.csv") == series1);
  CHECK(slurp(run_dir / "summary.jsonl") == summary1);
  CHECK(series1.find("magnetization") != std::string::npos);
  CHECK(!summary1.empty());
  CHECK(fs::exists(run_dir / "manifest.json"));
  CHECK(fs::exists(run_dir / "snapshots"));

  // manifest carries the materialized defaults and hash
  json manifest;
  std::ifstream mf(run_dir / "manifest.json");
  mf >> manifest;
  CHECK(manifest.contains("config_hash"));
  CHECK(manifest["seed"] == 4242);
  CHECK(manifest["config"]["thinning"] == 1);

  // a different seed lands in a different run directory
  CHECK(run_cmd("run --config " + cfg_path.string() + " --seed 7", &out1) ==
        0);
  int dirs = 0;
  for (auto& entry : fs::directory_iterator(dir.path / "runs")) {
    (void)entry;
    ++dirs;
  }
  CHECK(dirs == 2);
}

TEST_CASE("malformed configs exit 2 without artifacts") {
  TempDir dir;
  fs::path bad = dir.path / "bad.json";
  {
    std::ofstream f(bad);
    f << "{ not json";
  }
  std::string out;
  CHECK(run_cmd("run --config " + bad.string(), &out) == 2);
  CHECK(out.find("parse error") != std::string::npos);

  json cfg = chain_config();
  cfg.erase("seed");
  cfg["out"] = (dir.path / "runs").string();
  fs::path no_seed = write_config(dir, cfg, "no-seed.json");
  CHECK(run_cmd("run --config " + no_seed.string(), &out) == 2);
  CHECK(out.find("config.seed") != std::string::npos);
  CHECK(!fs::exists(dir.path / "runs"));

  json badq = chain_config();
  badq["model"] = {{"name", "potts"}, {"q", 1}, {"beta", 0.5}};
  badq["out"] = (dir.path / "runs").string();
  fs::path qpath = write_config(dir, badq, "bad-q.json");
  CHECK(run_cmd("run --config " + qpath.string(), &out) == 2);
  CHECK(out.find("config.model.q") != std::string::npos);
  CHECK(!fs::exists(dir.path / "runs"));
}

TEST_CASE("bernoulli sweep and exact identity runs") {
  TempDir dir;
  json cfg = {
      {"graph", {{"kind", "box"}, {"d", 2}, {"n", 16}, {"topology", "free"}}},
      {"model", {{"name", "ising"}, {"beta", 0.0}}},
      {"algorithm", "bernoulli"},
      {"grid", {{"p", {0.3, 0.7}}}},
      {"bernoulli", {{"structure", "bond"}, {"samples", 400}}},
      {"seed", 1},
      {"out", (dir.path / "runs").string()}};
  std::string out;
  CHECK(run_cmd("run --config " + write_config(dir, cfg).string(), &out) == 0);

  json exact_cfg = {
      {"graph", {{"kind", "box"}, {"d", 2}, {"n", 3}, {"topology", "free"}}},
      {"model", {{"name", "potts"}, {"q", 2}, {"beta", 0.4}}},
      {"algorithm", "exact"},
      {"exact", {{"task", "es-check"}, {"max_edges", 3}}},
      {"seed", 2},
      {"out", (dir.path / "runs").string()}};
  CHECK(run_cmd("run --config " + write_config(dir, exact_cfg, "e.json").string(),
                &out) == 0);

  // full-distribution export for offline diffing
  json dist_cfg = {
      {"graph", {{"kind", "box"}, {"d", 2}, {"n", 3}, {"topology", "free"}}},
      {"model", {{"name", "hardcore"}, {"lambda", 1.5}}},
      {"algorithm", "exact"},
      {"exact", {{"task", "gibbs"}}},
      {"seed", 3},
      {"out", (dir.path / "runs").string()}};
  CHECK(run_cmd("run --config " + write_config(dir, dist_cfg, "d.json").string(),
                &out) == 0);
  bool found = false;
  for (auto& entry : fs::directory_iterator(dir.path / "runs"))
    found |= fs::exists(entry.path() / "distribution.csv");
  CHECK(found);
}

TEST_CASE("check subcommand") {
  std::string out;
  CHECK(run_cmd("check concavity", &out) == 0);
  CHECK(out.find("PASS") != std::string::npos);
  CHECK(run_cmd("check no-such-suite", &out) == 2);
}

TEST_CASE("check suites run through an experiment config") {
  TempDir dir;
  json cfg = chain_config();
  cfg["algorithm"] = "check-concavity";
  cfg["out"] = (dir.path / "runs").string();
  std::string out;
  CHECK(run_cmd("run --config " + write_config(dir, cfg).string(), &out) == 0);
  CHECK(out.find("PASS") != std::string::npos);
}

TEST_CASE("bond chain and cluster chain algorithms through configs") {
  TempDir dir;
  json sweeny = {
      {"graph", {{"kind", "box"}, {"d", 2}, {"n", 4}, {"topology", "free"}}},
      {"model", {{"name", "potts"}, {"q", 2}, {"beta", 0.6}}},
      {"algorithm", "sweeny"},
      {"grid", {{"p", {0.3, 0.6}}}},
      {"sweeps", 150},
      {"burn_in", 20},
      {"seed", 31},
      {"out", (dir.path / "runs").string()}};
  std::string out;
  CHECK(run_cmd("run --config " + write_config(dir, sweeny, "s.json").string(),
                &out) == 0);

  json sw = {
      {"graph", {{"kind", "box"}, {"d", 2}, {"n", 6}, {"topology", "free"}}},
      {"model", {{"name", "ising"}, {"h", 0.0}, {"beta", 0.7}}},
      {"algorithm", "sw"},
      {"boundary", {{"margin", 1}, {"spin", 1}}},
      {"sweeps", 200},
      {"burn_in", 30},
      {"seed", 32},
      {"out", (dir.path / "runs").string()}};
  CHECK(run_cmd("run --config " + write_config(dir, sw, "w.json").string(),
                &out) == 0);
  // strong coupling with a plus boundary magnetizes the window
  bool found = false;
  for (auto& entry : fs::directory_iterator(dir.path / "runs")) {
    std::string summary = slurp(entry.path() / "summary.jsonl");
    std::istringstream is(summary);
    std::string line;
    while (std::getline(is, line)) {
      json j = json::parse(line);
      if (j.contains("observable") && j["observable"] == "magnetization" &&
          j.contains("mean") && j["mean"].get<double>() > 0.8)
        found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("activity grid drives the hard-core chain") {
  TempDir dir;
  json cfg = {
      {"graph", {{"kind", "box"}, {"d", 2}, {"n", 4}, {"topology", "free"}}},
      {"model", {{"name", "hardcore"}, {"lambda", 1.0}}},
      {"algorithm", "heat-bath"},
      {"grid", {{"lambda", {0.5, 2.0}}}},
      {"sweeps", 200},
      {"burn_in", 20},
      {"seed", 9},
      {"out", (dir.path / "runs").string()}};
  std::string out;
  CHECK(run_cmd("run --config " + write_config(dir, cfg).string(), &out) == 0);
  fs::path run_dir;
  for (auto& entry : fs::directory_iterator(dir.path / "runs"))
    run_dir = entry.path();
  std::string summary = slurp(run_dir / "summary.jsonl");
  // two grid points, magnetization = particle density here
  CHECK(summary.find("\"grid\":0.5") != std::string::npos);
  CHECK(summary.find("\"grid\":2.0") != std::string::npos);
}

TEST_CASE("cftp run draws exact samples") {
  TempDir dir;
  json cfg = {
      {"graph", {{"kind", "box"}, {"d", 2}, {"n", 5}, {"topology", "free"}}},
      {"model", {{"name", "ising"}, {"h", 0.0}, {"beta", 0.35}}},
      {"algorithm", "cftp"},
      {"sweeps", 60},
      {"seed", 77},
      {"boundary", {{"margin", 1}, {"spin", 1}}},
      {"out", (dir.path / "runs").string()}};
  std::string out;
  CHECK(run_cmd("run --config " + write_config(dir, cfg).string(), &out) == 0);
  fs::path run_dir;
  for (auto& entry : fs::directory_iterator(dir.path / "runs"))
    run_dir = entry.path();
  std::string series = slurp(run_dir / "series.csv");
  CHECK(series.find("horizon") != std::string::npos);
}

TEST_CASE("disorder run emits per-replica records") {
  TempDir dir;
  json cfg = {
      {"graph",
       {{"kind", "box"}, {"d", 2}, {"n", 8}, {"topology", "periodic"}}},
      {"model", {{"name", "potts"}, {"q", 2}, {"beta", 0.9}}},
      {"algorithm", "disorder"},
      {"grid", {{"beta", {0.9}}}},
      {"disorder", {{"law", "dilution"}, {"p", 0.9}, {"q", 2}}},
      {"replicas", 3},
      {"sweeps", 40},
      {"burn_in", 10},
      {"seed", 5},
      {"out", (dir.path / "runs").string()}};
  std::string out;
  CHECK(run_cmd("run --config " + write_config(dir, cfg).string(), &out) == 0);
  fs::path run_dir;
  for (auto& entry : fs::directory_iterator(dir.path / "runs"))
    run_dir = entry.path();
  std::string summary = slurp(run_dir / "summary.jsonl");
  CHECK(summary.find("quenched_connection") != std::string::npos);
  CHECK(summary.find("open_bond_fraction") != std::string::npos);
}
