#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "iotmonitor/model_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string output;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "iotmonitor_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome run(const std::string& args) {
  const fs::path log = scratch() / "last.log";
  const std::string cmd = std::string("\"") + IOTMONITOR_CLI_PATH + "\" " + args + " > \"" +
                          log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.output = slurp(log);
  return o;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("run").code == 1);
  CHECK(run("run --trace x --window-ms abc").code == 1);
  CHECK(run("grid --lengths 9:3").code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("simulate is seed-deterministic") {
  const fs::path a = scratch() / "a.trace";
  const fs::path b = scratch() / "b.trace";
  const fs::path c = scratch() / "c.trace";
  REQUIRE(run("simulate --seed 9 --spurious-rate 0.001 --out " + q(a)).code == 0);
  REQUIRE(run("simulate --seed 9 --spurious-rate 0.001 --out " + q(b)).code == 0);
  REQUIRE(run("simulate --seed 10 --spurious-rate 0.001 --out " + q(c)).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) != slurp(c));
  CHECK(slurp(a).rfind("E 0 door-unlocked\n", 0) == 0);
}

TEST_CASE("simulate from a spec file") {
  const fs::path spec = scratch() / "one.spec";
  std::ofstream(spec) << "repetitions = 2\n[chain]\nalarm\n[evidence]\nalarm beep 5 1\n";
  const Outcome o = run("simulate --spec " + q(spec));
  CHECK(o.code == 0);
  CHECK(o.output == "E 0 alarm\nS 5 beep\nE 1000 alarm\nS 1005 beep\n");

  const fs::path empty = scratch() / "empty.spec";
  std::ofstream(empty) << "repetitions = 2\n[chain]\n";
  const Outcome bad = run("simulate --spec " + q(empty));
  CHECK(bad.code == 2);
  CHECK(bad.output.find("error") != std::string::npos);
}

TEST_CASE("data errors exit 2") {
  CHECK(run("run --trace " + q(scratch() / "missing.trace")).code == 2);
  const fs::path broken = scratch() / "broken.trace";
  std::ofstream(broken) << "E 0 a\nX 1 b\n";
  const Outcome o = run("run --trace " + q(broken));
  CHECK(o.code == 2);
  CHECK(o.output.find("line 2") != std::string::npos);

  const fs::path sparse = scratch() / "sparse.trace";
  std::ofstream(sparse) << "E 0 a\nS 5 x\nE 1000 b\n";
  CHECK(run("run --trace " + q(sparse)).code == 2);
}

TEST_CASE("run, grid and detect end to end") {
  const fs::path trace = scratch() / "default.trace";
  REQUIRE(run("simulate --out " + q(trace)).code == 0);

  const fs::path model = scratch() / "model.txt";
  const Outcome r = run("run --trace " + q(trace) + " --restarts 10 --model-out " + q(model));
  REQUIRE(r.code == 0);
  CHECK(r.output.find("verified events: 140 (discarded 0)") != std::string::npos);
  CHECK(r.output.find("f1: 1\n") != std::string::npos);
  CHECK(iotmonitor::load_model(model).state_count() == 7);

  const fs::path grid = scratch() / "grid.csv";
  const Outcome g = run("grid --trace " + q(trace) +
                        " --window-range 105:110:5 --lengths 2,3,400 --runs 1 --out " + q(grid));
  REQUIRE(g.code == 0);
  const std::string csv = slurp(grid);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(csv.find("\n110,400,,,,,\n") != std::string::npos);
  CHECK(fs::exists(scratch() / "grid.heatmap.csv"));
  CHECK(run("grid --trace " + q(trace) + " --spec x.spec").code == 1);

  const fs::path scores = scratch() / "scores.csv";
  const Outcome d = run("detect --trace " + q(trace) + " --attempts 2 --restarts 10 --out " +
                        q(scores));
  REQUIRE(d.code == 0);
  CHECK(d.output.find("crucial pairs") != std::string::npos);
  CHECK(slurp(scores).rfind("first,second,count,crucial\n", 0) == 0);
  CHECK(run("detect --trace " + q(trace) + " --attempts 0").code == 1);
}
