#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "choreo/config.hpp"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string output;
};

Run run(const std::string& args) {
  const std::string cmd = std::string("\"") + CHOREO_CLI_PATH + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / ("choreo_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string config(const std::string& name) { return std::string(CHOREO_CONFIG_DIR) + "/" + name; }

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

// Solves the shipped figure eight once.
const fs::path& figure_eight_orbit() {
  static const fs::path path = [] {
    const fs::path p = scratch() / "fe.orbit.json";
    const Run r = run("solve --config " + config("figure_eight.config.json") + " --out " + p.string() + " --quiet");
    REQUIRE(r.status == 0);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("analyze") {
  Run r = run("analyze --n 4 --even-schedule");
  CHECK(r.status == 0);
  CHECK(contains(r.output, "(1,3)@T/4"));
  CHECK(contains(r.output, "(2,4)@T/2"));
  CHECK(run("analyze --n 5 --even-schedule").output == "none\n");
  CHECK(run("analyze --dense-set 1/3").output == "false\n");
  CHECK(run("analyze --dense-set 3/8").output == "true\n");
  CHECK(run("analyze --n 3 --coprime 8").output == "true\n");
  CHECK(run("analyze --n 3 --coprime 6").output == "false\n");
  r = run("analyze --n 8 --plan");
  CHECK(r.status == 0);
  CHECK(contains(r.output, "groups=5,3"));
  CHECK(contains(r.output, "k=4"));
  CHECK(contains(run("analyze --n 4 --plan").output, "warning:"));
}

TEST_CASE("usage errors") {
  for (const char* args : {"", "frobnicate", "analyze --bogus", "verify", "solve --config"}) {
    CAPTURE(args);
    const Run r = run(args);
    CHECK(r.status == 2);
    CHECK(r.output.rfind("error: usage:", 0) == 0);
  }
  CHECK(run("--help").status == 0);
  CHECK(run("analyze --dense-set 5/3").status != 0);
  const Run missing = run("verify " + (scratch() / "nope.orbit.json").string());
  CHECK(missing.status == 1);
  CHECK(missing.output.rfind("error: io:", 0) == 0);
}

TEST_CASE("solve then verify the shipped figure eight") {
  const fs::path orbit = figure_eight_orbit();
  CHECK(fs::exists(orbit));
  const Run v = run("verify " + orbit.string());
  CHECK(v.status == 0);
  CHECK(contains(v.output, "classification=non-collision"));

  const Run strict = run("verify " + orbit.string() + " --tol periodicity=1e-14");
  CHECK(strict.status == 3);
  CHECK(contains(strict.output, "error: verification:"));
  CHECK(run("verify " + orbit.string() + " --tol wobble=1").status == 2);
}

TEST_CASE("plot and export") {
  const fs::path orbit = figure_eight_orbit();
  const fs::path svg = scratch() / "fe.svg", csv = scratch() / "fe.csv";
  CHECK(run("plot " + orbit.string() + " --out " + svg.string() + " --density 128").status == 0);
  const std::string text = choreo::read_text_file(svg.string());
  CHECK(contains(text, "<svg"));
  const Run planar = run("plot " + orbit.string() + " --out " + svg.string() + " --panels yz");
  CHECK(planar.status == 1);
  CHECK(planar.output.rfind("error: validation:", 0) == 0);

  CHECK(run("export " + orbit.string() + " --csv " + csv.string() + " --samples 16").status == 0);
  const std::string table = choreo::read_text_file(csv.string());
  int lines = 0;
  for (char c : table) lines += c == '\n';
  CHECK(lines == 17);
}

TEST_CASE("shipped configs parse") {
  for (const auto& entry : fs::directory_iterator(CHOREO_CONFIG_DIR)) {
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(choreo::load_config(entry.path().string()));
  }
}
