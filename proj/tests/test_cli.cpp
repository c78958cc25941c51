#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef _WIN32
#include <sys/wait.h>
#endif

namespace {

int exit_code(int rc) {
#ifdef _WIN32
  return rc;
#else
  if (WIFEXITED(rc)) return WEXITSTATUS(rc);
  return -1;
#endif
}

struct RunResult {
  int code = -1;
  std::string text;
};

// ctest runs from the build directory, next to the chainz2 binary
RunResult run_cli(const std::string& args) {
  static int counter = 0;
  std::filesystem::create_directories("cli_scratch");
  const std::string cap = "cli_scratch/capture_" + std::to_string(counter++) + ".txt";
  const int rc = std::system(("./chainz2 " + args + " > " + cap + " 2>&1").c_str());
  RunResult r;
  r.code = exit_code(rc);
  std::ifstream f(cap, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  r.text = ss.str();
  return r;
}

void write_file(const std::string& path, const std::string& body) {
  const auto dir = std::filesystem::path(path).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  std::ofstream f(path, std::ios::binary);
  f << body;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

double value_after(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size()));
}

}  // namespace

TEST_CASE("index run writes a csv and prints the sign", "[cli]") {
  REQUIRE(std::filesystem::exists("chainz2"));
  write_file("cli_scratch/index.json", R"({
    "schema": 1,
    "kind": "index",
    "chain": {"L": 4, "boundary": "periodic", "w": 1.0, "mu": 0.0}
  })");
  const RunResult r =
      run_cli("run --config cli_scratch/index.json --out cli_scratch/out_a");
  INFO(r.text);
  REQUIRE(r.code == 0);
  CHECK(contains(r.text, "index=-1"));
  CHECK(contains(r.text, "wrote "));
  const std::string csv = read_file("cli_scratch/out_a/index.csv");
  CHECK(csv.rfind("# schema=1 kind=index seed=12345\n", 0) == 0);
}

TEST_CASE("output bytes are reproducible across runs", "[cli]") {
  write_file("cli_scratch/index.json", R"({
    "schema": 1,
    "kind": "index",
    "chain": {"L": 4, "boundary": "periodic", "w": 1.0, "mu": 0.0}
  })");
  const RunResult a =
      run_cli("run --config cli_scratch/index.json --out cli_scratch/out_b1");
  const RunResult b =
      run_cli("run --config cli_scratch/index.json --out cli_scratch/out_b2");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const std::string fa = read_file("cli_scratch/out_b1/index.csv");
  const std::string fb = read_file("cli_scratch/out_b2/index.csv");
  REQUIRE(!fa.empty());
  CHECK(fa == fb);
}

TEST_CASE("flux sweep locates the gap closing", "[cli]") {
  write_file("cli_scratch/sf2.json", R"({
    "schema": 1,
    "kind": "sf2_flux",
    "chain": {"L": 4, "boundary": "flux", "w": 1.0, "mu": 0.0},
    "sweep": {"points": 41}
  })");
  const RunResult r =
      run_cli("run --config cli_scratch/sf2.json --out cli_scratch/out_c");
  INFO(r.text);
  REQUIRE(r.code == 0);
  CHECK(contains(r.text, "sf2=-1"));
  const double x = value_after(r.text, "crossing=");
  CHECK(std::abs(x - std::acos(-1.0) / 2.0) < 0.05);
}

TEST_CASE("json output carries the schema header", "[cli]") {
  write_file("cli_scratch/index_json.json", R"({
    "schema": 1,
    "kind": "index",
    "chain": {"L": 3, "boundary": "antiperiodic", "w": 1.0, "mu": 0.0},
    "output": {"path": "idx.json", "format": "json"}
  })");
  const RunResult r =
      run_cli("run --config cli_scratch/index_json.json --out cli_scratch/out_d");
  INFO(r.text);
  REQUIRE(r.code == 0);
  CHECK(contains(r.text, "index=+1"));
  const std::string doc = read_file("cli_scratch/out_d/idx.json");
  CHECK(contains(doc, "\"schema\": 1"));
  CHECK(contains(doc, "\"kind\": \"index\""));
}

TEST_CASE("ground state summary reports the degeneracy", "[cli]") {
  write_file("cli_scratch/ed.json", R"({
    "schema": 1,
    "kind": "ed_ground",
    "chain": {"L": 4, "boundary": "open", "w": 1.0, "mu": 0.0, "delta": 1.0}
  })");
  const RunResult r =
      run_cli("run --config cli_scratch/ed.json --out cli_scratch/out_e");
  INFO(r.text);
  REQUIRE(r.code == 0);
  CHECK(contains(r.text, "degeneracy=2"));
  CHECK(contains(r.text, "E0=-3"));
}

TEST_CASE("config errors exit with status one", "[cli]") {
  write_file("cli_scratch/bad_schema.json", R"({
    "schema": 2,
    "kind": "index",
    "chain": {"L": 4, "w": 1.0}
  })");
  RunResult r = run_cli("run --config cli_scratch/bad_schema.json --out cli_scratch/out_f");
  CHECK(r.code == 1);
  CHECK(contains(r.text, "config error"));

  write_file("cli_scratch/no_w.json", R"({
    "schema": 1,
    "kind": "index",
    "chain": {"L": 4, "mu": 1.0}
  })");
  r = run_cli("run --config cli_scratch/no_w.json --out cli_scratch/out_f");
  CHECK(r.code == 1);
  CHECK(contains(r.text, "config error"));

  write_file("cli_scratch/short_sweep.json", R"({
    "schema": 1,
    "kind": "sf2_flux",
    "chain": {"L": 4, "boundary": "flux", "w": 1.0},
    "sweep": {"points": 1}
  })");
  r = run_cli("run --config cli_scratch/short_sweep.json --out cli_scratch/out_f");
  CHECK(r.code == 1);
  CHECK(contains(r.text, "at least 2 points"));

  write_file("cli_scratch/bad_kind.json", R"({
    "schema": 1,
    "kind": "mystery",
    "chain": {"L": 4, "w": 1.0}
  })");
  r = run_cli("run --config cli_scratch/bad_kind.json --out cli_scratch/out_f");
  CHECK(r.code == 1);

  r = run_cli("run --config cli_scratch/does_not_exist.json --out cli_scratch/out_f");
  CHECK(r.code == 1);
}

TEST_CASE("a gapless index request exits with status two", "[cli]") {
  // at the sweet spot the single twisted bond closes the gap exactly at pi/2
  write_file("cli_scratch/gapless.json", R"({
    "schema": 1,
    "kind": "index",
    "chain": {"L": 4, "boundary": "flux", "alpha": 1.5707963267948966,
              "w": 1.0, "mu": 0.0}
  })");
  const RunResult r =
      run_cli("run --config cli_scratch/gapless.json --out cli_scratch/out_g");
  INFO(r.text);
  CHECK(r.code == 2);
  CHECK(contains(r.text, "numerical failure"));
}
