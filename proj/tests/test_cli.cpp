#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wpx/field.hpp"

using namespace wpx;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(WPX_BIN) + " " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path work() {
  static fs::path p = [] {
    fs::path q = fs::temp_directory_path() / "wpx_cli_test";
    fs::remove_all(q);
    fs::create_directories(q);
    return q;
  }();
  return p;
}

fs::path write_config(const char* name, const std::string& body) {
  fs::path p = work() / name;
  std::ofstream(p) << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kSmall = R"({
  "n": 2, "grid_size": 64, "seed": 3,
  "coefficients": {"kind": "flat"},
  "solver": {"method": "reference", "scheme": "leapfrog", "cfl": 0.25},
  "t_final": 0.25, "nout": 2,
  "norms": [{"p": 2, "s": 0.0}, {"p": 1, "s": 0.25}],
  "diagnostics": ["volume"]
})";

}  // namespace

TEST_CASE("missing config file is an I/O error") {
  CHECK(run("--config " + (work() / "nope.json").string() + " solve") == 2);
}

TEST_CASE("unknown config key is a configuration error") {
  fs::path cfg = write_config("bad.json", R"({"n": 2, "grid_sz": 64})");
  CHECK(run("--config " + cfg.string() + " solve") == 1);
}

TEST_CASE("invalid enum value is a configuration error") {
  fs::path cfg = write_config(
      "bad2.json", R"({"n": 2, "grid_size": 64, "form": "weak"})");
  CHECK(run("--config " + cfg.string() + " solve") == 1);
}

TEST_CASE("transform writes phase data and a roundtrip report") {
  fs::path cfg = write_config("small.json", kSmall);
  fs::path out = work() / "transform";
  RealField f = random_band_limited(2, 64, 3, 15, 3, 1);
  save_field(f, (work() / "input.bin").string());
  CHECK(run("--config " + cfg.string() + " --out " + out.string() +
            " transform --input " + (work() / "input.bin").string()) == 0);
  CHECK(fs::exists(out / "phase.bin"));
  std::ifstream csv(out / "transform.csv");
  std::string comment, header, row;
  std::getline(csv, comment);
  std::getline(csv, header);
  std::getline(csv, row);
  CHECK(comment.find("# wpx 1.0.0 config_hash=") == 0);
  CHECK(header.find("roundtrip_rel_error") != std::string::npos);
  // last column is the roundtrip error
  double rt = std::stod(row.substr(row.rfind(',') + 1));
  CHECK(rt < 1e-10);
}

TEST_CASE("norm consumes the phase file and reports tent norms") {
  fs::path cfg = write_config("small.json", kSmall);
  fs::path out = work() / "transform";  // phase.bin from the transform case
  REQUIRE(fs::exists(out / "phase.bin"));
  CHECK(run("--config " + cfg.string() + " --out " + out.string() +
            " norm --input " + (out / "phase.bin").string()) == 0);
  std::ifstream csv(out / "norms.csv");
  std::string line;
  std::getline(csv, line);  // comment
  std::getline(csv, line);  // header
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::istringstream ss(line);
    double p, s, value;
    char c;
    ss >> p >> c >> s >> c >> value;
    CHECK(value > 0);
  }
  CHECK(rows == 2);
}

TEST_CASE("mismatched grid is rejected by transform") {
  fs::path cfg = write_config("small.json", kSmall);
  RealField f = random_band_limited(2, 32, 3, 9, 3, 2);
  save_field(f, (work() / "input32.bin").string());
  CHECK(run("--config " + cfg.string() + " --out " + work().string() +
            " transform --input " + (work() / "input32.bin").string()) == 1);
}

TEST_CASE("diagnose volume writes the MC table") {
  fs::path cfg = write_config("small.json", kSmall);
  fs::path out = work() / "diag";
  CHECK(run("--config " + cfg.string() + " --out " + out.string() +
            " diagnose") == 0);
  std::ifstream csv(out / "volume.csv");
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows > 4);
}

TEST_CASE("unknown diagnostic is a configuration error") {
  std::string body = kSmall;
  body.replace(body.find("\"volume\""), 8, "\"vibes\"");
  fs::path cfg = write_config("diagbad.json", body);
  CHECK(run("--config " + cfg.string() + " diagnose") == 1);
}

TEST_CASE("reference solve is deterministic") {
  fs::path cfg = write_config("small.json", kSmall);
  fs::path a = work() / "runA", b = work() / "runB";
  CHECK(run("--config " + cfg.string() + " --out " + a.string() +
            " solve") == 0);
  CHECK(run("--config " + cfg.string() + " --out " + b.string() +
            " solve") == 0);
  CHECK(slurp(a / "u_final.bin") == slurp(b / "u_final.bin"));
  CHECK(!slurp(a / "u_final.bin").empty());
}

TEST_CASE("seed override changes the output") {
  fs::path cfg = write_config("small.json", kSmall);
  fs::path a = work() / "runA", c = work() / "runC";
  REQUIRE(fs::exists(a / "u_final.bin"));
  CHECK(run("--config " + cfg.string() + " --out " + c.string() +
            " --seed 99 solve") == 0);
  CHECK(slurp(a / "u_final.bin") != slurp(c / "u_final.bin"));
}
