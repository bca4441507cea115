#include "oschom/graph_io.hpp"

#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "oschom_cli_test";

int run(const std::string& args) {
  std::string cmd = std::string(OSCHOM_CLI_PATH) + " " + args + " > " + (kScratch / "stdout.txt").string() + " 2> " +
                    (kScratch / "stderr.txt").string();
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out_dir(const std::string& name) { return (kScratch / name).string(); }

std::string slurp(const fs::path& p) { return oschom::read_text_file(p); }

struct Scratch {
  Scratch() { fs::create_directories(kScratch); }
  ~Scratch() { fs::remove_all(kScratch); }
};

}  // namespace

TEST_CASE_FIXTURE(Scratch, "levels writes graphs and a summary") {
  REQUIRE(run("levels --constraint sin-product --z 0 0.5 --resolution 32 --out " + out_dir("lv")) == 0);
  auto summary = nlohmann::json::parse(slurp(kScratch / "lv" / "levels.json"));
  REQUIRE(summary.size() == 2);
  CHECK(summary[0]["unbounded"] == 1);
  CHECK(summary[1]["unbounded"] == 0);
  CHECK(fs::exists(kScratch / "lv" / "level_0.json"));
  CHECK(fs::exists(kScratch / "lv" / "level_1.svg"));
}

TEST_CASE_FIXTURE(Scratch, "psi and ball tables") {
  REQUIRE(run("psi --constraint sin-product --z 0 --directions 8 --resolution 32 --out " + out_dir("psi")) == 0);
  auto csv = slurp(kScratch / "psi" / "psi.csv");
  CHECK(csv.find('\n') != std::string::npos);
  REQUIRE(run("ball --constraint dist-z2 --z 0.5 --directions 8 --resolution 32 --out " + out_dir("ball")) == 0);
  auto m = nlohmann::json::parse(slurp(kScratch / "ball" / "metric.json"));
  CHECK(m["dim"] == 2);
  CHECK(fs::exists(kScratch / "ball" / "ball.svg"));
}

TEST_CASE_FIXTURE(Scratch, "synth and gamma are deterministic for a fixed seed") {
  for (const char* name : {"s1", "s2"}) REQUIRE(run("synth --seed 5 --directions 16 --out " + out_dir(name)) == 0);
  for (const char* f : {"spec.json", "network.json", "synth.csv"})
    CHECK(slurp(kScratch / "s1" / f) == slurp(kScratch / "s2" / f));

  std::string g = "gamma --constraint sin-product --z 0 --directions 16 --resolution 32 --eps 0.1 0.05 --seed 3 --out ";
  REQUIRE(run(g + out_dir("g1")) == 0);
  REQUIRE(run(g + out_dir("g2")) == 0);
  CHECK(slurp(kScratch / "g1" / "gamma.csv") == slurp(kScratch / "g2" / "gamma.csv"));
}

TEST_CASE_FIXTURE(Scratch, "tube and degenerate commands") {
  REQUIRE(run("tube --constraint sin-product --z 0 --c 0.05 --resolution 32 --T 10 --out " + out_dir("t")) == 0);
  CHECK(fs::exists(kScratch / "t" / "tube.csv"));
  REQUIRE(run("degenerate --k 4 --resolution 64 --directions 8 --out " + out_dir("d")) == 0);
  auto d = nlohmann::json::parse(slurp(kScratch / "d" / "degenerate.json"));
  CHECK(d.is_object());
}

TEST_CASE_FIXTURE(Scratch, "config file values yield to flags") {
  oschom::write_text_file(kScratch / "cfg.json",
                          R"({"command": "levels", "constraint": "dist-z2", "z": [0.5], "resolution": 16})");
  REQUIRE(run("levels --config " + (kScratch / "cfg.json").string() + " --resolution 24 --out " + out_dir("c")) == 0);
  auto summary = nlohmann::json::parse(slurp(kScratch / "c" / "levels.json"));
  REQUIRE(summary.size() == 1);
  CHECK(summary[0]["level"] == 0.5);
}

TEST_CASE_FIXTURE(Scratch, "errors map to exit codes and error records") {
  CHECK(run("levels --constraint nope --out " + out_dir("e1")) == 2);
  auto err = nlohmann::json::parse(slurp(kScratch / "e1" / "error.json"));
  CHECK(err["error"] == "UnsupportedKind");
  CHECK(run("levels --bogus-flag") == 2);
  CHECK(run("levels --config " + (kScratch / "missing.json").string() + " --out " + out_dir("e2")) == 2);
  oschom::write_text_file(kScratch / "bad.json", "[1, 2]");
  CHECK(run("levels --config " + (kScratch / "bad.json").string() + " --out " + out_dir("e3")) == 2);
  CHECK(run("tube --constraint sin-product --z 0 --w 1 2 3 --resolution 16 --out " + out_dir("e4")) == 2);
  CHECK(run("degenerate --k 0.5 --out " + out_dir("e5")) == 3);
  CHECK(run("--out " + out_dir("e6")) == 2);
}
