#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

CmdResult run_cli(const std::string& args) {
  std::string cmd = std::string(SYMLOC_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult result;
  char buffer[4096];
  std::size_t n;
  while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0)
    result.output.append(buffer, n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string data(const std::string& name) {
  return std::string(SYMLOC_DATA_DIR) + "/" + name;
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "symloc_cli_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_scratch(const std::string& name, const std::string& content) {
  auto path = scratch_dir() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

}  // namespace

TEST_CASE("parse: exit codes and diagnostics") {
  CHECK(run_cli("parse " + data("tsp4.mop")).exit_code == 0);

  CmdResult missing = run_cli("parse " + data("no_such_file.mop"));
  CHECK(missing.exit_code == 1);
  CHECK(missing.output.find("cannot read") != std::string::npos);

  std::string bad = write_scratch("broken.mop", "mop broken {\n  type T = ;\n}\n");
  CmdResult syntax = run_cli("parse " + bad);
  CHECK(syntax.exit_code == 1);
  CHECK(syntax.output.find("broken.mop:2:") != std::string::npos);
}

TEST_CASE("detect: tsp4 and cnp_k3 counts") {
  CmdResult tsp = run_cli("detect " + data("tsp4.mop") + " --policy exhaustive");
  CHECK(tsp.exit_code == 0);
  CHECK(tsp.output.find("surviving symmetries: 12") != std::string::npos);

  CmdResult cnp = run_cli("detect " + data("cnp_k3.mop") + " --policy exhaustive");
  CHECK(cnp.exit_code == 0);
  CHECK(cnp.output.find("surviving symmetries: 0") != std::string::npos);
  // three color swaps detected, then filtered for the objective
  std::size_t pos = 0;
  int invariant = 0;
  while ((pos = cnp.output.find("objective-invariant", pos)) != std::string::npos) {
    ++invariant;
    pos += 1;
  }
  CHECK(invariant == 3);
}

TEST_CASE("detect: json output is byte-identical across runs") {
  std::string cmd = "detect " + data("knapsack6.mop") + " --json --seed 7";
  CmdResult a = run_cli(cmd);
  CmdResult b = run_cli(cmd);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
  CHECK(a.output.find("\"schema\": \"symloc/1\"") != std::string::npos);
}

TEST_CASE("solve: exact method reports the optimum") {
  CmdResult result = run_cli("solve " + data("assignment2.mop") + " --method exact");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("objective 2") != std::string::npos);
}

TEST_CASE("solve: local search never worsens the initial tour") {
  CmdResult result = run_cli("solve " + data("tsp4.mop") + " --method local --seed 1 --json");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("\"status\": \"sat\"") != std::string::npos);
  CHECK(result.output.find("\"trajectory\"") != std::string::npos);
}

TEST_CASE("solve: cnp_k3 comes back with no neighborhood") {
  CmdResult result = run_cli("solve " + data("cnp_k3.mop") + " --method local");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("no-neighborhood") != std::string::npos);
}

TEST_CASE("solve: unsat and budget exit codes") {
  std::string unsat = write_scratch("k3_2colors.mop", R"(
    mop impossible {
      type Node = { n1, n2, n3 };
      type Color = { col1, col2 };
      pred Edge(Node, Node);
      var func Coloring(Node) -> Color;
      constraint forall x in Node: forall y in Node: Edge(x, y) => Coloring(x) != Coloring(y);
      minimize count { z in Color | exists x in Node: Coloring(x) = z };
      Edge = { (n1,n2), (n1,n3), (n2,n3) };
    }
  )");
  CHECK(run_cli("solve " + unsat + " --method local").exit_code == 2);
  CHECK(run_cli("solve " + unsat + " --method exact").exit_code == 2);
  CHECK(run_cli("solve " + data("tsp4.mop") + " --max-nodes 1").exit_code == 3);
}

TEST_CASE("solve: json output is byte-identical across runs") {
  std::string cmd = "solve " + data("tsp6.mop") + " --method local --seed 5 --json";
  CmdResult a = run_cli(cmd);
  CmdResult b = run_cli(cmd);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
}

TEST_CASE("verify: bundled instances pass with a zero gap where search finds the optimum") {
  CmdResult knap = run_cli("verify " + data("knapsack3.mop"));
  CHECK(knap.exit_code == 0);
  CHECK(knap.output.find("gap 0") != std::string::npos);
  CHECK(knap.output.find("all symmetries verified") != std::string::npos);

  CmdResult tsp = run_cli("verify " + data("tsp4.mop"));
  CHECK(tsp.exit_code == 0);
  CHECK(tsp.output.find("12 detected symmetries") != std::string::npos);
}

TEST_CASE("verify: json output is byte-identical across runs") {
  std::string cmd = "verify " + data("tsp4.mop") + " --json --seed 3";
  CmdResult a = run_cli(cmd);
  CmdResult b = run_cli(cmd);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
}

TEST_CASE("verify: injected detection faults are caught as soundness violations") {
  // Skipping the structural checks admits endpoint swaps on the shortest-path
  // model; those survive the invariance filter and must fail semantically.
  std::string cmd = "SYMLOC_FAULT_INJECTION=1 " + std::string(SYMLOC_BIN) + " verify " +
                    data("shortest_path4.mop") + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  char buffer[4096];
  std::size_t n;
  while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) output.append(buffer, n);
  int status = pclose(pipe);
  CHECK(WEXITSTATUS(status) == 4);
  CHECK(output.find("SOUNDNESS VIOLATION") != std::string::npos);
}

TEST_CASE("gen: output parses and matches the documented detection outcomes") {
  auto t6 = (scratch_dir() / "t6.mop").string();
  CHECK(run_cli("gen tsp --n 6 --seed 3 -o " + t6).exit_code == 0);
  CHECK(run_cli("parse " + t6).exit_code == 0);

  auto k5 = (scratch_dir() / "k5.mop").string();
  CHECK(run_cli("gen knapsack --objects 5 --equal-volume-pairs 2 --seed 9 -o " + k5)
            .exit_code == 0);
  CmdResult knap = run_cli("detect " + k5);
  CHECK(knap.output.find("surviving symmetries: 2") != std::string::npos);

  auto mc8 = (scratch_dir() / "mc8.mop").string();
  CHECK(run_cli("gen max-clique --n 8 --seed 4 -o " + mc8).exit_code == 0);
  CmdResult clique = run_cli("detect " + mc8);
  CHECK(clique.output.find("surviving symmetries: 0") != std::string::npos);

  CHECK(run_cli("gen tsp --n 1").exit_code == 1);
  CHECK(run_cli("gen nonsense").exit_code == 1);
}

TEST_CASE("gen: deterministic per seed") {
  CmdResult a = run_cli("gen assignment --n 4 --seed 11");
  CmdResult b = run_cli("gen assignment --n 4 --seed 11");
  CHECK(a.output == b.output);
  CmdResult c = run_cli("gen assignment --n 4 --seed 12");
  CHECK(a.output != c.output);
}
