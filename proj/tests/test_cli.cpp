// End-to-end tests for the command-line tool: every subcommand is exercised
// through a real process, checking output artifacts and exit codes
// (0 success, 1 validation failure, 2 usage error).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#ifndef EXDIFF_CLI_PATH
#error "EXDIFF_CLI_PATH must point at the built CLI binary"
#endif

namespace {

using nlohmann::json;

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(EXDIFF_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult r;
  char buf[4096];
  size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path tmp_dir() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("exdiff_cli_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  return lines;
}

std::vector<double> csv_row(const std::string& line) {
  std::vector<double> out;
  std::istringstream is(line);
  std::string cell;
  while (std::getline(is, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path);
  REQUIRE(f.good());
  f << content;
}

}  // namespace

TEST_CASE("policy: balanced rule reports and exits 0") {
  const CliResult r =
      run_cli("policy --n 8 --edge-prob 0.6 --seed 3 --rule averaging --mu-o 0.02");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["rule"] == "averaging");
  CHECK(j["n"] == 8);
  CHECK(j["validation"]["ok"] == true);
  CHECK(j["validation"]["balanced"] == true);
  CHECK(j["lemma"]["preconditions_ok"] == true);
  CHECK(j["lemma"]["all_pass"] == true);
  CHECK(j["lemma"]["checks"].size() > 0);
  REQUIRE(j["steps"]["mu"].size() == 8);
  REQUIRE(j["perron"].size() == 8);
  const double beta = j["steps"]["beta"].get<double>();
  CHECK(beta > 0.0);
  // published identity: q = beta * diag(mu) * p
  for (size_t k = 0; k < 8; ++k) {
    const double q = j["steps"]["q"][k].get<double>();
    const double mu = j["steps"]["mu"][k].get<double>();
    const double p = j["perron"][k].get<double>();
    CHECK(q == doctest::Approx(beta * mu * p).epsilon(1e-9));
  }
}

TEST_CASE("policy: unbalanced custom matrix fails validation with exit 1") {
  const auto matrix = tmp_dir() / "unbalanced.json";
  write_file(matrix,
             R"({"A": [[0,0,0,1],[0,0.5,0.5,0],[1,0,0.5,0],[0,0.5,0,0]]})");
  const CliResult r = run_cli("policy --matrix " + matrix.string() + " --mu-o 0.01");
  REQUIRE(r.exit_code == 1);
  const json j = json::parse(r.out);  // the report is still emitted
  CHECK(j["validation"]["balanced"] == false);
  CHECK(j["lemma"]["preconditions_ok"] == false);
  CHECK(j["lemma"]["all_pass"] == false);
}

TEST_CASE("policy: usage and validation exit codes") {
  CHECK(run_cli("policy --n 8 --rule bogus").exit_code == 2);   // IsMember rejects
  CHECK(run_cli("policy --rule averaging").exit_code == 1);     // no network source
  CHECK(run_cli("").exit_code == 2);                            // missing subcommand
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("policy --help").exit_code == 0);
}

TEST_CASE("net gen: hub-and-leaf to stdout") {
  const CliResult r = run_cli("net gen --hubs 1 --leaves 1");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["n"] == 2);
  REQUIRE(j["edges"].size() == 1);
  CHECK(j["edges"][0][0] == 0);
  CHECK(j["edges"][0][1] == 1);
}

TEST_CASE("net gen file feeds the policy command") {
  const auto net = tmp_dir() / "net10.json";
  const CliResult gen =
      run_cli("net gen --n 10 --edge-prob 0.5 --seed 11 --out " + net.string());
  REQUIRE(gen.exit_code == 0);
  REQUIRE(std::filesystem::exists(net));

  const CliResult pol = run_cli("policy --net " + net.string() + " --rule metropolis");
  REQUIRE(pol.exit_code == 0);
  const json j = json::parse(pol.out);
  CHECK(j["rule"] == "metropolis");
  CHECK(j["n"] == 10);
  CHECK(j["validation"]["ok"] == true);
}

TEST_CASE("solve: trajectory CSVs and a summary") {
  const std::string prefix = (tmp_dir() / "run_").string();
  const CliResult r = run_cli(
      "solve --n 6 --edge-prob 0.7 --seed 5 --rule averaging --cost ls --dim 3 "
      "--samples 8 --data-seed 9 --algorithms exact_diffusion,diffusion "
      "--mu-o 0.02 --max-iters 800 --out-prefix " + prefix);
  REQUIRE(r.exit_code == 0);
  const json summary = json::parse(r.out);
  REQUIRE(summary.size() == 2);  // two algorithms, one mu_o
  for (const json& row : summary) {
    CHECK(row["mu_o"] == 0.02);
    CHECK(row["diverged"] == false);
    const std::string file = row["file"].get<std::string>();
    REQUIRE(std::filesystem::exists(file));
    const std::vector<std::string> lines = lines_of(slurp(file));
    REQUIRE(lines.size() >= 3);
    CHECK(lines[0] == "iter,rel_error");
    const std::vector<double> first = csv_row(lines[1]);
    REQUIRE(first.size() == 2);
    CHECK(first[0] == 0.0);
    CHECK(first[1] == 1.0);  // the relative error always starts at one
    const std::vector<double> last = csv_row(lines.back());
    CHECK(last[1] == doctest::Approx(row["final_rel_error"].get<double>()).epsilon(1e-15));
    CHECK(last[1] < 1.0);  // both algorithms make progress on this instance
  }
  // the bias-corrected recursion lands far below plain diffusion's plateau
  const double exact_final = summary[0]["final_rel_error"].get<double>();
  const double diffusion_final = summary[1]["final_rel_error"].get<double>();
  CHECK(summary[0]["algorithm"] == "exact_diffusion");
  CHECK(summary[1]["algorithm"] == "diffusion");
  CHECK(exact_final < diffusion_final);
}

TEST_CASE("solve: cost column when requested") {
  const std::string prefix = (tmp_dir() / "cost_").string();
  const CliResult r = run_cli(
      "solve --n 4 --edge-prob 0.9 --seed 2 --rule metropolis --cost ls --dim 2 "
      "--samples 6 --data-seed 3 --algorithms exact_diffusion --mu-o 0.05 "
      "--max-iters 50 --record-cost --out-prefix " + prefix);
  REQUIRE(r.exit_code == 0);
  const json summary = json::parse(r.out);
  REQUIRE(summary.size() == 1);
  const std::vector<std::string> lines =
      lines_of(slurp(summary[0]["file"].get<std::string>()));
  CHECK(lines[0] == "iter,rel_error,cost");
  CHECK(csv_row(lines[1]).size() == 3);
}

TEST_CASE("solve: divergence is reported, not hidden") {
  const std::string prefix = (tmp_dir() / "div_").string();
  const CliResult r = run_cli(
      "solve --n 6 --edge-prob 0.7 --seed 5 --rule averaging --cost ls --dim 3 "
      "--samples 8 --data-seed 9 --algorithms exact_diffusion --mu-o 1000 "
      "--max-iters 500 --out-prefix " + prefix);
  REQUIRE(r.exit_code == 0);  // a divergence finding is a successful run
  const json summary = json::parse(r.out);
  REQUIRE(summary.size() == 1);
  CHECK(summary[0]["diverged"] == true);
  CHECK(summary[0]["divergence_iter"].get<int>() >= 0);
  const std::string text = slurp(summary[0]["file"].get<std::string>());
  CHECK(text.find("# diverged at iter") != std::string::npos);
}

TEST_CASE("solve: unknown algorithm is a validation error") {
  CHECK(run_cli("solve --n 4 --rule averaging --algorithms warp_drive").exit_code == 1);
}

TEST_CASE("stability: single-mu row matches the frozen reference") {
  const CliResult r = run_cli("stability --example 2 --mu 1e-9");
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "mu,rho,stable");
  const std::vector<double> row = csv_row(lines[1]);
  REQUIRE(row.size() == 3);
  CHECK(row[0] == 1e-9);
  CHECK(row[1] == doctest::Approx(0.992272).epsilon(1e-4));
  CHECK(row[2] == 1.0);
}

TEST_CASE("stability: sweep has the requested shape and verdicts") {
  const CliResult r = run_cli("stability --example 1 --mu-min 0.001 --mu-max 1 --points 5");
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 6);  // header + 5 grid points
  CHECK(csv_row(lines[1])[0] == 0.001);
  CHECK(csv_row(lines[5])[0] == 1.0);
  for (size_t i = 1; i < lines.size(); ++i) {
    const std::vector<double> row = csv_row(lines[i]);
    CHECK(row[1] > 1.0);   // this study case is unstable for every mu
    CHECK(row[2] == 0.0);
  }
}

TEST_CASE("stability: custom matrix with h-diag") {
  const auto matrix = tmp_dir() / "custom_stab.json";
  write_file(matrix,
             R"({"A": [[0,0,0,1],[0,0.5,0.5,0],[1,0,0.5,0],[0,0.5,0,0]]})");
  const CliResult r =
      run_cli("stability --matrix " + matrix.string() + " --h-diag 20,1,1,1 --mu 0.01");
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(csv_row(lines[1])[1] == doctest::Approx(1.12174587).epsilon(1e-6));

  // --matrix without --h-diag cannot build the dynamics
  CHECK(run_cli("stability --matrix " + matrix.string()).exit_code == 1);
}

TEST_CASE("stability: jury verdict JSON") {
  const CliResult r = run_cli("stability --jury --mu 0.05");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["stable"] == false);
  CHECK(j["failing_condition"] == 8);

  CHECK(run_cli("stability --jury").exit_code == 1);  // needs --mu > 0
  CHECK(run_cli("stability").exit_code == 1);         // needs a source
}

TEST_CASE("config file supplies defaults, flags override") {
  const auto cfg = tmp_dir() / "cfg.json";
  write_file(cfg, R"({"n": 6, "edge_prob": 0.7, "seed": 5, "rule": "averaging"})");

  const CliResult base = run_cli("policy --config " + cfg.string());
  REQUIRE(base.exit_code == 0);
  const json jb = json::parse(base.out);
  CHECK(jb["rule"] == "averaging");
  CHECK(jb["n"] == 6);

  const CliResult over = run_cli("policy --config " + cfg.string() + " --rule metropolis");
  REQUIRE(over.exit_code == 0);
  CHECK(json::parse(over.out)["rule"] == "metropolis");

  CHECK(run_cli("policy --config /nonexistent/cfg.json").exit_code == 1);
}

TEST_CASE("outputs can be routed to files") {
  const auto out = tmp_dir() / "report.json";
  const CliResult r = run_cli("policy --n 5 --edge-prob 0.8 --seed 7 --rule hastings --out " +
                              out.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.empty());  // nothing on stdout when --out is given
  const json j = json::parse(slurp(out));
  CHECK(j["rule"] == "hastings");
  CHECK(j["n"] == 5);
}
