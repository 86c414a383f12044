// exdiff: command-line front end for the exact-diffusion toolkit.
//
// Subcommands: policy, solve, stability, net gen. Every command is
// deterministic given its flags (all randomness goes through explicit seeds).
// Exit codes: 0 success/finding, 1 validation failure, 2 usage error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "exdiff/costs.hpp"
#include "exdiff/io.hpp"
#include "exdiff/network.hpp"
#include "exdiff/policy.hpp"
#include "exdiff/solver.hpp"
#include "exdiff/stability.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

// A domain input that parsed fine as a flag but fails validation (bad file
// contents, inconsistent dimensions, non-positive sizes, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> parse_double_list(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const std::string& tok : split(s, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ValidationError(std::string(what) + ": cannot parse '" + tok + "' as a number");
    }
  }
  if (out.empty()) throw ValidationError(std::string(what) + ": empty list");
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  Eigen::VectorXd out(static_cast<long>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out(static_cast<long>(i)) = v[i];
  return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (long i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw ValidationError("cannot open " + out_path + " for writing");
  f << content;
}

// --config FILE: a flat JSON object whose keys mirror the long option names
// (dashes or underscores both accepted). The file's values are injected as
// tokens *before* the user's own flags, so explicit flags override the file.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> raw(argv + 1, argv + argc);
  std::string config_path;
  std::vector<std::string> rest;
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == "--config") {
      if (i + 1 >= raw.size()) throw ValidationError("--config needs a file argument");
      config_path = raw[++i];
    } else if (raw[i].rfind("--config=", 0) == 0) {
      config_path = raw[i].substr(9);
    } else {
      rest.push_back(raw[i]);
    }
  }
  if (config_path.empty()) return rest;

  std::ifstream f(config_path);
  if (!f) throw ValidationError("cannot open config file " + config_path);
  json cfg;
  try {
    cfg = json::parse(f);
  } catch (const json::exception& e) {
    throw ValidationError("config file " + config_path + ": " + e.what());
  }
  if (!cfg.is_object()) throw ValidationError("config file must hold a JSON object");

  // Subcommand names must stay at the front, ahead of injected option tokens.
  std::vector<std::string> expanded;
  size_t cmd_tokens = 0;
  while (cmd_tokens < rest.size() && !rest[cmd_tokens].empty() && rest[cmd_tokens][0] != '-')
    expanded.push_back(rest[cmd_tokens++]);
  for (const auto& [key, value] : cfg.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    const std::string flag = "--" + name;
    if (value.is_boolean()) {
      expanded.push_back(flag + (value.get<bool>() ? "=true" : "=false"));
    } else if (value.is_string()) {
      expanded.push_back(flag);
      expanded.push_back(value.get<std::string>());
    } else if (value.is_number() || value.is_array()) {
      std::string text = value.dump();
      if (value.is_array()) {  // [1,2,3] -> 1,2,3
        text.erase(std::remove_if(text.begin(), text.end(),
                                  [](char c) { return c == '[' || c == ']' || c == ' '; }),
                   text.end());
      }
      expanded.push_back(flag);
      expanded.push_back(text);
    } else {
      throw ValidationError("config key '" + key + "' has an unsupported value type");
    }
  }
  expanded.insert(expanded.end(), rest.begin() + static_cast<long>(cmd_tokens), rest.end());
  return expanded;
}

// ---------------------------------------------------------------------------
// Shared network / policy source flags.

struct NetworkFlags {
  std::string net_file;
  int n = 0;
  double edge_prob = 0.3;
  std::uint64_t seed = 1;
  int hubs = 0;
  int leaves = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--net", net_file, "Network JSON file ({\"n\": int, \"edges\": [[i,j],...]})");
    cmd->add_option("--n", n, "Random-network generator: number of agents");
    cmd->add_option("--edge-prob", edge_prob, "Random-network generator: edge probability")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--seed", seed, "Random-network generator seed");
    cmd->add_option("--hubs", hubs, "Hub-and-leaf generator: hub count");
    cmd->add_option("--leaves", leaves, "Hub-and-leaf generator: leaf count");
  }

  bool any() const { return !net_file.empty() || n > 0 || hubs > 0 || leaves > 0; }

  exdiff::Network resolve() const {
    if (!net_file.empty()) return exdiff::load_network(net_file);
    if (hubs > 0 || leaves > 0) return exdiff::generate_unbalanced_network(hubs, leaves);
    if (n > 0) return exdiff::generate_random_network(n, edge_prob, seed);
    throw ValidationError("no network given: pass --net, --n, or --hubs/--leaves");
  }
};

struct PolicySourceFlags {
  NetworkFlags net;
  std::string matrix_file;
  std::string rule_name = "averaging";
  std::string q_list;

  void add_to(CLI::App* cmd) {
    net.add_to(cmd);
    cmd->add_option("--matrix", matrix_file,
                    "Custom combination-matrix JSON ({\"A\": [[...]], \"p\": [...]?})");
    cmd->add_option("--rule", rule_name, "Combination rule")
        ->check(CLI::IsMember({"hastings", "averaging", "relative_degree", "metropolis",
                               "max_degree"}));
    cmd->add_option("--q", q_list, "Per-agent influence weights (comma list, default uniform)");
  }

  Eigen::VectorXd q_vector() const {
    if (q_list.empty()) return Eigen::VectorXd();
    return to_vector(parse_double_list(q_list, "--q"));
  }

  // Builds the policy and a step profile at mu_o. Custom matrices get the
  // mu_k = q_k mu_o / p_k profile; rules get their own table entry unless
  // force_perron_profile is set.
  exdiff::PolicyBuild build(double mu_o, bool force_perron_profile) const {
    if (!matrix_file.empty()) {
      exdiff::PolicyBuild pb;
      pb.policy = exdiff::load_custom_policy(matrix_file);
      pb.steps = exdiff::custom_step_profile(pb.policy, mu_o, q_vector());
      return pb;
    }
    const auto rule = exdiff::rule_from_string(rule_name);
    if (!rule) throw ValidationError("unknown rule " + rule_name);
    exdiff::PolicyBuild pb = exdiff::build_policy(net.resolve(), *rule, mu_o, q_vector());
    if (force_perron_profile)
      pb.steps = exdiff::custom_step_profile(pb.policy, mu_o, q_vector());
    return pb;
  }
};

// ---------------------------------------------------------------------------
// policy

struct PolicyArgs {
  PolicySourceFlags src;
  double mu_o = 0.01;
  bool check = false;
  std::string out;
};

int run_policy(const PolicyArgs& a) {
  const exdiff::PolicyBuild pb = a.src.build(a.mu_o, false);
  const exdiff::PolicyValidation val = exdiff::validate_policy(pb.policy);
  const exdiff::LemmaReport lemma = exdiff::verify_lemma_properties(pb.policy);

  json report;
  report["rule"] = exdiff::to_string(pb.policy.rule);
  report["n"] = pb.policy.size();
  report["perron"] = vector_to_json(pb.policy.perron);
  report["steps"] = {{"mu", vector_to_json(pb.steps.mu)},
                     {"tau", vector_to_json(pb.steps.tau)},
                     {"q", vector_to_json(pb.steps.q)},
                     {"mu_o", pb.steps.mu_o},
                     {"beta", pb.steps.beta}};
  report["validation"] = {{"left_stochastic", val.left_stochastic},
                          {"primitive", val.primitive},
                          {"balanced", val.balanced},
                          {"max_column_sum_error", val.max_column_sum_error},
                          {"max_balance_residual", val.max_balance_residual},
                          {"min_entry", val.min_entry},
                          {"ok", val.ok()}};
  json checks = json::array();
  for (const exdiff::LemmaCheck& c : lemma.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value},
                      {"detail", c.detail}});
  report["lemma"] = {{"preconditions_ok", lemma.preconditions_ok},
                     {"precondition_detail", lemma.precondition_detail},
                     {"checks", checks},
                     {"all_pass", lemma.all_pass()}};

  emit(a.out, report.dump(2));
  return (val.ok() && lemma.all_pass()) ? kExitOk : kExitValidation;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  PolicySourceFlags src;
  std::string cost = "ls";
  int dim = 10;
  int samples = 20;
  std::uint64_t data_seed = 1;
  double rho = 0.01;
  std::string data_file;
  std::string algorithms = "exact_diffusion";
  std::string mu_o_list = "0.01";
  std::string profile = "rule";
  int max_iters = 10000;
  double stop_rel_error = 0.0;
  bool record_cost = false;
  std::string out_prefix = "run_";
};

std::string format_mu(double mu) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", mu);
  return buf;
}

int run_solve(const SolveArgs& a) {
  const std::vector<double> mu_os = parse_double_list(a.mu_o_list, "--mu-o");
  std::vector<exdiff::Algorithm> algs;
  for (const std::string& name : split(a.algorithms, ',')) {
    const auto alg = exdiff::algorithm_from_string(name);
    if (!alg) throw ValidationError("unknown algorithm " + name);
    algs.push_back(*alg);
  }
  if (algs.empty()) throw ValidationError("--algorithms: empty list");
  const bool perron_profile = a.profile == "perron";

  // The policy is rebuilt per mu_o (rule profiles depend on it); the model is
  // fixed once. Peek at one build for the agent count.
  const int agents = a.src.build(mu_os.front(), perron_profile).policy.size();

  std::unique_ptr<exdiff::CostModel> model;
  if (!a.data_file.empty()) {
    model = exdiff::load_cost_model(a.data_file);
    if (model->agents() != agents)
      throw ValidationError("dataset has " + std::to_string(model->agents()) +
                            " agents but the network has " + std::to_string(agents));
  } else if (a.cost == "ls") {
    model = std::make_unique<exdiff::LeastSquaresModel>(
        exdiff::generate_least_squares(agents, a.dim, a.samples, a.data_seed));
  } else if (a.cost == "logistic") {
    model = std::make_unique<exdiff::LogisticModel>(
        exdiff::generate_logistic(agents, a.dim, a.samples, a.rho, a.data_seed));
  } else {
    throw ValidationError("unknown cost model " + a.cost);
  }

  json summary = json::array();
  for (const double mu_o : mu_os) {
    const exdiff::PolicyBuild pb = a.src.build(mu_o, perron_profile);
    for (const exdiff::Algorithm alg : algs) {
      exdiff::RunConfig cfg;
      cfg.algorithm = alg;
      cfg.max_iters = a.max_iters;
      if (a.stop_rel_error > 0.0) cfg.stop_rel_error = a.stop_rel_error;
      cfg.record_cost = a.record_cost;
      const exdiff::Trajectory traj = exdiff::run(pb.policy, pb.steps, *model, cfg);
      const std::string path =
          a.out_prefix + exdiff::to_string(alg) + "_mu" + format_mu(mu_o) + ".csv";
      exdiff::write_trajectory_csv(path, traj);
      json row;
      row["algorithm"] = exdiff::to_string(alg);
      row["mu_o"] = mu_o;
      row["file"] = path;
      row["iterations"] = traj.iterations;
      row["final_rel_error"] = traj.rel_error.back();
      row["diverged"] = traj.diverged;
      if (traj.diverged) row["divergence_iter"] = traj.divergence_iter;
      summary.push_back(std::move(row));
    }
  }
  std::cout << summary.dump(2) << "\n";
  return kExitOk;  // divergence is a valid finding
}

// ---------------------------------------------------------------------------
// stability

struct StabilityArgs {
  int example = 0;
  std::string matrix_file;
  std::string h_diag_list;
  double mu_min = 1e-6;
  double mu_max = 3.0;
  int points = 300;
  double mu = -1.0;
  bool jury = false;
  std::string out;
};

int run_stability(const StabilityArgs& a) {
  if (a.jury) {
    // Jury verdict for the built-in 4-agent polynomial at the given mu.
    if (a.mu <= 0.0) throw ValidationError("--jury needs --mu > 0");
    const std::array<double, 8> coeffs = exdiff::example1_characteristic_poly(a.mu);
    const exdiff::JuryVerdict verdict =
        exdiff::jury_stability_test(std::vector<double>(coeffs.begin(), coeffs.end()));
    emit(a.out, json::parse(exdiff::jury_verdict_json(verdict)).dump(2));
    return kExitOk;
  }

  Eigen::MatrixXd A;
  Eigen::VectorXd p, h_diag;
  if (a.example != 0) {
    const exdiff::StabilityExample ex = exdiff::stability_example(a.example);
    A = ex.A;
    p = ex.p;
    h_diag = ex.h_diag;
  } else if (!a.matrix_file.empty()) {
    const exdiff::CombinationPolicy pol = exdiff::load_custom_policy(a.matrix_file);
    A = pol.A;
    p = pol.perron;
    if (a.h_diag_list.empty())
      throw ValidationError("--matrix needs --h-diag (comma list, one entry per agent)");
    h_diag = to_vector(parse_double_list(a.h_diag_list, "--h-diag"));
  } else {
    throw ValidationError("pass --example 1|2, --matrix FILE, or --jury --mu X");
  }

  std::vector<double> grid;
  if (a.mu > 0.0)
    grid.push_back(a.mu);
  else
    grid = exdiff::log_grid(a.mu_min, a.mu_max, a.points);
  const std::vector<exdiff::SweepPoint> sweep = exdiff::sweep_rho(A, p, h_diag, grid);
  emit(a.out, exdiff::sweep_csv(sweep));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// net gen

struct NetGenArgs {
  NetworkFlags net;
  std::string out;
};

int run_net_gen(const NetGenArgs& a) {
  const exdiff::Network net = a.net.resolve();
  if (!a.out.empty()) {
    exdiff::save_network(net, a.out);
    return kExitOk;
  }
  json j;
  j["n"] = net.size();
  json edges = json::array();
  for (const auto& [i, k] : net.edges()) edges.push_back({i, k});
  j["edges"] = edges;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact-diffusion decentralized optimization toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.footer("Every option can also come from --config FILE (flat JSON object whose\n"
             "keys mirror the long option names); explicit flags override the file.");

  PolicyArgs policy_args;
  CLI::App* policy_cmd =
      app.add_subcommand("policy", "Build a combination policy and report its validation");
  policy_args.src.add_to(policy_cmd);
  policy_cmd->add_option("--mu-o", policy_args.mu_o, "Scalar step parameter")
      ->check(CLI::PositiveNumber);
  policy_cmd->add_flag("--check", policy_args.check,
                       "Exit nonzero when validation or the structure checks fail "
                       "(this is also the default behavior)");
  policy_cmd->add_option("--out", policy_args.out, "Write the JSON report here (default stdout)");

  SolveArgs solve_args;
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "Run solver experiments and emit trajectory CSVs");
  solve_args.src.add_to(solve_cmd);
  solve_cmd->add_option("--cost", solve_args.cost, "Cost model family")
      ->check(CLI::IsMember({"ls", "logistic"}));
  solve_cmd->add_option("--dim", solve_args.dim, "Unknowns per agent (generated data)")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--samples", solve_args.samples, "Samples per agent (generated data)")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--data-seed", solve_args.data_seed, "Dataset generator seed");
  solve_cmd->add_option("--rho", solve_args.rho, "Logistic ridge parameter")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--data", solve_args.data_file, "Load the dataset from JSON instead");
  solve_cmd->add_option("--algorithms", solve_args.algorithms,
                        "Comma list: diffusion, penalized_incremental, exact_diffusion, "
                        "exact_diffusion_adaptive, primal_dual");
  solve_cmd->add_option("--mu-o", solve_args.mu_o_list, "Comma list of scalar step parameters");
  solve_cmd->add_option("--profile", solve_args.profile,
                        "Step profile: the rule's own table entry, or mu_k = q_k mu_o / p_k")
      ->check(CLI::IsMember({"rule", "perron"}));
  solve_cmd->add_option("--max-iters", solve_args.max_iters, "Iteration cap")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--stop-rel-error", solve_args.stop_rel_error,
                        "Stop once the relative error reaches this value");
  solve_cmd->add_flag("--record-cost", solve_args.record_cost,
                      "Add a per-iteration aggregate-cost column");
  solve_cmd->add_option("--out-prefix", solve_args.out_prefix,
                        "Trajectory CSV path prefix (default run_)");

  StabilityArgs stability_args;
  CLI::App* stability_cmd =
      app.add_subcommand("stability", "Spectral-radius sweeps and Jury verdicts");
  stability_cmd->add_option("--example", stability_args.example, "Built-in study case")
      ->check(CLI::IsMember({1, 2}));
  stability_cmd->add_option("--matrix", stability_args.matrix_file,
                            "Custom combination-matrix JSON");
  stability_cmd->add_option("--h-diag", stability_args.h_diag_list,
                            "Comma list: diagonal of P^{-1} H (with --matrix)");
  stability_cmd->add_option("--mu-min", stability_args.mu_min, "Sweep lower endpoint")
      ->check(CLI::PositiveNumber);
  stability_cmd->add_option("--mu-max", stability_args.mu_max, "Sweep upper endpoint")
      ->check(CLI::PositiveNumber);
  stability_cmd->add_option("--points", stability_args.points, "Sweep point count")
      ->check(CLI::PositiveNumber);
  stability_cmd->add_option("--mu", stability_args.mu,
                            "Single step-size (one-row sweep, or the Jury polynomial's mu)");
  stability_cmd->add_flag("--jury", stability_args.jury,
                          "Jury verdict for the built-in 4-agent polynomial at --mu");
  stability_cmd->add_option("--out", stability_args.out, "Output file (default stdout)");

  NetGenArgs net_args;
  CLI::App* net_cmd = app.add_subcommand("net", "Network utilities");
  net_cmd->require_subcommand(1);
  CLI::App* net_gen_cmd = net_cmd->add_subcommand("gen", "Generate a network JSON");
  net_args.net.add_to(net_gen_cmd);
  net_gen_cmd->add_option("--out", net_args.out, "Output file (default stdout)");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  try {
    // CLI11 parses token vectors back to front.
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    // --help lands here too; CLI11 maps it to exit code 0.
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (policy_cmd->parsed()) return run_policy(policy_args);
    if (solve_cmd->parsed()) return run_solve(solve_args);
    if (stability_cmd->parsed()) return run_stability(stability_args);
    if (net_cmd->parsed() && net_gen_cmd->parsed()) return run_net_gen(net_args);
    std::cerr << "error: no subcommand\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
