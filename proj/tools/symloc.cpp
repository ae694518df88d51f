#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <unistd.h>

#include "CLI11.hpp"
#include "symloc/instances.hpp"
#include "symloc/parser.hpp"
#include "symloc/report_json.hpp"

namespace {

using namespace symloc;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitUnsat = 2;
constexpr int kExitBudget = 3;
constexpr int kExitUnsound = 4;

bool use_color() {
  const char* env = std::getenv("SYMLOC_COLOR");
  if (env && std::string(env) == "0") return false;
  return isatty(fileno(stdout));
}

std::string paint(const std::string& text, const char* code) {
  if (!use_color()) return text;
  return std::string("\033[") + code + "m" + text + "\033[0m";
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct LoadedModel {
  Mop mop;
  std::string digest;
  std::string path;
};

std::optional<LoadedModel> load_model(const std::string& path) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "error: cannot read '" << path << "'\n";
    return std::nullopt;
  }
  ParseResult parsed = parse_model(*text, path);
  if (!parsed.ok()) {
    for (const auto& d : parsed.diagnostics) std::cerr << format_diagnostic(d) << "\n";
    return std::nullopt;
  }
  return LoadedModel{std::move(*parsed.mop), content_digest(*text), path};
}

nlohmann::ordered_json report_header(const std::string& command, const LoadedModel& model) {
  nlohmann::ordered_json out;
  out["schema"] = "symloc/1";
  out["command"] = command;
  out["model"] = nlohmann::ordered_json{{"path", model.path}, {"digest", model.digest}};
  return out;
}

bool fault_injection_enabled() {
  const char* env = std::getenv("SYMLOC_FAULT_INJECTION");
  return env && *env;
}

struct PolicyFlags {
  std::string policy = "auto";
  std::uint32_t samples = 256;
  std::uint64_t seed = 0;
};

std::optional<ClassifyPolicy> resolve_policy(const Mop& mop, const PolicyFlags& flags) {
  if (flags.policy == "auto") return auto_policy(mop, flags.samples, flags.seed);
  ClassifyPolicy policy;
  policy.samples = flags.samples;
  policy.seed = flags.seed;
  if (flags.policy == "syntactic") {
    policy.kind = ClassifyPolicy::Kind::Syntactic;
  } else if (flags.policy == "exhaustive") {
    policy.kind = ClassifyPolicy::Kind::Exhaustive;
    if (assignment_space_size(mop, policy.space_bound).overflow) {
      std::cerr << "error: assignment space too large for exhaustive classification"
                << " (bound " << policy.space_bound << ")\n";
      return std::nullopt;
    }
  } else if (flags.policy == "sample") {
    policy.kind = ClassifyPolicy::Kind::Sample;
  } else {
    std::cerr << "error: unknown policy '" << flags.policy << "'\n";
    return std::nullopt;
  }
  return policy;
}

std::string pair_text(const Mop& mop, TypeId type, ElemId a, ElemId b) {
  return mop.type(type).name + " swap (" + mop.structure.elements.display(a) + "," +
         mop.structure.elements.display(b) + ")";
}

// --- parse ------------------------------------------------------------------

int cmd_parse(const std::string& file) {
  auto model = load_model(file);
  if (!model) return kExitInputError;
  const Mop& mop = model->mop;
  SpaceSize space = assignment_space_size(mop);
  std::cout << mop.name << ": " << mop.vocabulary.types.size() << " types, "
            << mop.vocabulary.symbols.size() << " symbols ("
            << mop.var_symbols().size() << " var), " << mop.theory.size()
            << " constraints, "
            << (mop.sense == Sense::Minimize ? "minimize" : "maximize")
            << "; assignment space ";
  if (space.overflow)
    std::cout << "> " << kDefaultSpaceBound;
  else
    std::cout << space.count;
  std::cout << "\n";
  return kExitOk;
}

// --- detect -----------------------------------------------------------------

void print_detection_human(const Mop& mop, const DetectionReport& report) {
  std::cout << "policy " << policy_kind_name(report.policy.kind) << " (seed "
            << report.policy.seed << "), candidates checked: "
            << report.candidates_checked << "\n";
  std::cout << "surviving symmetries: " << report.symmetries.size() << "\n";
  for (const auto& s : report.symmetries) {
    std::cout << "  " << pair_text(mop, s.type, s.a, s.b) << "  sigma={";
    for (std::size_t i = 0; i < s.sigma.size(); ++i)
      std::cout << (i ? "," : "") << mop.symbol(s.sigma[i]).name;
    std::cout << "}  ";
    switch (s.classification.kind) {
      case Classification::Kind::Variant: std::cout << paint("variant", "33"); break;
      case Classification::Kind::Unclassified: std::cout << "unclassified"; break;
      default: std::cout << "invariant"; break;
    }
    std::cout << "\n";
  }
  std::cout << "rejected: " << report.rejected.size() << "\n";
  for (const auto& r : report.rejected)
    std::cout << "  " << pair_text(mop, r.type, r.a, r.b) << ": " << r.reason.text()
              << "\n";
}

int cmd_detect(const std::string& file, const PolicyFlags& flags, bool json,
               bool timings) {
  auto model = load_model(file);
  if (!model) return kExitInputError;
  auto policy = resolve_policy(model->mop, flags);
  if (!policy) return kExitInputError;

  DetectOptions options;
  options.policy = *policy;
  options.skip_structural_checks = fault_injection_enabled();
  DetectionReport report = detect(model->mop, options);

  if (json) {
    nlohmann::ordered_json out = report_header("detect", *model);
    out["detection"] = detection_to_json(model->mop, report, timings);
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "model " << model->mop.name << " (" << model->digest << ")\n";
    print_detection_human(model->mop, report);
    if (timings)
      std::cout << "elapsed: " << report.elapsed.count() << " s\n";
  }
  return kExitOk;
}

// --- solve ------------------------------------------------------------------

struct SolveFlags {
  std::string method = "local";
  std::string strategy = "best";
  std::uint64_t max_iters = 1000;
  std::uint32_t restarts = 0;
  std::uint32_t sideways = 0;
  std::uint64_t seed = 0;
  std::optional<double> time_limit;
  std::uint64_t max_nodes = 1'000'000;
  PolicyFlags policy;
};

int cmd_solve(const std::string& file, const SolveFlags& flags, bool json, bool timings) {
  auto model = load_model(file);
  if (!model) return kExitInputError;
  const Mop& mop = model->mop;

  Budget budget;
  budget.max_nodes = flags.max_nodes;
  budget.time_limit_seconds = flags.time_limit;

  if (flags.method == "exact") {
    ExactResult result = optimize_exact(mop, budget);
    if (json) {
      nlohmann::ordered_json out = report_header("solve", *model);
      out["method"] = "exact";
      out["exact"] = exact_to_json(mop, result);
      std::cout << out.dump(2) << "\n";
    } else {
      std::cout << "exact: " << status_name(result.status);
      if (result.objective) std::cout << ", objective " << *result.objective;
      std::cout << " (" << result.nodes_explored << " nodes)\n";
    }
    switch (result.status) {
      case SolveStatus::Sat: return kExitOk;
      case SolveStatus::Unsat: return kExitUnsat;
      case SolveStatus::Exhausted: return kExitBudget;
    }
    return kExitOk;
  }
  if (flags.method != "local") {
    std::cerr << "error: unknown method '" << flags.method << "'\n";
    return kExitInputError;
  }

  SearchConfig cfg;
  if (flags.strategy == "best") {
    cfg.strategy = Strategy::BestImprovement;
  } else if (flags.strategy == "first") {
    cfg.strategy = Strategy::FirstImprovement;
  } else if (flags.strategy == "annealing") {
    cfg.strategy = Strategy::Annealing;
  } else {
    std::cerr << "error: unknown strategy '" << flags.strategy << "'\n";
    return kExitInputError;
  }
  if (flags.max_iters == 0) {
    std::cerr << "error: --max-iters must be at least 1\n";
    return kExitInputError;
  }
  cfg.max_iters = flags.max_iters;
  cfg.restarts = flags.restarts;
  cfg.sideways_limit = flags.sideways;
  cfg.seed = flags.seed;
  cfg.time_limit_seconds = flags.time_limit;

  auto policy = resolve_policy(mop, flags.policy);
  if (!policy) return kExitInputError;
  DetectOptions options;
  options.policy = *policy;
  options.skip_structural_checks = fault_injection_enabled();

  PipelineResult result = run_pipeline(mop, cfg, options, budget);

  if (json) {
    nlohmann::ordered_json out = report_header("solve", *model);
    out["method"] = "local";
    out["pipeline"] = pipeline_to_json(mop, result, timings);
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "pipeline: " << pipeline_status_name(result.status) << "\n";
    if (result.detection)
      std::cout << "  symmetries surviving: " << result.detection->symmetries.size()
                << " of " << result.detection->candidates_checked << " candidates\n";
    if (result.initial.objective)
      std::cout << "  initial objective: " << *result.initial.objective << "\n";
    if (result.search) {
      std::cout << "  best objective: " << result.search->best_objective << " after "
                << result.search->moves_executed << " moves ("
                << termination_name(result.search->termination) << ")\n";
      std::cout << "  trajectory:";
      for (const auto& [iter, obj] : result.search->trajectory)
        std::cout << " " << iter << ":" << obj;
      std::cout << "\n";
    } else if (result.best_objective) {
      std::cout << "  best objective: " << *result.best_objective << "\n";
    }
  }
  switch (result.status) {
    case PipelineResult::Status::Sat:
    case PipelineResult::Status::NoNeighborhood: return kExitOk;
    case PipelineResult::Status::Unsat: return kExitUnsat;
    case PipelineResult::Status::BudgetExhausted: return kExitBudget;
  }
  return kExitOk;
}

// --- verify -----------------------------------------------------------------

int cmd_verify(const std::string& file, std::uint64_t budget, std::uint32_t samples,
               std::uint64_t seed, bool json) {
  auto model = load_model(file);
  if (!model) return kExitInputError;
  const Mop& mop = model->mop;

  auto policy = auto_policy(mop, samples, seed);
  DetectOptions options;
  options.policy = policy;
  options.skip_structural_checks = fault_injection_enabled();
  DetectionReport report = detect(mop, options);

  VerifyBudget verify_budget{budget, samples, seed};
  bool all_pass = true;
  std::vector<std::pair<const DesSymmetry*, VerificationReport>> verifications;
  for (const auto& s : report.symmetries) {
    verifications.emplace_back(&s, verify_symmetry(mop, s, verify_budget));
    all_pass = all_pass && verifications.back().second.pass;
  }

  // Oracle comparison on spaces small enough for the exact optimum.
  std::optional<long long> exact_objective, pipeline_objective, gap;
  std::string pipeline_status;
  if (!assignment_space_size(mop, budget).overflow) {
    ExactResult exact = optimize_exact(mop, Budget{});
    if (exact.status == SolveStatus::Sat) {
      exact_objective = exact.objective;
      SearchConfig cfg;
      cfg.seed = seed;
      PipelineResult pipeline = run_pipeline(mop, cfg, options, Budget{});
      pipeline_status = pipeline_status_name(pipeline.status);
      if (pipeline.best_objective) {
        pipeline_objective = pipeline.best_objective;
        long long internal_exact =
            mop.sense == Sense::Maximize ? -*exact.objective : *exact.objective;
        long long internal_best =
            mop.sense == Sense::Maximize ? -*pipeline.best_objective
                                         : *pipeline.best_objective;
        gap = internal_best - internal_exact;
      }
    } else {
      pipeline_status = status_name(exact.status);
    }
  }

  if (json) {
    nlohmann::ordered_json out = report_header("verify", *model);
    auto rows = nlohmann::ordered_json::array();
    for (const auto& [sym, vr] : verifications)
      rows.push_back(verification_to_json(mop, *sym, vr));
    out["verifications"] = std::move(rows);
    out["all_pass"] = all_pass;
    if (exact_objective) {
      nlohmann::ordered_json oracle;
      oracle["exact_objective"] = *exact_objective;
      if (pipeline_objective) oracle["pipeline_objective"] = *pipeline_objective;
      if (gap) oracle["gap"] = *gap;
      oracle["pipeline_status"] = pipeline_status;
      out["oracle"] = std::move(oracle);
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "model " << mop.name << ": " << report.symmetries.size()
              << " detected symmetries\n";
    for (const auto& [sym, vr] : verifications) {
      std::cout << "  " << pair_text(mop, sym->type, sym->a, sym->b) << " ["
                << (vr.exhaustive ? "exhaustive" : "sampled") << ", " << vr.checked
                << " checked] "
                << (vr.pass ? paint("pass", "32") : paint("FAIL", "31")) << "\n";
    }
    if (exact_objective) {
      std::cout << "oracle: exact objective " << *exact_objective;
      if (pipeline_objective)
        std::cout << ", pipeline " << *pipeline_objective << ", gap " << *gap;
      std::cout << " (" << pipeline_status << ")\n";
    }
    std::cout << (all_pass ? "all symmetries verified"
                           : "SOUNDNESS VIOLATION: a detected symmetry failed "
                             "semantic verification")
              << "\n";
  }
  return all_pass ? kExitOk : kExitUnsound;
}

// --- gen --------------------------------------------------------------------

int cmd_gen(const std::string& problem, const InstanceSpec& base,
            const std::string& output, bool with_expectation) {
  InstanceSpec spec = base;
  auto p = problem_from_name(problem);
  if (!p) {
    std::cerr << "error: unknown problem '" << problem
              << "' (tsp, tsp-alt, shortest-path, max-clique, cnp, knapsack, "
                 "assignment)\n";
    return kExitInputError;
  }
  spec.problem = *p;
  std::string text;
  try {
    text = generate(spec);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << output << "'\n";
      return kExitInputError;
    }
    out << text;
    if (with_expectation) {
      std::ofstream side(output + ".expect.json", std::ios::binary);
      side << expected_detection(spec).to_json().dump(2) << "\n";
    }
    std::cout << "wrote " << output << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symloc: compiles constraint optimization models into local-search "
               "neighborhoods via domain-element-swap symmetries"};
  app.require_subcommand(1);

  std::string file, output, problem;
  bool json = false, timings = false;
  PolicyFlags policy_flags;
  SolveFlags solve_flags;
  std::uint64_t verify_budget = 100'000;
  InstanceSpec gen_spec;
  bool with_expectation = false;

  auto* parse_cmd = app.add_subcommand("parse", "parse and validate a model file");
  parse_cmd->add_option("file", file, "model file")->required();

  auto* detect_cmd =
      app.add_subcommand("detect", "detect neighborhood-inducing swap symmetries");
  detect_cmd->add_option("file", file, "model file")->required();
  detect_cmd->add_option("--policy", policy_flags.policy,
                         "auto|syntactic|exhaustive|sample (default auto: exhaustive "
                         "when the assignment space fits 1e6, else sample)");
  detect_cmd->add_option("--samples", policy_flags.samples, "samples for the sample policy");
  detect_cmd->add_option("--seed", policy_flags.seed, "RNG seed");
  detect_cmd->add_flag("--json", json, "JSON report on stdout");
  detect_cmd->add_flag("--timings", timings, "include wall-clock timings");

  auto* solve_cmd = app.add_subcommand("solve", "solve via local search or exactly");
  solve_cmd->add_option("file", file, "model file")->required();
  solve_cmd->add_option("--method", solve_flags.method, "local|exact (default local)");
  solve_cmd->add_option("--strategy", solve_flags.strategy,
                        "best|first|annealing (default best)");
  solve_cmd->add_option("--max-iters", solve_flags.max_iters, "iteration budget");
  solve_cmd->add_option("--restarts", solve_flags.restarts, "extra seeded restarts");
  solve_cmd->add_option("--sideways", solve_flags.sideways,
                        "consecutive equal-objective moves allowed");
  solve_cmd->add_option("--seed", solve_flags.seed, "RNG seed");
  solve_cmd->add_option("--time-limit", solve_flags.time_limit, "seconds");
  solve_cmd->add_option("--max-nodes", solve_flags.max_nodes,
                        "node budget for the exact solver");
  solve_cmd->add_option("--policy", solve_flags.policy.policy, "detection policy");
  solve_cmd->add_option("--samples", solve_flags.policy.samples, "detection samples");
  solve_cmd->add_flag("--json", json, "JSON report on stdout");
  solve_cmd->add_flag("--timings", timings, "include wall-clock timings");

  auto* verify_cmd = app.add_subcommand(
      "verify", "semantically verify detected symmetries and compare with the exact optimum");
  verify_cmd->add_option("file", file, "model file")->required();
  verify_cmd->add_option("--budget", verify_budget,
                         "assignment-space bound for exhaustive verification");
  verify_cmd->add_option("--samples", policy_flags.samples, "samples when sampling");
  verify_cmd->add_option("--seed", policy_flags.seed, "RNG seed");
  verify_cmd->add_flag("--json", json, "JSON report on stdout");

  auto* gen_cmd = app.add_subcommand("gen", "generate a bundled problem instance");
  gen_cmd->add_option("problem", problem,
                      "tsp|tsp-alt|shortest-path|max-clique|cnp|knapsack|assignment")
      ->required();
  gen_cmd->add_option("--n,--nodes,--objects,--agents", gen_spec.n,
                      "instance size (cities/nodes/objects/agents)");
  gen_cmd->add_option("--colors", gen_spec.colors, "colors (cnp)");
  gen_cmd->add_option("--equal-volume-pairs", gen_spec.equal_volume_pairs,
                      "knapsack pairs with equal volume, different value");
  gen_cmd->add_option("--twin-pairs", gen_spec.twin_pairs,
                      "knapsack pairs with equal volume and value");
  gen_cmd->add_option("--density", gen_spec.edge_density, "edge density (graphs)");
  gen_cmd->add_flag("--symmetric", gen_spec.symmetric_graph,
                    "max-clique: plant an interchangeable node pair");
  gen_cmd->add_option("--seed", gen_spec.seed, "RNG seed");
  gen_cmd->add_option("-o,--output", output, "output file (default stdout)");
  gen_cmd->add_flag("--expectation", with_expectation,
                    "also write a <file>.expect.json detection expectation");

  CLI11_PARSE(app, argc, argv);

  solve_flags.policy.seed = solve_flags.seed;

  try {
    if (parse_cmd->parsed()) return cmd_parse(file);
    if (detect_cmd->parsed()) return cmd_detect(file, policy_flags, json, timings);
    if (solve_cmd->parsed()) return cmd_solve(file, solve_flags, json, timings);
    if (verify_cmd->parsed())
      return cmd_verify(file, verify_budget, policy_flags.samples, policy_flags.seed,
                        json);
    if (gen_cmd->parsed()) return cmd_gen(problem, gen_spec, output, with_expectation);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
