#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "symloc/exact_solver.hpp"
#include "symloc/neighborhood.hpp"

namespace symloc {

enum class Strategy { FirstImprovement, BestImprovement, Annealing };

struct SearchConfig {
  Strategy strategy = Strategy::BestImprovement;
  std::uint64_t max_iters = 1000;
  std::uint32_t restarts = 0;        // extra runs merged by best objective
  std::uint32_t sideways_limit = 0;  // consecutive equal-objective moves allowed
  std::uint64_t seed = 0;
  std::optional<double> time_limit_seconds;
  double anneal_initial_temp = 10.0;
  double anneal_cooling = 0.95;  // geometric factor in (0,1)
};

enum class Termination { LocalOptimum, IterLimit, TimeLimit };

struct SearchResult {
  Assignment best;
  long long best_objective = 0;  // in the declared sense
  std::uint64_t iterations = 0;
  std::uint64_t moves_executed = 0;
  std::vector<std::pair<std::uint64_t, long long>> trajectory;  // (iteration, objective)
  Termination termination = Termination::LocalOptimum;
};

// Neighborhood-based local search from a satisfying assignment. The incumbent
// is the lowest-objective assignment ever visited. Deterministic per seed.
// Throws std::invalid_argument for empty neighborhoods or max_iters == 0.
SearchResult local_search(const Mop& mop, const Neighborhood& n, const Assignment& init,
                          const SearchConfig& cfg);

struct PipelineResult {
  enum class Status { Sat, NoNeighborhood, Unsat, BudgetExhausted };
  Status status = Status::Unsat;
  ExactResult initial;
  std::optional<DetectionReport> detection;
  std::optional<SearchResult> search;
  std::optional<Assignment> best;
  std::optional<long long> best_objective;  // in the declared sense
};

// The full compilation pipeline: initial model from the exact solver, swap
// detection, neighborhood construction, then local search. When no symmetry
// survives, the initial model is returned with status NoNeighborhood.
PipelineResult run_pipeline(const Mop& mop, const SearchConfig& cfg,
                            const DetectOptions& options, const Budget& init_budget = {});

}  // namespace symloc
