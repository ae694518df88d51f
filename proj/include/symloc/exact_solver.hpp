#pragma once

#include <optional>

#include "symloc/model.hpp"

namespace symloc {

struct Budget {
  std::uint64_t max_nodes = 1'000'000;
  std::optional<double> time_limit_seconds;
};

enum class SolveStatus { Sat, Unsat, Exhausted };

struct ExactResult {
  SolveStatus status = SolveStatus::Unsat;
  std::optional<Assignment> assignment;
  std::optional<long long> objective;  // reported in the model's declared sense
  std::uint64_t nodes_explored = 0;
};

// First satisfying assignment found by chronological backtracking over the
// var-symbol table cells in canonical order, with seed-controlled shuffling of
// the value order per cell. Unsat only after exhausting the space; Exhausted
// when the budget runs out first.
ExactResult initial_model(const Mop& mop, const Budget& budget, std::uint64_t seed);

// Complete search for the optimum. Plain backtracking; constraints are checked
// as soon as every var symbol they mention is fully decided. Deterministic.
ExactResult optimize_exact(const Mop& mop, const Budget& budget = {});

}  // namespace symloc
