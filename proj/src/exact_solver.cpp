#include "symloc/exact_solver.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>

#include "symloc/evaluator.hpp"

namespace symloc {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Searcher {
  const Mop& mop;
  const Budget& budget;
  bool optimizing;

  std::vector<TableCell> cells;
  std::vector<std::vector<int>> orders;                 // value order per cell
  std::vector<std::vector<const FormulaPtr*>> checks;   // formulas checkable per depth
  Assignment current;
  std::uint64_t nodes = 0;
  bool aborted = false;
  std::optional<std::chrono::steady_clock::time_point> deadline;

  std::optional<Assignment> found;   // initial-model mode
  std::optional<Assignment> best;    // optimize mode
  long long best_obj = 0;            // internal sense

  Searcher(const Mop& m, const Budget& b, bool opt, std::optional<std::uint64_t> seed)
      : mop(m), budget(b), optimizing(opt), cells(table_cells(m)),
        current(first_assignment(m)) {
    orders.resize(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      orders[i].resize(cells[i].num_values);
      std::iota(orders[i].begin(), orders[i].end(), 0);
      if (seed) {
        std::mt19937_64 rng(mix(*seed, i));
        std::shuffle(orders[i].begin(), orders[i].end(), rng);
      }
    }
    // A formula becomes checkable once the last cell of the last var symbol it
    // mentions has been set. Cells of one symbol are contiguous.
    std::vector<long long> last_cell_of_symbol(mop.vocabulary.symbols.size(), -1);
    for (std::size_t i = 0; i < cells.size(); ++i)
      last_cell_of_symbol[cells[i].symbol] = static_cast<long long>(i);
    checks.resize(cells.size());
    for (const auto& f : mop.theory) {
      std::set<std::string> names;
      symbols_in(f, names);
      long long trigger = -1;
      for (const auto& name : names) {
        auto s = mop.symbol_id(name);
        if (s && mop.is_var(*s)) trigger = std::max(trigger, last_cell_of_symbol[*s]);
      }
      if (trigger >= 0) checks[trigger].push_back(&f);
    }
    if (budget.time_limit_seconds)
      deadline = std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(*budget.time_limit_seconds));
  }

  bool out_of_budget() {
    if (nodes > budget.max_nodes) return true;
    if (deadline && (nodes & 1023) == 0 &&
        std::chrono::steady_clock::now() > *deadline)
      return true;
    return false;
  }

  // Constraints with no var symbols at all hold or fail regardless of the
  // search; one upfront evaluation settles them.
  bool ground_constraints_hold() {
    Env env;
    for (const auto& f : mop.theory) {
      std::set<std::string> names;
      symbols_in(f, names);
      bool has_var = false;
      for (const auto& name : names) {
        auto s = mop.symbol_id(name);
        if (s && mop.is_var(*s)) has_var = true;
      }
      if (!has_var && !eval_formula(f, mop, current, env)) return false;
    }
    return true;
  }

  // Returns true when the whole search should stop.
  bool dfs(std::size_t depth) {
    if (depth == cells.size()) {
      if (!optimizing) {
        found = current;
        return true;
      }
      long long obj = objective_internal(mop, current);
      if (!best || obj < best_obj) {
        best = current;
        best_obj = obj;
      }
      return false;
    }
    for (int digit : orders[depth]) {
      ++nodes;
      if (out_of_budget()) {
        aborted = true;
        return true;
      }
      set_cell(mop, current, cells[depth], digit);
      bool feasible = true;
      Env env;
      for (const FormulaPtr* f : checks[depth]) {
        if (!eval_formula(*f, mop, current, env)) {
          feasible = false;
          break;
        }
      }
      if (feasible && dfs(depth + 1)) return true;
    }
    return false;
  }
};

}  // namespace

ExactResult initial_model(const Mop& mop, const Budget& budget, std::uint64_t seed) {
  Searcher search(mop, budget, false, seed);
  ExactResult result;
  if (!search.ground_constraints_hold()) {
    result.status = SolveStatus::Unsat;
    return result;
  }
  search.dfs(0);
  result.nodes_explored = search.nodes;
  if (search.found) {
    result.status = SolveStatus::Sat;
    result.assignment = std::move(search.found);
    result.objective = objective_value(mop, *result.assignment);
  } else {
    result.status = search.aborted ? SolveStatus::Exhausted : SolveStatus::Unsat;
  }
  return result;
}

ExactResult optimize_exact(const Mop& mop, const Budget& budget) {
  Searcher search(mop, budget, true, std::nullopt);
  ExactResult result;
  if (!search.ground_constraints_hold()) {
    result.status = SolveStatus::Unsat;
    return result;
  }
  search.dfs(0);
  result.nodes_explored = search.nodes;
  if (search.aborted) {
    result.status = SolveStatus::Exhausted;
    if (search.best) {
      result.assignment = std::move(search.best);
      result.objective = objective_value(mop, *result.assignment);
    }
  } else if (search.best) {
    result.status = SolveStatus::Sat;
    result.assignment = std::move(search.best);
    result.objective = objective_value(mop, *result.assignment);
  } else {
    result.status = SolveStatus::Unsat;
  }
  return result;
}

}  // namespace symloc
