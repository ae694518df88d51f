#include "symloc/local_search.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace symloc {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double rand01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

long long to_user_sense(const Mop& mop, long long internal) {
  return mop.sense == Sense::Maximize ? -internal : internal;
}

struct SingleRun {
  Assignment best;
  long long best_internal = 0;
  std::uint64_t iterations = 0;
  std::uint64_t moves = 0;
  std::vector<std::pair<std::uint64_t, long long>> trajectory;  // user sense
  Termination termination = Termination::IterLimit;
};

SingleRun run_once(const Mop& mop, const Neighborhood& n, const Assignment& init,
                   const SearchConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(mix(seed, 0x5eedf00d));
  std::optional<std::chrono::steady_clock::time_point> deadline;
  if (cfg.time_limit_seconds)
    deadline = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(*cfg.time_limit_seconds));

  SingleRun run;
  Assignment current = init;
  long long cur_obj = objective_internal(mop, current);
  run.best = current;
  run.best_internal = cur_obj;
  run.trajectory.emplace_back(0, to_user_sense(mop, cur_obj));

  std::uint32_t sideways_used = 0;
  double temperature = cfg.anneal_initial_temp;
  std::vector<std::size_t> order(n.generators.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::uint64_t iter = 1; iter <= cfg.max_iters; ++iter) {
    run.iterations = iter;
    if (deadline && std::chrono::steady_clock::now() > *deadline) {
      run.termination = Termination::TimeLimit;
      return run;
    }

    std::optional<Assignment> accepted;
    long long accepted_obj = 0;
    bool is_sideways = false;

    switch (cfg.strategy) {
      case Strategy::BestImprovement: {
        // Scan every generator in canonical order; ties keep the first.
        std::optional<Assignment> best_neighbor;
        long long best_obj = 0;
        for (const DesSymmetry& g : n.generators) {
          Assignment image = apply_symmetry(mop, g, current);
          long long obj = objective_internal(mop, image);
          if (!best_neighbor || obj < best_obj) {
            best_neighbor = std::move(image);
            best_obj = obj;
          }
        }
        if (best_neighbor && best_obj < cur_obj) {
          accepted = std::move(best_neighbor);
          accepted_obj = best_obj;
        } else if (best_neighbor && best_obj == cur_obj &&
                   sideways_used < cfg.sideways_limit) {
          accepted = std::move(best_neighbor);
          accepted_obj = best_obj;
          is_sideways = true;
        }
        break;
      }
      case Strategy::FirstImprovement: {
        std::shuffle(order.begin(), order.end(), rng);
        std::optional<std::size_t> equal_idx;
        for (std::size_t idx : order) {
          Assignment image = apply_symmetry(mop, n.generators[idx], current);
          long long obj = objective_internal(mop, image);
          if (obj < cur_obj) {
            accepted = std::move(image);
            accepted_obj = obj;
            break;
          }
          if (obj == cur_obj && !equal_idx) equal_idx = idx;
        }
        if (!accepted && equal_idx && sideways_used < cfg.sideways_limit) {
          accepted = apply_symmetry(mop, n.generators[*equal_idx], current);
          accepted_obj = cur_obj;
          is_sideways = true;
        }
        break;
      }
      case Strategy::Annealing: {
        std::size_t idx = static_cast<std::size_t>(rng() % n.generators.size());
        Assignment image = apply_symmetry(mop, n.generators[idx], current);
        long long obj = objective_internal(mop, image);
        long long delta = obj - cur_obj;
        bool take = delta <= 0;
        if (!take && temperature > 0)
          take = rand01(rng) < std::exp(-static_cast<double>(delta) / temperature);
        temperature *= cfg.anneal_cooling;
        if (take) {
          accepted = std::move(image);
          accepted_obj = obj;
          is_sideways = delta == 0;
        }
        break;
      }
    }

    if (!accepted) {
      if (cfg.strategy == Strategy::Annealing) continue;  // iteration spent, no move
      run.termination = Termination::LocalOptimum;
      return run;
    }

    assert(check_model(mop, *accepted));  // neighborhood closure
    current = std::move(*accepted);
    cur_obj = accepted_obj;
    ++run.moves;
    sideways_used = is_sideways ? sideways_used + 1 : 0;
    run.trajectory.emplace_back(iter, to_user_sense(mop, cur_obj));
    if (cur_obj < run.best_internal) {
      run.best = current;
      run.best_internal = cur_obj;
    }
  }
  run.termination = Termination::IterLimit;
  return run;
}

}  // namespace

SearchResult local_search(const Mop& mop, const Neighborhood& n, const Assignment& init,
                          const SearchConfig& cfg) {
  if (n.empty()) throw std::invalid_argument("local search needs a non-empty neighborhood");
  if (cfg.max_iters == 0) throw std::invalid_argument("max_iters must be at least 1");
  if (cfg.strategy == Strategy::Annealing &&
      (cfg.anneal_cooling <= 0.0 || cfg.anneal_cooling >= 1.0))
    throw std::invalid_argument("annealing cooling factor must lie in (0,1)");

  std::optional<SingleRun> winner;
  std::uint64_t iterations = 0, moves = 0;
  for (std::uint32_t r = 0; r <= cfg.restarts; ++r) {
    SingleRun run = run_once(mop, n, init, cfg, mix(cfg.seed, r));
    iterations += run.iterations;
    moves += run.moves;
    if (!winner || run.best_internal < winner->best_internal) winner = std::move(run);
  }

  SearchResult result;
  result.best = std::move(winner->best);
  result.best_objective = to_user_sense(mop, winner->best_internal);
  result.iterations = iterations;
  result.moves_executed = moves;
  result.trajectory = std::move(winner->trajectory);
  result.termination = winner->termination;
  return result;
}

PipelineResult run_pipeline(const Mop& mop, const SearchConfig& cfg,
                            const DetectOptions& options, const Budget& init_budget) {
  PipelineResult result;
  result.initial = initial_model(mop, init_budget, cfg.seed);
  if (result.initial.status == SolveStatus::Unsat) {
    result.status = PipelineResult::Status::Unsat;
    return result;
  }
  if (result.initial.status == SolveStatus::Exhausted) {
    result.status = PipelineResult::Status::BudgetExhausted;
    return result;
  }

  result.detection = detect(mop, options);
  Neighborhood n = build_neighborhood(*result.detection);
  if (n.empty()) {
    result.status = PipelineResult::Status::NoNeighborhood;
    result.best = result.initial.assignment;
    result.best_objective = result.initial.objective;
    return result;
  }

  result.search = local_search(mop, n, *result.initial.assignment, cfg);
  result.status = PipelineResult::Status::Sat;
  result.best = result.search->best;
  result.best_objective = result.search->best_objective;
  return result;
}

}  // namespace symloc
