#include "doctest.h"
#include "symloc/evaluator.hpp"
#include "symloc/exact_solver.hpp"
#include "symloc/parser.hpp"
#include "test_util.hpp"

using namespace symloc;
using symloc::test::mop_from_file;
using symloc::test::mop_from_text;

namespace {

// Independent optimum oracle: scan the whole space.
std::optional<long long> naive_optimum(const Mop& mop, std::uint64_t bound = 100000) {
  AssignmentEnumerator en(mop, bound);
  Assignment a;
  std::optional<long long> best;
  while (en.next(a)) {
    if (!check_model(mop, a)) continue;
    long long obj = objective_internal(mop, a);
    if (!best || obj < *best) best = obj;
  }
  return best;
}

long long user_sense(const Mop& mop, long long internal) {
  return mop.sense == Sense::Maximize ? -internal : internal;
}

}  // namespace

TEST_CASE("initial model on tsp4 is a bijection") {
  Mop mop = mop_from_file("tsp4.mop");
  ExactResult result = initial_model(mop, Budget{}, 1);
  REQUIRE(result.status == SolveStatus::Sat);
  REQUIRE(result.assignment.has_value());
  CHECK(check_model(mop, *result.assignment));
  CHECK(*result.objective == objective_value(mop, *result.assignment));
}

TEST_CASE("different seeds reach models, same seed reaches the same one") {
  Mop mop = mop_from_file("tsp4.mop");
  ExactResult a = initial_model(mop, Budget{}, 7);
  ExactResult b = initial_model(mop, Budget{}, 7);
  REQUIRE(a.status == SolveStatus::Sat);
  CHECK(*a.assignment == *b.assignment);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ExactResult r = initial_model(mop, Budget{}, seed);
    REQUIRE(r.status == SolveStatus::Sat);
    CHECK(check_model(mop, *r.assignment));
  }
}

TEST_CASE("the triangle is not 2-colorable") {
  std::string text = R"(
    mop cnp_k3_2 {
      type Node = { n1, n2, n3 };
      type Color = { col1, col2 };
      pred Edge(Node, Node);
      var func Coloring(Node) -> Color;
      constraint forall x in Node: forall y in Node: Edge(x, y) => Coloring(x) != Coloring(y);
      minimize count { z in Color | exists x in Node: Coloring(x) = z };
      Edge = { (n1,n2), (n1,n3), (n2,n3) };
    }
  )";
  Mop mop = mop_from_text(text);
  CHECK(initial_model(mop, Budget{}, 0).status == SolveStatus::Unsat);
  CHECK(optimize_exact(mop).status == SolveStatus::Unsat);
}

TEST_CASE("a one-node budget exhausts on tsp4") {
  Mop mop = mop_from_file("tsp4.mop");
  Budget tiny;
  tiny.max_nodes = 1;
  CHECK(initial_model(mop, tiny, 0).status == SolveStatus::Exhausted);
}

TEST_CASE("knapsack3 optimum is 16 via o2 and o3") {
  Mop mop = mop_from_file("knapsack3.mop");

  // Brute-force oracle over the 8 subsets, straight from the instance data.
  long long volume[3] = {3, 3, 4}, value[3] = {5, 7, 9};
  long long best = 0;
  int best_mask = 0;
  for (int mask = 0; mask < 8; ++mask) {
    long long v = 0, w = 0;
    for (int i = 0; i < 3; ++i)
      if (mask & (1 << i)) {
        v += value[i];
        w += volume[i];
      }
    if (w <= 7 && v > best) {
      best = v;
      best_mask = mask;
    }
  }
  CHECK(best == 16);
  CHECK(best_mask == 0b110);  // o2 and o3

  ExactResult result = optimize_exact(mop);
  REQUIRE(result.status == SolveStatus::Sat);
  CHECK(*result.objective == 16);
  CHECK(result.assignment->tables[0].entries == std::vector<long long>{0, 1, 1});
}

TEST_CASE("assignment2 optimum is 2") {
  Mop mop = mop_from_file("assignment2.mop");

  // Two bijections: identity costs 1+1, the swap costs 9+9.
  CHECK(user_sense(mop, *naive_optimum(mop)) == 2);

  ExactResult result = optimize_exact(mop);
  REQUIRE(result.status == SolveStatus::Sat);
  CHECK(*result.objective == 2);
  const auto& task = mop.domain(*mop.type_id("Task"));
  CHECK(result.assignment->tables[0].entries ==
        std::vector<long long>{task[0], task[1]});
}

TEST_CASE("the triangle needs three colors") {
  Mop mop = mop_from_file("cnp_k3.mop");
  ExactResult result = optimize_exact(mop);
  REQUIRE(result.status == SolveStatus::Sat);
  CHECK(*result.objective == 3);
}

TEST_CASE("optimize_exact agrees with the naive scan on small instances") {
  for (const char* name : {"tsp4.mop", "knapsack3.mop", "cnp_k3.mop", "assignment2.mop",
                           "assignment3.mop", "max_clique6.mop", "knapsack6.mop"}) {
    CAPTURE(name);
    Mop mop = mop_from_file(name);
    auto naive = naive_optimum(mop);
    ExactResult result = optimize_exact(mop);
    REQUIRE(result.status == SolveStatus::Sat);
    REQUIRE(naive.has_value());
    CHECK(*result.objective == user_sense(mop, *naive));
    CHECK(check_model(mop, *result.assignment));
  }
}

TEST_CASE("optimize_exact is deterministic") {
  Mop mop = mop_from_file("knapsack6.mop");
  ExactResult a = optimize_exact(mop);
  ExactResult b = optimize_exact(mop);
  CHECK(*a.assignment == *b.assignment);
  CHECK(a.nodes_explored == b.nodes_explored);
}
