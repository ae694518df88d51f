#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace symloc {

enum class Problem { Tsp, TspAlt, ShortestPath, MaxClique, Cnp, Knapsack, Assign };

std::optional<Problem> problem_from_name(const std::string& name);
std::string problem_name(Problem p);

struct InstanceSpec {
  Problem problem = Problem::Tsp;
  int n = 4;                     // cities / nodes / objects / agents
  int colors = 3;                // cnp
  int equal_volume_pairs = 0;    // knapsack: same volume, different value
  int twin_pairs = 0;            // knapsack: same volume and same value
  bool symmetric_graph = false;  // max-clique: plant one twin pair
  double edge_density = 0.5;
  std::uint64_t seed = 0;
};

// Deterministic model text for the spec. Throws std::invalid_argument when
// the parameters are out of range.
std::string generate(const InstanceSpec& spec);

// Golden detection outcome for a generated instance, one row per candidate
// type, in report order.
struct FamilyExpectation {
  std::string type_name;
  int variant = 0;              // pairs surviving as variant generators
  int invariant = 0;            // pairs detected, then filtered as invariant
  int rejected_structural = 0;  // pairs failing the structural check
};

struct Expectation {
  std::vector<FamilyExpectation> families;
  int candidates() const;
  int surviving() const;
  nlohmann::ordered_json to_json() const;
};

Expectation expected_detection(const InstanceSpec& spec);

}  // namespace symloc
