#pragma once

#include <utility>
#include <vector>

#include "symloc/symmetry.hpp"

namespace symloc {

// Generator set of a symmetry-induced neighborhood: every surviving swap,
// in canonical order.
struct Neighborhood {
  std::vector<DesSymmetry> generators;
  bool empty() const { return generators.empty(); }
};

struct Move {
  std::size_t generator_index = 0;
  TypeId type = 0;
  ElemId a = 0, b = 0;
  std::vector<SymbolId> sigma;
};

// Step 4 of the detection scheme: the variant symmetries become generators.
Neighborhood build_neighborhood(const DetectionReport& report);

// Images of `a` under every generator, in order. Every image of a model is a
// model; duplicates are possible and not removed.
std::vector<std::pair<Move, Assignment>> neighbors(const Mop& mop, const Neighborhood& n,
                                                   const Assignment& a);

struct OrbitResult {
  bool cap_exceeded = false;
  std::vector<Assignment> elements;  // sorted, deterministic
};

// Breadth-first closure of `a` under all generators, halted once the set
// would exceed `cap`.
OrbitResult orbit_closure(const Mop& mop, const Neighborhood& n, const Assignment& a,
                          std::size_t cap);

}  // namespace symloc
