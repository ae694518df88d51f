#include "symloc/neighborhood.hpp"

#include <deque>
#include <set>

namespace symloc {

Neighborhood build_neighborhood(const DetectionReport& report) {
  Neighborhood n;
  for (const DesSymmetry& s : report.symmetries)
    if (s.classification.kind == Classification::Kind::Variant) n.generators.push_back(s);
  return n;
}

std::vector<std::pair<Move, Assignment>> neighbors(const Mop& mop, const Neighborhood& n,
                                                   const Assignment& a) {
  std::vector<std::pair<Move, Assignment>> out;
  out.reserve(n.generators.size());
  for (std::size_t i = 0; i < n.generators.size(); ++i) {
    const DesSymmetry& g = n.generators[i];
    out.emplace_back(Move{i, g.type, g.a, g.b, g.sigma}, apply_symmetry(mop, g, a));
  }
  return out;
}

OrbitResult orbit_closure(const Mop& mop, const Neighborhood& n, const Assignment& a,
                          std::size_t cap) {
  OrbitResult result;
  std::set<Assignment> seen;
  std::deque<const Assignment*> frontier;
  frontier.push_back(&*seen.insert(a).first);
  while (!frontier.empty()) {
    const Assignment* cur = frontier.front();
    frontier.pop_front();
    for (const DesSymmetry& g : n.generators) {
      Assignment image = apply_symmetry(mop, g, *cur);
      auto [it, inserted] = seen.insert(std::move(image));
      if (!inserted) continue;
      if (seen.size() > cap) {
        result.cap_exceeded = true;
        result.elements.assign(seen.begin(), seen.end());
        return result;
      }
      frontier.push_back(&*it);
    }
  }
  result.elements.assign(seen.begin(), seen.end());
  return result;
}

}  // namespace symloc
