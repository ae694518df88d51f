#include "symloc/report_json.hpp"

#include "symloc/parser.hpp"

namespace symloc {

std::string content_digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const char* status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::Sat: return "sat";
    case SolveStatus::Unsat: return "unsat";
    case SolveStatus::Exhausted: return "exhausted";
  }
  return "unknown";
}

const char* pipeline_status_name(PipelineResult::Status status) {
  switch (status) {
    case PipelineResult::Status::Sat: return "sat";
    case PipelineResult::Status::NoNeighborhood: return "no-neighborhood";
    case PipelineResult::Status::Unsat: return "unsat";
    case PipelineResult::Status::BudgetExhausted: return "budget-exhausted";
  }
  return "unknown";
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::LocalOptimum: return "local-optimum";
    case Termination::IterLimit: return "iter-limit";
    case Termination::TimeLimit: return "time-limit";
  }
  return "unknown";
}

const char* policy_kind_name(ClassifyPolicy::Kind kind) {
  switch (kind) {
    case ClassifyPolicy::Kind::Syntactic: return "syntactic";
    case ClassifyPolicy::Kind::Exhaustive: return "exhaustive";
    case ClassifyPolicy::Kind::Sample: return "sample";
  }
  return "unknown";
}

namespace {

const char* classification_name(Classification::Kind kind) {
  switch (kind) {
    case Classification::Kind::Unclassified: return "unclassified";
    case Classification::Kind::Variant: return "variant";
    case Classification::Kind::InvariantProved: return "invariant-proved";
    case Classification::Kind::InvariantSampled: return "invariant-sampled";
  }
  return "unknown";
}

}  // namespace

nlohmann::ordered_json symmetry_to_json(const Mop& mop, const DesSymmetry& s,
                                        bool include_witness) {
  nlohmann::ordered_json out;
  out["type"] = mop.type(s.type).name;
  out["a"] = mop.structure.elements.display(s.a);
  out["b"] = mop.structure.elements.display(s.b);
  auto sigma = nlohmann::ordered_json::array();
  for (SymbolId sym : s.sigma) sigma.push_back(mop.symbol(sym).name);
  out["sigma"] = std::move(sigma);
  out["classification"] = classification_name(s.classification.kind);
  if (s.classification.kind == Classification::Kind::InvariantSampled)
    out["samples"] = s.classification.samples;
  if (include_witness && s.classification.witness)
    out["witness"] = assignment_to_json(mop, *s.classification.witness);
  return out;
}

nlohmann::ordered_json detection_to_json(const Mop& mop, const DetectionReport& report,
                                         bool include_timings) {
  nlohmann::ordered_json out;
  out["policy"] = {{"kind", policy_kind_name(report.policy.kind)},
                   {"samples", report.policy.samples},
                   {"seed", report.policy.seed}};
  out["candidates_checked"] = report.candidates_checked;
  auto symmetries = nlohmann::ordered_json::array();
  for (const auto& s : report.symmetries) symmetries.push_back(symmetry_to_json(mop, s));
  out["symmetries"] = std::move(symmetries);
  auto rejected = nlohmann::ordered_json::array();
  for (const auto& r : report.rejected) {
    nlohmann::ordered_json row;
    row["type"] = mop.type(r.type).name;
    row["a"] = mop.structure.elements.display(r.a);
    row["b"] = mop.structure.elements.display(r.b);
    row["reason"] = {{"code", r.reason.code()}, {"detail", r.reason.detail}};
    rejected.push_back(std::move(row));
  }
  out["rejected"] = std::move(rejected);
  out["surviving"] = report.symmetries.size();
  if (include_timings) out["elapsed_seconds"] = report.elapsed.count();
  return out;
}

nlohmann::ordered_json exact_to_json(const Mop& mop, const ExactResult& result) {
  nlohmann::ordered_json out;
  out["status"] = status_name(result.status);
  if (result.objective) out["objective"] = *result.objective;
  out["nodes_explored"] = result.nodes_explored;
  if (result.assignment) out["assignment"] = assignment_to_json(mop, *result.assignment);
  return out;
}

nlohmann::ordered_json search_to_json(const Mop& mop, const SearchResult& result) {
  nlohmann::ordered_json out;
  out["best_objective"] = result.best_objective;
  out["iterations"] = result.iterations;
  out["moves_executed"] = result.moves_executed;
  out["termination"] = termination_name(result.termination);
  auto trajectory = nlohmann::ordered_json::array();
  for (const auto& [iter, obj] : result.trajectory)
    trajectory.push_back(nlohmann::ordered_json::array({iter, obj}));
  out["trajectory"] = std::move(trajectory);
  out["best"] = assignment_to_json(mop, result.best);
  return out;
}

nlohmann::ordered_json pipeline_to_json(const Mop& mop, const PipelineResult& result,
                                        bool include_timings) {
  nlohmann::ordered_json out;
  out["status"] = pipeline_status_name(result.status);
  out["initial"] = exact_to_json(mop, result.initial);
  if (result.detection)
    out["detection"] = detection_to_json(mop, *result.detection, include_timings);
  if (result.search) out["search"] = search_to_json(mop, *result.search);
  if (result.best_objective) out["best_objective"] = *result.best_objective;
  if (result.best) out["best"] = assignment_to_json(mop, *result.best);
  return out;
}

nlohmann::ordered_json verification_to_json(const Mop& mop, const DesSymmetry& s,
                                            const VerificationReport& report) {
  nlohmann::ordered_json out;
  out["type"] = mop.type(s.type).name;
  out["a"] = mop.structure.elements.display(s.a);
  out["b"] = mop.structure.elements.display(s.b);
  out["mode"] = report.exhaustive ? "exhaustive" : "sampled";
  out["checked"] = report.checked;
  out["pass"] = report.pass;
  if (report.counterexample)
    out["counterexample"] = assignment_to_json(mop, *report.counterexample);
  return out;
}

}  // namespace symloc
