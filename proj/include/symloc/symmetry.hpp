#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "symloc/evaluator.hpp"

namespace symloc {

struct Classification {
  enum class Kind { Unclassified, Variant, InvariantProved, InvariantSampled };
  Kind kind = Kind::Unclassified;
  std::optional<Assignment> witness;  // Variant: objective differs on it
  std::uint32_t samples = 0;          // InvariantSampled: how many were tried
};

// A domain element swap: exchanging elements a and b of one type, applied to
// the tables of the var symbols in sigma.
struct DesSymmetry {
  TypeId type = 0;
  ElemId a = 0, b = 0;
  std::vector<SymbolId> sigma;  // canonical (declaration) order
  Classification classification;
};

struct RejectReason {
  enum class Kind {
    InterpretedNotInvariant,  // detail: symbol whose table moves under the swap
    LiteralInTheory,          // detail: the offending element
    TypeUnderArithmetic,      // detail: type used under order/arith in the theory
    TypeSplitsPair,           // detail: theory-relevant type containing only one element
    SigmaPositionSplitsPair,  // detail: var symbol whose signature splits the pair
    ObjectiveInvariant,       // filtered at step 3 of detection
  };
  Kind kind;
  std::string detail;

  std::string text() const;
  std::string code() const;  // stable identifier for reports
};

struct CandidatePair {
  TypeId type;
  ElemId a, b;
};

struct RejectedPair {
  TypeId type;
  ElemId a, b;
  RejectReason reason;
};

struct ClassifyPolicy {
  enum class Kind { Syntactic, Exhaustive, Sample };
  Kind kind = Kind::Exhaustive;
  std::uint32_t samples = 256;
  std::uint64_t seed = 0;
  // Exhaustive scans refuse spaces larger than this.
  std::uint64_t space_bound = kDefaultSpaceBound;
};

// Exhaustive when the assignment space fits the bound, else seeded sampling.
ClassifyPolicy auto_policy(const Mop& mop, std::uint32_t samples = 256,
                           std::uint64_t seed = 0,
                           std::uint64_t space_bound = kDefaultSpaceBound);

struct DetectionReport {
  std::uint64_t candidates_checked = 0;
  std::vector<DesSymmetry> symmetries;  // canonical pair order
  std::vector<RejectedPair> rejected;   // canonical pair order
  std::chrono::duration<double> elapsed{0};
  ClassifyPolicy policy;
};

// All unordered element pairs of every candidate type. Candidate types are the
// types appearing in the signature of var symbols that occur in the objective.
std::vector<CandidatePair> candidate_pairs(const Mop& mop);

// Structural acceptance test for one pair. Accepts with sigma = all var
// symbols whose signature mentions a type containing a or b.
std::variant<DesSymmetry, RejectReason> check_des_pair(const Mop& mop, TypeId type,
                                                       ElemId a, ElemId b);

// Image of an assignment: every tuple of every sigma symbol rewritten through
// the swap; symbols outside sigma untouched. An involution.
Assignment apply_symmetry(const Mop& mop, const DesSymmetry& s, const Assignment& a);

// Objective-variance classification per policy. Exhaustive throws
// std::invalid_argument when the space exceeds the policy bound.
Classification classify_variance(const Mop& mop, const DesSymmetry& s,
                                 const ClassifyPolicy& policy);

struct DetectOptions {
  ClassifyPolicy policy;
  // Testing hook: accept every candidate pair without the structural checks,
  // so the semantic verifier can be shown to catch unsound symmetries.
  bool skip_structural_checks = false;
};

// Steps 1-3 of the detection scheme: candidates over objective-relevant var
// symbols, per-pair structural check, then objective-invariance filtering.
DetectionReport detect(const Mop& mop, const DetectOptions& options);

struct VerifyBudget {
  std::uint64_t exhaustive_limit = 100'000;
  std::uint32_t samples = 256;
  std::uint64_t seed = 0;
};

struct VerificationReport {
  bool exhaustive = false;
  std::uint64_t checked = 0;
  bool pass = true;
  std::optional<Assignment> counterexample;  // model-hood differs on it
};

// Semantic oracle: checks "a is a model iff S(a) is a model", exhaustively
// when the space fits the budget, by seeded sampling otherwise.
VerificationReport verify_symmetry(const Mop& mop, const DesSymmetry& s,
                                   const VerifyBudget& budget);

}  // namespace symloc
