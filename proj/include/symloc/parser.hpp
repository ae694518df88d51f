#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "symloc/model.hpp"

namespace symloc {

struct ParseDiagnostic {
  enum class Severity { Error, Warning };
  SourceSpan span;
  Severity severity = Severity::Error;
  std::string message;
};

struct ParseResult {
  std::optional<Mop> mop;  // present iff no error diagnostics
  std::vector<ParseDiagnostic> diagnostics;
  bool ok() const { return mop.has_value(); }
};

// Parses model source text. On success the returned Mop validates.
ParseResult parse_model(const std::string& text, const std::string& filename = "<input>");

// Deterministic pretty-printer; output re-parses to a structurally equal Mop.
std::string format_model(const Mop& mop);

struct AssignmentReadResult {
  std::optional<Assignment> assignment;
  std::string error;  // empty on success
  bool ok() const { return assignment.has_value(); }
};

// Assignment JSON: object keyed by var-symbol name; predicates are arrays of
// label tuples, functions map comma-joined argument labels to a result label.
AssignmentReadResult read_assignment(const std::string& json_text, const Mop& mop);
std::string write_assignment(const Mop& mop, const Assignment& a);
nlohmann::ordered_json assignment_to_json(const Mop& mop, const Assignment& a);

std::string format_diagnostic(const ParseDiagnostic& d);

}  // namespace symloc
