#pragma once

#include <climits>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "symloc/ast.hpp"

namespace symloc {

using ElemId = std::int32_t;
using TypeId = std::int32_t;
using SymbolId = std::int32_t;

inline constexpr TypeId kTypeInt = -1;   // built-in integer type
inline constexpr TypeId kTypeNone = -2;  // "no result type" (predicates)

// Marker for a function-table slot the source never filled.
inline constexpr long long kUnsetEntry = LLONG_MIN;

// Global universe of domain elements. Types interpret (possibly overlapping)
// subsets of it; integer elements are shared with the built-in int type.
class ElementTable {
 public:
  ElemId intern_label(const std::string& label);
  ElemId intern_int(long long value);
  std::optional<ElemId> find_label(const std::string& label) const;
  std::optional<ElemId> find_int(long long value) const;

  bool is_int(ElemId id) const { return entries_[id].is_int; }
  long long int_value(ElemId id) const { return entries_[id].value; }
  const std::string& label(ElemId id) const { return entries_[id].label; }
  std::string display(ElemId id) const;
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    bool is_int = false;
    long long value = 0;
    std::string label;
  };
  std::vector<Entry> entries_;
  std::map<std::string, ElemId> by_label_;
  std::map<long long, ElemId> by_int_;
};

struct TypeDecl {
  std::string name;
  bool is_interval = false;
  long long lo = 0, hi = -1;        // interval bounds, lo <= hi
  std::vector<std::string> labels;  // explicit domain
  SourceSpan span;
};

enum class SymbolKind { Predicate, Function, Constant };
enum class Binding { Interpreted, Var };

struct SymbolDecl {
  std::string name;
  SymbolKind kind = SymbolKind::Predicate;
  Binding binding = Binding::Interpreted;
  std::vector<std::string> arg_types;
  std::string result_type;  // functions/constants only; "int" is the built-in
  SourceSpan span;

  bool is_function_like() const { return kind != SymbolKind::Predicate; }
};

struct Vocabulary {
  std::vector<TypeDecl> types;
  std::vector<SymbolDecl> symbols;
};

// Flat table over the symbol's argument-domain product, row-major in canonical
// domain order. Predicates store 0/1. Functions store the global ElemId of the
// result, or the raw integer when the declared result type is `int`.
struct Table {
  std::vector<long long> entries;
  bool operator==(const Table&) const = default;
  auto operator<=>(const Table&) const = default;
};

struct PartialStructure {
  ElementTable elements;
  std::vector<std::vector<ElemId>> type_domains;  // by TypeId, canonical order
  std::vector<std::optional<Table>> tables;       // by SymbolId; interpreted only
};

// Interpretations for the var symbols, indexed by var ordinal
// (declaration order among var symbols).
struct Assignment {
  std::vector<Table> tables;
  bool operator==(const Assignment&) const = default;
  auto operator<=>(const Assignment&) const = default;
};

enum class Sense { Minimize, Maximize };

// Resolved signature data for one symbol.
struct SymbolInfo {
  std::vector<TypeId> arg_ids;
  TypeId result_id = kTypeNone;  // kTypeInt for built-in int results
  std::vector<std::size_t> strides;
  std::size_t table_size = 1;
};

struct Mop {
  std::string name;
  Vocabulary vocabulary;
  PartialStructure structure;
  std::vector<FormulaPtr> theory;
  TermPtr objective;       // internal form: always a minimization
  TermPtr objective_user;  // the term as declared
  Sense sense = Sense::Minimize;

  // Builds the lookup caches below. Must be called after the public fields
  // are in place and before any other operation touches the model.
  void finalize();

  std::optional<TypeId> type_id(const std::string& name) const;
  std::optional<SymbolId> symbol_id(const std::string& name) const;
  const TypeDecl& type(TypeId t) const { return vocabulary.types[t]; }
  const SymbolDecl& symbol(SymbolId s) const { return vocabulary.symbols[s]; }
  const SymbolInfo& info(SymbolId s) const { return symbol_info_[s]; }
  const std::vector<ElemId>& domain(TypeId t) const { return structure.type_domains[t]; }

  bool is_var(SymbolId s) const { return symbol(s).binding == Binding::Var; }
  const std::vector<SymbolId>& var_symbols() const { return var_symbols_; }
  int var_ordinal(SymbolId s) const { return var_ordinals_[s]; }

  // Position of a global element inside a type's domain, -1 if absent.
  int domain_index(TypeId t, ElemId e) const;
  bool type_contains(TypeId t, ElemId e) const { return domain_index(t, e) >= 0; }

  // True if any argument or result position of the symbol names this type.
  bool signature_mentions(SymbolId s, TypeId t) const;

 private:
  std::map<std::string, TypeId> type_ids_;
  std::map<std::string, SymbolId> symbol_ids_;
  std::vector<SymbolId> var_symbols_;
  std::vector<int> var_ordinals_;
  std::vector<SymbolInfo> symbol_info_;
  std::vector<std::vector<int>> domain_index_;  // [TypeId][ElemId] -> index or -1
};

struct ValidationDiagnostic {
  std::string code;     // stable identifier, e.g. "unknown-symbol"
  std::string message;  // human-readable detail
  std::optional<SourceSpan> span;
};

struct ValidationReport {
  std::vector<ValidationDiagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

// Whole-model validation. A model that passes is accepted by every other
// operation in the toolkit.
ValidationReport validate(const Mop& mop);

inline constexpr std::uint64_t kDefaultSpaceBound = 1'000'000;

struct SpaceSize {
  bool overflow = false;   // count exceeds the requested bound
  std::uint64_t count = 0; // valid when !overflow
};

// Exact number of total assignments to the var symbols, or an overflow marker
// once the count exceeds `bound`.
SpaceSize assignment_space_size(const Mop& mop, std::uint64_t bound = kDefaultSpaceBound);

// The lexicographically first assignment: predicates empty, functions mapping
// everything to the first element of their result domain.
Assignment first_assignment(const Mop& mop);

// Shape/typing check for externally supplied assignments.
bool well_typed(const Mop& mop, const Assignment& a);

// One mutable slot of an assignment: an entry of one var symbol's table.
struct TableCell {
  int var_ordinal = 0;
  std::size_t entry = 0;
  int num_values = 0;    // 2 for predicate entries, |result domain| for functions
  SymbolId symbol = 0;
};

// Cells in canonical order: var symbols by declaration, entries row-major.
std::vector<TableCell> table_cells(const Mop& mop);

// Writes digit -> table slot (false/true for predicates, k-th result element
// for functions).
void set_cell(const Mop& mop, Assignment& a, const TableCell& cell, int digit);

// Streams every total assignment exactly once, lexicographic over the
// concatenated symbol tables in declared domain order. Throws
// std::invalid_argument when the space exceeds `bound`.
class AssignmentEnumerator {
 public:
  explicit AssignmentEnumerator(const Mop& mop, std::uint64_t bound = kDefaultSpaceBound);
  bool next(Assignment& out);
  void reset();

 private:
  const Mop* mop_;
  std::vector<TableCell> cells_;
  std::vector<int> digits_;
  bool started_ = false;
  bool done_ = false;
};

Assignment random_assignment(const Mop& mop, std::mt19937_64& rng);

// Structural equality of two models (spans ignored).
bool mop_equal(const Mop& a, const Mop& b);

}  // namespace symloc
