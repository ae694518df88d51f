#include "symloc/model.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace symloc {

// --- ElementTable -----------------------------------------------------------

ElemId ElementTable::intern_label(const std::string& label) {
  auto it = by_label_.find(label);
  if (it != by_label_.end()) return it->second;
  ElemId id = static_cast<ElemId>(entries_.size());
  entries_.push_back({false, 0, label});
  by_label_.emplace(label, id);
  return id;
}

ElemId ElementTable::intern_int(long long value) {
  auto it = by_int_.find(value);
  if (it != by_int_.end()) return it->second;
  ElemId id = static_cast<ElemId>(entries_.size());
  entries_.push_back({true, value, {}});
  by_int_.emplace(value, id);
  return id;
}

std::optional<ElemId> ElementTable::find_label(const std::string& label) const {
  auto it = by_label_.find(label);
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

std::optional<ElemId> ElementTable::find_int(long long value) const {
  auto it = by_int_.find(value);
  if (it == by_int_.end()) return std::nullopt;
  return it->second;
}

std::string ElementTable::display(ElemId id) const {
  const Entry& e = entries_[id];
  return e.is_int ? std::to_string(e.value) : e.label;
}

// --- Mop lookups ------------------------------------------------------------

void Mop::finalize() {
  type_ids_.clear();
  symbol_ids_.clear();
  var_symbols_.clear();
  var_ordinals_.assign(vocabulary.symbols.size(), -1);
  symbol_info_.assign(vocabulary.symbols.size(), {});
  domain_index_.assign(vocabulary.types.size(), {});

  for (std::size_t i = 0; i < vocabulary.types.size(); ++i)
    type_ids_.emplace(vocabulary.types[i].name, static_cast<TypeId>(i));
  for (std::size_t i = 0; i < vocabulary.symbols.size(); ++i)
    symbol_ids_.emplace(vocabulary.symbols[i].name, static_cast<SymbolId>(i));

  for (std::size_t t = 0; t < vocabulary.types.size(); ++t) {
    auto& index = domain_index_[t];
    index.assign(structure.elements.size(), -1);
    if (t < structure.type_domains.size()) {
      const auto& dom = structure.type_domains[t];
      for (std::size_t i = 0; i < dom.size(); ++i) index[dom[i]] = static_cast<int>(i);
    }
  }

  for (std::size_t s = 0; s < vocabulary.symbols.size(); ++s) {
    const SymbolDecl& decl = vocabulary.symbols[s];
    SymbolInfo& info = symbol_info_[s];
    bool resolved = true;
    for (const auto& arg : decl.arg_types) {
      auto it = type_ids_.find(arg);
      if (it == type_ids_.end()) {
        info.arg_ids.push_back(arg == "int" ? kTypeInt : kTypeNone);
        resolved = false;
      } else {
        info.arg_ids.push_back(it->second);
      }
    }
    if (decl.is_function_like()) {
      if (decl.result_type == "int") {
        info.result_id = kTypeInt;
      } else {
        auto it = type_ids_.find(decl.result_type);
        info.result_id = it == type_ids_.end() ? kTypeNone : it->second;
        if (it == type_ids_.end()) resolved = false;
      }
    } else {
      info.result_id = kTypeNone;
    }

    info.table_size = 0;
    if (resolved) {
      std::size_t size = 1;
      for (TypeId t : info.arg_ids) {
        if (t < 0 || structure.type_domains[t].empty()) {
          size = 0;
          break;
        }
        size *= structure.type_domains[t].size();
      }
      info.table_size = size;
      info.strides.assign(info.arg_ids.size(), 1);
      for (int i = static_cast<int>(info.arg_ids.size()) - 2; i >= 0; --i) {
        TypeId t = info.arg_ids[i + 1];
        info.strides[i] = info.strides[i + 1] * (t >= 0 ? structure.type_domains[t].size() : 0);
      }
    }

    if (decl.binding == Binding::Var) {
      var_ordinals_[s] = static_cast<int>(var_symbols_.size());
      var_symbols_.push_back(static_cast<SymbolId>(s));
    }
  }
}

std::optional<TypeId> Mop::type_id(const std::string& name) const {
  auto it = type_ids_.find(name);
  if (it == type_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<SymbolId> Mop::symbol_id(const std::string& name) const {
  auto it = symbol_ids_.find(name);
  if (it == symbol_ids_.end()) return std::nullopt;
  return it->second;
}

int Mop::domain_index(TypeId t, ElemId e) const {
  if (t < 0 || static_cast<std::size_t>(t) >= domain_index_.size()) return -1;
  const auto& index = domain_index_[t];
  if (e < 0 || static_cast<std::size_t>(e) >= index.size()) return -1;
  return index[e];
}

bool Mop::signature_mentions(SymbolId s, TypeId t) const {
  const SymbolInfo& si = info(s);
  for (TypeId a : si.arg_ids)
    if (a == t) return true;
  return si.result_id == t;
}

// --- validation -------------------------------------------------------------

namespace {

bool integer_typed(const Mop& mop, TypeId t) {
  return t == kTypeInt || (t >= 0 && mop.type(t).is_interval);
}

bool compatible(const Mop& mop, TypeId a, TypeId b) {
  if (a == kTypeNone || b == kTypeNone) return true;  // already diagnosed
  if (a == b) return true;
  return integer_typed(mop, a) && integer_typed(mop, b);
}

struct TypeChecker {
  const Mop& mop;
  ValidationReport& report;
  std::vector<std::pair<std::string, TypeId>> scope;

  void error(std::string code, std::string message, const SourceSpan& span) {
    std::optional<SourceSpan> s;
    if (span.length > 0 || span.line > 1 || span.column > 1) s = span;
    report.diagnostics.push_back({std::move(code), std::move(message), s});
  }

  TypeId binder_type(const Binder& b, const SourceSpan& span, bool aggregate) {
    if (aggregate) {
      for (const auto& [name, t] : scope) {
        if (name == b.var) {
          error("aggregate-shadow",
                "aggregate binder '" + b.var + "' shadows an enclosing variable", span);
          break;
        }
      }
    }
    auto t = mop.type_id(b.type);
    if (!t) {
      error("unknown-type", "unknown type '" + b.type + "'", span);
      return kTypeNone;
    }
    return *t;
  }

  TypeId lookup_var(const std::string& name) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == name) return it->second;
    return kTypeNone;
  }

  bool bound(const std::string& name) const {
    for (const auto& [n, t] : scope)
      if (n == name) return true;
    return false;
  }

  TypeId term_type(const TermPtr& t) {
    switch (t->kind) {
      case TermNode::Kind::Variable: {
        if (!bound(t->name)) {
          error("unbound-variable", "unbound variable '" + t->name + "'", t->span);
          return kTypeNone;
        }
        return lookup_var(t->name);
      }
      case TermNode::Kind::Element: {
        auto id = mop.structure.elements.find_label(t->name);
        if (!id) {
          error("unknown-element", "unknown element '" + t->name + "'", t->span);
          return kTypeNone;
        }
        for (std::size_t i = 0; i < mop.vocabulary.types.size(); ++i)
          if (mop.type_contains(static_cast<TypeId>(i), *id)) return static_cast<TypeId>(i);
        error("unknown-element", "element '" + t->name + "' belongs to no type", t->span);
        return kTypeNone;
      }
      case TermNode::Kind::IntLit:
        return kTypeInt;
      case TermNode::Kind::Apply: {
        auto s = mop.symbol_id(t->name);
        if (!s) {
          error("unknown-symbol", "unknown symbol '" + t->name + "'", t->span);
          for (const auto& a : t->args) term_type(a);
          return kTypeNone;
        }
        const SymbolDecl& decl = mop.symbol(*s);
        if (!decl.is_function_like()) {
          error("type-mismatch", "'" + t->name + "' is a predicate, not a term", t->span);
          for (const auto& a : t->args) term_type(a);
          return kTypeNone;
        }
        check_application(*s, t->args, t->span);
        return mop.info(*s).result_id;
      }
      case TermNode::Kind::Add:
      case TermNode::Kind::Sub: {
        for (const auto& a : t->args) {
          TypeId at = term_type(a);
          if (at != kTypeNone && !integer_typed(mop, at))
            error("type-mismatch", "arithmetic applies only to integer-typed terms", a->span);
        }
        return kTypeInt;
      }
      case TermNode::Kind::SumAgg: {
        std::size_t pushed = 0;
        for (const auto& b : t->binders) {
          scope.emplace_back(b.var, binder_type(b, t->span, true));
          ++pushed;
        }
        TypeId bt = term_type(t->args[0]);
        if (bt != kTypeNone && !integer_typed(mop, bt))
          error("type-mismatch", "sum body must be integer-typed", t->args[0]->span);
        if (t->guard) check_formula(t->guard);
        scope.resize(scope.size() - pushed);
        return kTypeInt;
      }
      case TermNode::Kind::CountAgg: {
        scope.emplace_back(t->binders[0].var, binder_type(t->binders[0], t->span, true));
        check_formula(t->guard);
        scope.pop_back();
        return kTypeInt;
      }
    }
    return kTypeNone;
  }

  void check_application(SymbolId s, const std::vector<TermPtr>& args, const SourceSpan& span) {
    const SymbolDecl& decl = mop.symbol(s);
    const SymbolInfo& si = mop.info(s);
    if (args.size() != decl.arg_types.size()) {
      error("arity-mismatch",
            "'" + decl.name + "' expects " + std::to_string(decl.arg_types.size()) +
                " argument(s), got " + std::to_string(args.size()),
            span);
      for (const auto& a : args) term_type(a);
      return;
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      TypeId at = term_type(args[i]);
      TypeId pt = i < si.arg_ids.size() ? si.arg_ids[i] : kTypeNone;
      if (!compatible(mop, at, pt)) {
        error("type-mismatch",
              "argument " + std::to_string(i + 1) + " of '" + decl.name +
                  "' has the wrong type",
              args[i]->span);
      } else if (args[i]->kind == TermNode::Kind::IntLit && pt >= 0) {
        if (!mop.structure.elements.find_int(args[i]->value) ||
            !mop.type_contains(pt, *mop.structure.elements.find_int(args[i]->value)))
          error("type-mismatch",
                "literal " + std::to_string(args[i]->value) + " is outside type '" +
                    mop.type(pt).name + "'",
                args[i]->span);
      }
    }
  }

  void check_formula(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaNode::Kind::Forall:
      case FormulaNode::Kind::Exists:
      case FormulaNode::Kind::Exists1: {
        scope.emplace_back(f->binder.var, binder_type(f->binder, f->span, false));
        check_formula(f->children[0]);
        scope.pop_back();
        return;
      }
      case FormulaNode::Kind::And:
      case FormulaNode::Kind::Or:
      case FormulaNode::Kind::Not:
      case FormulaNode::Kind::Implies:
      case FormulaNode::Kind::Iff:
        for (const auto& c : f->children) check_formula(c);
        return;
      case FormulaNode::Kind::Compare: {
        TypeId lt = term_type(f->terms[0]);
        TypeId rt = term_type(f->terms[1]);
        bool order = f->op != CompareOp::Eq && f->op != CompareOp::Ne;
        if (order) {
          if ((lt != kTypeNone && !integer_typed(mop, lt)) ||
              (rt != kTypeNone && !integer_typed(mop, rt)))
            error("type-mismatch", "order comparisons apply only to integer-typed terms",
                  f->span);
        } else if (!compatible(mop, lt, rt)) {
          error("type-mismatch", "comparison between incompatible types", f->span);
        }
        return;
      }
      case FormulaNode::Kind::PredApply: {
        auto s = mop.symbol_id(f->symbol);
        if (!s) {
          error("unknown-symbol", "unknown symbol '" + f->symbol + "'", f->span);
          for (const auto& a : f->terms) term_type(a);
          return;
        }
        if (mop.symbol(*s).is_function_like()) {
          error("type-mismatch", "expected formula, found term", f->span);
          for (const auto& a : f->terms) term_type(a);
          return;
        }
        check_application(*s, f->terms, f->span);
        return;
      }
      case FormulaNode::Kind::Reachable: {
        TypeId st = term_type(f->terms[0]);
        auto rel = mop.symbol_id(f->symbol);
        if (!rel) {
          error("unknown-symbol", "unknown symbol '" + f->symbol + "'", f->span);
        } else if (mop.symbol(*rel).kind != SymbolKind::Predicate ||
                   mop.symbol(*rel).arg_types.size() != 2) {
          error("type-mismatch", "reachable needs a binary predicate, '" + f->symbol +
                                     "' is not one",
                f->span);
        } else if (!compatible(mop, st, mop.info(*rel).arg_ids[0])) {
          error("type-mismatch", "reachable start term has the wrong type", f->span);
        }
        if (!mop.type_id(f->cover_type))
          error("unknown-type", "unknown type '" + f->cover_type + "'", f->span);
        return;
      }
    }
  }
};

}  // namespace

ValidationReport validate(const Mop& mop) {
  ValidationReport report;
  auto diag = [&](std::string code, std::string message) {
    report.diagnostics.push_back({std::move(code), std::move(message), std::nullopt});
  };

  // Vocabulary shape.
  std::set<std::string> seen;
  for (const auto& t : mop.vocabulary.types) {
    if (t.name.empty()) diag("duplicate-name", "type with empty name");
    if (t.name == "int") diag("duplicate-name", "'int' is a reserved type name");
    if (!seen.insert(t.name).second)
      diag("duplicate-name", "duplicate declaration of '" + t.name + "'");
    if (t.is_interval) {
      if (t.lo > t.hi)
        diag("bad-interval", "type '" + t.name + "' has an empty interval");
    } else {
      if (t.labels.empty()) diag("empty-domain", "type '" + t.name + "' has no elements");
      std::set<std::string> labels;
      for (const auto& l : t.labels)
        if (!labels.insert(l).second)
          diag("duplicate-element", "duplicate element '" + l + "' in type '" + t.name + "'");
    }
  }
  for (const auto& s : mop.vocabulary.symbols) {
    if (s.name.empty()) diag("duplicate-name", "symbol with empty name");
    if (!seen.insert(s.name).second)
      diag("duplicate-name", "duplicate declaration of '" + s.name + "'");
    if (s.kind == SymbolKind::Constant && !s.arg_types.empty())
      diag("arity-mismatch", "constant '" + s.name + "' must have arity 0");
    for (const auto& a : s.arg_types) {
      if (a == "int") {
        diag("int-argument",
             "symbol '" + s.name + "' takes an argument of built-in type int; "
             "argument positions must use finite declared types");
      } else if (!mop.type_id(a)) {
        diag("unknown-type", "unknown type '" + a + "' in signature of '" + s.name + "'");
      }
    }
    if (s.is_function_like()) {
      if (s.result_type.empty()) {
        diag("unknown-type", "function '" + s.name + "' has no result type");
      } else if (s.result_type != "int" && !mop.type_id(s.result_type)) {
        diag("unknown-type",
             "unknown type '" + s.result_type + "' in signature of '" + s.name + "'");
      } else if (s.result_type == "int" && s.binding == Binding::Var) {
        diag("var-int-result",
             "var symbol '" + s.name + "' maps to built-in type int; "
             "var symbols need a finite result type");
      }
    } else if (!s.result_type.empty()) {
      diag("type-mismatch", "predicate '" + s.name + "' cannot have a result type");
    }
  }
  if (!report.ok()) return report;  // decl errors make the table checks unreliable

  // Structure: domains materialized for every type, in declaration shape.
  if (mop.structure.type_domains.size() != mop.vocabulary.types.size()) {
    diag("table-shape", "structure does not interpret every type");
    return report;
  }
  for (std::size_t i = 0; i < mop.vocabulary.types.size(); ++i) {
    const TypeDecl& t = mop.vocabulary.types[i];
    const auto& dom = mop.structure.type_domains[i];
    std::size_t expected = t.is_interval
                               ? (t.lo <= t.hi ? static_cast<std::size_t>(t.hi - t.lo + 1) : 0)
                               : t.labels.size();
    if (dom.size() != expected)
      diag("table-shape", "domain of type '" + t.name + "' does not match its declaration");
    if (dom.empty()) diag("empty-domain", "type '" + t.name + "' has an empty domain");
  }

  // Tables: interpreted symbols total, var symbols untouched.
  if (mop.structure.tables.size() != mop.vocabulary.symbols.size()) {
    diag("table-shape", "structure table list does not match the vocabulary");
    return report;
  }
  for (std::size_t s = 0; s < mop.vocabulary.symbols.size(); ++s) {
    const SymbolDecl& decl = mop.vocabulary.symbols[s];
    const auto& table = mop.structure.tables[s];
    if (decl.binding == Binding::Var) {
      if (table.has_value())
        diag("var-symbol-with-table",
             "var symbol '" + decl.name + "' must not be given a table");
      continue;
    }
    if (!table.has_value()) {
      diag("missing-table", "interpreted symbol '" + decl.name + "' has no table");
      continue;
    }
    const SymbolInfo& info = mop.info(static_cast<SymbolId>(s));
    if (table->entries.size() != info.table_size) {
      diag("table-shape", "table for '" + decl.name + "' has the wrong size");
      continue;
    }
    for (std::size_t i = 0; i < table->entries.size(); ++i) {
      long long v = table->entries[i];
      if (decl.kind == SymbolKind::Predicate) {
        if (v != 0 && v != 1) {
          diag("table-value", "predicate table for '" + decl.name + "' has a non-boolean entry");
          break;
        }
      } else if (v == kUnsetEntry) {
        diag("partial-function-table",
             "partial function table: '" + decl.name + "' is missing an input tuple");
        break;
      } else if (info.result_id >= 0 && !mop.type_contains(info.result_id, static_cast<ElemId>(v))) {
        diag("table-value",
             "table for '" + decl.name + "' maps a tuple outside its result type");
        break;
      }
    }
  }

  // Theory and objective.
  TypeChecker checker{mop, report, {}};
  for (const auto& f : mop.theory) checker.check_formula(f);
  if (!mop.objective_user) {
    diag("objective-missing", "model declares no objective");
  } else {
    TypeId ot = checker.term_type(mop.objective_user);
    if (ot != kTypeNone && !integer_typed(mop, ot))
      diag("objective-not-integer", "objective term must be integer-typed");
  }
  return report;
}

// --- assignment space -------------------------------------------------------

std::vector<TableCell> table_cells(const Mop& mop) {
  std::vector<TableCell> cells;
  for (SymbolId s : mop.var_symbols()) {
    const SymbolDecl& decl = mop.symbol(s);
    const SymbolInfo& info = mop.info(s);
    int values = decl.kind == SymbolKind::Predicate
                     ? 2
                     : static_cast<int>(mop.domain(info.result_id).size());
    for (std::size_t e = 0; e < info.table_size; ++e)
      cells.push_back({mop.var_ordinal(s), e, values, s});
  }
  return cells;
}

SpaceSize assignment_space_size(const Mop& mop, std::uint64_t bound) {
  unsigned __int128 acc = 1;
  for (const TableCell& cell : table_cells(mop)) {
    acc *= static_cast<unsigned __int128>(cell.num_values);
    if (acc > bound) return {true, 0};
  }
  return {false, static_cast<std::uint64_t>(acc)};
}

Assignment first_assignment(const Mop& mop) {
  Assignment a;
  a.tables.resize(mop.var_symbols().size());
  for (SymbolId s : mop.var_symbols()) {
    const SymbolDecl& decl = mop.symbol(s);
    const SymbolInfo& info = mop.info(s);
    Table& t = a.tables[mop.var_ordinal(s)];
    long long fill = decl.kind == SymbolKind::Predicate
                         ? 0
                         : static_cast<long long>(mop.domain(info.result_id)[0]);
    t.entries.assign(info.table_size, fill);
  }
  return a;
}

void set_cell(const Mop& mop, Assignment& a, const TableCell& cell, int digit) {
  const SymbolDecl& decl = mop.symbol(cell.symbol);
  long long v = decl.kind == SymbolKind::Predicate
                    ? digit
                    : static_cast<long long>(mop.domain(mop.info(cell.symbol).result_id)[digit]);
  a.tables[cell.var_ordinal].entries[cell.entry] = v;
}

bool well_typed(const Mop& mop, const Assignment& a) {
  if (a.tables.size() != mop.var_symbols().size()) return false;
  for (SymbolId s : mop.var_symbols()) {
    const SymbolDecl& decl = mop.symbol(s);
    const SymbolInfo& info = mop.info(s);
    const Table& t = a.tables[mop.var_ordinal(s)];
    if (t.entries.size() != info.table_size) return false;
    for (long long v : t.entries) {
      if (decl.kind == SymbolKind::Predicate) {
        if (v != 0 && v != 1) return false;
      } else if (!mop.type_contains(info.result_id, static_cast<ElemId>(v))) {
        return false;
      }
    }
  }
  return true;
}

AssignmentEnumerator::AssignmentEnumerator(const Mop& mop, std::uint64_t bound)
    : mop_(&mop), cells_(table_cells(mop)) {
  if (assignment_space_size(mop, bound).overflow)
    throw std::invalid_argument("assignment space exceeds the enumeration bound");
  digits_.assign(cells_.size(), 0);
}

void AssignmentEnumerator::reset() {
  digits_.assign(cells_.size(), 0);
  started_ = false;
  done_ = false;
}

bool AssignmentEnumerator::next(Assignment& out) {
  if (done_) return false;
  if (!started_) {
    started_ = true;
  } else {
    // Odometer with the last cell fastest: lexicographic over the
    // concatenated tables.
    int i = static_cast<int>(cells_.size()) - 1;
    while (i >= 0) {
      if (++digits_[i] < cells_[i].num_values) break;
      digits_[i] = 0;
      --i;
    }
    if (i < 0) {
      done_ = true;
      return false;
    }
  }
  out = first_assignment(*mop_);
  for (std::size_t i = 0; i < cells_.size(); ++i)
    if (digits_[i] != 0) set_cell(*mop_, out, cells_[i], digits_[i]);
  return true;
}

Assignment random_assignment(const Mop& mop, std::mt19937_64& rng) {
  Assignment a = first_assignment(mop);
  for (const TableCell& cell : table_cells(mop))
    set_cell(mop, a, cell, static_cast<int>(rng() % cell.num_values));
  return a;
}

// --- structural equality ----------------------------------------------------

namespace {

std::string table_fingerprint(const Mop& mop, SymbolId s, const Table& t) {
  const SymbolDecl& decl = mop.symbol(s);
  std::string out;
  for (long long v : t.entries) {
    if (decl.kind == SymbolKind::Predicate)
      out += v ? '1' : '0';
    else if (v == kUnsetEntry)
      out += '?';
    else if (mop.info(s).result_id == kTypeInt)
      out += std::to_string(v);
    else
      out += mop.structure.elements.display(static_cast<ElemId>(v));
    out += '|';
  }
  return out;
}

}  // namespace

bool mop_equal(const Mop& a, const Mop& b) {
  if (a.name != b.name || a.sense != b.sense) return false;
  if (a.vocabulary.types.size() != b.vocabulary.types.size()) return false;
  for (std::size_t i = 0; i < a.vocabulary.types.size(); ++i) {
    const TypeDecl& x = a.vocabulary.types[i];
    const TypeDecl& y = b.vocabulary.types[i];
    if (x.name != y.name || x.is_interval != y.is_interval || x.lo != y.lo ||
        x.hi != y.hi || x.labels != y.labels)
      return false;
  }
  if (a.vocabulary.symbols.size() != b.vocabulary.symbols.size()) return false;
  for (std::size_t i = 0; i < a.vocabulary.symbols.size(); ++i) {
    const SymbolDecl& x = a.vocabulary.symbols[i];
    const SymbolDecl& y = b.vocabulary.symbols[i];
    if (x.name != y.name || x.kind != y.kind || x.binding != y.binding ||
        x.arg_types != y.arg_types || x.result_type != y.result_type)
      return false;
  }
  for (std::size_t s = 0; s < a.vocabulary.symbols.size(); ++s) {
    const auto& ta = a.structure.tables[s];
    const auto& tb = b.structure.tables[s];
    if (ta.has_value() != tb.has_value()) return false;
    if (ta && table_fingerprint(a, static_cast<SymbolId>(s), *ta) !=
                  table_fingerprint(b, static_cast<SymbolId>(s), *tb))
      return false;
  }
  if (a.theory.size() != b.theory.size()) return false;
  for (std::size_t i = 0; i < a.theory.size(); ++i)
    if (!equal(a.theory[i], b.theory[i])) return false;
  return equal(a.objective_user, b.objective_user);
}

}  // namespace symloc
