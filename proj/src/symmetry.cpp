#include "symloc/symmetry.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace symloc {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// --- static analysis of the theory -----------------------------------------

// Everything check_des_pair needs to know about where the theory touches
// types, symbols and literals. Built once per detection run.
struct TheoryAnalysis {
  std::set<SymbolId> interpreted_in_theory;
  std::set<ElemId> label_literals;
  std::set<long long> int_literals;
  std::set<TypeId> types_under_arith;  // operand of order cmp, +/- or sum body
  std::set<TypeId> types_in_theory;    // binders, reachable cover, signatures
};

struct TheoryScanner {
  const Mop& mop;
  TheoryAnalysis& out;
  std::vector<std::pair<std::string, TypeId>> scope;

  TypeId lookup(const std::string& var) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == var) return it->second;
    return kTypeNone;
  }

  TypeId static_type(const TermPtr& t) const {
    switch (t->kind) {
      case TermNode::Kind::Variable:
        return lookup(t->name);
      case TermNode::Kind::Element: {
        auto id = mop.structure.elements.find_label(t->name);
        if (!id) return kTypeNone;
        for (std::size_t i = 0; i < mop.vocabulary.types.size(); ++i)
          if (mop.type_contains(static_cast<TypeId>(i), *id))
            return static_cast<TypeId>(i);
        return kTypeNone;
      }
      case TermNode::Kind::IntLit:
      case TermNode::Kind::Add:
      case TermNode::Kind::Sub:
      case TermNode::Kind::SumAgg:
      case TermNode::Kind::CountAgg:
        return kTypeInt;
      case TermNode::Kind::Apply: {
        auto s = mop.symbol_id(t->name);
        return s ? mop.info(*s).result_id : kTypeNone;
      }
    }
    return kTypeNone;
  }

  void note_symbol(const std::string& name) {
    auto s = mop.symbol_id(name);
    if (!s) return;
    if (!mop.is_var(*s)) out.interpreted_in_theory.insert(*s);
    for (TypeId t : mop.info(*s).arg_ids)
      if (t >= 0) out.types_in_theory.insert(t);
    if (mop.info(*s).result_id >= 0) out.types_in_theory.insert(mop.info(*s).result_id);
  }

  void note_arith_operand(const TermPtr& t) {
    TypeId ty = static_type(t);
    if (ty >= 0) out.types_under_arith.insert(ty);
  }

  void push_binder(const Binder& b) {
    auto t = mop.type_id(b.type);
    if (t) out.types_in_theory.insert(*t);
    scope.emplace_back(b.var, t ? *t : kTypeNone);
  }

  void scan_term(const TermPtr& t) {
    switch (t->kind) {
      case TermNode::Kind::Variable:
        return;
      case TermNode::Kind::Element: {
        auto id = mop.structure.elements.find_label(t->name);
        if (id) out.label_literals.insert(*id);
        return;
      }
      case TermNode::Kind::IntLit:
        out.int_literals.insert(t->value);
        return;
      case TermNode::Kind::Apply:
        note_symbol(t->name);
        for (const auto& a : t->args) scan_term(a);
        return;
      case TermNode::Kind::Add:
      case TermNode::Kind::Sub:
        note_arith_operand(t->args[0]);
        note_arith_operand(t->args[1]);
        scan_term(t->args[0]);
        scan_term(t->args[1]);
        return;
      case TermNode::Kind::SumAgg: {
        for (const auto& b : t->binders) push_binder(b);
        note_arith_operand(t->args[0]);
        scan_term(t->args[0]);
        if (t->guard) scan_formula(t->guard);
        scope.resize(scope.size() - t->binders.size());
        return;
      }
      case TermNode::Kind::CountAgg: {
        push_binder(t->binders[0]);
        scan_formula(t->guard);
        scope.pop_back();
        return;
      }
    }
  }

  void scan_formula(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaNode::Kind::Forall:
      case FormulaNode::Kind::Exists:
      case FormulaNode::Kind::Exists1:
        push_binder(f->binder);
        scan_formula(f->children[0]);
        scope.pop_back();
        return;
      case FormulaNode::Kind::And:
      case FormulaNode::Kind::Or:
      case FormulaNode::Kind::Not:
      case FormulaNode::Kind::Implies:
      case FormulaNode::Kind::Iff:
        for (const auto& c : f->children) scan_formula(c);
        return;
      case FormulaNode::Kind::Compare: {
        bool order = f->op != CompareOp::Eq && f->op != CompareOp::Ne;
        if (order) {
          note_arith_operand(f->terms[0]);
          note_arith_operand(f->terms[1]);
        }
        scan_term(f->terms[0]);
        scan_term(f->terms[1]);
        return;
      }
      case FormulaNode::Kind::PredApply:
        note_symbol(f->symbol);
        for (const auto& t : f->terms) scan_term(t);
        return;
      case FormulaNode::Kind::Reachable: {
        note_symbol(f->symbol);
        auto t = mop.type_id(f->cover_type);
        if (t) out.types_in_theory.insert(*t);
        scan_term(f->terms[0]);
        return;
      }
    }
  }
};

TheoryAnalysis analyze_theory(const Mop& mop) {
  TheoryAnalysis analysis;
  TheoryScanner scanner{mop, analysis, {}};
  for (const auto& f : mop.theory) scanner.scan_formula(f);
  return analysis;
}

// --- the swap itself --------------------------------------------------------

ElemId swap_elem(ElemId e, ElemId a, ElemId b) {
  if (e == a) return b;
  if (e == b) return a;
  return e;
}

// Flat index of the swap image of a tuple; nullopt when the image leaves a
// position's domain (possible only for overlapping types).
std::optional<std::size_t> image_index(const Mop& mop, const SymbolInfo& info,
                                       std::size_t flat, ElemId a, ElemId b) {
  std::size_t image = 0;
  for (std::size_t p = 0; p < info.arg_ids.size(); ++p) {
    TypeId t = info.arg_ids[p];
    const auto& dom = mop.domain(t);
    std::size_t idx = (flat / info.strides[p]) % dom.size();
    ElemId mapped = swap_elem(dom[idx], a, b);
    int mapped_idx = mop.domain_index(t, mapped);
    if (mapped_idx < 0) return std::nullopt;
    image += static_cast<std::size_t>(mapped_idx) * info.strides[p];
  }
  return image;
}

// Either swaps an element result, or swaps the raw integer value when the
// interpreted result type is int and the pair swaps integer elements.
std::optional<long long> image_value(const Mop& mop, const SymbolInfo& info,
                                     long long value, ElemId a, ElemId b) {
  if (info.result_id == kTypeNone) return value;  // predicate truth value
  if (info.result_id == kTypeInt) {
    const ElementTable& elems = mop.structure.elements;
    if (elems.is_int(a)) {
      long long va = elems.int_value(a), vb = elems.int_value(b);
      if (value == va) return vb;
      if (value == vb) return va;
    }
    return value;
  }
  ElemId mapped = swap_elem(static_cast<ElemId>(value), a, b);
  if (!mop.type_contains(info.result_id, mapped)) return std::nullopt;
  return static_cast<long long>(mapped);
}

bool table_invariant(const Mop& mop, SymbolId s, ElemId a, ElemId b) {
  const Table& table = *mop.structure.tables[s];
  const SymbolInfo& info = mop.info(s);
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    auto img = image_index(mop, info, i, a, b);
    if (!img) return false;
    auto val = image_value(mop, info, table.entries[i], a, b);
    if (!val) return false;
    if (table.entries[*img] != *val) return false;
  }
  return true;
}

std::vector<SymbolId> sigma_for(const Mop& mop, const std::vector<TypeId>& containing) {
  std::vector<SymbolId> sigma;
  for (SymbolId s : mop.var_symbols()) {
    for (TypeId t : containing) {
      if (mop.signature_mentions(s, t)) {
        sigma.push_back(s);
        break;
      }
    }
  }
  return sigma;
}

std::vector<TypeId> containing_types(const Mop& mop, ElemId a, ElemId b) {
  std::vector<TypeId> out;
  for (std::size_t t = 0; t < mop.vocabulary.types.size(); ++t) {
    TypeId id = static_cast<TypeId>(t);
    if (mop.type_contains(id, a) || mop.type_contains(id, b)) out.push_back(id);
  }
  return out;
}

}  // namespace

std::string RejectReason::code() const {
  switch (kind) {
    case Kind::InterpretedNotInvariant: return "interpreted-not-invariant";
    case Kind::LiteralInTheory: return "literal-in-theory";
    case Kind::TypeUnderArithmetic: return "type-under-arithmetic";
    case Kind::TypeSplitsPair: return "type-splits-pair";
    case Kind::SigmaPositionSplitsPair: return "sigma-position-splits-pair";
    case Kind::ObjectiveInvariant: return "objective-invariant";
  }
  return "unknown";
}

std::string RejectReason::text() const {
  switch (kind) {
    case Kind::InterpretedNotInvariant:
      return "interpreted symbol '" + detail + "' in the theory is not invariant under the swap";
    case Kind::LiteralInTheory:
      return "element '" + detail + "' occurs as a literal in the theory";
    case Kind::TypeUnderArithmetic:
      return "type '" + detail + "' is used under order comparisons or arithmetic in the theory";
    case Kind::TypeSplitsPair:
      return "type '" + detail + "' contains only one of the swapped elements";
    case Kind::SigmaPositionSplitsPair:
      return "var symbol '" + detail + "' ranges over a type containing only one of the swapped elements";
    case Kind::ObjectiveInvariant:
      return "objective-invariant";
  }
  return "unknown";
}

ClassifyPolicy auto_policy(const Mop& mop, std::uint32_t samples, std::uint64_t seed,
                           std::uint64_t space_bound) {
  ClassifyPolicy policy;
  policy.samples = samples;
  policy.seed = seed;
  policy.space_bound = space_bound;
  policy.kind = assignment_space_size(mop, space_bound).overflow
                    ? ClassifyPolicy::Kind::Sample
                    : ClassifyPolicy::Kind::Exhaustive;
  return policy;
}

std::vector<CandidatePair> candidate_pairs(const Mop& mop) {
  std::set<std::string> objective_symbols;
  symbols_in(mop.objective, objective_symbols);
  std::vector<SymbolId> objective_vars;
  for (const auto& name : objective_symbols) {
    auto s = mop.symbol_id(name);
    if (s && mop.is_var(*s)) objective_vars.push_back(*s);
  }

  std::vector<CandidatePair> pairs;
  for (std::size_t t = 0; t < mop.vocabulary.types.size(); ++t) {
    TypeId type = static_cast<TypeId>(t);
    bool candidate = false;
    for (SymbolId s : objective_vars)
      if (mop.signature_mentions(s, type)) candidate = true;
    if (!candidate) continue;
    const auto& dom = mop.domain(type);
    for (std::size_t i = 0; i < dom.size(); ++i)
      for (std::size_t j = i + 1; j < dom.size(); ++j)
        pairs.push_back({type, dom[i], dom[j]});
  }
  return pairs;
}

namespace {

std::variant<DesSymmetry, RejectReason> check_pair_impl(const Mop& mop,
                                                        const TheoryAnalysis& analysis,
                                                        TypeId type, ElemId a, ElemId b) {
  if (a == b || !mop.type_contains(type, a) || !mop.type_contains(type, b))
    throw std::invalid_argument("swap pair must be two distinct elements of the type");
  const ElementTable& elems = mop.structure.elements;
  std::vector<TypeId> containing = containing_types(mop, a, b);

  // (i) every interpreted symbol occurring in the theory whose signature
  // touches the swapped elements must have a swap-invariant interpretation.
  for (SymbolId s : analysis.interpreted_in_theory) {
    bool touches = false;
    for (TypeId t : containing)
      if (mop.signature_mentions(s, t)) touches = true;
    if (elems.is_int(a) && mop.info(s).result_id == kTypeInt) touches = true;
    if (touches && !table_invariant(mop, s, a, b))
      return RejectReason{RejectReason::Kind::InterpretedNotInvariant,
                          mop.symbol(s).name};
  }

  // (ii) neither element may occur as a literal in the theory.
  if (elems.is_int(a)) {
    if (analysis.int_literals.count(elems.int_value(a)))
      return RejectReason{RejectReason::Kind::LiteralInTheory, elems.display(a)};
    if (analysis.int_literals.count(elems.int_value(b)))
      return RejectReason{RejectReason::Kind::LiteralInTheory, elems.display(b)};
  } else {
    if (analysis.label_literals.count(a))
      return RejectReason{RejectReason::Kind::LiteralInTheory, elems.display(a)};
    if (analysis.label_literals.count(b))
      return RejectReason{RejectReason::Kind::LiteralInTheory, elems.display(b)};
  }

  // (iii) no type containing the pair may feed order comparisons or
  // arithmetic in the theory; swaps do not commute with either.
  for (TypeId t : containing)
    if (analysis.types_under_arith.count(t))
      return RejectReason{RejectReason::Kind::TypeUnderArithmetic, mop.type(t).name};

  // (iv)/(v) overlapping types must not separate the pair where the theory
  // quantifies over them or a var symbol ranges over them.
  for (TypeId t : containing) {
    bool has_a = mop.type_contains(t, a);
    bool has_b = mop.type_contains(t, b);
    if (has_a && has_b) continue;
    if (analysis.types_in_theory.count(t))
      return RejectReason{RejectReason::Kind::TypeSplitsPair, mop.type(t).name};
    for (SymbolId s : mop.var_symbols())
      if (mop.signature_mentions(s, t))
        return RejectReason{RejectReason::Kind::SigmaPositionSplitsPair,
                            mop.symbol(s).name};
  }

  DesSymmetry sym;
  sym.type = type;
  sym.a = a;
  sym.b = b;
  sym.sigma = sigma_for(mop, containing);
  return sym;
}

}  // namespace

std::variant<DesSymmetry, RejectReason> check_des_pair(const Mop& mop, TypeId type,
                                                       ElemId a, ElemId b) {
  TheoryAnalysis analysis = analyze_theory(mop);
  return check_pair_impl(mop, analysis, type, a, b);
}

Assignment apply_symmetry(const Mop& mop, const DesSymmetry& s, const Assignment& a) {
  Assignment out = a;
  for (SymbolId sym : s.sigma) {
    const SymbolInfo& info = mop.info(sym);
    const Table& src = a.tables[mop.var_ordinal(sym)];
    Table& dst = out.tables[mop.var_ordinal(sym)];
    for (std::size_t i = 0; i < src.entries.size(); ++i) {
      auto img = image_index(mop, info, i, s.a, s.b);
      auto val = image_value(mop, info, src.entries[i], s.a, s.b);
      if (!img || !val)
        throw std::invalid_argument("symmetry image leaves the domain of '" +
                                    mop.symbol(sym).name + "'");
      dst.entries[*img] = *val;
    }
  }
  return out;
}

Classification classify_variance(const Mop& mop, const DesSymmetry& s,
                                 const ClassifyPolicy& policy) {
  Classification result;
  switch (policy.kind) {
    case ClassifyPolicy::Kind::Syntactic: {
      std::set<std::string> objective_symbols;
      symbols_in(mop.objective, objective_symbols);
      bool overlap = false;
      for (SymbolId sym : s.sigma)
        if (objective_symbols.count(mop.symbol(sym).name)) overlap = true;
      result.kind = overlap ? Classification::Kind::Unclassified
                            : Classification::Kind::InvariantProved;
      return result;
    }
    case ClassifyPolicy::Kind::Exhaustive: {
      if (assignment_space_size(mop, policy.space_bound).overflow)
        throw std::invalid_argument(
            "assignment space too large for exhaustive classification");
      AssignmentEnumerator enumerator(mop, policy.space_bound);
      Assignment a;
      while (enumerator.next(a)) {
        Assignment image = apply_symmetry(mop, s, a);
        if (objective_internal(mop, a) != objective_internal(mop, image)) {
          result.kind = Classification::Kind::Variant;
          result.witness = a;
          return result;
        }
      }
      result.kind = Classification::Kind::InvariantProved;
      return result;
    }
    case ClassifyPolicy::Kind::Sample: {
      std::mt19937_64 rng(mix(policy.seed, mix(static_cast<std::uint64_t>(s.type),
                                               mix(static_cast<std::uint64_t>(s.a),
                                                   static_cast<std::uint64_t>(s.b)))));
      for (std::uint32_t i = 0; i < policy.samples; ++i) {
        Assignment a = random_assignment(mop, rng);
        Assignment image = apply_symmetry(mop, s, a);
        if (objective_internal(mop, a) != objective_internal(mop, image)) {
          result.kind = Classification::Kind::Variant;
          result.witness = a;
          return result;
        }
      }
      result.kind = Classification::Kind::InvariantSampled;
      result.samples = policy.samples;
      return result;
    }
  }
  return result;
}

DetectionReport detect(const Mop& mop, const DetectOptions& options) {
  auto start = std::chrono::steady_clock::now();
  DetectionReport report;
  report.policy = options.policy;
  TheoryAnalysis analysis = analyze_theory(mop);

  for (const CandidatePair& pair : candidate_pairs(mop)) {
    ++report.candidates_checked;
    std::variant<DesSymmetry, RejectReason> checked;
    if (options.skip_structural_checks) {
      DesSymmetry sym;
      sym.type = pair.type;
      sym.a = pair.a;
      sym.b = pair.b;
      sym.sigma = sigma_for(mop, containing_types(mop, pair.a, pair.b));
      checked = sym;
    } else {
      checked = check_pair_impl(mop, analysis, pair.type, pair.a, pair.b);
    }
    if (std::holds_alternative<RejectReason>(checked)) {
      report.rejected.push_back(
          {pair.type, pair.a, pair.b, std::get<RejectReason>(checked)});
      continue;
    }
    DesSymmetry sym = std::get<DesSymmetry>(checked);
    sym.classification = classify_variance(mop, sym, options.policy);
    if (sym.classification.kind == Classification::Kind::InvariantProved ||
        sym.classification.kind == Classification::Kind::InvariantSampled) {
      report.rejected.push_back(
          {pair.type, pair.a, pair.b,
           RejectReason{RejectReason::Kind::ObjectiveInvariant, ""}});
    } else {
      report.symmetries.push_back(std::move(sym));
    }
  }
  report.elapsed = std::chrono::steady_clock::now() - start;
  return report;
}

VerificationReport verify_symmetry(const Mop& mop, const DesSymmetry& s,
                                   const VerifyBudget& budget) {
  VerificationReport report;
  SpaceSize space = assignment_space_size(mop, budget.exhaustive_limit);
  if (!space.overflow) {
    report.exhaustive = true;
    AssignmentEnumerator enumerator(mop, budget.exhaustive_limit);
    Assignment a;
    while (enumerator.next(a)) {
      ++report.checked;
      Assignment image = apply_symmetry(mop, s, a);
      if (check_model(mop, a) != check_model(mop, image)) {
        report.pass = false;
        report.counterexample = a;
        return report;
      }
    }
    return report;
  }
  std::mt19937_64 rng(mix(budget.seed, mix(static_cast<std::uint64_t>(s.type),
                                           mix(static_cast<std::uint64_t>(s.a),
                                               static_cast<std::uint64_t>(s.b)))));
  for (std::uint32_t i = 0; i < budget.samples; ++i) {
    ++report.checked;
    Assignment a = random_assignment(mop, rng);
    Assignment image = apply_symmetry(mop, s, a);
    if (check_model(mop, a) != check_model(mop, image)) {
      report.pass = false;
      report.counterexample = a;
      return report;
    }
  }
  return report;
}

}  // namespace symloc
