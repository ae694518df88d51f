#include "symloc/evaluator.hpp"

#include <deque>

namespace symloc {

namespace {

long long as_int(const Value& v, const Mop& mop) {
  if (!v.is_elem) return v.num;
  if (mop.structure.elements.is_int(v.elem))
    return mop.structure.elements.int_value(v.elem);
  throw EvalError("element '" + mop.structure.elements.label(v.elem) +
                  "' used where an integer is required");
}

bool value_eq(const Value& a, const Value& b, const Mop& mop) {
  const ElementTable& elems = mop.structure.elements;
  if (a.is_elem && b.is_elem) return a.elem == b.elem;
  // Mixed: an interval element equals the plain integer with its value.
  const Value& e = a.is_elem ? a : b;
  const Value& n = a.is_elem ? b : a;
  if (e.is_elem) {
    if (!elems.is_int(e.elem)) return false;
    return elems.int_value(e.elem) == n.num;
  }
  return a.num == b.num;
}

long long checked_add(long long a, long long b) {
  __int128 r = static_cast<__int128>(a) + b;
  if (r > INT64_MAX || r < INT64_MIN) throw EvalError("integer overflow");
  return static_cast<long long>(r);
}

long long checked_sub(long long a, long long b) {
  __int128 r = static_cast<__int128>(a) - b;
  if (r > INT64_MAX || r < INT64_MIN) throw EvalError("integer overflow");
  return static_cast<long long>(r);
}

const Table& symbol_table(const Mop& mop, const Assignment& a, SymbolId s) {
  if (mop.is_var(s)) return a.tables[mop.var_ordinal(s)];
  return *mop.structure.tables[s];
}

std::size_t flat_index(const Mop& mop, SymbolId s, const std::vector<Value>& args) {
  const SymbolInfo& info = mop.info(s);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    TypeId t = info.arg_ids[i];
    int pos;
    if (args[i].is_elem) {
      pos = mop.domain_index(t, args[i].elem);
    } else {
      auto e = mop.structure.elements.find_int(args[i].num);
      pos = e ? mop.domain_index(t, *e) : -1;
    }
    if (pos < 0)
      throw EvalError("value outside type '" + mop.type(t).name + "' in application of '" +
                      mop.symbol(s).name + "'");
    idx += static_cast<std::size_t>(pos) * info.strides[i];
  }
  return idx;
}

bool eval_reachable(const FormulaNode& f, const Mop& mop, const Assignment& a, Env& env);

}  // namespace

Value eval_term(const TermPtr& t, const Mop& mop, const Assignment& a, Env& env) {
  switch (t->kind) {
    case TermNode::Kind::Variable: {
      const Value* v = env.lookup(t->name);
      if (!v) throw EvalError("unbound variable '" + t->name + "'");
      return *v;
    }
    case TermNode::Kind::Element: {
      auto id = mop.structure.elements.find_label(t->name);
      if (!id) throw EvalError("unknown element '" + t->name + "'");
      return Value::of_elem(*id);
    }
    case TermNode::Kind::IntLit:
      return Value::of_int(t->value);
    case TermNode::Kind::Apply: {
      SymbolId s = *mop.symbol_id(t->name);
      std::vector<Value> args;
      args.reserve(t->args.size());
      for (const auto& arg : t->args) args.push_back(eval_term(arg, mop, a, env));
      const Table& table = symbol_table(mop, a, s);
      long long entry = table.entries[flat_index(mop, s, args)];
      if (mop.info(s).result_id == kTypeInt) return Value::of_int(entry);
      return Value::of_elem(static_cast<ElemId>(entry));
    }
    case TermNode::Kind::Add:
      return Value::of_int(checked_add(as_int(eval_term(t->args[0], mop, a, env), mop),
                                       as_int(eval_term(t->args[1], mop, a, env), mop)));
    case TermNode::Kind::Sub:
      return Value::of_int(checked_sub(as_int(eval_term(t->args[0], mop, a, env), mop),
                                       as_int(eval_term(t->args[1], mop, a, env), mop)));
    case TermNode::Kind::SumAgg: {
      // Enumerates the typed product in canonical domain order; no
      // short-circuiting, so results are reproducible.
      long long total = 0;
      std::vector<const std::vector<ElemId>*> domains;
      for (const auto& b : t->binders) domains.push_back(&mop.domain(*mop.type_id(b.type)));
      std::vector<std::size_t> pos(t->binders.size(), 0);
      bool more = true;
      for (const auto* d : domains)
        if (d->empty()) more = false;
      while (more) {
        for (std::size_t i = 0; i < pos.size(); ++i)
          env.push(t->binders[i].var, Value::of_elem((*domains[i])[pos[i]]));
        bool keep = !t->guard || eval_formula(t->guard, mop, a, env);
        if (keep) total = checked_add(total, as_int(eval_term(t->args[0], mop, a, env), mop));
        for (std::size_t i = 0; i < pos.size(); ++i) env.pop();
        int i = static_cast<int>(pos.size()) - 1;
        while (i >= 0) {
          if (++pos[i] < domains[i]->size()) break;
          pos[i] = 0;
          --i;
        }
        if (i < 0) more = false;
      }
      return Value::of_int(total);
    }
    case TermNode::Kind::CountAgg: {
      long long total = 0;
      const auto& dom = mop.domain(*mop.type_id(t->binders[0].type));
      for (ElemId e : dom) {
        env.push(t->binders[0].var, Value::of_elem(e));
        if (eval_formula(t->guard, mop, a, env)) ++total;
        env.pop();
      }
      return Value::of_int(total);
    }
  }
  throw EvalError("malformed term");
}

bool eval_formula(const FormulaPtr& f, const Mop& mop, const Assignment& a, Env& env) {
  switch (f->kind) {
    case FormulaNode::Kind::Forall:
    case FormulaNode::Kind::Exists:
    case FormulaNode::Kind::Exists1: {
      const auto& dom = mop.domain(*mop.type_id(f->binder.type));
      int witnesses = 0;
      for (ElemId e : dom) {
        env.push(f->binder.var, Value::of_elem(e));
        bool holds = eval_formula(f->children[0], mop, a, env);
        env.pop();
        if (f->kind == FormulaNode::Kind::Forall) {
          if (!holds) return false;
        } else if (holds) {
          ++witnesses;
          if (f->kind == FormulaNode::Kind::Exists) return true;
          if (witnesses > 1) return false;  // exists1 early exit
        }
      }
      if (f->kind == FormulaNode::Kind::Forall) return true;
      if (f->kind == FormulaNode::Kind::Exists) return false;
      return witnesses == 1;
    }
    case FormulaNode::Kind::And:
      for (const auto& c : f->children)
        if (!eval_formula(c, mop, a, env)) return false;
      return true;
    case FormulaNode::Kind::Or:
      for (const auto& c : f->children)
        if (eval_formula(c, mop, a, env)) return true;
      return false;
    case FormulaNode::Kind::Not:
      return !eval_formula(f->children[0], mop, a, env);
    case FormulaNode::Kind::Implies:
      return !eval_formula(f->children[0], mop, a, env) ||
             eval_formula(f->children[1], mop, a, env);
    case FormulaNode::Kind::Iff:
      return eval_formula(f->children[0], mop, a, env) ==
             eval_formula(f->children[1], mop, a, env);
    case FormulaNode::Kind::Compare: {
      Value lhs = eval_term(f->terms[0], mop, a, env);
      Value rhs = eval_term(f->terms[1], mop, a, env);
      switch (f->op) {
        case CompareOp::Eq: return value_eq(lhs, rhs, mop);
        case CompareOp::Ne: return !value_eq(lhs, rhs, mop);
        case CompareOp::Lt: return as_int(lhs, mop) < as_int(rhs, mop);
        case CompareOp::Le: return as_int(lhs, mop) <= as_int(rhs, mop);
        case CompareOp::Gt: return as_int(lhs, mop) > as_int(rhs, mop);
        case CompareOp::Ge: return as_int(lhs, mop) >= as_int(rhs, mop);
      }
      return false;
    }
    case FormulaNode::Kind::PredApply: {
      SymbolId s = *mop.symbol_id(f->symbol);
      std::vector<Value> args;
      args.reserve(f->terms.size());
      for (const auto& arg : f->terms) args.push_back(eval_term(arg, mop, a, env));
      const Table& table = symbol_table(mop, a, s);
      return table.entries[flat_index(mop, s, args)] != 0;
    }
    case FormulaNode::Kind::Reachable:
      return eval_reachable(*f, mop, a, env);
  }
  throw EvalError("malformed formula");
}

namespace {

// Least fixpoint of "reachable from start via Rel", then coverage of the
// named type. The start element itself counts as reached.
bool eval_reachable(const FormulaNode& f, const Mop& mop, const Assignment& a, Env& env) {
  Value start = eval_term(f.terms[0], mop, a, env);
  ElemId start_id = -1;
  if (start.is_elem) {
    start_id = start.elem;
  } else if (auto e = mop.structure.elements.find_int(start.num)) {
    start_id = *e;
  } else {
    return mop.domain(*mop.type_id(f.cover_type)).empty();
  }

  SymbolId rel = *mop.symbol_id(f.symbol);
  const SymbolInfo& info = mop.info(rel);
  const Table& table = symbol_table(mop, a, rel);
  TypeId from_type = info.arg_ids[0];
  TypeId to_type = info.arg_ids[1];
  const auto& to_dom = mop.domain(to_type);

  std::vector<char> visited(mop.structure.elements.size(), 0);
  std::deque<ElemId> frontier;
  visited[start_id] = 1;
  frontier.push_back(start_id);
  while (!frontier.empty()) {
    ElemId e = frontier.front();
    frontier.pop_front();
    int row = mop.domain_index(from_type, e);
    if (row < 0) continue;
    std::size_t base = static_cast<std::size_t>(row) * to_dom.size();
    for (std::size_t j = 0; j < to_dom.size(); ++j) {
      if (!table.entries[base + j]) continue;
      ElemId next = to_dom[j];
      if (!visited[next]) {
        visited[next] = 1;
        frontier.push_back(next);
      }
    }
  }
  for (ElemId e : mop.domain(*mop.type_id(f.cover_type)))
    if (!visited[e]) return false;
  return true;
}

}  // namespace

bool check_model(const Mop& mop, const Assignment& a) {
  Env env;
  for (const auto& f : mop.theory)
    if (!eval_formula(f, mop, a, env)) return false;
  return true;
}

long long objective_internal(const Mop& mop, const Assignment& a) {
  Env env;
  return as_int(eval_term(mop.objective, mop, a, env), mop);
}

long long objective_value(const Mop& mop, const Assignment& a) {
  long long internal = objective_internal(mop, a);
  return mop.sense == Sense::Maximize ? -internal : internal;
}

}  // namespace symloc
