#include "symloc/ast.hpp"

namespace symloc {

namespace {

std::shared_ptr<TermNode> term_node(TermNode::Kind kind, SourceSpan span) {
  auto n = std::make_shared<TermNode>();
  n->kind = kind;
  n->span = std::move(span);
  return n;
}

std::shared_ptr<FormulaNode> formula_node(FormulaNode::Kind kind, SourceSpan span) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = kind;
  n->span = std::move(span);
  return n;
}

}  // namespace

TermPtr t_var(std::string name, SourceSpan span) {
  auto n = term_node(TermNode::Kind::Variable, std::move(span));
  n->name = std::move(name);
  return n;
}

TermPtr t_elem(std::string label, SourceSpan span) {
  auto n = term_node(TermNode::Kind::Element, std::move(span));
  n->name = std::move(label);
  return n;
}

TermPtr t_int(long long value, SourceSpan span) {
  auto n = term_node(TermNode::Kind::IntLit, std::move(span));
  n->value = value;
  return n;
}

TermPtr t_apply(std::string symbol, std::vector<TermPtr> args, SourceSpan span) {
  auto n = term_node(TermNode::Kind::Apply, std::move(span));
  n->name = std::move(symbol);
  n->args = std::move(args);
  return n;
}

TermPtr t_add(TermPtr lhs, TermPtr rhs, SourceSpan span) {
  auto n = term_node(TermNode::Kind::Add, std::move(span));
  n->args = {std::move(lhs), std::move(rhs)};
  return n;
}

TermPtr t_sub(TermPtr lhs, TermPtr rhs, SourceSpan span) {
  auto n = term_node(TermNode::Kind::Sub, std::move(span));
  n->args = {std::move(lhs), std::move(rhs)};
  return n;
}

TermPtr t_sum(TermPtr body, std::vector<Binder> binders, FormulaPtr guard,
              SourceSpan span) {
  auto n = term_node(TermNode::Kind::SumAgg, std::move(span));
  n->args = {std::move(body)};
  n->binders = std::move(binders);
  n->guard = std::move(guard);
  return n;
}

TermPtr t_count(Binder binder, FormulaPtr guard, SourceSpan span) {
  auto n = term_node(TermNode::Kind::CountAgg, std::move(span));
  n->binders = {std::move(binder)};
  n->guard = std::move(guard);
  return n;
}

FormulaPtr f_quant(FormulaNode::Kind kind, Binder binder, FormulaPtr body,
                   SourceSpan span) {
  auto n = formula_node(kind, std::move(span));
  n->binder = std::move(binder);
  n->children = {std::move(body)};
  return n;
}

FormulaPtr f_connective(FormulaNode::Kind kind, std::vector<FormulaPtr> children,
                        SourceSpan span) {
  auto n = formula_node(kind, std::move(span));
  n->children = std::move(children);
  return n;
}

FormulaPtr f_not(FormulaPtr f, SourceSpan span) {
  auto n = formula_node(FormulaNode::Kind::Not, std::move(span));
  n->children = {std::move(f)};
  return n;
}

FormulaPtr f_compare(CompareOp op, TermPtr lhs, TermPtr rhs, SourceSpan span) {
  auto n = formula_node(FormulaNode::Kind::Compare, std::move(span));
  n->op = op;
  n->terms = {std::move(lhs), std::move(rhs)};
  return n;
}

FormulaPtr f_pred(std::string symbol, std::vector<TermPtr> args, SourceSpan span) {
  auto n = formula_node(FormulaNode::Kind::PredApply, std::move(span));
  n->symbol = std::move(symbol);
  n->terms = std::move(args);
  return n;
}

FormulaPtr f_reachable(TermPtr start, std::string relation, std::string cover_type,
                       SourceSpan span) {
  auto n = formula_node(FormulaNode::Kind::Reachable, std::move(span));
  n->terms = {std::move(start)};
  n->symbol = std::move(relation);
  n->cover_type = std::move(cover_type);
  return n;
}

bool equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->name != b->name || a->value != b->value) return false;
  if (a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!equal(a->args[i], b->args[i])) return false;
  if (a->binders.size() != b->binders.size()) return false;
  for (std::size_t i = 0; i < a->binders.size(); ++i)
    if (a->binders[i].var != b->binders[i].var ||
        a->binders[i].type != b->binders[i].type)
      return false;
  return equal(a->guard, b->guard);
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->op != b->op || a->symbol != b->symbol ||
      a->cover_type != b->cover_type)
    return false;
  if (a->binder.var != b->binder.var || a->binder.type != b->binder.type) return false;
  if (a->children.size() != b->children.size()) return false;
  for (std::size_t i = 0; i < a->children.size(); ++i)
    if (!equal(a->children[i], b->children[i])) return false;
  if (a->terms.size() != b->terms.size()) return false;
  for (std::size_t i = 0; i < a->terms.size(); ++i)
    if (!equal(a->terms[i], b->terms[i])) return false;
  return true;
}

void symbols_in(const TermPtr& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->kind == TermNode::Kind::Apply) out.insert(t->name);
  for (const auto& a : t->args) symbols_in(a, out);
  symbols_in(t->guard, out);
}

void symbols_in(const FormulaPtr& f, std::set<std::string>& out) {
  if (!f) return;
  if (f->kind == FormulaNode::Kind::PredApply ||
      f->kind == FormulaNode::Kind::Reachable)
    out.insert(f->symbol);
  for (const auto& c : f->children) symbols_in(c, out);
  for (const auto& t : f->terms) symbols_in(t, out);
}

}  // namespace symloc
