#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace symloc {

// Location of a token in a model source file. line/column are 1-based.
struct SourceSpan {
  std::string file;
  int line = 1;
  int column = 1;
  int length = 0;
};

struct FormulaNode;
struct TermNode;
using FormulaPtr = std::shared_ptr<const FormulaNode>;
using TermPtr = std::shared_ptr<const TermNode>;

// One quantified variable, `x in City`.
struct Binder {
  std::string var;
  std::string type;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

struct TermNode {
  enum class Kind {
    Variable,  // bound variable occurrence
    Element,   // domain element literal
    IntLit,    // integer literal
    Apply,     // function/constant application
    Add,
    Sub,
    SumAgg,    // sum { body | binders, guard? }
    CountAgg,  // count { x in T | guard }
  };

  Kind kind;
  SourceSpan span;
  std::string name;             // Variable name, Element label, Apply symbol
  long long value = 0;          // IntLit
  std::vector<TermPtr> args;    // Apply arguments; Add/Sub operands; SumAgg body at [0]
  std::vector<Binder> binders;  // SumAgg / CountAgg
  FormulaPtr guard;             // SumAgg (may be null), CountAgg (required)
};

struct FormulaNode {
  enum class Kind {
    Forall,
    Exists,
    Exists1,
    And,
    Or,
    Not,
    Implies,
    Iff,
    Compare,    // term op term
    PredApply,  // P(t1,...,tn)
    Reachable,  // reachable(start, Rel, Type)
  };

  Kind kind;
  SourceSpan span;
  Binder binder;                     // quantifiers
  std::vector<FormulaPtr> children;  // quantifier body at [0]; connective operands
  CompareOp op = CompareOp::Eq;
  std::vector<TermPtr> terms;        // Compare [lhs,rhs]; PredApply args; Reachable [start]
  std::string symbol;                // PredApply predicate / Reachable relation
  std::string cover_type;            // Reachable: type whose elements must all be reached
};

// Node factories.
TermPtr t_var(std::string name, SourceSpan span = {});
TermPtr t_elem(std::string label, SourceSpan span = {});
TermPtr t_int(long long value, SourceSpan span = {});
TermPtr t_apply(std::string symbol, std::vector<TermPtr> args, SourceSpan span = {});
TermPtr t_add(TermPtr lhs, TermPtr rhs, SourceSpan span = {});
TermPtr t_sub(TermPtr lhs, TermPtr rhs, SourceSpan span = {});
TermPtr t_sum(TermPtr body, std::vector<Binder> binders, FormulaPtr guard,
              SourceSpan span = {});
TermPtr t_count(Binder binder, FormulaPtr guard, SourceSpan span = {});

FormulaPtr f_quant(FormulaNode::Kind kind, Binder binder, FormulaPtr body,
                   SourceSpan span = {});
FormulaPtr f_connective(FormulaNode::Kind kind, std::vector<FormulaPtr> children,
                        SourceSpan span = {});
FormulaPtr f_not(FormulaPtr f, SourceSpan span = {});
FormulaPtr f_compare(CompareOp op, TermPtr lhs, TermPtr rhs, SourceSpan span = {});
FormulaPtr f_pred(std::string symbol, std::vector<TermPtr> args, SourceSpan span = {});
FormulaPtr f_reachable(TermPtr start, std::string relation, std::string cover_type,
                       SourceSpan span = {});

// Structural equality; spans are ignored.
bool equal(const TermPtr& a, const TermPtr& b);
bool equal(const FormulaPtr& a, const FormulaPtr& b);

// Names of all predicate/function/constant symbols applied in a subtree,
// including the relation symbol of reachable atoms.
void symbols_in(const TermPtr& t, std::set<std::string>& out);
void symbols_in(const FormulaPtr& f, std::set<std::string>& out);

}  // namespace symloc
