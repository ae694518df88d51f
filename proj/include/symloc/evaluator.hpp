#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symloc/model.hpp"

namespace symloc {

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

// A value flowing through evaluation: a domain element or a plain integer.
// Elements of interval types are both at once (their integer payload is used
// wherever arithmetic needs it).
struct Value {
  bool is_elem = false;
  ElemId elem = -1;
  long long num = 0;

  static Value of_elem(ElemId e) { return {true, e, 0}; }
  static Value of_int(long long v) { return {false, -1, v}; }
};

// Bindings for the quantified variables currently in scope.
class Env {
 public:
  void push(const std::string& var, Value v) { stack_.emplace_back(var, v); }
  void pop() { stack_.pop_back(); }
  const Value* lookup(const std::string& var) const {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it)
      if (it->first == var) return &it->second;
    return nullptr;
  }
  bool empty() const { return stack_.empty(); }

 private:
  std::vector<std::pair<std::string, Value>> stack_;
};

// Tarskian evaluation over the structure J extended by the assignment.
// Throws EvalError on integer overflow.
bool eval_formula(const FormulaPtr& f, const Mop& mop, const Assignment& a, Env& env);
Value eval_term(const TermPtr& t, const Mop& mop, const Assignment& a, Env& env);

// True iff every theory formula holds under the empty environment.
bool check_model(const Mop& mop, const Assignment& a);

// Objective in the sense the model declared (maximize values are reported
// positively even though the search minimizes their negation).
long long objective_value(const Mop& mop, const Assignment& a);

// Objective in the internal minimization sense, used by search and
// classification code.
long long objective_internal(const Mop& mop, const Assignment& a);

}  // namespace symloc
