// Finite evaluation of predicates and expressions over instantiated carriers.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ebx/analysis.hpp"
#include "ebx/value.hpp"

namespace ebx {

// Instantiated carrier sets plus the bounded integer range used when an
// integer-typed identifier has to be enumerated.
struct Universe {
  std::map<std::string, int> carrierSizes;
  long long intMin = 0;
  long long intMax = 3;
  std::size_t enumCap = 500000;

  Value carrier(const std::string& name) const;
};

struct EvalEnv {
  std::map<std::string, Value> consts;
  std::map<std::string, Value> vars;
  std::map<std::string, Value> primed;          // post-state values of variables
  std::vector<std::pair<std::string, Value>> locals;  // params and bound variables

  const Value* lookupLocal(const std::string& name) const;
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Evaluator {
 public:
  Evaluator(const Analysis& analysis, const Universe& universe)
      : analysis_(analysis), universe_(universe) {}

  Value eval(const ExprPtr& e, EvalEnv& env) const;
  bool evalPred(const ExprPtr& e, EvalEnv& env) const;

  // Every value of a semantic type, in canonical order. Cap-guarded.
  std::vector<Value> domainOfType(const SemType& t) const;

  const Universe& universe() const { return universe_; }

  // Bound-variable types for quantifiers built outside the type checker
  // (FIS/WFIS goals synthesized by pogen).
  void setExtraBinds(const std::map<const Expr*, std::vector<SemType>>* binds) {
    extraBinds_ = binds;
  }

 private:
  bool membership(const Value& x, const ExprPtr& setExpr, EvalEnv& env) const;

  const Analysis& analysis_;
  const Universe& universe_;
  const std::map<const Expr*, std::vector<SemType>>* extraBinds_ = nullptr;
};

// Free identifiers of an expression (quantifier-bound names excluded; primed
// identifiers are reported with a trailing quote).
std::set<std::string> free_idents(const ExprPtr& e);

}  // namespace ebx
