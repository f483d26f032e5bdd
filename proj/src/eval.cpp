#include "ebx/eval.hpp"

#include <algorithm>
#include <functional>

namespace ebx {

using relval::CombineOp;
using relval::FunctionKind;
using relval::RestrictMode;

Value Universe::carrier(const std::string& name) const {
  auto it = carrierSizes.find(name);
  if (it == carrierSizes.end()) throw EvalError("carrier " + name + " has no size in scope");
  std::vector<Value> atoms;
  for (int i = 0; i < it->second; ++i) atoms.push_back(Value::atom(name, i));
  return Value::set(std::move(atoms));
}

const Value* EvalEnv::lookupLocal(const std::string& name) const {
  for (auto it = locals.rbegin(); it != locals.rend(); ++it)
    if (it->first == name) return &it->second;
  return nullptr;
}

namespace {

FunctionKind kindOfArrow(ExprOp op) {
  switch (op) {
    case ExprOp::Rel: return FunctionKind::Relation;
    case ExprOp::Pfun: return FunctionKind::PartialFn;
    case ExprOp::Tfun: return FunctionKind::TotalFn;
    case ExprOp::Pinj: return FunctionKind::PartialInj;
    case ExprOp::Tinj: return FunctionKind::TotalInj;
    case ExprOp::Psurj: return FunctionKind::PartialSurj;
    case ExprOp::Tsurj: return FunctionKind::TotalSurj;
    case ExprOp::Tbij: return FunctionKind::TotalBij;
    default: throw EvalError("not an arrow");
  }
}

}  // namespace

std::vector<Value> Evaluator::domainOfType(const SemType& t) const {
  switch (t.k) {
    case SemType::K::Carrier: {
      const Value c = universe_.carrier(t.carrier);
      return c.elems();
    }
    case SemType::K::Bool:
      return {Value::boolean(false), Value::boolean(true)};
    case SemType::K::Int: {
      std::vector<Value> out;
      for (long long v = universe_.intMin; v <= universe_.intMax; ++v)
        out.push_back(Value::integer(v));
      return out;
    }
    case SemType::K::Pair: {
      std::vector<Value> out;
      for (const auto& a : domainOfType(*t.a))
        for (const auto& b : domainOfType(*t.b)) out.push_back(Value::pair(a, b));
      std::sort(out.begin(), out.end());
      return out;
    }
    case SemType::K::SetOf: {
      const std::vector<Value> elems = domainOfType(*t.a);
      if (elems.size() > 20 || (std::size_t{1} << elems.size()) > universe_.enumCap)
        throw CapExceeded("set-type enumeration over " + std::to_string(elems.size()) +
                          " elements exceeds the cap");
      std::vector<Value> out;
      for (std::size_t mask = 0; mask < (std::size_t{1} << elems.size()); ++mask) {
        std::vector<Value> members;
        for (std::size_t i = 0; i < elems.size(); ++i)
          if (mask & (std::size_t{1} << i)) members.push_back(elems[i]);
        out.push_back(Value::set(std::move(members)));
      }
      std::sort(out.begin(), out.end());
      return out;
    }
    case SemType::K::Unknown:
      throw EvalError("cannot enumerate an unresolved type");
  }
  return {};
}

bool Evaluator::membership(const Value& x, const ExprPtr& setExpr, EvalEnv& env) const {
  switch (setExpr->op) {
    case ExprOp::Pow: {
      const Value s = eval(setExpr->arg(0), env);
      for (const auto& e : x.elems())
        if (!s.contains(e)) return false;
      return true;
    }
    case ExprOp::Pow1: {
      if (x.size() == 0) return false;
      const Value s = eval(setExpr->arg(0), env);
      for (const auto& e : x.elems())
        if (!s.contains(e)) return false;
      return true;
    }
    case ExprOp::NatSet:
      return x.tag() == Value::Tag::Int && x.asInt() >= 0;
    case ExprOp::IntSet:
      return x.tag() == Value::Tag::Int;
    case ExprOp::Cprod: {
      if (!x.isPair()) return false;
      return membership(x.first(), setExpr->arg(0), env) &&
             membership(x.second(), setExpr->arg(1), env);
    }
    case ExprOp::Rel:
    case ExprOp::Pfun:
    case ExprOp::Tfun:
    case ExprOp::Pinj:
    case ExprOp::Tinj:
    case ExprOp::Psurj:
    case ExprOp::Tsurj:
    case ExprOp::Tbij: {
      const Value d = eval(setExpr->arg(0), env);
      const Value c = eval(setExpr->arg(1), env);
      return relval::conforms(x, kindOfArrow(setExpr->op), d, c);
    }
    default:
      return eval(setExpr, env).contains(x);
  }
}

Value Evaluator::eval(const ExprPtr& e, EvalEnv& env) const {
  switch (e->op) {
    case ExprOp::Ident: {
      if (const Value* v = env.lookupLocal(e->name)) return *v;
      if (auto it = env.vars.find(e->name); it != env.vars.end()) return it->second;
      if (auto it = env.consts.find(e->name); it != env.consts.end()) return it->second;
      if (universe_.carrierSizes.count(e->name)) return universe_.carrier(e->name);
      throw EvalError("no value for identifier " + e->name);
    }
    case ExprOp::PrimedIdent: {
      // an existentially quantified post-state variable shadows the frame
      if (const Value* v = env.lookupLocal(e->name + "'")) return *v;
      auto it = env.primed.find(e->name);
      if (it == env.primed.end()) throw EvalError("no post-state value for " + e->name + "'");
      return it->second;
    }
    case ExprOp::IntLit: return Value::integer(e->intValue);
    case ExprOp::TrueLit: return Value::boolean(true);
    case ExprOp::FalseLit: return Value::boolean(false);
    case ExprOp::EmptySet: return Value::emptySet();
    case ExprOp::NatSet:
    case ExprOp::IntSet: {
      std::vector<Value> out;
      for (long long v = e->op == ExprOp::NatSet ? std::max(0LL, universe_.intMin)
                                                 : universe_.intMin;
           v <= universe_.intMax; ++v)
        out.push_back(Value::integer(v));
      return Value::set(std::move(out));
    }
    case ExprOp::SetExt: {
      std::vector<Value> out;
      for (const auto& a : e->args) out.push_back(eval(a, env));
      return Value::set(std::move(out));
    }
    case ExprOp::Maplet:
      return Value::pair(eval(e->arg(0), env), eval(e->arg(1), env));
    case ExprOp::Union: return relval::combine(eval(e->arg(0), env), eval(e->arg(1), env), CombineOp::Union);
    case ExprOp::Inter: return relval::combine(eval(e->arg(0), env), eval(e->arg(1), env), CombineOp::Intersection);
    case ExprOp::Diff: return relval::combine(eval(e->arg(0), env), eval(e->arg(1), env), CombineOp::Difference);
    case ExprOp::Cprod: return relval::combine(eval(e->arg(0), env), eval(e->arg(1), env), CombineOp::CartesianProduct);
    case ExprOp::Override: return relval::combine(eval(e->arg(0), env), eval(e->arg(1), env), CombineOp::Override);
    case ExprOp::Fcomp: return relval::combine(eval(e->arg(0), env), eval(e->arg(1), env), CombineOp::FwdCompose);
    case ExprOp::Dprod: return relval::combine(eval(e->arg(0), env), eval(e->arg(1), env), CombineOp::DirectProduct);
    case ExprOp::Pprod: return relval::combine(eval(e->arg(0), env), eval(e->arg(1), env), CombineOp::ParallelProduct);
    case ExprOp::DomRes: return relval::restrict(eval(e->arg(1), env), eval(e->arg(0), env), RestrictMode::DomRestrict);
    case ExprOp::DomSub: return relval::restrict(eval(e->arg(1), env), eval(e->arg(0), env), RestrictMode::DomSubtract);
    case ExprOp::RanRes: return relval::restrict(eval(e->arg(0), env), eval(e->arg(1), env), RestrictMode::RanRestrict);
    case ExprOp::RanSub: return relval::restrict(eval(e->arg(0), env), eval(e->arg(1), env), RestrictMode::RanSubtract);
    case ExprOp::Dom: return relval::domainOf(eval(e->arg(0), env));
    case ExprOp::Ran: return relval::rangeOf(eval(e->arg(0), env));
    case ExprOp::Inverse: return relval::inverseOf(eval(e->arg(0), env));
    case ExprOp::Image: return relval::imageOf(eval(e->arg(0), env), eval(e->arg(1), env));
    case ExprOp::Apply: return relval::applyAt(eval(e->arg(0), env), eval(e->arg(1), env));
    case ExprOp::Id: return relval::identityOver(eval(e->arg(0), env));
    case ExprOp::IdBare: {
      auto it = analysis_.idCarriers.find(e.get());
      if (it == analysis_.idCarriers.end())
        throw EvalError("bare id was not elaborated by the type checker");
      return relval::identityOver(universe_.carrier(it->second));
    }
    case ExprOp::Pow: return relval::powersetOf(eval(e->arg(0), env));
    case ExprOp::Pow1: {
      const Value p = relval::powersetOf(eval(e->arg(0), env));
      std::vector<Value> out;
      for (const auto& s : p.elems())
        if (s.size() > 0) out.push_back(s);
      return Value::set(std::move(out));
    }
    case ExprOp::Card: return Value::integer(static_cast<long long>(eval(e->arg(0), env).size()));
    case ExprOp::Add: return Value::integer(eval(e->arg(0), env).asInt() + eval(e->arg(1), env).asInt());
    case ExprOp::Sub: return Value::integer(eval(e->arg(0), env).asInt() - eval(e->arg(1), env).asInt());
    case ExprOp::Mul: return Value::integer(eval(e->arg(0), env).asInt() * eval(e->arg(1), env).asInt());
    case ExprOp::Div: {
      const long long d = eval(e->arg(1), env).asInt();
      if (d == 0) throw ApplyUndefined("division by zero");
      return Value::integer(eval(e->arg(0), env).asInt() / d);
    }
    default:
      return Value::boolean(evalPred(e, env));
  }
}

bool Evaluator::evalPred(const ExprPtr& e, EvalEnv& env) const {
  switch (e->op) {
    case ExprOp::TrueLit: return true;
    case ExprOp::FalseLit: return false;
    case ExprOp::And: return evalPred(e->arg(0), env) && evalPred(e->arg(1), env);
    case ExprOp::Or: return evalPred(e->arg(0), env) || evalPred(e->arg(1), env);
    case ExprOp::Not: return !evalPred(e->arg(0), env);
    case ExprOp::Imply: return !evalPred(e->arg(0), env) || evalPred(e->arg(1), env);
    case ExprOp::Iff: return evalPred(e->arg(0), env) == evalPred(e->arg(1), env);
    case ExprOp::Eq: return eval(e->arg(0), env) == eval(e->arg(1), env);
    case ExprOp::Neq: return !(eval(e->arg(0), env) == eval(e->arg(1), env));
    case ExprOp::Lt: return eval(e->arg(0), env).asInt() < eval(e->arg(1), env).asInt();
    case ExprOp::Le: return eval(e->arg(0), env).asInt() <= eval(e->arg(1), env).asInt();
    case ExprOp::Gt: return eval(e->arg(0), env).asInt() > eval(e->arg(1), env).asInt();
    case ExprOp::Ge: return eval(e->arg(0), env).asInt() >= eval(e->arg(1), env).asInt();
    case ExprOp::In: return membership(eval(e->arg(0), env), e->arg(1), env);
    case ExprOp::NotIn: return !membership(eval(e->arg(0), env), e->arg(1), env);
    case ExprOp::Subseteq:
    case ExprOp::Subset:
    case ExprOp::NotSubseteq:
    case ExprOp::NotSubset: {
      const Value lhs = eval(e->arg(0), env);
      bool all = true;
      for (const auto& x : lhs.elems())
        if (!membership(x, e->arg(1), env)) {
          all = false;
          break;
        }
      if (e->op == ExprOp::Subseteq) return all;
      if (e->op == ExprOp::NotSubseteq) return !all;
      const bool strict = all && !(eval(e->arg(1), env) == lhs);
      return e->op == ExprOp::Subset ? strict : !strict;
    }
    case ExprOp::Forall:
    case ExprOp::Exists: {
      auto it = analysis_.quantBinds.find(e.get());
      const std::vector<SemType>* types = nullptr;
      if (it != analysis_.quantBinds.end()) {
        types = &it->second;
      } else if (extraBinds_) {
        auto jt = extraBinds_->find(e.get());
        if (jt != extraBinds_->end()) types = &jt->second;
      }
      if (!types) throw EvalError("quantifier without inferred bound types");
      const bool forall = e->op == ExprOp::Forall;
      std::function<bool(std::size_t)> loop = [&](std::size_t i) -> bool {
        if (i == e->binds.size()) return evalPred(e->arg(0), env);
        for (const auto& v : domainOfType((*types)[i])) {
          env.locals.emplace_back(e->binds[i], v);
          const bool b = loop(i + 1);
          env.locals.pop_back();
          if (forall && !b) return false;
          if (!forall && b) return true;
        }
        return forall;
      };
      return loop(0);
    }
    default:
      return eval(e, env).asBool();
  }
}

std::set<std::string> free_idents(const ExprPtr& e) {
  std::set<std::string> out;
  std::function<void(const ExprPtr&, std::vector<std::string>&)> go =
      [&](const ExprPtr& x, std::vector<std::string>& bound) {
        if (x->op == ExprOp::Ident || x->op == ExprOp::PrimedIdent) {
          if (std::find(bound.begin(), bound.end(), x->name) == bound.end())
            out.insert(x->op == ExprOp::PrimedIdent ? x->name + "'" : x->name);
          return;
        }
        const std::size_t before = bound.size();
        for (const auto& b : x->binds) bound.push_back(b);
        for (const auto& a : x->args) go(a, bound);
        bound.resize(before);
      };
  std::vector<std::string> bound;
  go(e, bound);
  return out;
}

}  // namespace ebx
