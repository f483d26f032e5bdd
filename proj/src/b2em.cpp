#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

#include "ebx/emocl.hpp"
#include "ebx/syntax.hpp"

namespace ebx {

EmType EmType::named(std::string n) {
  EmType t;
  t.k = K::Named;
  t.name = std::move(n);
  return t;
}

EmType EmType::setOf(EmType elem) {
  EmType t;
  t.k = K::SetOf;
  t.a = std::make_shared<EmType>(std::move(elem));
  return t;
}

EmType EmType::pairOf(EmType first, EmType second) {
  EmType t;
  t.k = K::Pair;
  t.a = std::make_shared<EmType>(std::move(first));
  t.b = std::make_shared<EmType>(std::move(second));
  return t;
}

EmType EmType::fn(relval::FunctionKind kind, EmType dom, EmType ran) {
  EmType t;
  t.k = K::Fn;
  t.fnKind = kind;
  t.a = std::make_shared<EmType>(std::move(dom));
  t.b = std::make_shared<EmType>(std::move(ran));
  return t;
}

std::string effectiveName(const std::string& source) {
  for (char c : source)
    if (std::islower(static_cast<unsigned char>(c))) return source;
  std::string out = source;
  for (std::size_t i = 1; i < out.size(); ++i)
    out[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[i])));
  return out;
}

std::string EmType::show() const {
  switch (k) {
    case K::Named: return name;
    case K::SetOf: return "Set(" + a->show() + ")";
    case K::Pair: {
      // pair element types print as the effective names: Pair(Key, Key)
      auto side = [](const EmType& t) {
        return t.k == K::Named ? effectiveName(t.name) : t.show();
      };
      return "Pair(" + side(*a) + ", " + side(*b) + ")";
    }
    case K::Fn:
      return relval::kindName(fnKind) + "(" + a->show() + ", " + b->show() + ")";
  }
  return "?";
}

std::string EmOperation::signature() const {
  std::string out = name + "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ", ";
    out += params[i].name + ": " + params[i].typeText;
  }
  return out + ")";
}

const EmAttribute* EmOclModel::attribute(const std::string& source) const {
  for (const auto& a : staticAttrs)
    if (a.source == source) return &a;
  for (const auto& a : objectAttrs)
    if (a.source == source) return &a;
  return nullptr;
}

namespace {

EmType typeFromExpr(const ExprPtr& e, const ComponentEnv& env);

relval::FunctionKind kindOfArrowOp(ExprOp op) {
  switch (op) {
    case ExprOp::Rel: return relval::FunctionKind::Relation;
    case ExprOp::Pfun: return relval::FunctionKind::PartialFn;
    case ExprOp::Tfun: return relval::FunctionKind::TotalFn;
    case ExprOp::Pinj: return relval::FunctionKind::PartialInj;
    case ExprOp::Tinj: return relval::FunctionKind::TotalInj;
    case ExprOp::Psurj: return relval::FunctionKind::PartialSurj;
    case ExprOp::Tsurj: return relval::FunctionKind::TotalSurj;
    case ExprOp::Tbij: return relval::FunctionKind::TotalBij;
    default: throw NotATypingPredicate("not an arrow");
  }
}

// The EM-OCL type denoted by a set expression used in typing position.
EmType typeFromExpr(const ExprPtr& e, const ComponentEnv& env) {
  switch (e->op) {
    case ExprOp::Ident: {
      auto it = env.idents.find(e->name);
      if (it != env.idents.end() && it->second.role == "set") return EmType::named(e->name);
      // a set constant: its element type set
      if (it != env.idents.end()) return EmType::named(e->name);
      throw NotATypingPredicate("unknown set name " + e->name);
    }
    case ExprOp::Cprod:
      return EmType::pairOf(typeFromExpr(e->arg(0), env), typeFromExpr(e->arg(1), env));
    case ExprOp::Rel:
    case ExprOp::Pfun:
    case ExprOp::Tfun:
    case ExprOp::Pinj:
    case ExprOp::Tinj:
    case ExprOp::Psurj:
    case ExprOp::Tsurj:
    case ExprOp::Tbij:
      return EmType::fn(kindOfArrowOp(e->op), typeFromExpr(e->arg(0), env),
                        typeFromExpr(e->arg(1), env));
    case ExprOp::Pow:
    case ExprOp::Pow1:
      return EmType::setOf(typeFromExpr(e->arg(0), env));
    case ExprOp::Diff:  // (KEY ** KEY) \ id keeps the left type
    case ExprOp::Inter:
    case ExprOp::Union:
      return typeFromExpr(e->arg(0), env);
    default:
      throw NotATypingPredicate("expression is not type-shaped");
  }
}

// EmType from a semantic type, used for parameters reached through signatures.
EmType typeFromSem(const SemType& t) {
  switch (t.k) {
    case SemType::K::Carrier: return EmType::named(t.carrier);
    case SemType::K::Int: return EmType::named("Integer");
    case SemType::K::Bool: return EmType::named("Boolean");
    case SemType::K::Pair: return EmType::pairOf(typeFromSem(*t.a), typeFromSem(*t.b));
    case SemType::K::SetOf: return EmType::setOf(typeFromSem(*t.a));
    case SemType::K::Unknown: break;
  }
  throw NotATypingPredicate("untyped");
}

}  // namespace

EmType map_type(const ExprPtr& typingPred, const ComponentEnv& env) {
  if (typingPred->op == ExprOp::In) return typeFromExpr(typingPred->arg(1), env);
  if (typingPred->op == ExprOp::Subseteq)
    return EmType::setOf(typeFromExpr(typingPred->arg(1), env));
  throw NotATypingPredicate("expected x : E or x <: E");
}

// ---------------------------------------------------------------------------
// expression translation (Table 4.1)

namespace {

bool isSimpleReceiver(const std::string& s) {
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '@') return false;
  return true;
}

std::string receiver(const std::string& s) {
  return isSimpleReceiver(s) ? s : "(" + s + ")";
}

class Translator {
 public:
  explicit Translator(TranslateCtx& ctx) : ctx_(ctx) {}

  std::string pred(const ExprPtr& e) {
    switch (e->op) {
      case ExprOp::TrueLit: return "true";
      case ExprOp::FalseLit: return "false";
      case ExprOp::And: return pred(e->arg(0)) + " and " + pred(e->arg(1));
      case ExprOp::Or: return pred(e->arg(0)) + " or " + pred(e->arg(1));
      case ExprOp::Not: return "not " + pred(e->arg(0));
      case ExprOp::Imply: return pred(e->arg(0)) + " implies " + pred(e->arg(1));
      case ExprOp::Iff: {
        const std::string a = pred(e->arg(0)), b = pred(e->arg(1));
        return a + " implies " + b + " and " + b + " implies " + a;
      }
      case ExprOp::Forall:
      case ExprOp::Exists:
        return quantifier(e);
      case ExprOp::Eq: return equality(e->arg(0), e->arg(1), false);
      case ExprOp::Neq: return equality(e->arg(0), e->arg(1), true);
      case ExprOp::Lt: return expr(e->arg(0)) + "<" + expr(e->arg(1));
      case ExprOp::Le: return expr(e->arg(0)) + "<=" + expr(e->arg(1));
      case ExprOp::Gt: return expr(e->arg(0)) + ">" + expr(e->arg(1));
      case ExprOp::Ge: return expr(e->arg(0)) + ">=" + expr(e->arg(1));
      case ExprOp::In: return membership(e->arg(0), e->arg(1), false);
      case ExprOp::NotIn: return membership(e->arg(0), e->arg(1), true);
      case ExprOp::Subseteq:
        return receiver(expr(e->arg(1))) + "->includesAll(" + expr(e->arg(0)) + ")";
      case ExprOp::NotSubseteq:
        return receiver(expr(e->arg(1))) + "->excludesAll(" + expr(e->arg(0)) + ")";
      case ExprOp::Subset:
        return receiver(expr(e->arg(1))) + "->includesAll(" + expr(e->arg(0)) + ") and " +
               expr(e->arg(0)) + "<>" + expr(e->arg(1));
      case ExprOp::NotSubset:
        return "not (" + pred(mkExpr(ExprOp::Subset, {e->arg(0), e->arg(1)})) + ")";
      default:
        throw UntranslatableConstruct("predicate form has no EM-OCL image");
    }
  }

  std::string expr(const ExprPtr& e) {
    switch (e->op) {
      case ExprOp::Ident: {
        std::string n = name(e->name);
        if (ctx_.preStateReads.count(e->name)) n += "@pre";
        return n;
      }
      case ExprOp::IntLit: return std::to_string(e->intValue);
      case ExprOp::EmptySet: return "Set{}";
      case ExprOp::Maplet:
        return "Pair(" + expr(e->arg(0)) + ", " + expr(e->arg(1)) + ")";
      case ExprOp::Apply: return apply(e->arg(0), e->arg(1));
      case ExprOp::Dom: return receiver(expr(e->arg(0))) + "->domain()";
      case ExprOp::Ran: return receiver(expr(e->arg(0))) + "->range()";
      case ExprOp::Inverse: return receiver(expr(e->arg(0))) + "->inverse()";
      case ExprOp::Union: {
        if (e->arg(1)->op == ExprOp::SetExt && e->arg(1)->args.size() == 1)
          return receiver(expr(e->arg(0))) + "->including(" + expr(e->arg(1)->arg(0)) + ")";
        return receiver(expr(e->arg(0))) + "->union(" + expr(e->arg(1)) + ")";
      }
      case ExprOp::Inter:
        return receiver(expr(e->arg(0))) + "->intersection(" + expr(e->arg(1)) + ")";
      case ExprOp::Diff: {
        if (e->arg(1)->op == ExprOp::SetExt && e->arg(1)->args.size() == 1)
          return excluding(e->arg(0), e->arg(1)->arg(0));
        return receiver(expr(e->arg(0))) + "->excluding(" + expr(e->arg(1)) + ")";
      }
      case ExprOp::Cprod:
        return receiver(expr(e->arg(0))) + "->product(" + expr(e->arg(1)) + ")";
      case ExprOp::DomRes:
        return receiver(expr(e->arg(1))) + "->restrictionDomain(" + setArg(e->arg(0)) + ")";
      case ExprOp::DomSub:
        return receiver(expr(e->arg(1))) + "->soustractionDomain(" + setArg(e->arg(0)) + ")";
      case ExprOp::RanRes:
        return receiver(expr(e->arg(0))) + "->restrictionRange(" + setArg(e->arg(1)) + ")";
      case ExprOp::RanSub:
        return receiver(expr(e->arg(0))) + "->soustractionRange(" + setArg(e->arg(1)) + ")";
      case ExprOp::Dprod:
        return receiver(expr(e->arg(0))) + "->directProduct(" + expr(e->arg(1)) + ")";
      case ExprOp::Pprod:
        return receiver(expr(e->arg(0))) + "->ParallelProduct(" + expr(e->arg(1)) + ")";
      case ExprOp::Fcomp:
        return receiver(expr(e->arg(0))) + "->seqComposition(" + expr(e->arg(1)) + ")";
      case ExprOp::Add: return expr(e->arg(0)) + "+" + expr(e->arg(1));
      case ExprOp::Sub: return expr(e->arg(0)) + "-" + expr(e->arg(1));
      case ExprOp::Mul: return expr(e->arg(0)) + "*" + expr(e->arg(1));
      case ExprOp::Div: return expr(e->arg(0)) + "/" + expr(e->arg(1));
      case ExprOp::Card: return receiver(expr(e->arg(0))) + "->size()";
      case ExprOp::SetExt: {
        std::string out = "Set{";
        for (std::size_t i = 0; i < e->args.size(); ++i) {
          if (i) out += ", ";
          out += expr(e->args[i]);
        }
        return out + "}";
      }
      default:
        throw UntranslatableConstruct("expression form has no EM-OCL image");
    }
  }

  // v := ... / f(x) := ... posts (Rule 10); reads of variables carry @pre
  std::string post(const Action& a, const std::vector<std::string>& variables) {
    switch (a.kind) {
      case Action::Kind::Skip: {
        std::string out;
        for (std::size_t i = 0; i < variables.size(); ++i) {
          if (i) out += " and ";
          const std::string n = name(variables[i]);
          out += n + "=" + n + "@pre";
        }
        return out;
      }
      case Action::Kind::Deterministic: {
        std::string out;
        for (std::size_t i = 0; i < a.lhs.size(); ++i) {
          if (i) out += " and ";
          if (a.pointArgs[i]) {
            out += receiver(name(a.lhs[i])) + "->imageElt(" + expr(a.pointArgs[i]) + ")=" +
                   expr(a.rhs[i]);
          } else if (a.rhs[i]->op == ExprOp::EmptySet) {
            out += name(a.lhs[i]) + "->isEmpty()";
          } else if (a.rhs[i]->op == ExprOp::Diff &&
                     a.rhs[i]->arg(1)->op == ExprOp::SetExt &&
                     a.rhs[i]->arg(1)->args.size() == 1 &&
                     a.rhs[i]->arg(1)->arg(0)->op == ExprOp::Maplet) {
            // pair removal hoists its let over the whole equality:
            //   let cplN:Pair(A, B)=Pair[] in v=v@pre->excluding(cplN.make(x, y))
            const ExprPtr& base = a.rhs[i]->arg(0);
            const ExprPtr& elem = a.rhs[i]->arg(1)->arg(0);
            const int n = (*ctx_.pairCounter)++;
            const std::string var = "cpl" + std::to_string(n);
            out += "let " + var + ":" + pairTypeOf(base) + "=Pair[] in " + name(a.lhs[i]) + "=" +
                   receiver(expr(base)) + "->excluding(" + var + ".make(" + expr(elem->arg(0)) +
                   ", " + expr(elem->arg(1)) + "))";
          } else {
            out += name(a.lhs[i]) + "=" + expr(a.rhs[i]);
          }
        }
        return out;
      }
      case Action::Kind::MemberOf:
        return receiver(expr(a.rhs[0])) + "->includes(" + name(a.lhs[0]) + ")";
      case Action::Kind::SuchThat: {
        // v' reads become plain names, pre-state reads keep @pre
        return predPrimedAware(a.predicate);
      }
    }
    return "";
  }

  std::string predPrimedAware(const ExprPtr& e) {
    if (e->op == ExprOp::PrimedIdent) return name(e->name);
    if (e->args.empty()) return pred(e);
    return pred(e);  // PrimedIdent handled in expr() via rewrite below
  }

 private:
  TranslateCtx& ctx_;

  std::string name(const std::string& source) const {
    if (ctx_.names) {
      auto it = ctx_.names->find(source);
      if (it != ctx_.names->end()) return it->second;
    }
    return source;
  }

  bool isBound(const std::string& n) const {
    return std::find(ctx_.boundVars.begin(), ctx_.boundVars.end(), n) != ctx_.boundVars.end();
  }

  bool functionalIdent(const ExprPtr& f) const {
    if (f->op != ExprOp::Ident || !ctx_.env) return false;
    auto it = ctx_.env->idents.find(f->name);
    if (it == ctx_.env->idents.end()) return false;
    switch (it->second.arrow) {
      case ExprOp::Pfun:
      case ExprOp::Tfun:
      case ExprOp::Pinj:
      case ExprOp::Tinj:
      case ExprOp::Psurj:
      case ExprOp::Tsurj:
      case ExprOp::Tbij:
        return true;
      default:
        return false;
    }
  }

  std::string apply(const ExprPtr& f, const ExprPtr& x) {
    // inside a quantifier, application of a total function to the bound
    // variable prints as a method call: first(c) -> c.first()
    if (x->op == ExprOp::Ident && isBound(x->name) && f->op == ExprOp::Ident)
      return x->name + "." + f->name + "()";
    return receiver(expr(f)) + "->imageElt(" + expr(x) + ")";
  }

  std::string equality(const ExprPtr& lhs, const ExprPtr& rhs, bool negated) {
    if (rhs->op == ExprOp::EmptySet)
      return receiver(expr(lhs)) + (negated ? "->notEmpty()" : "->isEmpty()");
    if (lhs->op == ExprOp::EmptySet)
      return receiver(expr(rhs)) + (negated ? "->notEmpty()" : "->isEmpty()");
    return expr(lhs) + (negated ? "<>" : "=") + expr(rhs);
  }

  std::string membership(const ExprPtr& x, const ExprPtr& s, bool negated) {
    // pair membership in a functional relation: x |-> y : f  ~~>  f->imageElt(x)=y
    if (x->op == ExprOp::Maplet && functionalIdent(s)) {
      const std::string img =
          receiver(expr(s)) + "->imageElt(" + expr(x->arg(0)) + ")";
      return img + (negated ? "<>" : "=") + expr(x->arg(1));
    }
    const std::string fn = negated ? "->excludes(" : "->includes(";
    return receiver(expr(s)) + fn + expr(x) + ")";
  }

  std::string setArg(const ExprPtr& s) {
    // restriction operands unwrap singleton literals to the element
    if (s->op == ExprOp::SetExt && s->args.size() == 1) return expr(s->arg(0));
    return expr(s);
  }

  std::string excluding(const ExprPtr& base, const ExprPtr& elem) {
    if (elem->op == ExprOp::Maplet && ctx_.pairCounter && ctx_.env) {
      // pair removal goes through a typed let binding:
      //   let cplN:Pair(A, B)=Pair[] in base->excluding(cplN.make(x,y))
      const int n = (*ctx_.pairCounter)++;
      const std::string var = "cpl" + std::to_string(n);
      const std::string pairType = pairTypeOf(base);
      return "let " + var + ":" + pairType + "=Pair[] in " + receiver(expr(base)) +
             "->excluding(" + var + ".make(" + expr(elem->arg(0)) + ", " + expr(elem->arg(1)) +
             "))";
    }
    return receiver(expr(base)) + "->excluding(" + expr(elem) + ")";
  }

  std::string pairTypeOf(const ExprPtr& rel) {
    // the element type of a relation-valued expression, shown as Pair(A, B)
    const ExprPtr root = rel->op == ExprOp::Ident ? rel : nullptr;
    if (root && ctx_.env) {
      auto it = ctx_.env->idents.find(root->name);
      if (it != ctx_.env->idents.end() && it->second.type.k == SemType::K::SetOf &&
          it->second.type.a->k == SemType::K::Pair) {
        const SemType& p = *it->second.type.a;
        return "Pair(" + carrierSide(*p.a) + ", " + carrierSide(*p.b) + ")";
      }
    }
    throw UntranslatableConstruct("cannot determine the pair type for excluding()");
  }

  static std::string carrierSide(const SemType& t) {
    if (t.k == SemType::K::Carrier) return effectiveName(t.carrier);
    if (t.k == SemType::K::Pair)
      return "Pair(" + carrierSide(*t.a) + ", " + carrierSide(*t.b) + ")";
    return t.show();
  }

  std::string quantifier(const ExprPtr& e) {
    // !c.(c : SRC => P)  ~~>  Src->forAll(c: Elem | P')
    const char* oclName = e->op == ExprOp::Forall ? "->forAll(" : "->exists(";
    if (e->binds.size() != 1)
      throw UntranslatableConstruct("only single-variable quantifiers are translated");
    const std::string& bv = e->binds[0];
    const ExprPtr& body = e->arg(0);
    ExprPtr range, residue;
    if (e->op == ExprOp::Forall && body->op == ExprOp::Imply &&
        body->arg(0)->op == ExprOp::In && body->arg(0)->arg(0)->op == ExprOp::Ident &&
        body->arg(0)->arg(0)->name == bv) {
      range = body->arg(0)->arg(1);
      residue = body->arg(1);
    } else if (e->op == ExprOp::Exists && body->op == ExprOp::And &&
               body->arg(0)->op == ExprOp::In && body->arg(0)->arg(0)->op == ExprOp::Ident &&
               body->arg(0)->arg(0)->name == bv) {
      range = body->arg(0)->arg(1);
      residue = body->arg(1);
    } else {
      throw UntranslatableConstruct("quantifier body does not start with a typing membership");
    }
    std::string elemType;
    if (ctx_.env && range->op == ExprOp::Ident) {
      auto it = ctx_.env->idents.find(range->name);
      if (it != ctx_.env->idents.end() && it->second.type.k == SemType::K::SetOf)
        elemType = carrierSide(*it->second.type.a);
    }
    if (elemType.empty()) throw UntranslatableConstruct("cannot type the quantified variable");
    ctx_.boundVars.push_back(bv);
    const std::string inner = pred(residue);
    ctx_.boundVars.pop_back();
    return receiver(expr(range)) + oclName + bv + ": " + elemType + " | " + inner + ")";
  }
};

}  // namespace

std::string translate_expr(const ExprPtr& p, TranslateCtx& ctx) {
  Translator t(ctx);
  return t.pred(p);
}

// ---------------------------------------------------------------------------
// the transformation itself

namespace {

std::string lowercase(const std::string& s) {
  std::string out = s;
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

EmOclModel transform(const TransformInput& in) {
  const MachineAst& m = in.machine;
  const ContextAst& c = in.context;
  const ComponentEnv& env = in.analysis.env(m.name);

  EmOclModel model;
  // Rule 1: the machine becomes the fundamental class; a trailing _M<k> suffix
  // is dropped for readability (Hotel_M3 -> Hotel)
  std::string base = m.name;
  if (auto at = base.find("_M"); at != std::string::npos && at + 2 <= base.size()) {
    bool digits = at + 2 < base.size();
    for (std::size_t i = at + 2; i < base.size(); ++i)
      digits &= std::isdigit(static_cast<unsigned char>(base[i])) != 0;
    if (digits) base = base.substr(0, at);
  }
  model.className = base;

  std::map<std::string, std::string> names;  // source -> emitted
  // Rule 2: data types + effective-set attributes
  for (const auto& s : c.sets) {
    model.dataTypes.push_back(s);
    names[s] = effectiveName(s);
    model.objectAttrs.push_back({effectiveName(s), s, EmType::setOf(EmType::named(s))});
  }
  // Rules 3 and 5: constants become static attributes typed by their axioms
  for (const auto& k : c.constants) {
    const TypingInfo& info = env.idents.at(k);
    names[k] = effectiveName(k);
    EmType t = info.via == ExprOp::Subseteq
                   ? EmType::setOf(typeFromExpr(info.typeExpr, env))
                   : typeFromExpr(info.typeExpr, env);
    model.staticAttrs.push_back({effectiveName(k), k, t});
  }
  // Rules 4 and 6: variables become object attributes
  for (const auto& v : m.variables) {
    const TypingInfo& info = env.idents.at(v);
    names[v] = v;
    EmType t = info.via == ExprOp::Subseteq
                   ? EmType::setOf(typeFromExpr(info.typeExpr, env))
                   : typeFromExpr(info.typeExpr, env);
    model.objectAttrs.push_back({v, v, t});
  }

  int pairCounter = 0;
  auto freshCtx = [&]() {
    TranslateCtx ctx;
    ctx.env = &env;
    ctx.names = &names;
    ctx.pairCounter = &pairCounter;
    return ctx;
  };

  auto addConstraint = [&](EmConstraint con) { model.constraints.push_back(std::move(con)); };

  // Rule 2: not-empty invariants for the effective sets
  for (const auto& s : c.sets) {
    EmConstraint con;
    con.kind = EmConstraint::Kind::Inv;
    con.label = "not_empty_" + lowercase(s).substr(0, 5);
    con.text = names[s] + "->notEmpty()";
    con.original = s + " /= {}";
    con.isNotEmpty = true;
    addConstraint(con);
  }

  // Rules 5/14: axioms that are not pure typing become invariants
  auto containmentText = [&](const std::string& constantOrVar, const EmType& setType) {
    // the <: typing containment prints against the carrier image of the type:
    // issued <: KEY         -> Key->includesAll(issued)
    // CARD <: (KEY**KEY)\id -> (Key->product(Key))->includesAll(Card)
    std::function<std::string(const EmType&)> image = [&](const EmType& t) -> std::string {
      switch (t.k) {
        case EmType::K::Named: return effectiveName(t.name);
        case EmType::K::Pair:
          return receiver(image(*t.a)) + "->product(" + image(*t.b) + ")";
        default:
          throw UntranslatableConstruct("containment over a non-carrier type");
      }
    };
    return receiver(image(*setType.a)) + "->includesAll(" + names.at(constantOrVar) + ")";
  };

  auto handleLabeled = [&](const Labeled& item, bool isAxiom) {
    const PredClass cls = env.predClass.at(item.label);
    if (cls == PredClass::TypingOnly) return;
    EmConstraint con;
    con.kind = EmConstraint::Kind::Inv;
    con.label = item.label;
    con.original = print_expression(item.pred);
    con.sourcePred = item.pred;
    if (cls == PredClass::TypingAndConstraint && model.attribute(item.pred->arg(0)->name)) {
      // Rule 5/6 second half: the containment restated over the carriers
      const std::string subject = item.pred->arg(0)->name;
      con.isTypingContainment = true;
      con.text = containmentText(subject, model.attribute(subject)->type);
    } else {
      TranslateCtx ctx = freshCtx();
      try {
        con.text = translate_expr(item.pred, ctx);
      } catch (const UntranslatableConstruct& e) {
        con.text = std::string("-- untranslatable: ") + e.what();
        con.untranslatable = true;
      }
    }
    (void)isAxiom;
    addConstraint(con);
  };
  for (const auto& a : c.axioms) handleLabeled(a, true);
  for (const auto& inv : m.invariants) handleLabeled(inv, false);

  // Rule 7: INITIALISATION becomes the constructor
  const EventAst* init = m.findEvent("INITIALISATION");
  model.ctor.name = "initialisation";
  model.ctor.stereotype = "constructor";
  {
    std::set<std::string> used;
    for (const auto& s : c.sets) {
      std::string p(1, s[0]);
      if (!used.insert(p).second) p = s;
      model.ctor.params.push_back({p, "Set(" + s + ")"});
    }
    for (std::size_t i = 0; i < c.sets.size(); ++i) {
      EmConstraint pre;
      pre.kind = EmConstraint::Kind::Pre;
      pre.opName = model.ctor.name;
      pre.text = model.ctor.params[i].name + "->notEmpty()";
      pre.original = model.ctor.params[i].name + " /= {}";
      pre.isNotEmpty = true;
      addConstraint(pre);
    }
    for (std::size_t i = 0; i < c.sets.size(); ++i) {
      EmConstraint post;
      post.kind = EmConstraint::Kind::Post;
      post.opName = model.ctor.name;
      post.text = names[c.sets[i]] + "=" + model.ctor.params[i].name;
      post.original = c.sets[i] + " := " + model.ctor.params[i].name;
      addConstraint(post);
    }
    if (init) {
      for (const auto& a : init->actions) {
        EmConstraint post;
        post.kind = EmConstraint::Kind::Post;
        post.opName = model.ctor.name;
        post.label = a.label;
        post.sourceAction = a;
        TranslateCtx ctx = freshCtx();  // no pre-state in the constructor
        Translator tr(ctx);
        post.text = tr.post(a, m.variables);
        post.original = showAction(a);
        addConstraint(post);
      }
    }
  }

  // Rules 8-13: events become update operations
  for (const auto& ev : m.events) {
    if (ev.name == "INITIALISATION") continue;
    EmOperation op;
    op.name = ev.name;
    op.stereotype = "update";
    const auto& params = env.eventParams.at(ev.name);
    for (const auto& p : ev.params) {
      const TypingInfo& info = params.at(p);
      std::string typeText;
      if (info.sourceExpr && info.sourceExpr->op == ExprOp::Ident &&
          info.type.k == SemType::K::Carrier) {
        typeText = info.sourceExpr->name;  // carrier data type: g: GUEST
      } else {
        typeText = typeFromSem(info.type).show();  // element type: c: Pair(Key, Key)
      }
      op.params.push_back({p, typeText});
    }

    // Rule 13: one membership precondition per parameter whose type came from
    // a set-denoting source; labeled when a typing guard supplied it
    for (const auto& p : ev.params) {
      const TypingInfo& info = params.at(p);
      if (!info.sourceExpr || info.sourceExpr->op != ExprOp::Ident) continue;
      const std::string& src = info.sourceExpr->name;
      auto nameIt = names.find(src);
      if (nameIt == names.end()) continue;
      const bool labeled =
          !info.viaLabel.empty() &&
          env.predClass.count(ev.name + "/" + info.viaLabel) &&
          env.predClass.at(ev.name + "/" + info.viaLabel) == PredClass::TypingOnly;
      if (labeled) continue;  // the guard loop below emits it in guard order
      EmConstraint pre;
      pre.kind = EmConstraint::Kind::Pre;
      pre.opName = ev.name;
      pre.text = nameIt->second + "->includes(" + p + ")";
      pre.original = p + " : " + src;
      addConstraint(pre);
    }

    // Rule 9: guards become preconditions; typing guards become membership pres
    for (const auto& g : ev.guards) {
      EmConstraint pre;
      pre.kind = EmConstraint::Kind::Pre;
      pre.opName = ev.name;
      pre.label = g.label;
      pre.original = print_expression(g.pred);
      pre.sourcePred = g.pred;
      if (env.predClass.at(ev.name + "/" + g.label) == PredClass::TypingOnly) {
        const std::string& p = g.pred->arg(0)->name;
        const std::string& src = g.pred->arg(1)->name;
        pre.text = names.at(src) + "->includes(" + p + ")";
      } else {
        TranslateCtx ctx = freshCtx();
        try {
          pre.text = translate_expr(g.pred, ctx);
        } catch (const UntranslatableConstruct& e) {
          pre.text = std::string("-- untranslatable: ") + e.what();
          pre.untranslatable = true;
        }
      }
      addConstraint(pre);
    }

    // Rules 10/11: actions become postconditions; skip freezes the state
    const bool allSkip = std::all_of(ev.actions.begin(), ev.actions.end(), [](const Action& a) {
      return a.kind == Action::Kind::Skip;
    });
    if (allSkip) {
      EmConstraint post;
      post.kind = EmConstraint::Kind::Post;
      post.opName = ev.name;
      post.label = "skip";
      post.isSkipFrame = true;
      TranslateCtx ctx = freshCtx();
      for (const auto& v : m.variables) ctx.preStateReads.insert(v);
      Translator tr(ctx);
      Action skipAct;
      skipAct.kind = Action::Kind::Skip;
      post.text = tr.post(skipAct, m.variables);
      post.original = "skip";
      addConstraint(post);
    } else {
      for (const auto& a : ev.actions) {
        EmConstraint post;
        post.kind = EmConstraint::Kind::Post;
        post.opName = ev.name;
        post.label = a.label;
        post.sourceAction = a;
        TranslateCtx ctx = freshCtx();
        for (const auto& v : m.variables) ctx.preStateReads.insert(v);
        // the assignment target itself is post-state
        for (const auto& lhs : a.lhs) ctx.preStateReads.erase(lhs);
        // but reads of the assigned variable on the right-hand side are pre
        if (a.kind == Action::Kind::Deterministic)
          for (std::size_t i = 0; i < a.lhs.size(); ++i)
            if (!a.pointArgs[i] && a.rhs[i] && free_idents_shallow(a.rhs[i]).count(a.lhs[i]))
              ctx.preStateReads.insert(a.lhs[i]);
        Translator tr(ctx);
        try {
          post.text = tr.post(a, m.variables);
        } catch (const UntranslatableConstruct& e) {
          post.text = std::string("-- untranslatable: ") + e.what();
          post.untranslatable = true;
        }
        std::ostringstream os;
        if (a.kind == Action::Kind::Deterministic) {
          for (std::size_t i = 0; i < a.lhs.size(); ++i) {
            if (i) os << ", ";
            os << a.lhs[i];
            if (a.pointArgs[i]) os << "(" << print_expression(a.pointArgs[i]) << ")";
          }
          os << " := ";
          for (std::size_t i = 0; i < a.rhs.size(); ++i) {
            if (i) os << ", ";
            os << print_expression(a.rhs[i]);
          }
        } else if (a.kind == Action::Kind::MemberOf) {
          os << a.lhs[0] << " :: " << print_expression(a.rhs[0]);
        } else if (a.kind == Action::Kind::SuchThat) {
          os << a.lhs[0] << " :| " << print_expression(a.predicate);
        } else {
          os << "skip";
        }
        post.original = os.str();
        addConstraint(post);
      }
    }
    model.updates.push_back(std::move(op));
  }
  return model;
}

}  // namespace ebx
