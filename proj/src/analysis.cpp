#include "ebx/analysis.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "ebx/syntax.hpp"

namespace ebx {

const Component* Project::find(const std::string& name) const {
  auto it = components.find(name);
  return it == components.end() ? nullptr : &it->second;
}

const MachineAst* Project::machine(const std::string& name) const {
  const Component* c = find(name);
  return c && c->isMachine() ? &*c->machine : nullptr;
}

const ContextAst* Project::context(const std::string& name) const {
  const Component* c = find(name);
  return c && !c->isMachine() ? &*c->context : nullptr;
}

Project load_project(const std::string& dir) {
  Project p;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto ext = entry.path().extension().string();
    if (ext == ".ebm" || ext == ".ebc") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    std::ostringstream os;
    os << in.rdbuf();
    p.add(parse_component(os.str()));
  }
  return p;
}

SemType SemType::setOf(SemType elem) {
  SemType t;
  t.k = K::SetOf;
  t.a = std::make_shared<SemType>(std::move(elem));
  return t;
}

SemType SemType::pairOf(SemType first, SemType second) {
  SemType t;
  t.k = K::Pair;
  t.a = std::make_shared<SemType>(std::move(first));
  t.b = std::make_shared<SemType>(std::move(second));
  return t;
}

std::string SemType::show() const {
  switch (k) {
    case K::Unknown: return "?";
    case K::Bool: return "BOOL";
    case K::Int: return "INT";
    case K::Carrier: return carrier;
    case K::SetOf: return "POW(" + a->show() + ")";
    case K::Pair: return a->show() + " ** " + b->show();
  }
  return "?";
}

bool compatible(const SemType& x, const SemType& y) { return unify(x, y).has_value(); }

std::optional<SemType> unify(const SemType& x, const SemType& y) {
  if (x.k == SemType::K::Unknown) return y;
  if (y.k == SemType::K::Unknown) return x;
  if (x.k != y.k) return std::nullopt;
  switch (x.k) {
    case SemType::K::Bool:
    case SemType::K::Int:
      return x;
    case SemType::K::Carrier:
      return x.carrier == y.carrier ? std::optional<SemType>(x) : std::nullopt;
    case SemType::K::SetOf: {
      auto e = unify(*x.a, *y.a);
      if (!e) return std::nullopt;
      return SemType::setOf(*e);
    }
    case SemType::K::Pair: {
      auto a = unify(*x.a, *y.a);
      auto b = unify(*x.b, *y.b);
      if (!a || !b) return std::nullopt;
      return SemType::pairOf(*a, *b);
    }
    default:
      return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// structure

namespace {

template <typename GetEdges>
bool findCycle(const std::string& start, GetEdges edges, std::vector<std::string>& cyclePath) {
  std::vector<std::string> stack{start};
  std::set<std::string> onPath{start};
  std::function<bool(const std::string&)> dfs = [&](const std::string& node) -> bool {
    for (const std::string& next : edges(node)) {
      if (onPath.count(next)) {
        cyclePath = stack;
        cyclePath.push_back(next);
        return true;
      }
      stack.push_back(next);
      onPath.insert(next);
      if (dfs(next)) return true;
      onPath.erase(next);
      stack.pop_back();
    }
    return false;
  };
  return dfs(start);
}

}  // namespace

StructureReport check_structure(const Project& project) {
  StructureReport rep;
  auto flag = [&](std::string code, std::string comp, std::string detail, SourcePos pos = {}) {
    rep.findings.push_back({std::move(code), std::move(comp), std::move(detail), pos});
  };

  auto extendsEdges = [&](const std::string& n) -> std::vector<std::string> {
    const ContextAst* c = project.context(n);
    return c ? c->extends : std::vector<std::string>{};
  };
  auto refinesEdges = [&](const std::string& n) -> std::vector<std::string> {
    const MachineAst* m = project.machine(n);
    if (m && m->refines) return {*m->refines};
    return {};
  };

  for (const auto& [name, comp] : project.components) {
    if (!comp.isMachine()) {
      const ContextAst& ctx = *comp.context;
      for (const auto& e : ctx.extends)
        if (!project.context(e))
          flag("DanglingReference", name, "EXTENDS " + e + " does not name a context", ctx.pos);
      std::vector<std::string> cyc;
      if (findCycle(name, extendsEdges, cyc)) {
        std::string path;
        for (const auto& n : cyc) path += (path.empty() ? "" : " -> ") + n;
        flag("Cycle", name, "extends cycle: " + path, ctx.pos);
      }
    } else {
      const MachineAst& m = *comp.machine;
      if (m.refines && !project.machine(*m.refines))
        flag("DanglingReference", name, "REFINES " + *m.refines + " does not name a machine",
             m.pos);
      for (const auto& s : m.sees)
        if (!project.context(s))
          flag("DanglingReference", name, "SEES " + s + " does not name a context", m.pos);
      std::vector<std::string> cyc;
      if (findCycle(name, refinesEdges, cyc)) {
        std::string path;
        for (const auto& n : cyc) path += (path.empty() ? "" : " -> ") + n;
        flag("Cycle", name, "refines cycle: " + path, m.pos);
      }
      int inits = 0;
      for (const auto& ev : m.events) inits += ev.name == "INITIALISATION";
      if (inits != 1)
        flag("MissingInitialisation", name,
             "machine has " + std::to_string(inits) + " INITIALISATION events", m.pos);
      if (m.refines && project.machine(*m.refines)) {
        const MachineAst* abs = project.machine(*m.refines);
        for (const auto& ev : m.events)
          for (const auto& target : ev.refines)
            if (!abs->findEvent(target))
              flag("DanglingReference", name,
                   "event " + ev.name + " refines unknown abstract event " + target, ev.pos);
      }
    }
  }
  if (!rep.findings.empty()) return rep;  // closures need an acyclic, complete graph

  // extends closures, ancestors first
  std::function<void(const std::string&, std::vector<std::string>&)> expand =
      [&](const std::string& name, std::vector<std::string>& out) {
        const ContextAst* c = project.context(name);
        if (!c) return;
        for (const auto& parent : c->extends) expand(parent, out);
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
      };
  for (const auto& [name, comp] : project.components) {
    if (comp.isMachine()) continue;
    std::vector<std::string> closure;
    expand(name, closure);
    rep.extendsClosure[name] = closure;

    // duplicate sets/constants across the closure
    std::map<std::string, std::string> owner;
    for (const auto& cn : closure) {
      const ContextAst* c = project.context(cn);
      for (const auto& lists : {c->sets, c->constants}) {
        for (const auto& id : lists) {
          auto [it, fresh] = owner.emplace(id, cn);
          if (!fresh && it->second != cn)
            flag("NameClash", name, id + " declared in both " + it->second + " and " + cn);
        }
      }
    }
  }

  for (const auto& [name, comp] : project.components) {
    if (!comp.isMachine()) continue;
    std::vector<std::string> chain;
    std::string cur = name;
    while (true) {
      chain.insert(chain.begin(), cur);
      const MachineAst* m = project.machine(cur);
      if (!m || !m->refines) break;
      cur = *m->refines;
    }
    rep.refinesChain[name] = chain;

    std::vector<std::string> ctxs;
    for (const auto& mn : chain) {
      const MachineAst* m = project.machine(mn);
      for (const auto& seen : m->sees) {
        std::vector<std::string> closure;
        expand(seen, closure);
        for (const auto& cn : closure)
          if (std::find(ctxs.begin(), ctxs.end(), cn) == ctxs.end()) ctxs.push_back(cn);
      }
    }
    rep.contextClosure[name] = ctxs;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// typing

namespace {

class TypeChecker {
 public:
  TypeChecker(Analysis& out, std::map<std::string, TypingInfo>& idents)
      : out_(out), idents_(idents) {}

  // Local scope for event params / witnesses layered over the component idents.
  std::map<std::string, TypingInfo>* locals = nullptr;

  SemType typeOf(const ExprPtr& e) {
    switch (e->op) {
      case ExprOp::Ident:
      case ExprOp::PrimedIdent: {
        for (auto it = binds_.rbegin(); it != binds_.rend(); ++it)
          if (it->first == e->name) return it->second;
        if (locals) {
          auto it = locals->find(e->name);
          if (it != locals->end()) return it->second.type;
        }
        auto it = idents_.find(e->name);
        if (it == idents_.end())
          throw UntypedIdentifier("untyped identifier " + e->name);
        if (it->second.type.k == SemType::K::Unknown)
          throw UntypedIdentifier("untyped identifier " + e->name);
        return it->second.type;
      }
      case ExprOp::IntLit: return SemType::integer();
      case ExprOp::TrueLit:
      case ExprOp::FalseLit: return SemType::boolean();
      case ExprOp::NatSet:
      case ExprOp::IntSet: return SemType::setOf(SemType::integer());
      case ExprOp::EmptySet: return SemType::setOf(SemType::unknown());
      case ExprOp::SetExt: {
        SemType elem = SemType::unknown();
        for (const auto& x : e->args) elem = mustUnify(elem, typeOf(x), e);
        return SemType::setOf(elem);
      }
      case ExprOp::Maplet: return SemType::pairOf(typeOf(e->arg(0)), typeOf(e->arg(1)));
      case ExprOp::Union:
      case ExprOp::Inter:
      case ExprOp::Diff: {
        SemType lhs = setType(e->arg(0));
        if (e->arg(1)->op == ExprOp::IdBare) {
          elaborateBareId(e->arg(1), lhs, e);
          return lhs;
        }
        return mustUnify(lhs, setType(e->arg(1)), e);
      }
      case ExprOp::Cprod:
        return SemType::setOf(SemType::pairOf(elemType(e->arg(0)), elemType(e->arg(1))));
      case ExprOp::Pow:
      case ExprOp::Pow1: return SemType::setOf(setType(e->arg(0)));
      case ExprOp::Rel:
      case ExprOp::Pfun:
      case ExprOp::Tfun:
      case ExprOp::Pinj:
      case ExprOp::Tinj:
      case ExprOp::Psurj:
      case ExprOp::Tsurj:
      case ExprOp::Tbij:
        return SemType::setOf(
            SemType::setOf(SemType::pairOf(elemType(e->arg(0)), elemType(e->arg(1)))));
      case ExprOp::DomRes:
      case ExprOp::DomSub: {
        SemType rel = relType(e->arg(1), e);
        mustUnify(SemType::setOf(*rel.a->a), setType(e->arg(0)), e);
        return rel;
      }
      case ExprOp::RanRes:
      case ExprOp::RanSub: {
        SemType rel = relType(e->arg(0), e);
        mustUnify(SemType::setOf(*rel.a->b), setType(e->arg(1)), e);
        return rel;
      }
      case ExprOp::Override:
        return mustUnify(relType(e->arg(0), e), relType(e->arg(1), e), e);
      case ExprOp::Fcomp: {
        SemType r = relType(e->arg(0), e), s = relType(e->arg(1), e);
        mustUnify(*r.a->b, *s.a->a, e);
        return SemType::setOf(SemType::pairOf(*r.a->a, *s.a->b));
      }
      case ExprOp::Dprod: {
        SemType r = relType(e->arg(0), e), s = relType(e->arg(1), e);
        mustUnify(*r.a->a, *s.a->a, e);
        return SemType::setOf(SemType::pairOf(*r.a->a, SemType::pairOf(*r.a->b, *s.a->b)));
      }
      case ExprOp::Pprod: {
        SemType r = relType(e->arg(0), e), s = relType(e->arg(1), e);
        return SemType::setOf(SemType::pairOf(SemType::pairOf(*r.a->a, *s.a->a),
                                              SemType::pairOf(*r.a->b, *s.a->b)));
      }
      case ExprOp::Dom: return SemType::setOf(*relType(e->arg(0), e).a->a);
      case ExprOp::Ran: return SemType::setOf(*relType(e->arg(0), e).a->b);
      case ExprOp::Id: {
        SemType elem = elemType(e->arg(0));
        return SemType::setOf(SemType::pairOf(elem, elem));
      }
      case ExprOp::IdBare:
        throw TypeMismatch("bare id needs a set context (write id(S) or use it in E \\ id)");
      case ExprOp::Inverse: {
        SemType r = relType(e->arg(0), e);
        return SemType::setOf(SemType::pairOf(*r.a->b, *r.a->a));
      }
      case ExprOp::Image: {
        SemType r = relType(e->arg(0), e);
        mustUnify(SemType::setOf(*r.a->a), setType(e->arg(1)), e);
        return SemType::setOf(*r.a->b);
      }
      case ExprOp::Apply: {
        SemType r = relType(e->arg(0), e);
        mustUnify(*r.a->a, typeOf(e->arg(1)), e);
        return *r.a->b;
      }
      case ExprOp::Card: {
        setType(e->arg(0));
        return SemType::integer();
      }
      case ExprOp::Add:
      case ExprOp::Sub:
      case ExprOp::Mul:
      case ExprOp::Div:
        mustUnify(SemType::integer(), typeOf(e->arg(0)), e);
        mustUnify(SemType::integer(), typeOf(e->arg(1)), e);
        return SemType::integer();
      case ExprOp::Eq:
      case ExprOp::Neq:
        mustUnify(typeOf(e->arg(0)), typeOf(e->arg(1)), e);
        return SemType::boolean();
      case ExprOp::Lt:
      case ExprOp::Le:
      case ExprOp::Gt:
      case ExprOp::Ge:
        mustUnify(SemType::integer(), typeOf(e->arg(0)), e);
        mustUnify(SemType::integer(), typeOf(e->arg(1)), e);
        return SemType::boolean();
      case ExprOp::In:
      case ExprOp::NotIn:
        mustUnify(typeOf(e->arg(0)), elemType(e->arg(1)), e);
        return SemType::boolean();
      case ExprOp::Subseteq:
      case ExprOp::Subset:
      case ExprOp::NotSubseteq:
      case ExprOp::NotSubset:
        mustUnify(setType(e->arg(0)), setType(e->arg(1)), e);
        return SemType::boolean();
      case ExprOp::And:
      case ExprOp::Or:
      case ExprOp::Imply:
      case ExprOp::Iff:
        mustBool(e->arg(0));
        mustBool(e->arg(1));
        return SemType::boolean();
      case ExprOp::Not:
        mustBool(e->arg(0));
        return SemType::boolean();
      case ExprOp::Forall:
      case ExprOp::Exists: {
        std::vector<SemType> bts;
        const std::size_t before = binds_.size();
        for (const auto& b : e->binds) {
          SemType t = inferBoundType(b, e->arg(0));
          binds_.emplace_back(b, t);
          bts.push_back(t);
        }
        mustBool(e->arg(0));
        binds_.resize(before);
        out_.quantBinds[e.get()] = std::move(bts);
        return SemType::boolean();
      }
    }
    throw TypeMismatch("unhandled expression form");
  }

  void mustBool(const ExprPtr& e) { mustUnify(SemType::boolean(), typeOf(e), e); }

  SemType setType(const ExprPtr& e) {
    SemType t = typeOf(e);
    if (t.k != SemType::K::SetOf) throw TypeMismatch("expected a set, found " + t.show());
    return t;
  }

  SemType elemType(const ExprPtr& e) { return *setType(e).a; }

  // A relation type: set of pairs.
  SemType relType(const ExprPtr& e, const ExprPtr& at) {
    SemType t = setType(e);
    if (t.a->k == SemType::K::Unknown)
      t = SemType::setOf(SemType::pairOf(SemType::unknown(), SemType::unknown()));
    if (t.a->k != SemType::K::Pair)
      throw TypeMismatch("expected a relation, found " + t.show());
    (void)at;
    return t;
  }

  SemType mustUnify(const SemType& x, const SemType& y, const ExprPtr& at) {
    auto u = unify(x, y);
    if (!u)
      throw TypeMismatch("type mismatch at line " + std::to_string(at->pos.line) + ": " +
                         x.show() + " vs " + y.show());
    return *u;
  }

  void elaborateBareId(const ExprPtr& idNode, const SemType& context, const ExprPtr& at) {
    if (context.k != SemType::K::SetOf || context.a->k != SemType::K::Pair ||
        context.a->a->k != SemType::K::Carrier || !(context.a->a->carrier == context.a->b->carrier))
      throw TypeMismatch("bare id at line " + std::to_string(at->pos.line) +
                         " needs a homogeneous carrier pair context");
    out_.idCarriers[idNode.get()] = context.a->a->carrier;
  }

  // The bound variable's type comes from its first typing occurrence in the body.
  SemType inferBoundType(const std::string& name, const ExprPtr& body) {
    ExprPtr found = findTyping(name, body);
    if (!found) throw UntypedIdentifier("bound variable " + name + " has no typing predicate");
    if (found->op == ExprOp::In) return elemType(found->arg(1));
    return setType(found->arg(1));  // Subseteq
  }

  ExprPtr findTyping(const std::string& name, const ExprPtr& e) {
    if ((e->op == ExprOp::In || e->op == ExprOp::Subseteq) && e->arg(0)->op == ExprOp::Ident &&
        e->arg(0)->name == name)
      return e;
    switch (e->op) {
      case ExprOp::And:
      case ExprOp::Imply:
      case ExprOp::Or: {
        for (const auto& a : e->args)
          if (ExprPtr r = findTyping(name, a)) return r;
        return nullptr;
      }
      default:
        return nullptr;
    }
  }

 private:
  Analysis& out_;
  std::map<std::string, TypingInfo>& idents_;
  std::vector<std::pair<std::string, SemType>> binds_;
};

ExprOp arrowOf(const ExprPtr& e) {
  switch (e->op) {
    case ExprOp::Rel:
    case ExprOp::Pfun:
    case ExprOp::Tfun:
    case ExprOp::Pinj:
    case ExprOp::Tinj:
    case ExprOp::Psurj:
    case ExprOp::Tsurj:
    case ExprOp::Tbij:
      return e->op;
    default:
      return ExprOp::Ident;
  }
}

}  // namespace

Analysis infer_types(const Project& project) {
  Analysis out;
  out.structure = check_structure(project);
  out.findings = out.structure.findings;
  if (!out.findings.empty()) return out;

  auto flag = [&](std::string code, std::string comp, std::string detail, SourcePos pos = {}) {
    out.findings.push_back({std::move(code), std::move(comp), std::move(detail), pos});
  };

  // Try to use `label: x : E` or `label: x <: E` as the typing declaration of x.
  // Returns the classification of the predicate.
  auto tryTyping = [&](std::map<std::string, TypingInfo>& idents, TypeChecker& tc,
                       const Labeled& item, const std::string& role,
                       bool allowTyping) -> PredClass {
    const ExprPtr& p = item.pred;
    const bool membership = p->op == ExprOp::In || p->op == ExprOp::Subseteq;
    if (allowTyping && membership && p->arg(0)->op == ExprOp::Ident) {
      const std::string& x = p->arg(0)->name;
      auto it = idents.find(x);
      if (it != idents.end() && it->second.type.k == SemType::K::Unknown &&
          it->second.role == role) {
        SemType t = p->op == ExprOp::In ? tc.elemType(p->arg(1)) : tc.setType(p->arg(1));
        it->second.type = std::move(t);
        it->second.typeExpr = p->arg(1);
        it->second.arrow = p->op == ExprOp::In ? arrowOf(p->arg(1)) : ExprOp::Ident;
        it->second.via = p->op;
        it->second.viaLabel = item.label;
        return p->op == ExprOp::In ? PredClass::TypingOnly : PredClass::TypingAndConstraint;
      }
    }
    return PredClass::Constraint;
  };

  // contexts, ancestors before descendants
  std::vector<std::string> ctxOrder;
  for (const auto& [name, closure] : out.structure.extendsClosure)
    for (const auto& cn : closure)
      if (std::find(ctxOrder.begin(), ctxOrder.end(), cn) == ctxOrder.end())
        ctxOrder.push_back(cn);

  std::map<std::string, ComponentEnv> ctxEnvs;
  for (const auto& name : ctxOrder) {
    const ContextAst& ctx = *project.context(name);
    ComponentEnv env;
    // start from the merged environments of the parents
    for (const auto& parent : ctx.extends)
      for (const auto& [id, info] : ctxEnvs[parent].idents) env.idents[id] = info;
    for (const auto& s : ctx.sets)
      env.idents[s] = {SemType::setOf(SemType::carrierOf(s)), nullptr, ExprOp::Ident,
                       ExprOp::Ident, "", "set"};
    for (const auto& c : ctx.constants)
      env.idents[c] = {SemType::unknown(), nullptr, ExprOp::Ident, ExprOp::Ident, "", "constant"};

    TypeChecker tc(out, env.idents);
    for (const auto& axm : ctx.axioms) {
      try {
        env.predClass[axm.label] = tryTyping(env.idents, tc, axm, "constant", true);
      } catch (const std::runtime_error& err) {
        flag("TypeError", name, axm.label + ": " + err.what(), axm.pos);
      }
    }
    for (const auto& [id, info] : env.idents)
      if (info.role == "constant" && info.type.k == SemType::K::Unknown)
        flag("UntypedIdentifier", name, "constant " + id + " has no typing axiom", ctx.pos);
    // full check of every predicate, theorems may not introduce typing
    for (const auto& axm : ctx.axioms) {
      try {
        tc.mustBool(axm.pred);
      } catch (const std::runtime_error& err) {
        flag("TypeError", name, axm.label + ": " + err.what(), axm.pos);
      }
    }
    for (const auto& thm : ctx.theorems) {
      env.predClass[thm.label] = PredClass::Constraint;
      try {
        tc.mustBool(thm.pred);
      } catch (const std::runtime_error& err) {
        flag("TypeError", name, thm.label + ": " + err.what(), thm.pos);
      }
    }
    ctxEnvs[name] = env;
    out.envs[name] = std::move(env);
  }

  // machines, refinement ancestors before descendants
  std::vector<std::string> machOrder;
  for (const auto& [name, chain] : out.structure.refinesChain)
    for (const auto& mn : chain)
      if (std::find(machOrder.begin(), machOrder.end(), mn) == machOrder.end())
        machOrder.push_back(mn);

  for (const auto& name : machOrder) {
    const MachineAst& mach = *project.machine(name);
    ComponentEnv env;
    for (const auto& cn : out.structure.contextClosure[name])
      for (const auto& [id, info] : ctxEnvs[cn].idents) env.idents[id] = info;
    // inherited machine environment
    if (mach.refines) {
      const ComponentEnv& abs = out.envs[*mach.refines];
      for (const auto& [id, info] : abs.idents)
        if (info.role == "variable") env.idents[id] = info;
    }
    for (const auto& v : mach.variables) {
      if (env.idents.count(v) && env.idents[v].role != "variable") {
        flag("NameClash", name, "variable " + v + " collides with a visible " +
                                    env.idents[v].role, mach.pos);
        continue;
      }
      if (!env.idents.count(v))
        env.idents[v] = {SemType::unknown(), nullptr, ExprOp::Ident, ExprOp::Ident, "",
                         "variable"};
    }

    TypeChecker tc(out, env.idents);
    for (const auto& inv : mach.invariants) {
      try {
        env.predClass[inv.label] = tryTyping(env.idents, tc, inv, "variable", true);
      } catch (const std::runtime_error& err) {
        flag("TypeError", name, inv.label + ": " + err.what(), inv.pos);
      }
    }
    for (const auto& v : mach.variables)
      if (env.idents[v].type.k == SemType::K::Unknown)
        flag("UntypedIdentifier", name, "variable " + v + " has no typing invariant", mach.pos);
    for (const auto& inv : mach.invariants) {
      try {
        tc.mustBool(inv.pred);
      } catch (const std::runtime_error& err) {
        flag("TypeError", name, inv.label + ": " + err.what(), inv.pos);
      }
    }
    for (const auto& thm : mach.theorems) {
      env.predClass[thm.label] = PredClass::Constraint;
      try {
        tc.mustBool(thm.pred);
      } catch (const std::runtime_error& err) {
        flag("TypeError", name, thm.label + ": " + err.what(), thm.pos);
      }
    }
    if (mach.variant) {
      try {
        const SemType t = tc.typeOf(mach.variant);
        if (t.k != SemType::K::Int && t.k != SemType::K::SetOf)
          flag("TypeError", name, "variant must be an integer or a finite set", mach.pos);
      } catch (const std::runtime_error& err) {
        flag("TypeError", name, std::string("variant: ") + err.what(), mach.pos);
      }
    }

    // events: a parameter is typed by its first membership guard over a static
    // set expression; parameters only reached through constants or variables
    // (check_out's r |-> g : owns) are typed from those signatures.
    for (const auto& ev : mach.events) {
      std::map<std::string, TypingInfo> local;
      for (const auto& p : ev.params)
        local[p] = {SemType::unknown(), nullptr, ExprOp::Ident, ExprOp::Ident, "", "param",
                    nullptr};
      tc.locals = &local;

      auto isStaticTypeExpr = [&](const ExprPtr& e) {
        std::function<bool(const ExprPtr&)> go = [&](const ExprPtr& x) -> bool {
          switch (x->op) {
            case ExprOp::Ident: {
              auto it = env.idents.find(x->name);
              if (it == env.idents.end()) return false;
              if (it->second.role == "set") return true;
              // set-valued constants declared with <: act as types (CARD)
              return it->second.role == "constant" && it->second.via == ExprOp::Subseteq;
            }
            case ExprOp::Cprod:
            case ExprOp::Rel:
            case ExprOp::Pfun:
            case ExprOp::Tfun:
            case ExprOp::Pinj:
            case ExprOp::Tinj:
            case ExprOp::Psurj:
            case ExprOp::Tsurj:
            case ExprOp::Tbij:
              return go(x->arg(0)) && go(x->arg(1));
            case ExprOp::Pow:
            case ExprOp::Pow1:
              return go(x->arg(0));
            case ExprOp::NatSet:
            case ExprOp::IntSet:
              return true;
            default:
              return false;
          }
        };
        return go(e);
      };

      // dom/ran source of a declared relation-typed identifier
      auto declParts = [&](const ExprPtr& e) -> std::pair<ExprPtr, ExprPtr> {
        if (e->op != ExprOp::Ident) return {nullptr, nullptr};
        auto it = env.idents.find(e->name);
        if (it == env.idents.end() || !it->second.typeExpr) return {nullptr, nullptr};
        if (it->second.arrow == ExprOp::Ident) return {nullptr, nullptr};
        return {it->second.typeExpr->arg(0), it->second.typeExpr->arg(1)};
      };

      auto typeParam = [&](const std::string& p, const ExprPtr& source,
                           const std::string& viaLabel) -> bool {
        auto it = local.find(p);
        if (it == local.end() || it->second.type.k != SemType::K::Unknown) return false;
        SemType t;
        try {
          t = tc.elemType(source);
        } catch (const std::runtime_error&) {
          return false;
        }
        it->second.type = std::move(t);
        it->second.sourceExpr = source;
        it->second.viaLabel = viaLabel;
        it->second.via = ExprOp::In;
        return true;
      };

      auto isUntypedParam = [&](const ExprPtr& e) {
        return e->op == ExprOp::Ident && local.count(e->name) &&
               local[e->name].type.k == SemType::K::Unknown;
      };

      // classification first: a membership of a bare parameter in a static set
      // expression is a typing guard, everything else is a constraint
      for (const auto& g : ev.guards) {
        const ExprPtr& p = g.pred;
        const bool typing = p->op == ExprOp::In && p->arg(0)->op == ExprOp::Ident &&
                            local.count(p->arg(0)->name) && isStaticTypeExpr(p->arg(1));
        env.predClass[ev.name + "/" + g.label] =
            typing ? PredClass::TypingOnly : PredClass::Constraint;
      }

      // fixpoint: keep deriving parameter types while guards still yield some
      bool progress = true;
      while (progress) {
        progress = false;
        for (const auto& g : ev.guards) {
          const ExprPtr& p = g.pred;
          // x : E  /  x /: E
          if ((p->op == ExprOp::In || p->op == ExprOp::NotIn) &&
              p->arg(0)->op == ExprOp::Ident && isUntypedParam(p->arg(0))) {
            ExprPtr src = p->arg(1);
            if (src->op == ExprOp::Dom) {
              auto [d, r] = declParts(src->arg(0));
              if (d) src = d;
            } else if (src->op == ExprOp::Ran) {
              auto [d, r] = declParts(src->arg(0));
              if (r) src = r;
            }
            progress |= typeParam(p->arg(0)->name, src, g.label);
          }
          // x |-> y : E  (check_out's guards)
          if ((p->op == ExprOp::In || p->op == ExprOp::NotIn) &&
              p->arg(0)->op == ExprOp::Maplet) {
            auto [d, r] = declParts(p->arg(1));
            const ExprPtr& x = p->arg(0)->arg(0);
            const ExprPtr& y = p->arg(0)->arg(1);
            if (d && isUntypedParam(x)) progress |= typeParam(x->name, d, g.label);
            if (r && isUntypedParam(y)) progress |= typeParam(y->name, r, g.label);
          }
          // applications f(x) anywhere in the guard
          std::function<void(const ExprPtr&)> scanApply = [&](const ExprPtr& e) {
            if (e->op == ExprOp::Apply && isUntypedParam(e->arg(1))) {
              auto [d, r] = declParts(e->arg(0));
              if (d) progress |= typeParam(e->arg(1)->name, d, "");
            }
            for (const auto& sub : e->args) scanApply(sub);
          };
          scanApply(p);
          // x = E / E = x with a typeable other side
          if (p->op == ExprOp::Eq) {
            for (int side = 0; side < 2; ++side) {
              const ExprPtr& l = p->arg(side);
              const ExprPtr& r = p->arg(1 - side);
              if (isUntypedParam(l)) {
                try {
                  SemType t = tc.typeOf(r);
                  local[l->name].type = std::move(t);
                  progress = true;
                } catch (const std::runtime_error&) {
                }
              }
            }
          }
        }
      }
      for (const auto& [p, info] : local)
        if (info.role == "param" && info.type.k == SemType::K::Unknown)
          flag("UntypedIdentifier", name,
               "parameter " + p + " of " + ev.name + " has no typing guard", ev.pos);
      // witnesses type their own identifier from the witness predicate
      for (const auto& w : ev.witnesses) {
        local[w.label] = {SemType::unknown(), nullptr, ExprOp::Ident, ExprOp::Ident, "",
                          "witness"};
        try {
          if (ExprPtr typing = tc.findTyping(w.label, w.pred)) {
            local[w.label].type = typing->op == ExprOp::In ? tc.elemType(typing->arg(1))
                                                           : tc.setType(typing->arg(1));
          } else if (w.pred->op == ExprOp::Eq && w.pred->arg(0)->op == ExprOp::Ident &&
                     w.pred->arg(0)->name == w.label) {
            local[w.label].type = tc.typeOf(w.pred->arg(1));
          } else {
            flag("UntypedIdentifier", name,
                 "witness " + w.label + " of " + ev.name + " is not typed by its predicate",
                 w.pos);
          }
          tc.mustBool(w.pred);
        } catch (const std::runtime_error& err) {
          flag("TypeError", name, ev.name + "/" + w.label + ": " + err.what(), w.pos);
        }
      }
      for (const auto& g : ev.guards) {
        try {
          tc.mustBool(g.pred);
        } catch (const std::runtime_error& err) {
          flag("TypeError", name, ev.name + "/" + g.label + ": " + err.what(), g.pos);
        }
      }
      for (const auto& a : ev.actions) {
        try {
          switch (a.kind) {
            case Action::Kind::Skip:
              break;
            case Action::Kind::Deterministic:
              for (std::size_t i = 0; i < a.lhs.size(); ++i) {
                auto it = env.idents.find(a.lhs[i]);
                if (it == env.idents.end() || it->second.role != "variable")
                  throw TypeMismatch(a.lhs[i] + " is not a machine variable");
                if (a.pointArgs[i]) {
                  // f(x) := e  updates one point of a relation-typed variable
                  const SemType rel = it->second.type;
                  if (rel.k != SemType::K::SetOf || rel.a->k != SemType::K::Pair)
                    throw TypeMismatch(a.lhs[i] + "(x) := e needs a relation variable");
                  SemType xt = tc.typeOf(a.pointArgs[i]);
                  if (!compatible(*rel.a->a, xt))
                    throw TypeMismatch("point update index type mismatch");
                  if (!compatible(*rel.a->b, tc.typeOf(a.rhs[i])))
                    throw TypeMismatch("point update value type mismatch");
                } else if (!compatible(it->second.type, tc.typeOf(a.rhs[i]))) {
                  throw TypeMismatch("assignment to " + a.lhs[i] + " has mismatched type");
                }
              }
              break;
            case Action::Kind::MemberOf: {
              auto it = env.idents.find(a.lhs[0]);
              if (it == env.idents.end() || it->second.role != "variable")
                throw TypeMismatch(a.lhs[0] + " is not a machine variable");
              if (!compatible(SemType::setOf(it->second.type), tc.typeOf(a.rhs[0])))
                throw TypeMismatch(":: needs a set of the variable's type");
              break;
            }
            case Action::Kind::SuchThat:
              tc.mustBool(a.predicate);
              break;
          }
        } catch (const std::runtime_error& err) {
          flag("TypeError", name, ev.name + "/" + a.label + ": " + err.what(), a.pos);
        }
      }
      tc.locals = nullptr;
      env.eventParams[ev.name] = std::move(local);
    }
    out.envs[name] = std::move(env);
  }
  return out;
}

}  // namespace ebx
