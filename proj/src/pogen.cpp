#include "ebx/pogen.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "ebx/syntax.hpp"

namespace ebx {

std::string familyName(PoFamily f) {
  switch (f) {
    case PoFamily::INV: return "INV";
    case PoFamily::FIS: return "FIS";
    case PoFamily::GRD: return "GRD";
    case PoFamily::MRG: return "MRG";
    case PoFamily::SIM: return "SIM";
    case PoFamily::NAT: return "NAT";
    case PoFamily::FIN: return "FIN";
    case PoFamily::VAR: return "VAR";
    case PoFamily::WFIS: return "WFIS";
    case PoFamily::THM: return "THM";
    case PoFamily::WD: return "WD";
  }
  return "?";
}

bool parseFamily(const std::string& s, PoFamily& out) {
  static const std::map<std::string, PoFamily> table = {
      {"INV", PoFamily::INV},   {"FIS", PoFamily::FIS}, {"GRD", PoFamily::GRD},
      {"MRG", PoFamily::MRG},   {"MKG", PoFamily::MRG}, {"SIM", PoFamily::SIM},
      {"NAT", PoFamily::NAT},   {"FIN", PoFamily::FIN}, {"VAR", PoFamily::VAR},
      {"WFIS", PoFamily::WFIS}, {"THM", PoFamily::THM}, {"WD", PoFamily::WD},
  };
  auto it = table.find(s);
  if (it == table.end()) return false;
  out = it->second;
  return true;
}

namespace {

// Substitute identifiers by expressions (capture is not a concern here: the
// replacements are closed machine-level expressions).
ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& sub) {
  if (e->op == ExprOp::Ident) {
    auto it = sub.find(e->name);
    return it == sub.end() ? e : it->second;
  }
  bool changed = false;
  std::vector<ExprPtr> args;
  args.reserve(e->args.size());
  std::vector<std::string> shadowed;
  for (const auto& a : e->args) {
    ExprPtr na = a;
    if (e->binds.empty()) {
      na = substitute(a, sub);
    } else {
      std::map<std::string, ExprPtr> inner = sub;
      for (const auto& b : e->binds) inner.erase(b);
      na = substitute(a, inner);
    }
    changed |= na != a;
    args.push_back(na);
  }
  if (!changed) return e;
  auto n = std::make_shared<Expr>(*e);
  n->args = std::move(args);
  return n;
}

// Replace machine variables by their primed counterparts.
ExprPtr primeVars(const ExprPtr& e, const std::set<std::string>& vars) {
  if (e->op == ExprOp::Ident && vars.count(e->name)) return mkPrimed(e->name, e->pos);
  if (e->args.empty()) return e;
  bool changed = false;
  std::vector<ExprPtr> args;
  for (const auto& a : e->args) {
    ExprPtr na = primeVars(a, vars);
    changed |= na != a;
    args.push_back(na);
  }
  if (!changed) return e;
  auto n = std::make_shared<Expr>(*e);
  n->args = std::move(args);
  return n;
}

ExprPtr conj(const std::vector<ExprPtr>& ps) {
  if (ps.empty()) return mkExpr(ExprOp::TrueLit, {});
  ExprPtr out = ps[0];
  for (std::size_t i = 1; i < ps.size(); ++i) out = mkExpr(ExprOp::And, {out, ps[i]});
  return out;
}

// Before-after predicates of one action over the machine variable set.
std::vector<ExprPtr> actionBA(const Action& a) {
  std::vector<ExprPtr> out;
  switch (a.kind) {
    case Action::Kind::Skip:
      break;
    case Action::Kind::Deterministic:
      for (std::size_t i = 0; i < a.lhs.size(); ++i) {
        const ExprPtr lhs = mkPrimed(a.lhs[i]);
        ExprPtr rhs = a.rhs[i];
        if (a.pointArgs[i]) {
          // f(x) := e  ~~>  f' = f <+ {x |-> e}
          rhs = mkExpr(ExprOp::Override,
                       {mkIdent(a.lhs[i]),
                        mkExpr(ExprOp::SetExt,
                               {mkExpr(ExprOp::Maplet, {a.pointArgs[i], a.rhs[i]})})});
        }
        out.push_back(mkExpr(ExprOp::Eq, {lhs, rhs}));
      }
      break;
    case Action::Kind::MemberOf:
      out.push_back(mkExpr(ExprOp::In, {mkPrimed(a.lhs[0]), a.rhs[0]}));
      break;
    case Action::Kind::SuchThat:
      out.push_back(a.predicate);
      break;
  }
  return out;
}

std::set<std::string> assignedVars(const EventAst& ev) {
  std::set<std::string> out;
  for (const auto& a : ev.actions)
    for (const auto& v : a.lhs) out.insert(v);
  return out;
}

// local copy to avoid a dependency on eval.hpp
std::set<std::string> free_idents_local(const ExprPtr& e) {
  std::set<std::string> out;
  std::function<void(const ExprPtr&, std::vector<std::string>&)> go =
      [&](const ExprPtr& x, std::vector<std::string>& bound) {
        if (x->op == ExprOp::Ident || x->op == ExprOp::PrimedIdent) {
          if (std::find(bound.begin(), bound.end(), x->name) == bound.end()) out.insert(x->name);
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

}  // namespace

std::vector<ExprPtr> wd_conditions(const ExprPtr& e, const ComponentEnv& env,
                                   const Analysis* analysis,
                                   std::map<const Expr*, std::vector<SemType>>* synthOut) {
  std::vector<ExprPtr> out;

  auto functionalByTyping = [&](const ExprPtr& f) {
    if (f->op != ExprOp::Ident) return false;
    auto it = env.idents.find(f->name);
    if (it == env.idents.end()) return false;
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
  };

  // context wraps a raw condition in the guards of the position it occurs at
  std::function<void(const ExprPtr&, const std::function<ExprPtr(ExprPtr)>&)> walk =
      [&](const ExprPtr& x, const std::function<ExprPtr(ExprPtr)>& wrap) {
        switch (x->op) {
          case ExprOp::Apply: {
            walk(x->arg(0), wrap);
            walk(x->arg(1), wrap);
            out.push_back(wrap(mkExpr(ExprOp::In, {x->arg(1), mkExpr(ExprOp::Dom, {x->arg(0)})})));
            if (!functionalByTyping(x->arg(0))) {
              // relation application must hit exactly one value
              const ExprPtr img =
                  mkExpr(ExprOp::Image, {x->arg(0), mkExpr(ExprOp::SetExt, {x->arg(1)})});
              out.push_back(
                  wrap(mkExpr(ExprOp::Eq, {mkExpr(ExprOp::Card, {img}), mkInt(1)})));
            }
            break;
          }
          case ExprOp::Div: {
            walk(x->arg(0), wrap);
            walk(x->arg(1), wrap);
            out.push_back(wrap(mkExpr(ExprOp::Neq, {x->arg(1), mkInt(0)})));
            break;
          }
          case ExprOp::And:
          case ExprOp::Imply: {
            walk(x->arg(0), wrap);
            const ExprPtr left = x->arg(0);
            walk(x->arg(1), [&, left](ExprPtr c) {
              return wrap(mkExpr(ExprOp::Imply, {left, std::move(c)}));
            });
            break;
          }
          case ExprOp::Or: {
            walk(x->arg(0), wrap);
            const ExprPtr left = x->arg(0);
            walk(x->arg(1), [&, left](ExprPtr c) {
              return wrap(mkExpr(ExprOp::Imply, {mkExpr(ExprOp::Not, {left}), std::move(c)}));
            });
            break;
          }
          case ExprOp::Forall:
          case ExprOp::Exists: {
            walk(x->arg(0), [&, x](ExprPtr c) {
              ExprPtr q = mkQuant(ExprOp::Forall, x->binds, std::move(c));
              if (analysis && synthOut) {
                auto it = analysis->quantBinds.find(x.get());
                if (it != analysis->quantBinds.end()) (*synthOut)[q.get()] = it->second;
              }
              return wrap(q);
            });
            break;
          }
          default:
            for (const auto& a : x->args) walk(a, wrap);
        }
      };
  walk(e, [](ExprPtr c) { return c; });
  return out;
}

PoSet generate_pos(const MachineAst& machine, const Project& project, const Analysis& analysis) {
  PoSet result;
  const std::string& mname = machine.name;
  const ComponentEnv& env = analysis.env(mname);
  const auto& closure = analysis.structure.contextClosure.at(mname);
  const auto& chain = analysis.structure.refinesChain.at(mname);

  const std::set<std::string> machineVars(machine.variables.begin(), machine.variables.end());

  // hypothesis blocks, ordered as in the refinement sequent tables
  std::vector<ExprPtr> axioms;  // context axioms and theorems, ancestors first
  for (const auto& cn : closure) {
    const ContextAst* c = project.context(cn);
    for (const auto& a : c->axioms) axioms.push_back(a.pred);
    for (const auto& t : c->theorems) axioms.push_back(t.pred);
  }
  std::vector<ExprPtr> absInvs;  // abstract invariants and theorems
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const MachineAst* m = project.machine(chain[i]);
    for (const auto& inv : m->invariants) absInvs.push_back(inv.pred);
    for (const auto& t : m->theorems) absInvs.push_back(t.pred);
  }
  std::vector<ExprPtr> concInvs;  // this machine's invariants and theorems
  for (const auto& inv : machine.invariants) concInvs.push_back(inv.pred);
  for (const auto& t : machine.theorems) concInvs.push_back(t.pred);

  auto baseHyps = [&]() {
    std::vector<ExprPtr> h = axioms;
    h.insert(h.end(), absInvs.begin(), absInvs.end());
    h.insert(h.end(), concInvs.begin(), concInvs.end());
    return h;
  };

  std::set<std::string> usedNames;
  auto push = [&](std::string name, PoFamily fam, std::vector<ExprPtr> hyps, ExprPtr goal,
                  const std::string& event, SourcePos origin) {
    if (!usedNames.insert(name).second)
      throw PogenError("duplicate proof obligation name " + name);
    ProofObligation po;
    po.name = std::move(name);
    po.family = fam;
    po.sequent.hypotheses = std::move(hyps);
    po.sequent.goal = std::move(goal);
    po.event = event;
    po.origin = origin;
    for (const auto& h : po.sequent.hypotheses)
      if (equalExpr(h, po.sequent.goal)) {
        po.autoDischarged = true;
        break;
      }
    result.pos.push_back(std::move(po));
  };

  const MachineAst* abstract =
      machine.refines ? project.machine(*machine.refines) : nullptr;

  for (const auto& ev : machine.events) {
    const bool isInit = ev.name == "INITIALISATION";
    std::vector<ExprPtr> guards;
    for (const auto& g : ev.guards) guards.push_back(g.pred);
    std::vector<ExprPtr> witnesses;
    for (const auto& w : ev.witnesses) witnesses.push_back(w.pred);

    // before-after predicates with frames for untouched variables
    std::vector<ExprPtr> ba;
    for (const auto& a : ev.actions) {
      auto preds = actionBA(a);
      ba.insert(ba.end(), preds.begin(), preds.end());
    }
    const std::set<std::string> written = assignedVars(ev);
    if (!isInit)
      for (const auto& v : machine.variables)
        if (!written.count(v))
          ba.push_back(mkExpr(ExprOp::Eq, {mkPrimed(v), mkIdent(v)}));

    auto eventHyps = [&](bool withWitnesses, bool withBa) {
      std::vector<ExprPtr> h = isInit ? axioms : baseHyps();
      h.insert(h.end(), guards.begin(), guards.end());
      if (withWitnesses) h.insert(h.end(), witnesses.begin(), witnesses.end());
      if (withBa) h.insert(h.end(), ba.begin(), ba.end());
      return h;
    };

    // INV: one PO per invariant of this machine whose variables the event writes
    const bool deterministicInit =
        isInit && std::all_of(ev.actions.begin(), ev.actions.end(), [](const Action& a) {
          return a.kind == Action::Kind::Deterministic || a.kind == Action::Kind::Skip;
        });
    std::map<std::string, ExprPtr> initSub;
    if (deterministicInit)
      for (const auto& a : ev.actions)
        for (std::size_t i = 0; i < a.lhs.size(); ++i)
          if (a.kind == Action::Kind::Deterministic && !a.pointArgs[i])
            initSub[a.lhs[i]] = a.rhs[i];

    for (const auto& inv : machine.invariants) {
      const auto frees = free_idents_local(inv.pred);
      bool writes = false;
      for (const auto& v : written) writes |= frees.count(v) > 0;
      if (isInit) writes = true;  // initialisation must establish every invariant
      if (!writes) continue;
      const std::string name = ev.name + "/" + inv.label + "/INV";
      if (deterministicInit) {
        push(name, PoFamily::INV, axioms, substitute(inv.pred, initSub), ev.name, ev.pos);
      } else {
        push(name, PoFamily::INV, eventHyps(true, true), primeVars(inv.pred, machineVars),
             ev.name, ev.pos);
      }
    }

    // FIS: nondeterministic actions must be feasible
    for (const auto& a : ev.actions) {
      if (a.kind != Action::Kind::SuchThat && a.kind != Action::Kind::MemberOf) continue;
      const auto preds = actionBA(a);
      std::vector<std::string> binds;
      std::vector<SemType> bindTypes;
      for (const auto& v : a.lhs) {
        binds.push_back(v + "'");
        bindTypes.push_back(env.idents.at(v).type);
      }
      ExprPtr goal = mkQuant(ExprOp::Exists, binds, conj(preds), a.pos);
      result.synthBinds[goal.get()] = bindTypes;
      push(ev.name + "/" + a.label + "/FIS", PoFamily::FIS, eventHyps(true, false), goal,
           ev.name, a.pos);
    }

    // refinement POs against the abstract machine
    if (!isInit && abstract && !ev.refines.empty()) {
      std::vector<const EventAst*> absEvents;
      for (const auto& an : ev.refines)
        if (const EventAst* ae = abstract->findEvent(an)) absEvents.push_back(ae);

      for (const EventAst* ae : absEvents) {
        // missing witnesses: abstract parameters that vanished need a WITH
        for (const auto& p : ae->params) {
          const bool present =
              std::find(ev.params.begin(), ev.params.end(), p) != ev.params.end();
          bool witnessed = false;
          for (const auto& w : ev.witnesses) witnessed |= w.label == p;
          if (!present && !witnessed)
            throw PogenError("MissingWitness: abstract parameter " + p + " of " + ae->name +
                             " vanished in " + ev.name + " without a witness");
        }
        const std::string prefix =
            absEvents.size() > 1 ? ae->name + "/" : std::string{};
        for (const auto& g : ae->guards)
          push(ev.name + "/" + prefix + g.label + "/GRD", PoFamily::GRD, eventHyps(true, false),
               g.pred, ev.name, ev.pos);
        for (const auto& a : ae->actions) {
          const auto preds = actionBA(a);
          if (preds.empty()) continue;  // skip simulates trivially
          push(ev.name + "/" + prefix + a.label + "/SIM", PoFamily::SIM, eventHyps(true, true),
               conj(preds), ev.name, a.pos);
        }
      }
      if (absEvents.size() > 1) {
        // merged events: concrete guards imply the disjunction of abstract guards
        std::vector<ExprPtr> disj;
        for (const EventAst* ae : absEvents) {
          std::vector<ExprPtr> gs;
          for (const auto& g : ae->guards) gs.push_back(g.pred);
          disj.push_back(conj(gs));
        }
        ExprPtr goal = disj[0];
        for (std::size_t i = 1; i < disj.size(); ++i)
          goal = mkExpr(ExprOp::Or, {goal, disj[i]});
        std::vector<ExprPtr> h = axioms;
        h.insert(h.end(), absInvs.begin(), absInvs.end());
        h.insert(h.end(), guards.begin(), guards.end());
        push(ev.name + "/MRG", PoFamily::MRG, h, goal, ev.name, ev.pos);
      }
    }

    // variant POs
    if (ev.status != EventStatus::Ordinary && !isInit) {
      if (!machine.variant)
        throw PogenError("MissingVariant: event " + ev.name +
                         " is convergent/anticipated but the machine has no VARIANT");
      const ExprPtr variant = machine.variant;
      const bool numeric = [&] {
        // a set-typed variant uses FIN, a numeric one NAT
        const auto frees = free_idents_local(variant);
        // integer expressions only ever contain +,-,*,card,ints and ints-typed idents
        std::function<bool(const ExprPtr&)> isIntShaped = [&](const ExprPtr& x) {
          switch (x->op) {
            case ExprOp::IntLit:
            case ExprOp::Card:
            case ExprOp::Add:
            case ExprOp::Sub:
            case ExprOp::Mul:
            case ExprOp::Div:
              return true;
            case ExprOp::Ident: {
              auto it = env.idents.find(x->name);
              return it != env.idents.end() && it->second.type.k == SemType::K::Int;
            }
            default:
              return false;
          }
        };
        return isIntShaped(variant);
      }();
      if (numeric) {
        push(ev.name + "/NAT", PoFamily::NAT, eventHyps(true, false),
             mkExpr(ExprOp::In, {variant, mkExpr(ExprOp::NatSet, {})}), ev.name, ev.pos);
      } else {
        push(ev.name + "/FIN", PoFamily::FIN, eventHyps(true, false),
             mkExpr(ExprOp::TrueLit, {}), ev.name, ev.pos);
      }
      const ExprPtr after = primeVars(variant, machineVars);
      ExprPtr goal;
      if (ev.status == EventStatus::Convergent)
        goal = numeric ? mkExpr(ExprOp::Lt, {after, variant})
                       : mkExpr(ExprOp::Subset, {after, variant});
      else
        goal = numeric ? mkExpr(ExprOp::Le, {after, variant})
                       : mkExpr(ExprOp::Subseteq, {after, variant});
      push(ev.name + "/VAR", PoFamily::VAR, eventHyps(true, true), goal, ev.name, ev.pos);
    }

    // witness feasibility
    for (const auto& w : ev.witnesses) {
      ExprPtr goal = mkQuant(ExprOp::Exists, {w.label}, w.pred, w.pos);
      const auto& eventEnv = env.eventParams.at(ev.name);
      result.synthBinds[goal.get()] = {eventEnv.at(w.label).type};
      std::vector<ExprPtr> h = baseHyps();
      h.insert(h.end(), guards.begin(), guards.end());
      push(ev.name + "/" + w.label + "/WFIS", PoFamily::WFIS, h, goal, ev.name, w.pos);
    }

    // well-definedness of guards and actions
    std::vector<ExprPtr> precedingGuards;
    for (const auto& g : ev.guards) {
      auto conds = wd_conditions(g.pred, env, &analysis, &result.synthBinds);
      if (!conds.empty()) {
        std::vector<ExprPtr> h = isInit ? axioms : baseHyps();
        h.insert(h.end(), precedingGuards.begin(), precedingGuards.end());
        push(ev.name + "/" + g.label + "/WD", PoFamily::WD, h, conj(conds), ev.name, g.pos);
      }
      precedingGuards.push_back(g.pred);
    }
    for (const auto& a : ev.actions) {
      std::vector<ExprPtr> conds;
      if (a.kind == Action::Kind::Deterministic) {
        for (std::size_t i = 0; i < a.lhs.size(); ++i) {
          // the assignment target of a point update is redefined, not read
          if (a.pointArgs[i]) {
            auto argConds = wd_conditions(a.pointArgs[i], env, &analysis, &result.synthBinds);
            conds.insert(conds.end(), argConds.begin(), argConds.end());
          }
          auto rhsConds = wd_conditions(a.rhs[i], env, &analysis, &result.synthBinds);
          conds.insert(conds.end(), rhsConds.begin(), rhsConds.end());
        }
      } else if (a.kind == Action::Kind::MemberOf) {
        conds = wd_conditions(a.rhs[0], env, &analysis, &result.synthBinds);
      } else if (a.kind == Action::Kind::SuchThat) {
        conds = wd_conditions(a.predicate, env, &analysis, &result.synthBinds);
      }
      if (!conds.empty())
        push(ev.name + "/" + a.label + "/WD", PoFamily::WD, eventHyps(true, false), conj(conds),
             ev.name, a.pos);
    }
  }

  // theorems of the machine
  {
    std::vector<ExprPtr> preceding;
    for (const auto& t : machine.theorems) {
      std::vector<ExprPtr> h = axioms;
      h.insert(h.end(), absInvs.begin(), absInvs.end());
      for (const auto& inv : machine.invariants) h.push_back(inv.pred);
      h.insert(h.end(), preceding.begin(), preceding.end());
      push(t.label + "/THM", PoFamily::THM, h, t.pred, "", t.pos);
      auto conds = wd_conditions(t.pred, env, &analysis, &result.synthBinds);
      if (!conds.empty()) push(t.label + "/WD", PoFamily::WD, h, conj(conds), "", t.pos);
      preceding.push_back(t.pred);
    }
  }
  // invariant well-definedness
  for (const auto& inv : machine.invariants) {
    auto conds = wd_conditions(inv.pred, env, &analysis, &result.synthBinds);
    if (!conds.empty())
      push(inv.label + "/WD", PoFamily::WD, baseHyps(), conj(conds), "", inv.pos);
  }
  // variant well-definedness
  if (machine.variant) {
    auto conds = wd_conditions(machine.variant, env, &analysis, &result.synthBinds);
    if (!conds.empty()) push("VWD", PoFamily::WD, baseHyps(), conj(conds), "", machine.pos);
  }
  // context axioms and theorems seen by this machine
  {
    std::vector<ExprPtr> preceding;
    for (const auto& cn : closure) {
      const ContextAst* c = project.context(cn);
      const ComponentEnv& cenv = analysis.env(cn);
      for (const auto& a : c->axioms) {
        auto conds = wd_conditions(a.pred, cenv, &analysis, &result.synthBinds);
        if (!conds.empty()) push(a.label + "/WD", PoFamily::WD, preceding, conj(conds), "", a.pos);
        preceding.push_back(a.pred);
      }
      for (const auto& t : c->theorems) {
        push(t.label + "/THM", PoFamily::THM, preceding, t.pred, "", t.pos);
        auto conds = wd_conditions(t.pred, cenv, &analysis, &result.synthBinds);
        if (!conds.empty()) push(t.label + "/WD", PoFamily::WD, preceding, conj(conds), "", t.pos);
        preceding.push_back(t.pred);
      }
    }
  }
  return result;
}

std::string render_po_file(const std::string& machineName, const PoSet& set) {
  std::ostringstream os;
  os << "// proof obligations for " << machineName << "\n";
  for (const auto& po : set.pos) {
    os << "\nPO " << po.name << "\n";
    for (const auto& h : po.sequent.hypotheses) os << "  HYP " << print_expression(h) << "\n";
    os << "  |- " << print_expression(po.sequent.goal) << "\n";
  }
  os << "\nSUMMARY name family auto\n";
  for (const auto& po : set.pos)
    os << po.name << " " << familyName(po.family) << " " << (po.autoDischarged ? "yes" : "no")
       << "\n";
  return os.str();
}

}  // namespace ebx
