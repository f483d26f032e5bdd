#include <map>
#include <sstream>

#include "ebx/syntax.hpp"

namespace ebx {

namespace {

struct OpSpell {
  const char* ascii;
  const char* unicode;
  int prec;        // binding strength, higher = tighter; -1 for non-infix
  bool rightAssoc;
};

const std::map<ExprOp, OpSpell> kSpell = {
    {ExprOp::Iff, {"<=>", "⇔", 1, false}},
    {ExprOp::Imply, {"=>", "⇒", 2, true}},
    {ExprOp::Or, {"or", "∨", 3, false}},
    {ExprOp::And, {"&", "∧", 4, false}},
    {ExprOp::Eq, {"=", "=", 6, false}},
    {ExprOp::Neq, {"/=", "≠", 6, false}},
    {ExprOp::Lt, {"<", "<", 6, false}},
    {ExprOp::Le, {"<=", "≤", 6, false}},
    {ExprOp::Gt, {">", ">", 6, false}},
    {ExprOp::Ge, {">=", "≥", 6, false}},
    {ExprOp::In, {":", "∈", 6, false}},
    {ExprOp::NotIn, {"/:", "∉", 6, false}},
    {ExprOp::Subseteq, {"<:", "⊆", 6, false}},
    {ExprOp::Subset, {"<<:", "⊂", 6, false}},
    {ExprOp::NotSubseteq, {"/<:", "⊈", 6, false}},
    {ExprOp::NotSubset, {"/<<:", "⊄", 6, false}},
    {ExprOp::Rel, {"<->", "↔", 10, true}},
    {ExprOp::Pfun, {"+->", "⇸", 10, true}},
    {ExprOp::Tfun, {"-->", "→", 10, true}},
    {ExprOp::Pinj, {">+>", "⤔", 10, true}},
    {ExprOp::Tinj, {">->", "↣", 10, true}},
    {ExprOp::Psurj, {"+->>", "⤀", 10, true}},
    {ExprOp::Tsurj, {"-->>", "↠", 10, true}},
    {ExprOp::Tbij, {">->>", "⤖", 10, true}},
    {ExprOp::Maplet, {"|->", "↦", 20, false}},
    {ExprOp::DomRes, {"<|", "◁", 30, false}},
    {ExprOp::DomSub, {"<<|", "⩤", 30, false}},
    {ExprOp::RanRes, {"|>", "▷", 30, false}},
    {ExprOp::RanSub, {"|>>", "⩥", 30, false}},
    {ExprOp::Override, {"<+", "<+", 30, false}},
    {ExprOp::Dprod, {"><", "⊗", 30, false}},
    {ExprOp::Pprod, {"||", "∥", 30, false}},
    {ExprOp::Fcomp, {";", ";", 30, false}},
    {ExprOp::Union, {"\\/", "∪", 40, false}},
    {ExprOp::Inter, {"/\\", "∩", 40, false}},
    {ExprOp::Diff, {"\\", "∖", 40, false}},
    {ExprOp::Add, {"+", "+", 50, false}},
    {ExprOp::Sub, {"-", "−", 50, false}},
    {ExprOp::Mul, {"*", "*", 60, false}},
    {ExprOp::Div, {"/", "÷", 60, false}},
    {ExprOp::Cprod, {"**", "×", 60, false}},
};

class Printer {
 public:
  explicit Printer(PrintOptions opts) : opts_(opts) {}

  std::string expr(const ExprPtr& e) { return print(e, 0); }

  std::string component(const Component& c) {
    std::ostringstream os;
    if (c.isMachine())
      machine(os, *c.machine);
    else
      context(os, *c.context);
    return os.str();
  }

 private:
  PrintOptions opts_;

  std::string sym(ExprOp op) const {
    const auto& s = kSpell.at(op);
    return opts_.unicode ? s.unicode : s.ascii;
  }

  std::string print(const ExprPtr& e, int parentPrec) {
    switch (e->op) {
      case ExprOp::Ident: return e->name;
      case ExprOp::PrimedIdent: return e->name + "'";
      case ExprOp::IntLit: return std::to_string(e->intValue);
      case ExprOp::TrueLit: return opts_.unicode ? "⊤" : "true";
      case ExprOp::FalseLit: return opts_.unicode ? "⊥" : "false";
      case ExprOp::EmptySet: return opts_.unicode ? "∅" : "{}";
      case ExprOp::NatSet: return "NAT";
      case ExprOp::IntSet: return "INT";
      case ExprOp::IdBare: return "id";
      case ExprOp::SetExt: {
        std::string out = "{";
        for (std::size_t i = 0; i < e->args.size(); ++i) {
          if (i) out += ", ";
          out += print(e->args[i], 0);
        }
        return out + "}";
      }
      case ExprOp::Forall:
      case ExprOp::Exists: {
        std::string out = e->op == ExprOp::Forall ? (opts_.unicode ? "∀" : "!")
                                                  : (opts_.unicode ? "∃" : "#");
        for (std::size_t i = 0; i < e->binds.size(); ++i) {
          if (i) out += ",";
          out += e->binds[i];
        }
        out += opts_.unicode ? "·" : ".";
        out += "(" + print(e->arg(0), 0) + ")";
        return out;
      }
      case ExprOp::Not: {
        std::string out = std::string(opts_.unicode ? "¬" : "not") + " " + print(e->arg(0), 5);
        return parentPrec > 4 ? "(" + out + ")" : out;
      }
      case ExprOp::Dom: return fn("dom", e);
      case ExprOp::Ran: return fn("ran", e);
      case ExprOp::Card: return fn("card", e);
      case ExprOp::Pow: return fn(opts_.unicode ? "ℙ" : "POW", e);
      case ExprOp::Pow1: return fn(opts_.unicode ? "ℙ1" : "POW1", e);
      case ExprOp::Id: return fn("id", e);
      case ExprOp::Inverse: return print(e->arg(0), 100) + "~";
      case ExprOp::Image: return print(e->arg(0), 100) + "[" + print(e->arg(1), 0) + "]";
      case ExprOp::Apply: return print(e->arg(0), 100) + "(" + print(e->arg(1), 0) + ")";
      default: break;
    }
    const auto& s = kSpell.at(e->op);
    const std::string text = print(e->arg(0), s.rightAssoc ? s.prec + 1 : s.prec) + " " +
                             sym(e->op) + " " +
                             print(e->arg(1), s.rightAssoc ? s.prec : s.prec + 1);
    return parentPrec > s.prec || (parentPrec == s.prec && !s.rightAssoc)
               ? "(" + text + ")"
               : text;
  }

  std::string fn(const std::string& name, const ExprPtr& e) {
    return name + "(" + print(e->arg(0), 0) + ")";
  }

  void identClause(std::ostringstream& os, const char* kw, const std::vector<std::string>& ns) {
    if (ns.empty()) return;
    os << kw << "\n";
    for (const auto& n : ns) os << "  " << n << "\n";
  }

  void labeledClause(std::ostringstream& os, const char* kw, const std::vector<Labeled>& xs,
                     const char* indent = "  ") {
    if (xs.empty()) return;
    os << kw << "\n";
    for (const auto& x : xs) os << indent << x.label << ": " << expr(x.pred) << "\n";
  }

  void context(std::ostringstream& os, const ContextAst& c) {
    os << "CONTEXT\n  " << c.name << "\n";
    identClause(os, "EXTENDS", c.extends);
    identClause(os, "SETS", c.sets);
    identClause(os, "CONSTANTS", c.constants);
    labeledClause(os, "AXIOMS", c.axioms);
    labeledClause(os, "THEOREMS", c.theorems);
    os << "END\n";
  }

  void action(std::ostringstream& os, const Action& a, const char* indent) {
    os << indent;
    if (a.kind == Action::Kind::Skip) {
      if (a.label != "skip" && !a.label.empty()) os << a.label << ": ";
      os << "skip\n";
      return;
    }
    os << a.label << ": ";
    switch (a.kind) {
      case Action::Kind::Deterministic: {
        for (std::size_t i = 0; i < a.lhs.size(); ++i) {
          if (i) os << ", ";
          os << a.lhs[i];
          if (a.pointArgs[i]) os << "(" << expr(a.pointArgs[i]) << ")";
        }
        os << " := ";
        for (std::size_t i = 0; i < a.rhs.size(); ++i) {
          if (i) os << ", ";
          os << expr(a.rhs[i]);
        }
        break;
      }
      case Action::Kind::SuchThat: {
        for (std::size_t i = 0; i < a.lhs.size(); ++i) {
          if (i) os << ", ";
          os << a.lhs[i];
        }
        os << " :| " << expr(a.predicate);
        break;
      }
      case Action::Kind::MemberOf:
        os << a.lhs[0] << " :: " << expr(a.rhs[0]);
        break;
      case Action::Kind::Skip:
        break;
    }
    os << "\n";
  }

  void machine(std::ostringstream& os, const MachineAst& m) {
    os << "MACHINE\n  " << m.name << "\n";
    if (m.refines) os << "REFINES\n  " << *m.refines << "\n";
    identClause(os, "SEES", m.sees);
    identClause(os, "VARIABLES", m.variables);
    labeledClause(os, "INVARIANTS", m.invariants);
    labeledClause(os, "THEOREMS", m.theorems);
    if (m.variant) os << "VARIANT\n  " << expr(m.variant) << "\n";
    if (!m.events.empty()) {
      os << "EVENTS\n";
      for (const auto& ev : m.events) {
        os << "  " << ev.name << " =\n";
        os << "    STATUS "
           << (ev.status == EventStatus::Ordinary
                   ? "ordinary"
                   : ev.status == EventStatus::Convergent ? "convergent" : "anticipated")
           << "\n";
        if (!ev.refines.empty()) {
          os << "    REFINES";
          for (const auto& r : ev.refines) os << " " << r;
          os << "\n";
        }
        if (ev.usesBegin) {
          os << "    BEGIN\n";
          for (const auto& a : ev.actions) action(os, a, "      ");
          os << "    END\n";
          continue;
        }
        if (!ev.params.empty()) {
          os << "    ANY\n";
          for (const auto& p : ev.params) os << "      " << p << "\n";
        }
        if (!ev.guards.empty()) {
          os << (ev.params.empty() ? "    WHEN\n" : "    WHERE\n");
          for (const auto& g : ev.guards) os << "      " << g.label << ": " << expr(g.pred) << "\n";
        }
        if (!ev.witnesses.empty()) {
          os << "    WITH\n";
          for (const auto& w : ev.witnesses)
            os << "      " << w.label << ": " << expr(w.pred) << "\n";
        }
        if (!ev.actions.empty()) {
          os << "    THEN\n";
          for (const auto& a : ev.actions) action(os, a, "      ");
        }
        os << "    END\n";
      }
    }
    os << "END\n";
  }
};

}  // namespace

std::string print_component(const Component& c, const PrintOptions& opts) {
  return Printer(opts).component(c);
}

std::string print_expression(const ExprPtr& e, const PrintOptions& opts) {
  return Printer(opts).expr(e);
}

}  // namespace ebx
