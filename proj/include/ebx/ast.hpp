// AST for contexts, machines, events and the set-theoretic expression language.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ebx {

struct SourcePos {
  int line = 0;
  int column = 0;
};

enum class ExprOp {
  // atoms
  Ident,
  PrimedIdent,  // v' (post-state variable in before-after predicates)
  IntLit,
  TrueLit,
  FalseLit,
  EmptySet,
  SetExt,   // {e1, ..., en}
  NatSet,   // NAT
  IntSet,   // INT
  IdBare,   // bare `id`, elaborated to Id over a carrier by the type checker
  // predicate connectives
  And,
  Or,
  Not,
  Imply,
  Iff,
  Forall,
  Exists,
  // comparisons
  Eq,
  Neq,
  Lt,
  Le,
  Gt,
  Ge,
  In,
  NotIn,
  Subseteq,
  Subset,
  NotSubseteq,
  NotSubset,
  // set / relation operators
  Union,
  Inter,
  Diff,
  Cprod,     // A ** B
  Pow,
  Pow1,
  Maplet,    // x |-> y
  Rel,       // <->
  Pfun,      // +->
  Tfun,      // -->
  Pinj,      // >+>
  Tinj,      // >->
  Psurj,     // +->>
  Tsurj,     // -->>
  Tbij,      // >->>
  DomRes,    // s <| r
  DomSub,    // s <<| r
  RanRes,    // r |> s
  RanSub,    // r |>> s
  Override,  // r <+ s
  Dprod,     // r >< s
  Pprod,     // r || s
  Fcomp,     // r ; s
  Dom,
  Ran,
  Id,        // id(S)
  Inverse,   // r~
  Image,     // r[s]
  Apply,     // f(x)
  Card,
  // arithmetic
  Add,
  Sub,
  Mul,
  Div,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprOp op = ExprOp::Ident;
  std::string name;                // Ident / PrimedIdent (without the quote)
  long long intValue = 0;          // IntLit
  std::vector<std::string> binds;  // Forall / Exists bound variables
  std::vector<ExprPtr> args;       // operands / set elements / quantifier body
  SourcePos pos;

  const ExprPtr& arg(std::size_t i) const { return args[i]; }
};

ExprPtr mkExpr(ExprOp op, std::vector<ExprPtr> args, SourcePos pos = {});
ExprPtr mkIdent(std::string name, SourcePos pos = {});
ExprPtr mkPrimed(std::string name, SourcePos pos = {});
ExprPtr mkInt(long long v, SourcePos pos = {});
ExprPtr mkQuant(ExprOp op, std::vector<std::string> binds, ExprPtr body, SourcePos pos = {});

// Structural equality (ignores positions).
bool equalExpr(const ExprPtr& a, const ExprPtr& b);

struct Labeled {
  std::string label;
  ExprPtr pred;
  SourcePos pos;
};

struct Action {
  enum class Kind {
    Deterministic,  // x1,...,xn := e1,...,en  (or point update f(x) := e)
    SuchThat,       // x1,...,xn :| P
    MemberOf,       // x :: S
    Skip,
  };
  Kind kind = Kind::Skip;
  std::string label;                  // "skip" when the action is a bare skip
  std::vector<std::string> lhs;       // assigned variables
  std::vector<ExprPtr> pointArgs;     // per-lhs: non-null for point update f(x) := e
  std::vector<ExprPtr> rhs;           // Deterministic: expressions; MemberOf: the set
  ExprPtr predicate;                  // SuchThat before-after predicate
  SourcePos pos;
};

enum class EventStatus { Ordinary, Convergent, Anticipated };

struct EventAst {
  std::string name;
  EventStatus status = EventStatus::Ordinary;
  std::vector<std::string> refines;
  std::vector<std::string> params;
  std::vector<Labeled> guards;
  std::vector<Labeled> witnesses;
  std::vector<Action> actions;
  bool usesBegin = false;  // printed with BEGIN instead of WHERE/THEN
  bool usesWhen = false;   // WHEN accepted for WHERE when ANY is absent
  SourcePos pos;
};

struct ContextAst {
  std::string name;
  std::vector<std::string> extends;
  std::vector<std::string> sets;
  std::vector<std::string> constants;
  std::vector<Labeled> axioms;
  std::vector<Labeled> theorems;
  SourcePos pos;
};

struct MachineAst {
  std::string name;
  std::optional<std::string> refines;
  std::vector<std::string> sees;
  std::vector<std::string> variables;
  std::vector<Labeled> invariants;
  std::vector<Labeled> theorems;
  ExprPtr variant;  // may be null
  std::vector<EventAst> events;
  SourcePos pos;

  const EventAst* findEvent(const std::string& name) const;
};

// One parsed component: exactly one of the two is set.
struct Component {
  std::optional<ContextAst> context;
  std::optional<MachineAst> machine;

  bool isMachine() const { return machine.has_value(); }
  const std::string& name() const { return isMachine() ? machine->name : context->name; }
};

}  // namespace ebx
