#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ebx/syntax.hpp"

using namespace ebx;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string fixtures() {
  if (const char* env = std::getenv("EBX_FIXTURES")) return env;
  // tests run from the build tree; fixtures live next to it
  for (auto p : {"fixtures", "../fixtures", "../../fixtures"})
    if (std::filesystem::exists(p)) return p;
  return "fixtures";
}

// Structural equality over the semantic fields (positions and layout
// bookkeeping like usesBegin are irrelevant for round-trips).
bool sameLabeled(const std::vector<Labeled>& a, const std::vector<Labeled>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].label != b[i].label || !equalExpr(a[i].pred, b[i].pred)) return false;
  return true;
}

bool sameActions(const std::vector<Action>& a, const std::vector<Action>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.kind != y.kind || x.label != y.label || x.lhs != y.lhs) return false;
    if (x.rhs.size() != y.rhs.size() || x.pointArgs.size() != y.pointArgs.size()) return false;
    for (std::size_t j = 0; j < x.rhs.size(); ++j)
      if (!equalExpr(x.rhs[j], y.rhs[j])) return false;
    for (std::size_t j = 0; j < x.pointArgs.size(); ++j) {
      if (!x.pointArgs[j] != !y.pointArgs[j]) return false;
      if (x.pointArgs[j] && !equalExpr(x.pointArgs[j], y.pointArgs[j])) return false;
    }
    if (!x.predicate != !y.predicate) return false;
    if (x.predicate && !equalExpr(x.predicate, y.predicate)) return false;
  }
  return true;
}

bool sameComponent(const Component& a, const Component& b) {
  if (a.isMachine() != b.isMachine()) return false;
  if (!a.isMachine()) {
    const auto& x = *a.context;
    const auto& y = *b.context;
    return x.name == y.name && x.extends == y.extends && x.sets == y.sets &&
           x.constants == y.constants && sameLabeled(x.axioms, y.axioms) &&
           sameLabeled(x.theorems, y.theorems);
  }
  const auto& x = *a.machine;
  const auto& y = *b.machine;
  if (x.name != y.name || x.refines != y.refines || x.sees != y.sees ||
      x.variables != y.variables || !sameLabeled(x.invariants, y.invariants) ||
      !sameLabeled(x.theorems, y.theorems))
    return false;
  if (!x.variant != !y.variant) return false;
  if (x.variant && !equalExpr(x.variant, y.variant)) return false;
  if (x.events.size() != y.events.size()) return false;
  for (std::size_t i = 0; i < x.events.size(); ++i) {
    const auto& e = x.events[i];
    const auto& f = y.events[i];
    if (e.name != f.name || e.status != f.status || e.refines != f.refines ||
        e.params != f.params || !sameLabeled(e.guards, f.guards) ||
        !sameLabeled(e.witnesses, f.witnesses) || !sameActions(e.actions, f.actions))
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("parse Hotel_Ctx0") {
  const Component c = parse_component(slurp(fixtures() + "/sceh/Hotel_Ctx0.ebc"));
  REQUIRE_FALSE(c.isMachine());
  CHECK(c.context->name == "Hotel_Ctx0");
  CHECK(c.context->sets == std::vector<std::string>{"GUEST", "ROOM"});
}

TEST_CASE("parse a minimal machine") {
  const Component c = parse_component(
      "MACHINE m VARIABLES x INVARIANTS inv1: x : NAT EVENTS INITIALISATION = BEGIN x := 0 "
      "END END",
      ParseOptions{.lenient = true});
  REQUIRE(c.isMachine());
  CHECK(c.machine->variables == std::vector<std::string>{"x"});
  REQUIRE(c.machine->events.size() == 1);
  CHECK(c.machine->events[0].name == "INITIALISATION");
  CHECK(c.machine->events[0].actions.size() == 1);
}

TEST_CASE("parse the flattened Hotel_M3 shape") {
  const Component c = parse_component(slurp(fixtures() + "/sceh/Hotel_M3.ebm"));
  REQUIRE(c.isMachine());
  CHECK(c.machine->variables.size() == 6);
  CHECK(c.machine->events.size() == 8);
}

TEST_CASE("expression examples") {
  const ExprPtr e1 = parse_expression("r |-> g : owns");
  CHECK(e1->op == ExprOp::In);
  CHECK(e1->arg(0)->op == ExprOp::Maplet);

  const ExprPtr e2 = parse_expression("CARD <: (KEY ** KEY) \\ id(KEY)");
  CHECK(e2->op == ExprOp::Subseteq);
  CHECK(e2->arg(1)->op == ExprOp::Diff);
  CHECK(e2->arg(1)->arg(1)->op == ExprOp::Id);

  const ExprPtr e2b = parse_expression("CARD <: (KEY ** KEY) \\ id");
  CHECK(e2b->arg(1)->arg(1)->op == ExprOp::IdBare);

  const ExprPtr e3 = parse_expression("!c.(c : CARD => first(c) /= second(c))");
  CHECK(e3->op == ExprOp::Forall);
  CHECK(e3->binds == std::vector<std::string>{"c"});
  CHECK(e3->arg(0)->op == ExprOp::Imply);
  CHECK(e3->arg(0)->arg(1)->op == ExprOp::Neq);
  CHECK(e3->arg(0)->arg(1)->arg(0)->op == ExprOp::Apply);
}

TEST_CASE("round-trip every fixture component") {
  for (const auto& entry : std::filesystem::recursive_directory_iterator(fixtures())) {
    const std::string ext = entry.path().extension().string();
    if (ext != ".ebm" && ext != ".ebc") continue;
    const std::string text = slurp(entry.path().string());
    const Component first = parse_component(text);
    const Component second = parse_component(print_component(first));
    CHECK_MESSAGE(sameComponent(first, second), entry.path().string());
    const Component third = parse_component(print_component(second));
    CHECK_MESSAGE(sameComponent(second, third), entry.path().string());
  }
}

TEST_CASE("unicode aliases parse to the same tree") {
  const ExprPtr ascii = parse_expression("owns : ROOM +-> GUEST");
  const ExprPtr uni = parse_expression("owns ∈ ROOM ⇸ GUEST");
  CHECK(equalExpr(ascii, uni));

  const ExprPtr a2 = parse_expression("!c.(c : CARD => first(c) /= second(c))");
  const ExprPtr u2 =
      parse_expression("∀c·(c ∈ CARD ⇒ first(c) ≠ second(c))");
  CHECK(equalExpr(a2, u2));

  const ExprPtr a3 = parse_expression("{c} <<| cards_adm");
  const ExprPtr u3 = parse_expression("{c} ⩤ cards_adm");
  CHECK(equalExpr(a3, u3));
}

TEST_CASE("unicode printing reparses equal") {
  const std::string text = slurp(fixtures() + "/sceh/Hotel_Ctx1.ebc");
  const Component c = parse_component(text);
  const Component viaUnicode = parse_component(print_component(c, {.unicode = true}));
  CHECK(sameComponent(c, viaUnicode));
}

TEST_CASE("errors carry positions") {
  try {
    parse_component("CONTEXT c AXIOMS axm1: x = END");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.pos.line == 1);
    CHECK(e.pos.column > 20);
  }
  CHECK_THROWS_AS(parse_component("CONTEXT c AXIOMS a1: x = 1 a1: x = 2 END"), SyntaxError);
  CHECK_THROWS_AS(parse_component("MACHINE m REFINES a REFINES b END"), SyntaxError);
  CHECK_THROWS_AS(parse_expression("x ="), SyntaxError);
}

TEST_CASE("when is accepted for parameterless events") {
  const Component c = parse_component(
      "MACHINE m VARIABLES x INVARIANTS inv1: x : NAT EVENTS "
      "INITIALISATION = BEGIN act1: x := 0 END "
      "tick = STATUS ordinary WHEN grd1: x = 0 THEN act1: x := 1 END END");
  CHECK(c.machine->events[1].guards.size() == 1);
  CHECK_THROWS_AS(parse_component("MACHINE m EVENTS e = ANY p WHEN grd1: p = 0 THEN skip END END"),
                  SyntaxError);
}

TEST_CASE("precedence fixes the usual traps") {
  // KEY ** KEY \ id  ==  (KEY ** KEY) \ id
  const ExprPtr e = parse_expression("KEY ** KEY \\ id");
  CHECK(e->op == ExprOp::Diff);
  // a |-> b : r  ==  (a |-> b) : r, checked above; arrows are loosest
  const ExprPtr t = parse_expression("owns : ROOM +-> GUEST \\/ OTHER");
  CHECK(t->arg(1)->op == ExprOp::Pfun);
  CHECK(t->arg(1)->arg(1)->op == ExprOp::Union);
  // x + 1 > 0 groups the sum
  const ExprPtr s = parse_expression("x + 1 > 0");
  CHECK(s->op == ExprOp::Gt);
  CHECK(s->arg(0)->op == ExprOp::Add);
}
