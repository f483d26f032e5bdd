#include <filesystem>

#include "doctest.h"
#include "ebx/animate.hpp"
#include "ebx/flatten.hpp"
#include "ebx/syntax.hpp"

using namespace ebx;

namespace {

std::string fixtures() {
  if (const char* env = std::getenv("EBX_FIXTURES")) return env;
  for (auto p : {"fixtures", "../fixtures", "../../fixtures"})
    if (std::filesystem::exists(p)) return p;
  return "fixtures";
}

Scope scehScope() { return Scope::parse_file(fixtures() + "/scopes/sceh.scope"); }
Scope scenario2Scope() { return Scope::parse_file(fixtures() + "/scopes/scenario2.scope"); }

struct Loaded {
  Project project;
  Analysis analysis;
};

Loaded load(const std::string& dir) {
  Loaded l{load_project(fixtures() + "/" + dir), {}};
  l.analysis = infer_types(l.project);
  REQUIRE(l.analysis.clean());
  return l;
}

}  // namespace

TEST_CASE("Hotel_M0 instantiates to the empty reservation state") {
  Loaded l = load("sceh");
  Animator an(*l.project.machine("Hotel_M0"), l.project, l.analysis, scehScope());
  auto states = an.instantiate();
  REQUIRE(states.size() == 1);  // no constants: a single model
  CHECK(states[0].variables.at("owns") == Value::emptySet());
  CHECK(an.instantiationFindings().empty());
}

TEST_CASE("unsatisfiable axioms yield NoConstantModel") {
  Project p;
  p.add(parse_component("CONTEXT c SETS S CONSTANTS k AXIOMS axm1: k : S axm2: k /= k END"));
  p.add(parse_component("MACHINE m SEES c VARIABLES x INVARIANTS inv1: x <: S EVENTS "
                        "INITIALISATION = BEGIN act1: x := {} END END"));
  const Analysis a = infer_types(p);
  REQUIRE(a.clean());
  Scope s;
  s.carrierSizes["S"] = 2;
  Animator an(*p.machine("m"), p, a, s);
  CHECK_THROWS_AS(an.instantiate(), NoConstantModel);
}

TEST_CASE("step fires check_in and respects the corrected grd3") {
  Loaded l = load("sceh");
  Animator an(*l.project.machine("Hotel_M0"), l.project, l.analysis, scehScope());
  auto init = an.instantiate().front();

  std::map<std::string, Value> b{{"g", Value::atom("GUEST", 0)}, {"r", Value::atom("ROOM", 0)}};
  auto succs = an.step(init, "check_in", b);
  REQUIRE(succs.size() == 1);
  CHECK(succs[0].variables.at("owns") ==
        Value::set({Value::pair(Value::atom("ROOM", 0), Value::atom("GUEST", 0))}));

  // rebooking the same room must fail on grd3 naming the guard
  std::map<std::string, Value> b2{{"g", Value::atom("GUEST", 1)}, {"r", Value::atom("ROOM", 0)}};
  try {
    an.step(succs[0], "check_in", b2);
    FAIL("expected EventDisabled");
  } catch (const EventDisabled& e) {
    CHECK(e.guardLabel == "grd3");
  }
}

TEST_CASE("skip events return the same state") {
  Loaded l = load("sceh");
  const MachineAst flat = flatten_machine("Hotel_M3", l.project);
  Project q = l.project;
  Component c;
  c.machine = flat;
  // flat machine replaces the chained one under the same name closure
  Project flatProject;
  flatProject.add(parse_component(print_component(c)));
  Component ctx;
  ctx.context = flatten_context("Hotel_Ctx3", l.project);
  flatProject.add(parse_component(print_component(ctx)));
  const Analysis a = infer_types(flatProject);
  REQUIRE(a.clean());
  Animator an(*flatProject.machine("Hotel_M3"), flatProject, a, scehScope());
  auto init = an.instantiate();
  REQUIRE_FALSE(init.empty());
  // no card is held initially, so enter_room_normal3 is disabled everywhere;
  // fire the event loop over every enabled successor instead
  for (const auto& ev : an.machine().events) {
    if (ev.name != "enter_room_normal3") continue;
    for (const auto& b : an.enabledBindings(init.front(), ev)) {
      auto succs = an.step(init.front(), ev.name, b);
      for (const auto& s : succs) CHECK(s == init.front());
    }
  }
}

TEST_CASE("scenario 1: as many check_out as check_in returns to the initial state") {
  Loaded l = load("sceh");
  Animator an(*l.project.machine("Hotel_M0"), l.project, l.analysis, scehScope());
  const TraceScript script =
      TraceScript::parse_file(fixtures() + "/traces/scenario1.trc", an.evaluator().universe());
  const TraceResult res = an.replay_trace(script);
  CHECK(res.completed);
  CHECK(res.stepsExecuted == 4);
  CHECK(res.invariantViolations.empty());
  CHECK(res.final.variables.at("owns") == Value::emptySet());
  CHECK(res.final == res.initial);
}

TEST_CASE("scenario 2 on the buggy fixture runs through, inv0_1 never breaks") {
  Loaded l = load("sceh-buggy-grd3");
  Animator an(*l.project.machine("Hotel_M0"), l.project, l.analysis, scenario2Scope());
  const TraceScript script =
      TraceScript::parse_file(fixtures() + "/traces/scenario2.trc", an.evaluator().universe());
  const TraceResult res = an.replay_trace(script);
  CHECK(res.completed);
  CHECK(res.stepsExecuted == 5);
  CHECK(res.invariantViolations.empty());
}

TEST_CASE("scenario 2 on the corrected fixture halts at step 3 with grd3") {
  Loaded l = load("sceh");
  Animator an(*l.project.machine("Hotel_M0"), l.project, l.analysis, scenario2Scope());
  const TraceScript script =
      TraceScript::parse_file(fixtures() + "/traces/scenario2.trc", an.evaluator().universe());
  const TraceResult res = an.replay_trace(script);
  CHECK_FALSE(res.completed);
  CHECK(res.stepsExecuted == 2);
  CHECK(res.failure.find("EventDisabled(grd3)") != std::string::npos);
  CHECK(res.failure.find("step 3") != std::string::npos);
}

TEST_CASE("explore the corrected Hotel_M0: no violations, no deadlocks") {
  Loaded l = load("sceh");
  Animator an(*l.project.machine("Hotel_M0"), l.project, l.analysis, scehScope());
  const ExplorationReport rep = an.explore();
  REQUIRE(rep.models.size() == 1);
  const auto& m = rep.models[0];
  CHECK(m.violations.empty());
  CHECK(m.deadlocks.empty());
  CHECK(m.uncovered.empty());
  // all partial functions ROOM +-> GUEST at 2x2 are reachable: 9 states
  CHECK(m.states.size() == 9);
}

TEST_CASE("explore the weakened Hotel_M1: paper's deadlock reappears") {
  Loaded l = load("sceh-weak");
  Animator an(*l.project.machine("Hotel_M1"), l.project, l.analysis, scehScope());
  const ExplorationReport rep = an.explore();

  bool sawCoincidingKeysDeadlock = false;
  bool uncoveredListed = false;
  for (const auto& m : rep.models) {
    // "a card's two keys coincide": some CARD element is a pair (k, k)
    bool coinciding = false;
    const Value card = m.constants.at("CARD");
    for (const auto& p : card.elems()) coinciding |= p.first() == p.second();
    if (!coinciding) continue;
    for (const auto& d : m.deadlocks) {
      const auto path = m.pathTo(d);
      if (path.size() <= 2) {
        sawCoincidingKeysDeadlock = true;
        uncoveredListed = m.uncovered == std::vector<std::string>{"check_in1", "check_out1"};
      }
    }
    if (sawCoincidingKeysDeadlock) break;
  }
  CHECK(sawCoincidingKeysDeadlock);
  CHECK(uncoveredListed);
}

TEST_CASE("explore the fully axiomatized Hotel_M1: no coinciding-keys model exists") {
  Loaded l = load("sceh");
  Animator an(*l.project.machine("Hotel_M1"), l.project, l.analysis, scehScope());
  const ExplorationReport rep = an.explore();
  for (const auto& m : rep.models) {
    const Value card = m.constants.at("CARD");
    for (const auto& p : card.elems()) CHECK_FALSE(p.first() == p.second());
  }
}

TEST_CASE("a machine whose only event is unguardable deadlocks at init") {
  Project p;
  p.add(parse_component(
      "MACHINE m VARIABLES v INVARIANTS inv1: v : NAT EVENTS "
      "INITIALISATION = BEGIN act1: v := 0 END "
      "stuck = STATUS ordinary WHEN grd1: false THEN act1: v := 1 END END"));
  const Analysis a = infer_types(p);
  REQUIRE(a.clean());
  Scope s;
  Animator an(*p.machine("m"), p, a, s);
  const ExplorationReport rep = an.explore();
  REQUIRE(rep.models.size() == 1);
  CHECK(rep.models[0].deadlocks == std::vector<std::size_t>{0});
  CHECK(rep.models[0].uncovered == std::vector<std::string>{"stuck"});
}

TEST_CASE("frame soundness and simultaneity") {
  // swapping independent actions yields identical successors, and unassigned
  // variables never change
  Project p;
  p.add(parse_component(
      "MACHINE m VARIABLES x y z INVARIANTS inv1: x : NAT inv2: y : NAT inv3: z : NAT EVENTS "
      "INITIALISATION = BEGIN act1: x := 1 act2: y := 2 act3: z := 3 END "
      "swap = STATUS ordinary WHEN grd1: x < 3 THEN act1: x := y act2: y := x END END"));
  p.add(parse_component(
      "MACHINE m2 VARIABLES x y z INVARIANTS inv1: x : NAT inv2: y : NAT inv3: z : NAT EVENTS "
      "INITIALISATION = BEGIN act1: x := 1 act2: y := 2 act3: z := 3 END "
      "swap = STATUS ordinary WHEN grd1: x < 3 THEN act1: y := x act2: x := y END END"));
  const Analysis a = infer_types(p);
  REQUIRE(a.clean());
  Scope s;
  Animator a1(*p.machine("m"), p, a, s);
  Animator a2(*p.machine("m2"), p, a, s);
  auto s1 = a1.step(a1.instantiate().front(), "swap", std::map<std::string, Value>{});
  auto s2 = a2.step(a2.instantiate().front(), "swap", std::map<std::string, Value>{});
  REQUIRE(s1.size() == 1);
  REQUIRE(s2.size() == 1);
  CHECK(s1[0].variables.at("x").asInt() == 2);
  CHECK(s1[0].variables.at("y").asInt() == 1);
  CHECK(s1[0] == s2[0]);                       // action order is irrelevant
  CHECK(s1[0].variables.at("z").asInt() == 3); // frame: z untouched
}

TEST_CASE("guard/step agreement") {
  Loaded l = load("sceh");
  Animator an(*l.project.machine("Hotel_M0"), l.project, l.analysis, scehScope());
  const auto states = an.instantiate();
  const MachineState& init = states.front();
  const EventAst* ev = an.machine().findEvent("check_in");
  const auto enabled = an.enabledBindings(init, *ev);
  // every enumerated binding steps without EventDisabled
  for (const auto& b : enabled) CHECK_NOTHROW(an.step(init, "check_in", b));
  // and a binding outside the enumeration is disabled
  std::size_t total = 0;
  for (int g = 0; g < 2; ++g)
    for (int r = 0; r < 2; ++r) {
      std::map<std::string, Value> b{{"g", Value::atom("GUEST", g)},
                                     {"r", Value::atom("ROOM", r)}};
      bool listed = false;
      for (const auto& e : enabled) listed |= e == b;
      bool steps = true;
      try {
        an.step(init, "check_in", b);
      } catch (const EventDisabled&) {
        steps = false;
      }
      CHECK(steps == listed);
      total += listed;
    }
  CHECK(total == enabled.size());
}

TEST_CASE("nondeterministic actions fan out over all successors") {
  Project p;
  p.add(parse_component("CONTEXT c SETS S END"));
  p.add(parse_component(
      "MACHINE m SEES c VARIABLES v INVARIANTS inv1: v : S EVENTS "
      "INITIALISATION = BEGIN act1: v :: S END "
      "roll = STATUS ordinary WHEN grd1: v : S THEN act1: v :: S END END"));
  const Analysis a = infer_types(p);
  REQUIRE(a.clean());
  Scope s;
  s.carrierSizes["S"] = 3;
  Animator an(*p.machine("m"), p, a, s);
  auto init = an.instantiate();
  CHECK(init.size() == 3);  // one initial state per choice
  auto succs = an.step(init.front(), "roll", std::map<std::string, Value>{});
  CHECK(succs.size() == 3);
}

TEST_CASE("replay reports invariant status on a violating machine") {
  // a machine that can break its own invariant exposes the violation label
  Project p;
  p.add(parse_component(
      "MACHINE m VARIABLES v INVARIANTS inv0: v : NAT inv1: v < 2 EVENTS "
      "INITIALISATION = BEGIN act1: v := 0 END "
      "bump = STATUS ordinary WHEN grd1: v < 3 THEN act1: v := v + 1 END END"));
  const Analysis a = infer_types(p);
  REQUIRE(a.clean());
  Scope s;
  Animator an(*p.machine("m"), p, a, s);
  TraceScript script;
  script.steps = {{"bump", {}}, {"bump", {}}};
  const TraceResult res = an.replay_trace(script);
  CHECK(res.completed);
  REQUIRE(res.invariantViolations.size() == 1);
  CHECK(res.invariantViolations[0].find("inv1") != std::string::npos);
}

TEST_CASE("discharge reachable: corrected Hotel_M0 and Hotel_M1 fully discharge") {
  Loaded l = load("sceh");
  for (const auto& mn : {"Hotel_M0", "Hotel_M1"}) {
    Animator an(*l.project.machine(mn), l.project, l.analysis, scehScope());
    const PoSet pos = generate_pos(*l.project.machine(mn), l.project, l.analysis);
    const DischargeReport rep = an.discharge_finite(pos, DischargeMode::Reachable);
    for (const auto& v : rep.verdicts) {
      CAPTURE(v.name);
      CHECK(v.verdict == Verdict::Discharged);
    }
    CHECK(rep.discharged() == rep.verdicts.size());
  }
}

TEST_CASE("discharge flags violated goals with a counterexample") {
  Project p;
  p.add(parse_component(
      "MACHINE m VARIABLES v INVARIANTS inv1: v : NAT inv2: v < 2 EVENTS "
      "INITIALISATION = BEGIN act1: v := 0 END "
      "bump = STATUS ordinary WHEN grd1: v < 3 THEN act1: v := v + 1 END END"));
  const Analysis a = infer_types(p);
  REQUIRE(a.clean());
  Scope s;
  Animator an(*p.machine("m"), p, a, s);
  const PoSet pos = generate_pos(*p.machine("m"), p, a);
  const DischargeReport rep = an.discharge_finite(pos, DischargeMode::Reachable);
  bool violated = false;
  for (const auto& v : rep.verdicts)
    if (v.name == "bump/inv2/INV") {
      violated = v.verdict == Verdict::Violated;
      CHECK_FALSE(v.counterexample.empty());
    }
  CHECK(violated);
}

TEST_CASE("discharge enumerate mode agrees on a small machine") {
  Project p;
  p.add(parse_component("CONTEXT c SETS S END"));
  p.add(parse_component(
      "MACHINE m SEES c VARIABLES v INVARIANTS inv1: v <: S EVENTS "
      "INITIALISATION = BEGIN act1: v := {} END "
      "add = STATUS ordinary ANY e WHERE grd1: e : S grd2: e /: v THEN act1: v := v \\/ {e} "
      "END END"));
  const Analysis a = infer_types(p);
  REQUIRE(a.clean());
  Scope s;
  s.carrierSizes["S"] = 2;
  Animator an(*p.machine("m"), p, a, s);
  const PoSet pos = generate_pos(*p.machine("m"), p, a);
  const DischargeReport viaStates = an.discharge_finite(pos, DischargeMode::Reachable);
  const DischargeReport viaEnum = an.discharge_finite(pos, DischargeMode::Enumerate);
  REQUIRE(viaStates.verdicts.size() == viaEnum.verdicts.size());
  for (std::size_t i = 0; i < viaStates.verdicts.size(); ++i) {
    CHECK(viaStates.verdicts[i].verdict == Verdict::Discharged);
    CHECK(viaEnum.verdicts[i].verdict == Verdict::Discharged);
  }
}

TEST_CASE("a false goal with satisfiable hypotheses is violated in enumerate mode") {
  Project p;
  p.add(parse_component(
      "MACHINE m VARIABLES v INVARIANTS inv1: v : NAT THEOREMS thm1: v < 0 EVENTS "
      "INITIALISATION = BEGIN act1: v := 0 END END"));
  const Analysis a = infer_types(p);
  REQUIRE(a.clean());
  Scope s;
  Animator an(*p.machine("m"), p, a, s);
  const PoSet pos = generate_pos(*p.machine("m"), p, a);
  const DischargeReport rep = an.discharge_finite(pos, DischargeMode::Enumerate);
  bool sawViolated = false;
  for (const auto& v : rep.verdicts)
    if (v.name == "thm1/THM") sawViolated = v.verdict == Verdict::Violated;
  CHECK(sawViolated);
}

TEST_CASE("explorer and INV discharge agree on violations") {
  Project p;
  p.add(parse_component(
      "MACHINE m VARIABLES v INVARIANTS inv1: v : NAT inv2: v < 2 EVENTS "
      "INITIALISATION = BEGIN act1: v := 0 END "
      "bump = STATUS ordinary WHEN grd1: v < 3 THEN act1: v := v + 1 END END"));
  const Analysis a = infer_types(p);
  REQUIRE(a.clean());
  Scope s;
  Animator an(*p.machine("m"), p, a, s);
  const ExplorationReport rep = an.explore();
  bool explorerFinds = false;
  for (const auto& m : rep.models) explorerFinds |= !m.violations.empty();
  const PoSet pos = generate_pos(*p.machine("m"), p, a);
  const DischargeReport d = an.discharge_finite(pos, DischargeMode::Reachable);
  bool dischargeFinds = false;
  for (const auto& v : d.verdicts)
    dischargeFinds |= v.verdict == Verdict::Violated &&
                      v.name.find("/INV") != std::string::npos;
  CHECK(explorerFinds == dischargeFinds);
}

TEST_CASE("exploration reports are deterministic") {
  Loaded l = load("sceh-weak");
  Animator a1(*l.project.machine("Hotel_M1"), l.project, l.analysis, scehScope());
  Animator a2(*l.project.machine("Hotel_M1"), l.project, l.analysis, scehScope());
  CHECK(a1.explore().render() == a2.explore().render());
}
