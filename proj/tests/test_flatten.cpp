#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
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

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("flatten_context(Hotel_Ctx3) matches the transcribed listing") {
  const Project p = load_project(fixtures() + "/sceh");
  const ContextAst flat = flatten_context("Hotel_Ctx3", p);
  CHECK(flat.sets == std::vector<std::string>{"GUEST", "ROOM", "KEY", "ADMINISTRATOR"});
  CHECK(flat.constants == std::vector<std::string>{"CARD", "first", "second", "f", "owns_adm"});
  REQUIRE(flat.axioms.size() == 8);
  CHECK(flat.axioms.front().label == "axm1_1");
  CHECK(flat.axioms.back().label == "axm3_1");

  Component c;
  c.context = flat;
  const Component golden = parse_component(slurp(fixtures() + "/golden/Hotel_Ctx3_flat.ebc"));
  CHECK(print_component(c) == print_component(golden));
}

TEST_CASE("flatten_machine(Hotel_M3) matches the transcribed listing") {
  const Project p = load_project(fixtures() + "/sceh");
  const MachineAst flat = flatten_machine("Hotel_M3", p);
  CHECK(flat.variables ==
        std::vector<std::string>{"owns", "cards", "issued", "currk", "roomk", "cards_adm"});
  std::vector<std::string> names;
  for (const auto& ev : flat.events) names.push_back(ev.name);
  CHECK(names == std::vector<std::string>{"INITIALISATION", "check_in3", "check_out3",
                                          "enter_room_change3", "enter_room_normal3",
                                          "leave_room3", "enter_room_normal_adm",
                                          "leave_room_adm"});
  for (const auto& ev : flat.events) CHECK(ev.refines.empty());

  Component c;
  c.machine = flat;
  const Component golden = parse_component(slurp(fixtures() + "/golden/Hotel_M3_flat.ebm"));
  CHECK(print_component(c) == print_component(golden));
}

TEST_CASE("flatten of a refines-free machine is the identity") {
  const Project p = load_project(fixtures() + "/sceh");
  const MachineAst flat = flatten_machine("Hotel_M0", p);
  Component c;
  c.machine = flat;
  CHECK(print_component(c) == print_component(*p.find("Hotel_M0")));
}

TEST_CASE("flatten keeps new events without a refines mark") {
  Project p;
  p.add(parse_component("CONTEXT c SETS S END"));
  p.add(parse_component(
      "MACHINE m0 SEES c VARIABLES x INVARIANTS inv1: x <: S EVENTS "
      "INITIALISATION = BEGIN act1: x := {} END "
      "grow = STATUS ordinary ANY e WHERE grd1: e : S THEN act1: x := x \\/ {e} END END"));
  p.add(parse_component(
      "MACHINE m1 REFINES m0 SEES c VARIABLES x INVARIANTS inv2: x <: S EVENTS "
      "INITIALISATION = BEGIN act1: x := {} END "
      "grow1 = STATUS ordinary REFINES grow ANY e WHERE grd1: e : S THEN act1: x := x \\/ {e} END "
      "e_new = STATUS ordinary ANY e WHERE grd1: e : S THEN act1: x := x \\ {e} END END"));
  const MachineAst flat = flatten_machine("m1", p);
  std::vector<std::string> names;
  for (const auto& ev : flat.events) names.push_back(ev.name);
  CHECK(names == std::vector<std::string>{"INITIALISATION", "grow1", "e_new"});
  CHECK(flat.invariants.size() == 2);
  CHECK(flat.invariants[0].label == "inv1");
}

TEST_CASE("diamond extends keeps each ancestor clause once") {
  Project p;
  p.add(parse_component("CONTEXT C0 SETS S CONSTANTS k AXIOMS axm0: k : S END"));
  p.add(parse_component("CONTEXT C1 EXTENDS C0 CONSTANTS a AXIOMS axm1: a : S END"));
  p.add(parse_component("CONTEXT C2 EXTENDS C0 CONSTANTS b AXIOMS axm2: b : S END"));
  p.add(parse_component("CONTEXT C3 EXTENDS C1 C2 END"));
  const ContextAst flat = flatten_context("C3", p);
  CHECK(flat.sets == std::vector<std::string>{"S"});
  CHECK(flat.constants == std::vector<std::string>{"k", "a", "b"});
  REQUIRE(flat.axioms.size() == 3);
  CHECK(flat.axioms[0].label == "axm0");
}

TEST_CASE("flatten is idempotent") {
  const Project p = load_project(fixtures() + "/sceh");
  Component flatM;
  flatM.machine = flatten_machine("Hotel_M3", p);
  Component flatC;
  flatC.context = flatten_context("Hotel_Ctx3", p);
  Project q;
  q.add(parse_component(print_component(flatM)));
  q.add(parse_component(print_component(flatC)));
  q.add(parse_component(slurp(fixtures() + "/sceh/Hotel_Ctx0.ebc")));  // unused ancestor gone
  Component again;
  again.machine = flatten_machine("Hotel_M3", q);
  CHECK(print_component(again) == print_component(flatM));
}

TEST_CASE("vanished variables are rejected") {
  Project p;
  p.add(parse_component("CONTEXT c SETS S END"));
  p.add(parse_component("MACHINE m0 SEES c VARIABLES x INVARIANTS inv1: x <: S EVENTS "
                        "INITIALISATION = BEGIN act1: x := {} END END"));
  p.add(parse_component("MACHINE m1 REFINES m0 SEES c VARIABLES y INVARIANTS inv2: y <: S "
                        "EVENTS INITIALISATION = BEGIN act1: y := {} END END"));
  CHECK_THROWS_AS(flatten_machine("m1", p), FlattenError);
}

TEST_CASE("label preservation: every flattened label exists in exactly one ancestor") {
  const Project p = load_project(fixtures() + "/sceh");
  const MachineAst flat = flatten_machine("Hotel_M3", p);
  for (const auto& inv : flat.invariants) {
    int owners = 0;
    for (const auto& mn : {"Hotel_M0", "Hotel_M1", "Hotel_M2", "Hotel_M3"})
      for (const auto& cand : p.machine(mn)->invariants) owners += cand.label == inv.label;
    CHECK(owners == 1);
  }
}
