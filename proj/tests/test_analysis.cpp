#include <filesystem>

#include "doctest.h"
#include "ebx/analysis.hpp"
#include "ebx/syntax.hpp"

using namespace ebx;

namespace {

std::string fixtures() {
  if (const char* env = std::getenv("EBX_FIXTURES")) return env;
  for (auto p : {"fixtures", "../fixtures", "../../fixtures"})
    if (std::filesystem::exists(p)) return p;
  return "fixtures";
}

Project scehProject() { return load_project(fixtures() + "/sceh"); }

}  // namespace

TEST_CASE("SCEH project is structurally clean") {
  const Project p = scehProject();
  CHECK(p.components.size() == 7);
  const StructureReport rep = check_structure(p);
  CHECK(rep.findings.empty());
  const auto closure = rep.contextClosure.at("Hotel_M3");
  CHECK(closure == std::vector<std::string>{"Hotel_Ctx0", "Hotel_Ctx1", "Hotel_Ctx3"});
  CHECK(rep.refinesChain.at("Hotel_M3") ==
        std::vector<std::string>{"Hotel_M0", "Hotel_M1", "Hotel_M2", "Hotel_M3"});
}

TEST_CASE("extends cycle is reported") {
  Project p;
  p.add(parse_component("CONTEXT C1 EXTENDS C2 END"));
  p.add(parse_component("CONTEXT C2 EXTENDS C1 END"));
  const StructureReport rep = check_structure(p);
  REQUIRE_FALSE(rep.findings.empty());
  CHECK(rep.findings[0].code == "Cycle");
}

TEST_CASE("dangling references are reported") {
  Project p;
  p.add(parse_component("MACHINE m SEES nowhere VARIABLES x INVARIANTS inv1: x : NAT EVENTS "
                        "INITIALISATION = BEGIN act1: x := 0 END END"));
  const StructureReport rep = check_structure(p);
  bool found = false;
  for (const auto& f : rep.findings) found |= f.code == "DanglingReference";
  CHECK(found);
}

TEST_CASE("SCEH types as in the paper") {
  const Project p = scehProject();
  const Analysis a = infer_types(p);
  for (const auto& f : a.findings) CAPTURE(f.code + " " + f.component + " " + f.detail);
  REQUIRE(a.clean());

  const ComponentEnv& m0 = a.env("Hotel_M0");
  const TypingInfo& owns = m0.idents.at("owns");
  CHECK(owns.arrow == ExprOp::Pfun);
  CHECK(owns.type.show() == "POW(ROOM ** GUEST)");
  CHECK(m0.predClass.at("inv0_1") == PredClass::TypingOnly);

  const ComponentEnv& ctx1 = a.env("Hotel_Ctx1");
  CHECK(ctx1.predClass.at("axm1_1") == PredClass::TypingAndConstraint);
  CHECK(ctx1.idents.at("CARD").type.show() == "POW(KEY ** KEY)");
  CHECK(ctx1.idents.at("f").arrow == ExprOp::Tinj);
  CHECK(ctx1.predClass.at("axm1_4") == PredClass::Constraint);
  CHECK(ctx1.predClass.at("axm1_6") == PredClass::Constraint);

  const ComponentEnv& m1 = a.env("Hotel_M1");
  CHECK(m1.predClass.at("inv1_2") == PredClass::TypingAndConstraint);
  CHECK(m1.idents.at("issued").type.show() == "POW(KEY)");
  CHECK(m1.eventParams.at("check_in1").at("g").type.show() == "GUEST");
  CHECK(m1.eventParams.at("check_in1").at("c").type.show() == "KEY ** KEY");
  CHECK(m1.predClass.at("check_in1/grd1") == PredClass::TypingOnly);
  CHECK(m1.predClass.at("check_in1/grd5") == PredClass::Constraint);

  // M3 sees everything through the closure
  const ComponentEnv& m3 = a.env("Hotel_M3");
  CHECK(m3.idents.count("owns_adm") == 1);
  CHECK(m3.idents.at("owns").role == "variable");
}

TEST_CASE("typing is clause-order independent") {
  Project p1;
  p1.add(parse_component("CONTEXT c SETS S END"));
  p1.add(parse_component(
      "MACHINE m SEES c VARIABLES x y INVARIANTS inv1: x : S inv2: y <: S inv3: x : y "
      "EVENTS INITIALISATION = BEGIN act1: y := S act2: x :: S END END"));
  Project p2;
  p2.add(parse_component("CONTEXT c SETS S END"));
  p2.add(parse_component(
      "MACHINE m SEES c VARIABLES x y INVARIANTS inv2: y <: S inv3: x : y inv1: x : S "
      "EVENTS INITIALISATION = BEGIN act1: y := S act2: x :: S END END"));
  const Analysis a1 = infer_types(p1);
  const Analysis a2 = infer_types(p2);
  REQUIRE(a1.clean());
  REQUIRE(a2.clean());
  CHECK(a1.env("m").idents.at("x").type.show() == a2.env("m").idents.at("x").type.show());
  CHECK(a1.env("m").idents.at("y").type.show() == a2.env("m").idents.at("y").type.show());
}

TEST_CASE("untyped identifiers are findings, not aborts") {
  Project p;
  p.add(parse_component("CONTEXT c CONSTANTS k AXIOMS axm1: k = k END"));
  const Analysis a = infer_types(p);
  bool found = false;
  for (const auto& f : a.findings) found |= f.code == "UntypedIdentifier";
  CHECK(found);
}

TEST_CASE("theorems may not introduce typing") {
  Project p;
  p.add(parse_component(
      "CONTEXT c SETS S CONSTANTS k THEOREMS thm1: k : S END"));
  const Analysis a = infer_types(p);
  bool found = false;
  for (const auto& f : a.findings) found |= f.code == "UntypedIdentifier";
  CHECK(found);
}

TEST_CASE("bare id is elaborated over its carrier") {
  const Project p = scehProject();
  const Analysis a = infer_types(p);
  REQUIRE(a.clean());
  // axm1_1 of Hotel_Ctx1 uses bare id; the checker pinned it to KEY
  bool sawKey = false;
  for (const auto& [node, carrier] : a.idCarriers) sawKey |= carrier == "KEY";
  CHECK(sawKey);
}

TEST_CASE("type mismatch is reported with its label") {
  Project p;
  p.add(parse_component("CONTEXT c SETS S T CONSTANTS k AXIOMS axm1: k : S axm2: k : T ** S END"));
  const Analysis a = infer_types(p);
  bool found = false;
  for (const auto& f : a.findings)
    found |= f.code == "TypeError" && f.detail.find("axm2") != std::string::npos;
  CHECK(found);
}
