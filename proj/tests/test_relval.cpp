#include <vector>

#include "doctest.h"
#include "ebx/value.hpp"

using namespace ebx;
using namespace ebx::relval;

namespace {

Value at(const std::string& sort, int i) { return Value::atom(sort, i); }
Value pr(const Value& a, const Value& b) { return Value::pair(a, b); }

std::vector<Value> atoms(const std::string& sort, int n) {
  std::vector<Value> out;
  for (int i = 0; i < n; ++i) out.push_back(at(sort, i));
  return out;
}

// All relations between two atom universes, enumerated by pair-subset mask.
std::vector<Value> allRelations(int nd, int nc) {
  std::vector<Value> pairs;
  for (int i = 0; i < nd; ++i)
    for (int j = 0; j < nc; ++j) pairs.push_back(pr(at("D", i), at("C", j)));
  std::vector<Value> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << pairs.size()); ++mask) {
    std::vector<Value> members;
    for (std::size_t k = 0; k < pairs.size(); ++k)
      if (mask & (std::size_t{1} << k)) members.push_back(pairs[k]);
    out.push_back(Value::set(std::move(members)));
  }
  return out;
}

}  // namespace

TEST_CASE("query basics") {
  const Value r1 = at("ROOM", 0), r2 = at("ROOM", 1), g1 = at("GUEST", 0);
  const Value rel = Value::set({pr(r1, g1), pr(r2, g1)});
  CHECK(domainOf(rel) == Value::set({r1, r2}));
  CHECK(rangeOf(Value::emptySet()) == Value::emptySet());
  CHECK(imageOf(rel, Value::set({r1})) == Value::set({g1}));

  // f = {ROOM1|->KEY1, ROOM2|->KEY2}: apply at ROOM1 gives KEY1
  const Value k1 = at("KEY", 0), k2 = at("KEY", 1);
  const Value f = Value::set({pr(r1, k1), pr(r2, k2)});
  CHECK(applyAt(f, r1) == k1);
  CHECK_THROWS_AS(applyAt(f, at("ROOM", 2)), ApplyUndefined);

  const Value amb = Value::set({pr(r1, k1), pr(r1, k2)});
  CHECK_THROWS_AS(applyAt(amb, r1), ApplyAmbiguous);
}

TEST_CASE("restriction") {
  const Value c1 = at("C", 0), c2 = at("C", 1), a1 = at("A", 0);
  const Value rel = Value::set({pr(c1, a1), pr(c2, a1)});
  // {c1} <<| rel keeps only the c2 pair (check_out3 act3 shape)
  CHECK(restrict(rel, Value::set({c1}), RestrictMode::DomSubtract) == Value::set({pr(c2, a1)}));
  CHECK(restrict(rel, Value::emptySet(), RestrictMode::DomRestrict) == Value::emptySet());
  CHECK(restrict(rel, domainOf(rel), RestrictMode::DomRestrict) == rel);
  CHECK(restrict(rel, Value::emptySet(), RestrictMode::DomSubtract) == rel);
  CHECK(restrict(rel, Value::set({a1}), RestrictMode::RanRestrict) == rel);
  CHECK(restrict(rel, Value::set({a1}), RestrictMode::RanSubtract) == Value::emptySet());
}

TEST_CASE("combine") {
  const Value a = at("X", 0), y = at("X", 1), z = at("X", 2);
  const Value one = Value::integer(1), two = Value::integer(2);
  CHECK(combine(Value::set({pr(a, one)}), Value::set({pr(a, two)}), CombineOp::Override) ==
        Value::set({pr(a, two)}));
  const Value k1 = at("KEY", 0), k2 = at("KEY", 1), k3 = at("KEY", 2);
  CHECK(combine(Value::set({k1, k2}), Value::set({k2, k3}), CombineOp::Union) ==
        Value::set({k1, k2, k3}));
  CHECK(combine(Value::set({pr(a, y)}), Value::set({pr(y, z)}), CombineOp::FwdCompose) ==
        Value::set({pr(a, z)}));
  CHECK(combine(Value::set({k1, k2}), Value::set({k3}), CombineOp::Union) ==
        Value::set({k1, k2, k3}));

  const Value r = Value::set({pr(a, y)});
  const Value s = Value::set({pr(a, z)});
  CHECK(combine(r, s, CombineOp::DirectProduct) == Value::set({pr(a, pr(y, z))}));
  CHECK(combine(r, s, CombineOp::ParallelProduct) == Value::set({pr(pr(a, a), pr(y, z))}));
}

TEST_CASE("conforms on the SCEH examples") {
  const Value room = Value::set(atoms("ROOM", 2));
  const Value key3 = Value::set(atoms("KEY", 3));
  const Value guest = Value::set(atoms("GUEST", 2));
  const Value f =
      Value::set({pr(at("ROOM", 0), at("KEY", 0)), pr(at("ROOM", 1), at("KEY", 1))});
  CHECK(conforms(f, FunctionKind::TotalInj, room, key3));
  CHECK(conforms(Value::emptySet(), FunctionKind::PartialFn, room, guest));
  const Value notFn = Value::set({pr(at("A", 0), Value::integer(1)),
                                  pr(at("A", 0), Value::integer(2))});
  CHECK_FALSE(conforms(notFn, FunctionKind::PartialFn, Value::set({at("A", 0)}),
                       Value::set({Value::integer(1), Value::integer(2)})));
}

TEST_CASE("algebra properties over all small relations") {
  const Value dom = Value::set(atoms("D", 2));
  const Value cod = Value::set(atoms("C", 2));
  for (const auto& r : allRelations(2, 2)) {
    CHECK(combine(r, r, CombineOp::Union) == r);
    CHECK(combine(r, r, CombineOp::Intersection) == r);
    CHECK(combine(r, r, CombineOp::Override) == r);
    CHECK(restrict(r, domainOf(r), RestrictMode::DomRestrict) == r);
    CHECK(restrict(r, Value::emptySet(), RestrictMode::DomSubtract) == r);
    CHECK(inverseOf(inverseOf(r)) == r);
    // TotalBij conforms implies every other kind conforms
    if (conforms(r, FunctionKind::TotalBij, dom, cod))
      for (FunctionKind k : kAllKinds) CHECK(conforms(r, k, dom, cod));
  }
}

TEST_CASE("composition associativity on small relations") {
  std::vector<Value> sq;  // all relations over D x D
  for (int m = 0; m < 16; ++m) {
    std::vector<Value> members;
    int bit = 0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j, ++bit)
        if (m & (1 << bit)) members.push_back(pr(at("D", i), at("D", j)));
    sq.push_back(Value::set(std::move(members)));
  }
  for (const auto& r : sq)
    for (const auto& s : sq)
      for (const auto& t : sq) {
        const Value lhs = combine(combine(r, s, CombineOp::FwdCompose), t, CombineOp::FwdCompose);
        const Value rhs = combine(r, combine(s, t, CombineOp::FwdCompose), CombineOp::FwdCompose);
        CHECK(lhs == rhs);
      }
}

TEST_CASE("kind lattice over universes up to 3") {
  struct Edge {
    FunctionKind sub, super;
  };
  const Edge edges[] = {
      {FunctionKind::PartialFn, FunctionKind::Relation},
      {FunctionKind::TotalFn, FunctionKind::PartialFn},
      {FunctionKind::PartialInj, FunctionKind::PartialFn},
      {FunctionKind::TotalInj, FunctionKind::TotalFn},
      {FunctionKind::TotalInj, FunctionKind::PartialInj},
      {FunctionKind::PartialSurj, FunctionKind::PartialFn},
      {FunctionKind::TotalSurj, FunctionKind::TotalFn},
      {FunctionKind::TotalSurj, FunctionKind::PartialSurj},
      {FunctionKind::PartialBij, FunctionKind::PartialInj},
      {FunctionKind::TotalBij, FunctionKind::TotalInj},
      {FunctionKind::TotalBij, FunctionKind::TotalSurj},
      {FunctionKind::TotalBij, FunctionKind::PartialBij},
  };
  for (int nd = 1; nd <= 3; ++nd)
    for (int nc = 1; nc <= 3; ++nc) {
      const Value dom = Value::set(atoms("D", nd));
      const Value cod = Value::set(atoms("C", nc));
      for (const auto& r : allRelations(nd, nc))
        for (const auto& e : edges)
          if (conforms(r, e.sub, dom, cod)) CHECK(conforms(r, e.super, dom, cod));
    }
}

TEST_CASE("image and apply agree at functional points") {
  for (const auto& r : allRelations(2, 2)) {
    for (int i = 0; i < 2; ++i) {
      const Value x = at("D", i);
      const Value img = imageOf(r, Value::set({x}));
      if (img.size() == 1) CHECK(img == Value::set({applyAt(r, x)}));
    }
  }
}

TEST_CASE("identity and powerset") {
  const Value s = Value::set(atoms("K", 2));
  CHECK(identityOver(s) ==
        Value::set({pr(at("K", 0), at("K", 0)), pr(at("K", 1), at("K", 1))}));
  CHECK(powersetOf(s).size() == 4);
  CHECK_THROWS_AS(powersetOf(Value::set(atoms("K", 7))), CapExceeded);
}

TEST_CASE("canonical form and display") {
  const Value s1 = Value::set({at("A", 1), at("A", 0), at("A", 1)});
  const Value s2 = Value::set({at("A", 0), at("A", 1)});
  CHECK(s1 == s2);
  CHECK(at("GUEST", 0).show() == "GUEST1");
  CHECK(pr(at("ROOM", 0), at("KEY", 0)).show() == "(ROOM1|->KEY1)");
}
