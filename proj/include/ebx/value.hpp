// Finite value algebra: atoms, sets, pairs, relations and the function kinds.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ebx {

// Element of an instantiated carrier set, e.g. GUEST1 = {sort: "GUEST", index: 0}.
struct Atom {
  std::string sort;
  int index = 0;

  std::string display() const { return sort + std::to_string(index + 1); }

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

// Immutable value: atom, boolean, integer, finite set, or ordered pair.
// Sets are kept sorted and deduplicated so equal values compare equal and
// enumeration order is reproducible.
class Value {
public:
  enum class Tag { Atom, Bool, Int, Set, Pair };

  Value() : tag_(Tag::Set) {}  // empty set

  static Value atom(Atom a);
  static Value atom(std::string sort, int index);
  static Value boolean(bool b);
  static Value integer(std::int64_t n);
  static Value set(std::vector<Value> elems);  // sorts + dedups
  static Value pair(Value first, Value second);
  static Value emptySet() { return Value(); }

  Tag tag() const { return tag_; }
  bool isSet() const { return tag_ == Tag::Set; }
  bool isPair() const { return tag_ == Tag::Pair; }

  const Atom& asAtom() const;
  bool asBool() const;
  std::int64_t asInt() const;
  const std::vector<Value>& elems() const;  // set elements, canonical order
  const Value& first() const;               // pair components
  const Value& second() const;

  bool contains(const Value& v) const;  // set membership
  std::size_t size() const { return elems().size(); }

  std::string show() const;  // ProB-style rendering, e.g. {(ROOM1|->KEY1)}

  friend bool operator==(const Value& a, const Value& b);
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

private:
  Tag tag_;
  Atom atom_;
  bool bool_ = false;
  std::int64_t int_ = 0;
  std::vector<Value> elems_;  // Set: members; Pair: exactly {first, second}
};

// Well-definedness failures surfaced by the algebra.
struct ApplyUndefined : std::runtime_error {
  explicit ApplyUndefined(const std::string& what) : std::runtime_error(what) {}
};
struct ApplyAmbiguous : std::runtime_error {
  explicit ApplyAmbiguous(const std::string& what) : std::runtime_error(what) {}
};
struct ShapeMismatch : std::runtime_error {
  explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};
struct CapExceeded : std::runtime_error {
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

namespace relval {

// The nine conformance kinds, least to most constrained.
enum class FunctionKind {
  Relation,
  PartialFn,
  TotalFn,
  PartialInj,
  TotalInj,
  PartialSurj,
  TotalSurj,
  PartialBij,
  TotalBij,
};

constexpr FunctionKind kAllKinds[] = {
    FunctionKind::Relation,    FunctionKind::PartialFn,   FunctionKind::TotalFn,
    FunctionKind::PartialInj,  FunctionKind::TotalInj,    FunctionKind::PartialSurj,
    FunctionKind::TotalSurj,   FunctionKind::PartialBij,  FunctionKind::TotalBij,
};

std::string kindName(FunctionKind k);

// Queries over a relation value (a set whose elements are all pairs).
Value domainOf(const Value& r);
Value rangeOf(const Value& r);
Value inverseOf(const Value& r);
Value imageOf(const Value& r, const Value& s);   // seconds of pairs whose first is in s
Value applyAt(const Value& r, const Value& x);   // throws ApplyUndefined / ApplyAmbiguous

enum class RestrictMode { DomRestrict, DomSubtract, RanRestrict, RanSubtract };
Value restrict(const Value& r, const Value& s, RestrictMode mode);

enum class CombineOp {
  Union,
  Intersection,
  Difference,
  Override,          // r <+ s
  FwdCompose,        // r ; s
  CartesianProduct,  // r ** s
  DirectProduct,     // r >< s : {(x, (y,z)) | (x,y) in r, (x,z) in s}
  ParallelProduct,   // r || s : {((x,v), (y,w)) | (x,y) in r, (v,w) in s}
};
Value combine(const Value& r, const Value& s, CombineOp op);

// Identity relation over a finite set.
Value identityOver(const Value& s);

// All subsets of s, guarded by the enumeration cap (|s| <= cap required).
Value powersetOf(const Value& s, std::size_t capElems = 6);

bool isFunctional(const Value& r);
bool conforms(const Value& r, FunctionKind kind, const Value& dom, const Value& cod);

}  // namespace relval
}  // namespace ebx
