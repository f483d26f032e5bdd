#include "ebx/value.hpp"

#include <algorithm>
#include <sstream>

namespace ebx {

Value Value::atom(Atom a) {
  Value v;
  v.tag_ = Tag::Atom;
  v.atom_ = std::move(a);
  return v;
}

Value Value::atom(std::string sort, int index) { return atom(Atom{std::move(sort), index}); }

Value Value::boolean(bool b) {
  Value v;
  v.tag_ = Tag::Bool;
  v.bool_ = b;
  return v;
}

Value Value::integer(std::int64_t n) {
  Value v;
  v.tag_ = Tag::Int;
  v.int_ = n;
  return v;
}

Value Value::set(std::vector<Value> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  Value v;
  v.tag_ = Tag::Set;
  v.elems_ = std::move(elems);
  return v;
}

Value Value::pair(Value first, Value second) {
  Value v;
  v.tag_ = Tag::Pair;
  v.elems_.reserve(2);
  v.elems_.push_back(std::move(first));
  v.elems_.push_back(std::move(second));
  return v;
}

const Atom& Value::asAtom() const {
  if (tag_ != Tag::Atom) throw ShapeMismatch("value is not an atom");
  return atom_;
}

bool Value::asBool() const {
  if (tag_ != Tag::Bool) throw ShapeMismatch("value is not a boolean");
  return bool_;
}

std::int64_t Value::asInt() const {
  if (tag_ != Tag::Int) throw ShapeMismatch("value is not an integer");
  return int_;
}

const std::vector<Value>& Value::elems() const {
  if (tag_ != Tag::Set) throw ShapeMismatch("value is not a set");
  return elems_;
}

const Value& Value::first() const {
  if (tag_ != Tag::Pair) throw ShapeMismatch("value is not a pair");
  return elems_[0];
}

const Value& Value::second() const {
  if (tag_ != Tag::Pair) throw ShapeMismatch("value is not a pair");
  return elems_[1];
}

bool Value::contains(const Value& v) const {
  const auto& es = elems();
  return std::binary_search(es.begin(), es.end(), v);
}

bool operator==(const Value& a, const Value& b) {
  if (a.tag_ != b.tag_) return false;
  switch (a.tag_) {
    case Value::Tag::Atom: return a.atom_ == b.atom_;
    case Value::Tag::Bool: return a.bool_ == b.bool_;
    case Value::Tag::Int: return a.int_ == b.int_;
    default: return a.elems_ == b.elems_;
  }
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.tag_ != b.tag_) return a.tag_ <=> b.tag_;
  switch (a.tag_) {
    case Value::Tag::Atom: return a.atom_ <=> b.atom_;
    case Value::Tag::Bool: return a.bool_ <=> b.bool_;
    case Value::Tag::Int: return a.int_ <=> b.int_;
    default: break;
  }
  // Sets compare by size first so enumeration runs small-to-large, then lexicographically.
  if (a.tag_ == Value::Tag::Set && a.elems_.size() != b.elems_.size())
    return a.elems_.size() <=> b.elems_.size();
  return a.elems_ <=> b.elems_;
}

std::string Value::show() const {
  std::ostringstream os;
  switch (tag_) {
    case Tag::Atom: os << atom_.display(); break;
    case Tag::Bool: os << (bool_ ? "TRUE" : "FALSE"); break;
    case Tag::Int: os << int_; break;
    case Tag::Pair: os << "(" << elems_[0].show() << "|->" << elems_[1].show() << ")"; break;
    case Tag::Set: {
      os << "{";
      for (std::size_t i = 0; i < elems_.size(); ++i) {
        if (i) os << ",";
        os << elems_[i].show();
      }
      os << "}";
      break;
    }
  }
  return os.str();
}

namespace relval {

std::string kindName(FunctionKind k) {
  switch (k) {
    case FunctionKind::Relation: return "BinaryRelation";
    case FunctionKind::PartialFn: return "PartialFunction";
    case FunctionKind::TotalFn: return "TotalFunction";
    case FunctionKind::PartialInj: return "PartialInjective";
    case FunctionKind::TotalInj: return "TotalInjective";
    case FunctionKind::PartialSurj: return "PartialSurjective";
    case FunctionKind::TotalSurj: return "TotalSurjective";
    case FunctionKind::PartialBij: return "PartialBijective";
    case FunctionKind::TotalBij: return "TotalBijective";
  }
  return "?";
}

static void requirePairs(const Value& r, const char* who) {
  for (const auto& e : r.elems())
    if (!e.isPair()) throw ShapeMismatch(std::string(who) + ": element is not a pair");
}

Value domainOf(const Value& r) {
  requirePairs(r, "dom");
  std::vector<Value> out;
  for (const auto& p : r.elems()) out.push_back(p.first());
  return Value::set(std::move(out));
}

Value rangeOf(const Value& r) {
  requirePairs(r, "ran");
  std::vector<Value> out;
  for (const auto& p : r.elems()) out.push_back(p.second());
  return Value::set(std::move(out));
}

Value inverseOf(const Value& r) {
  requirePairs(r, "inverse");
  std::vector<Value> out;
  for (const auto& p : r.elems()) out.push_back(Value::pair(p.second(), p.first()));
  return Value::set(std::move(out));
}

Value imageOf(const Value& r, const Value& s) {
  requirePairs(r, "image");
  std::vector<Value> out;
  for (const auto& p : r.elems())
    if (s.contains(p.first())) out.push_back(p.second());
  return Value::set(std::move(out));
}

Value applyAt(const Value& r, const Value& x) {
  requirePairs(r, "apply");
  const Value* found = nullptr;
  for (const auto& p : r.elems()) {
    if (p.first() == x) {
      if (found) throw ApplyAmbiguous("apply: relation has several pairs at " + x.show());
      found = &p.second();
    }
  }
  if (!found) throw ApplyUndefined("apply: " + x.show() + " is not in the domain");
  return *found;
}

Value restrict(const Value& r, const Value& s, RestrictMode mode) {
  requirePairs(r, "restrict");
  std::vector<Value> out;
  for (const auto& p : r.elems()) {
    const bool hit = (mode == RestrictMode::DomRestrict || mode == RestrictMode::DomSubtract)
                         ? s.contains(p.first())
                         : s.contains(p.second());
    const bool keep =
        (mode == RestrictMode::DomRestrict || mode == RestrictMode::RanRestrict) ? hit : !hit;
    if (keep) out.push_back(p);
  }
  return Value::set(std::move(out));
}

Value combine(const Value& r, const Value& s, CombineOp op) {
  switch (op) {
    case CombineOp::Union: {
      std::vector<Value> out = r.elems();
      out.insert(out.end(), s.elems().begin(), s.elems().end());
      return Value::set(std::move(out));
    }
    case CombineOp::Intersection: {
      std::vector<Value> out;
      for (const auto& e : r.elems())
        if (s.contains(e)) out.push_back(e);
      return Value::set(std::move(out));
    }
    case CombineOp::Difference: {
      std::vector<Value> out;
      for (const auto& e : r.elems())
        if (!s.contains(e)) out.push_back(e);
      return Value::set(std::move(out));
    }
    case CombineOp::Override: {
      // (dom(s) <<| r) \/ s
      Value kept = restrict(r, domainOf(s), RestrictMode::DomSubtract);
      return combine(kept, s, CombineOp::Union);
    }
    case CombineOp::FwdCompose: {
      requirePairs(r, ";");
      requirePairs(s, ";");
      std::vector<Value> out;
      for (const auto& p : r.elems())
        for (const auto& q : s.elems())
          if (p.second() == q.first()) out.push_back(Value::pair(p.first(), q.second()));
      return Value::set(std::move(out));
    }
    case CombineOp::CartesianProduct: {
      std::vector<Value> out;
      for (const auto& a : r.elems())
        for (const auto& b : s.elems()) out.push_back(Value::pair(a, b));
      return Value::set(std::move(out));
    }
    case CombineOp::DirectProduct: {
      requirePairs(r, "><");
      requirePairs(s, "><");
      std::vector<Value> out;
      for (const auto& p : r.elems())
        for (const auto& q : s.elems())
          if (p.first() == q.first())
            out.push_back(Value::pair(p.first(), Value::pair(p.second(), q.second())));
      return Value::set(std::move(out));
    }
    case CombineOp::ParallelProduct: {
      requirePairs(r, "||");
      requirePairs(s, "||");
      std::vector<Value> out;
      for (const auto& p : r.elems())
        for (const auto& q : s.elems())
          out.push_back(Value::pair(Value::pair(p.first(), q.first()),
                                    Value::pair(p.second(), q.second())));
      return Value::set(std::move(out));
    }
  }
  throw ShapeMismatch("combine: unknown op");
}

Value identityOver(const Value& s) {
  std::vector<Value> out;
  for (const auto& e : s.elems()) out.push_back(Value::pair(e, e));
  return Value::set(std::move(out));
}

Value powersetOf(const Value& s, std::size_t capElems) {
  const auto& es = s.elems();
  if (es.size() > capElems)
    throw CapExceeded("powerset enumeration capped at " + std::to_string(capElems) +
                      " elements, got " + std::to_string(es.size()));
  std::vector<Value> subsets;
  const std::size_t n = es.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<Value> members;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) members.push_back(es[i]);
    subsets.push_back(Value::set(std::move(members)));
  }
  return Value::set(std::move(subsets));
}

bool isFunctional(const Value& r) {
  requirePairs(r, "functional");
  const auto& es = r.elems();
  for (std::size_t i = 0; i + 1 < es.size(); ++i)
    for (std::size_t j = i + 1; j < es.size(); ++j)
      if (es[i].first() == es[j].first() && !(es[i].second() == es[j].second())) return false;
  return true;
}

bool conforms(const Value& r, FunctionKind kind, const Value& dom, const Value& cod) {
  for (const auto& p : r.elems()) {
    if (!p.isPair()) return false;
    if (!dom.contains(p.first()) || !cod.contains(p.second())) return false;
  }
  const bool functional = isFunctional(r);
  const bool injective = isFunctional(inverseOf(r));
  const bool total = domainOf(r) == dom;
  const bool surjective = rangeOf(r) == cod;
  switch (kind) {
    case FunctionKind::Relation: return true;
    case FunctionKind::PartialFn: return functional;
    case FunctionKind::TotalFn: return functional && total;
    case FunctionKind::PartialInj: return functional && injective;
    case FunctionKind::TotalInj: return functional && injective && total;
    case FunctionKind::PartialSurj: return functional && surjective;
    case FunctionKind::TotalSurj: return functional && surjective && total;
    case FunctionKind::PartialBij: return functional && injective;
    case FunctionKind::TotalBij: return functional && injective && total && surjective;
  }
  return false;
}

}  // namespace relval
}  // namespace ebx
