// Project container, structural well-formedness and type inference.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ebx/ast.hpp"

namespace ebx {

struct Project {
  std::map<std::string, Component> components;

  void add(Component c) { components[c.name()] = std::move(c); }
  const Component* find(const std::string& name) const;
  const MachineAst* machine(const std::string& name) const;
  const ContextAst* context(const std::string& name) const;
};

// Loads every .ebm / .ebc file in a directory (non-recursive, sorted order).
Project load_project(const std::string& dir);

struct Finding {
  std::string code;       // Cycle, DanglingReference, NameClash, UntypedIdentifier, ...
  std::string component;
  std::string detail;
  SourcePos pos;
};

struct StructureReport {
  std::vector<Finding> findings;
  // machine -> contexts visible directly or transitively, ancestor-first
  std::map<std::string, std::vector<std::string>> contextClosure;
  // machine -> refinement chain, most abstract first, ending with the machine itself
  std::map<std::string, std::vector<std::string>> refinesChain;
  // context -> extends closure, ancestor-first, ending with the context itself
  std::map<std::string, std::vector<std::string>> extendsClosure;

  bool clean() const { return findings.empty(); }
};

StructureReport check_structure(const Project& project);

// Semantic types: carriers, integers, booleans, finite sets and pairs.
// Relation-shaped things are sets of pairs; the declared function kind is
// kept separately in TypingInfo.
struct SemType {
  enum class K { Unknown, Bool, Int, Carrier, SetOf, Pair };
  K k = K::Unknown;
  std::string carrier;
  std::shared_ptr<const SemType> a, b;

  static SemType unknown() { return {}; }
  static SemType boolean() { return {K::Bool, "", nullptr, nullptr}; }
  static SemType integer() { return {K::Int, "", nullptr, nullptr}; }
  static SemType carrierOf(std::string name) { return {K::Carrier, std::move(name), nullptr, nullptr}; }
  static SemType setOf(SemType elem);
  static SemType pairOf(SemType first, SemType second);

  bool isSet() const { return k == K::SetOf; }
  const SemType& elem() const { return *a; }
  std::string show() const;
};

bool compatible(const SemType& x, const SemType& y);
std::optional<SemType> unify(const SemType& x, const SemType& y);

enum class PredClass { TypingOnly, TypingAndConstraint, Constraint };

struct TypingInfo {
  SemType type;
  ExprPtr typeExpr;            // right-hand side of the typing predicate, if any
  ExprOp arrow = ExprOp::Ident;  // Rel/Pfun/... when typeExpr is an arrow, else Ident
  ExprOp via = ExprOp::Ident;    // In or Subseteq when declared by a predicate
  std::string viaLabel;
  std::string role;            // "set", "constant", "variable", "param", "witness"
  // For parameters: the set expression the type was derived from (GUEST for
  // g : GUEST, CARD for c reached through cards' domain). Used downstream to
  // emit explicit membership preconditions.
  ExprPtr sourceExpr;
};

struct ComponentEnv {
  std::map<std::string, TypingInfo> idents;
  // event name -> param name -> typing
  std::map<std::string, std::map<std::string, TypingInfo>> eventParams;
  // "label" for axioms/invariants, "event/label" for guards
  std::map<std::string, PredClass> predClass;
};

struct Analysis {
  std::vector<Finding> findings;
  StructureReport structure;
  std::map<std::string, ComponentEnv> envs;
  std::map<const Expr*, std::string> idCarriers;             // bare `id` elaborations
  std::map<const Expr*, std::vector<SemType>> quantBinds;    // quantifier bound-variable types

  bool clean() const { return findings.empty(); }
  const ComponentEnv& env(const std::string& component) const { return envs.at(component); }
};

Analysis infer_types(const Project& project);

// Type of an expression under an environment; used by pogen's WD calculus and
// the animator. Throws std::runtime_error on a type error.
struct TypeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UntypedIdentifier : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ebx
