// Transformation of a flattened machine+context into the EM-OCL pivot model.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ebx/analysis.hpp"
#include "ebx/value.hpp"

namespace ebx {

// Pivot-side types: carriers, Set(T), Pair(A,B) and the nine relation kinds.
struct EmType {
  enum class K { Named, SetOf, Pair, Fn };
  K k = K::Named;
  std::string name;                              // Named: source identifier
  relval::FunctionKind fnKind = relval::FunctionKind::Relation;
  std::shared_ptr<const EmType> a, b;

  static EmType named(std::string n);
  static EmType setOf(EmType elem);
  static EmType pairOf(EmType first, EmType second);
  static EmType fn(relval::FunctionKind kind, EmType dom, EmType ran);

  // Set(GUEST), Pair(Key, Key), PartialFunction(ROOM, GUEST)
  std::string show() const;
};

struct EmAttribute {
  std::string name;     // emitted name (Guest, Card, owns, ...)
  std::string source;   // Event-B identifier (GUEST, CARD, owns, ...)
  EmType type;
};

struct EmParam {
  std::string name;
  std::string typeText;
};

struct EmOperation {
  std::string name;
  std::string stereotype;  // "constructor" or "update"
  std::vector<EmParam> params;
  std::string signature() const;
};

struct EmConstraint {
  enum class Kind { Inv, Pre, Post };
  Kind kind = Kind::Inv;
  std::string opName;    // empty for class invariants
  std::string label;     // may be empty (implicit pres, constructor set posts)
  std::string text;      // EM-OCL
  std::string original;  // source Event-B formula / action, ASCII dialect
  // source hooks for the UML/OCL refinement step
  ExprPtr sourcePred;
  std::optional<Action> sourceAction;
  bool isSkipFrame = false;
  bool isNotEmpty = false;
  bool isTypingContainment = false;  // Rule 5/6 containment of a <: typing
  bool untranslatable = false;
};

struct EmOclModel {
  std::string className;
  std::vector<std::string> dataTypes;
  std::vector<EmAttribute> staticAttrs;
  std::vector<EmAttribute> objectAttrs;
  EmOperation ctor;
  std::vector<EmOperation> updates;
  std::vector<EmConstraint> constraints;

  const EmAttribute* attribute(const std::string& source) const;
};

struct UntranslatableConstruct : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotATypingPredicate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Effective-set attribute name: uppercase identifiers are title-cased
// (GUEST -> Guest, CARD -> Card); everything else is kept as written.
std::string effectiveName(const std::string& source);

// Table 4.2: the EM-OCL image of a typing predicate.
EmType map_type(const ExprPtr& typingPred, const ComponentEnv& env);

struct TransformInput {
  const MachineAst& machine;   // flattened
  const ContextAst& context;   // flattened
  const Analysis& analysis;    // of the flattened pair
};

EmOclModel transform(const TransformInput& in);

// Rule 14/15 expression translation. `preStateReads` names variables whose
// reads must carry @pre (posts); `boundMethodCalls` is used inside quantifier
// bodies where total-function application on the bound variable prints as a
// method call (first(c) -> c.first()).
struct TranslateCtx {
  const ComponentEnv* env = nullptr;
  const std::map<std::string, std::string>* names = nullptr;  // source -> emitted
  std::set<std::string> preStateReads;
  std::vector<std::string> boundVars;
  int* pairCounter = nullptr;  // shared cpl<N> counter for let bindings
};

std::string translate_expr(const ExprPtr& p, TranslateCtx& ctx);

}  // namespace ebx
