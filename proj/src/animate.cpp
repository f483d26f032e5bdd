#include "ebx/animate.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <sstream>

namespace ebx {

Universe Scope::universe() const {
  Universe u;
  u.carrierSizes = carrierSizes;
  u.intMin = intMin;
  u.intMax = intMax;
  u.enumCap = enumCap;
  return u;
}

Scope Scope::parse_text(const std::string& text) {
  Scope s;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto pos = line.find("//"); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "SET") {
      std::string name, eq;
      int size = 0;
      if (!(ls >> name >> eq >> size) || eq != "=" || size < 1)
        throw EvalError("scope line " + std::to_string(lineNo) +
                        ": expected SET NAME = k with k >= 1");
      s.carrierSizes[name] = size;
    } else {
      std::string eq;
      long long v = 0;
      if (!(ls >> eq >> v) || eq != "=")
        throw EvalError("scope line " + std::to_string(lineNo) + ": expected key = value");
      if (head == "cap.models") s.maxModels = static_cast<std::size_t>(v);
      else if (head == "cap.states") s.maxStates = static_cast<std::size_t>(v);
      else if (head == "cap.depth") s.maxDepth = static_cast<std::size_t>(v);
      else if (head == "cap.enum") s.enumCap = static_cast<std::size_t>(v);
      else if (head == "cap.int.min") s.intMin = v;
      else if (head == "cap.int.max") s.intMax = v;
      else throw EvalError("scope line " + std::to_string(lineNo) + ": unknown key " + head);
      if (head.rfind("cap.", 0) == 0 && head != "cap.int.min" && v <= 0)
        throw EvalError("scope line " + std::to_string(lineNo) + ": caps must be positive");
    }
  }
  return s;
}

Scope Scope::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw EvalError("cannot read scope file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_text(os.str());
}

std::string MachineState::show() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : variables) {
    if (!first) os << " ";
    first = false;
    os << k << "=" << v.show();
  }
  return os.str();
}

// --- trace scripts -----------------------------------------------------------

namespace {

// Minimal value literals for trace files: atoms by display name, pairs, sets.
class ValueParser {
 public:
  ValueParser(const std::string& text, const Universe& u) : text_(text), u_(u) {}

  Value parse() {
    Value v = value();
    skipWs();
    if (pos_ != text_.size()) throw EvalError("trailing input in value: " + text_);
    return v;
  }

 private:
  void skipWs() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skipWs();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool eatMaplet() {
    skipWs();
    if (text_.compare(pos_, 3, "|->") == 0) {
      pos_ += 3;
      return true;
    }
    return false;
  }

  Value value() {
    skipWs();
    Value v = atomOrBracket();
    if (eatMaplet()) return Value::pair(v, value());
    return v;
  }

  Value atomOrBracket() {
    skipWs();
    if (eat('(')) {
      Value v = value();
      if (!eat(')')) throw EvalError("expected ) in value");
      return v;
    }
    if (eat('{')) {
      std::vector<Value> elems;
      skipWs();
      if (!eat('}')) {
        do {
          elems.push_back(value());
        } while (eat(','));
        if (!eat('}')) throw EvalError("expected } in value");
      }
      return Value::set(std::move(elems));
    }
    if (pos_ < text_.size() &&
        (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-')) {
      std::size_t end = pos_ + 1;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
      Value v = Value::integer(std::stoll(text_.substr(pos_, end - pos_)));
      pos_ = end;
      return v;
    }
    std::size_t end = pos_;
    while (end < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
      ++end;
    if (end == pos_) throw EvalError("expected a value at: " + text_.substr(pos_));
    const std::string word = text_.substr(pos_, end - pos_);
    pos_ = end;
    if (word == "TRUE") return Value::boolean(true);
    if (word == "FALSE") return Value::boolean(false);
    // atom display names end with a 1-based index: GUEST1, ROOM2, ...
    std::size_t digits = word.size();
    while (digits > 0 && std::isdigit(static_cast<unsigned char>(word[digits - 1]))) --digits;
    if (digits == word.size() || digits == 0)
      throw EvalError("unknown value literal " + word);
    const std::string sort = word.substr(0, digits);
    const int index = std::stoi(word.substr(digits)) - 1;
    auto it = u_.carrierSizes.find(sort);
    if (it == u_.carrierSizes.end()) throw EvalError("unknown carrier in value " + word);
    if (index < 0 || index >= it->second)
      throw EvalError("atom " + word + " outside the scope of " + sort);
    return Value::atom(sort, index);
  }

  const std::string& text_;
  const Universe& u_;
  std::size_t pos_ = 0;
};

}  // namespace

TraceScript TraceScript::parse_text(const std::string& text, const Universe& universe) {
  TraceScript out;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto pos = line.find("//"); pos != std::string::npos) line.erase(pos);
    std::string trimmed;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c)) || !trimmed.empty()) trimmed += c;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
      trimmed.pop_back();
    if (trimmed.empty()) continue;
    const auto open = trimmed.find('(');
    if (open == std::string::npos || trimmed.back() != ')')
      throw EvalError("trace line " + std::to_string(lineNo) + ": expected event(name=value, ...)");
    TraceStep step;
    step.event = trimmed.substr(0, open);
    const std::string args = trimmed.substr(open + 1, trimmed.size() - open - 2);
    std::size_t p = 0;
    while (p < args.size()) {
      // split on top-level commas
      int depth = 0;
      std::size_t q = p;
      while (q < args.size() && (depth > 0 || args[q] != ',')) {
        if (args[q] == '(' || args[q] == '{') ++depth;
        if (args[q] == ')' || args[q] == '}') --depth;
        ++q;
      }
      const std::string item = args.substr(p, q - p);
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw EvalError("trace line " + std::to_string(lineNo) + ": expected name=value");
      std::string name;
      for (char c : item.substr(0, eq))
        if (!std::isspace(static_cast<unsigned char>(c))) name += c;
      step.bindings[name] = ValueParser(item.substr(eq + 1), universe).parse();
      p = q + 1;
    }
    out.steps.push_back(std::move(step));
  }
  return out;
}

TraceScript TraceScript::parse_file(const std::string& path, const Universe& universe) {
  std::ifstream in(path);
  if (!in.good()) throw EvalError("cannot read trace file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_text(os.str(), universe);
}

// --- animator ---------------------------------------------------------------

Animator::Animator(const MachineAst& machine, const Project& project, const Analysis& analysis,
                   const Scope& scope)
    : machine_(machine),
      project_(project),
      analysis_(analysis),
      scope_(scope),
      universe_(scope.universe()),
      eval_(analysis, universe_) {
  for (const auto& mn : analysis_.structure.refinesChain.at(machine_.name)) {
    const MachineAst* m = project_.machine(mn);
    for (const auto& inv : m->invariants) chainInvariants_.emplace_back(inv.label, inv.pred);
  }
}

namespace {

// Candidate values for one constant, canonical order, driven by its typing.
std::vector<Value> candidatesFor(const TypingInfo& info, const Evaluator& ev, EvalEnv& env) {
  const ExprPtr& te = info.typeExpr;
  if (!te) throw EvalError("constant without a typing expression");

  auto subsetsOf = [&](const Value& s) {
    if (s.size() > 20) throw CapExceeded("subset enumeration over " + std::to_string(s.size()));
    std::vector<Value> out;
    const auto& es = s.elems();
    for (std::size_t mask = 0; mask < (std::size_t{1} << es.size()); ++mask) {
      std::vector<Value> members;
      for (std::size_t i = 0; i < es.size(); ++i)
        if (mask & (std::size_t{1} << i)) members.push_back(es[i]);
      out.push_back(Value::set(std::move(members)));
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  if (info.via == ExprOp::Subseteq) return subsetsOf(ev.eval(te, env));

  // membership typing: x : E
  switch (te->op) {
    case ExprOp::Tfun:
    case ExprOp::Tinj:
    case ExprOp::Tsurj:
    case ExprOp::Tbij: {
      const Value dom = ev.eval(te->arg(0), env);
      const Value cod = ev.eval(te->arg(1), env);
      // choice per domain element, lexicographic
      std::vector<Value> out;
      const auto& ds = dom.elems();
      const auto& cs = cod.elems();
      std::vector<std::size_t> choice(ds.size(), 0);
      if (!ds.empty() && cs.empty()) return {};
      for (;;) {
        std::vector<Value> pairs;
        for (std::size_t i = 0; i < ds.size(); ++i)
          pairs.push_back(Value::pair(ds[i], cs[choice[i]]));
        Value f = Value::set(std::move(pairs));
        bool keep = true;
        if (te->op == ExprOp::Tinj || te->op == ExprOp::Tbij)
          keep = relval::isFunctional(relval::inverseOf(f));
        if (keep && (te->op == ExprOp::Tsurj || te->op == ExprOp::Tbij))
          keep = relval::rangeOf(f) == cod;
        if (keep) out.push_back(std::move(f));
        if (ds.empty()) break;
        std::size_t i = ds.size();
        while (i > 0) {
          if (++choice[i - 1] < cs.size()) break;
          choice[i - 1] = 0;
          --i;
        }
        if (i == 0) break;
      }
      std::sort(out.begin(), out.end());
      return out;
    }
    case ExprOp::Pfun:
    case ExprOp::Pinj:
    case ExprOp::Psurj: {
      const Value dom = ev.eval(te->arg(0), env);
      const Value cod = ev.eval(te->arg(1), env);
      // choice per domain element including "absent"
      std::vector<Value> out;
      const auto& ds = dom.elems();
      const auto& cs = cod.elems();
      std::vector<std::size_t> choice(ds.size(), 0);  // 0 = absent, k = cs[k-1]
      for (;;) {
        std::vector<Value> pairs;
        for (std::size_t i = 0; i < ds.size(); ++i)
          if (choice[i] > 0) pairs.push_back(Value::pair(ds[i], cs[choice[i] - 1]));
        Value f = Value::set(std::move(pairs));
        bool keep = true;
        if (te->op == ExprOp::Pinj) keep = relval::isFunctional(relval::inverseOf(f));
        if (keep && te->op == ExprOp::Psurj) keep = relval::rangeOf(f) == cod;
        if (keep) out.push_back(std::move(f));
        if (ds.empty()) break;
        std::size_t i = ds.size();
        while (i > 0) {
          if (++choice[i - 1] <= cs.size()) break;
          choice[i - 1] = 0;
          --i;
        }
        if (i == 0) break;
      }
      std::sort(out.begin(), out.end());
      return out;
    }
    case ExprOp::Rel: {
      const Value dom = ev.eval(te->arg(0), env);
      const Value cod = ev.eval(te->arg(1), env);
      return subsetsOf(relval::combine(dom, cod, relval::CombineOp::CartesianProduct));
    }
    case ExprOp::Pow:
      return subsetsOf(ev.eval(te->arg(0), env));
    case ExprOp::Pow1: {
      auto all = subsetsOf(ev.eval(te->arg(0), env));
      std::vector<Value> out;
      for (auto& s : all)
        if (s.size() > 0) out.push_back(std::move(s));
      return out;
    }
    default: {
      // plain membership in a set expression
      const Value s = ev.eval(te, env);
      return s.elems();
    }
  }
}

}  // namespace

const std::vector<std::map<std::string, Value>>& Animator::constant_models() {
  if (modelsComputed_) return models_;
  modelsComputed_ = true;

  // constants and axioms across the context closure, declaration order
  std::vector<std::string> constants;
  std::vector<Labeled> axioms;
  for (const auto& cn : analysis_.structure.contextClosure.at(machine_.name)) {
    const ContextAst* c = project_.context(cn);
    constants.insert(constants.end(), c->constants.begin(), c->constants.end());
    axioms.insert(axioms.end(), c->axioms.begin(), c->axioms.end());
  }
  const ComponentEnv& env = analysis_.env(machine_.name);

  // axiom is ready once all its constants are assigned
  std::vector<std::set<std::string>> axiomNeeds;
  for (const auto& a : axioms) {
    std::set<std::string> needs;
    for (const auto& id : free_idents(a.pred))
      if (std::find(constants.begin(), constants.end(), id) != constants.end()) needs.insert(id);
    axiomNeeds.push_back(std::move(needs));
  }

  std::size_t tried = 0;
  EvalEnv scratch;
  std::function<void(std::size_t, std::set<std::string>&)> assign =
      [&](std::size_t idx, std::set<std::string>& bound) {
        if (models_.size() >= scope_.maxModels) return;
        if (idx == constants.size()) {
          models_.push_back(scratch.consts);
          return;
        }
        const std::string& name = constants[idx];
        const TypingInfo& info = env.idents.at(name);
        std::vector<Value> candidates = candidatesFor(info, eval_, scratch);
        for (const auto& v : candidates) {
          if (models_.size() >= scope_.maxModels) return;
          if (++tried > scope_.enumCap)
            throw CapExceeded("constant enumeration exceeded cap.enum = " +
                              std::to_string(scope_.enumCap));
          scratch.consts[name] = v;
          bound.insert(name);
          bool ok = true;
          for (std::size_t i = 0; i < axioms.size() && ok; ++i) {
            bool ready = true;
            bool relevant = axiomNeeds[i].count(name) > 0;
            for (const auto& n : axiomNeeds[i]) ready &= bound.count(n) > 0;
            if (ready && relevant) ok = eval_.evalPred(axioms[i].pred, scratch);
          }
          if (ok) assign(idx + 1, bound);
          bound.erase(name);
          scratch.consts.erase(name);
        }
      };
  std::set<std::string> bound;
  // axioms with no constants at all (carrier-only facts) must hold outright
  for (std::size_t i = 0; i < axioms.size(); ++i)
    if (axiomNeeds[i].empty() && !eval_.evalPred(axioms[i].pred, scratch))
      throw NoConstantModel("axiom " + axioms[i].label + " is false at this scope");
  assign(0, bound);
  if (models_.empty() && !constants.empty())
    throw NoConstantModel("no constant valuation satisfies the axioms at this scope");
  if (models_.empty()) models_.push_back({});  // no constants: one empty model
  return models_;
}

std::vector<MachineState> Animator::applyActions(const MachineState& pre, const EventAst& ev,
                                                 EvalEnv& env) {
  // all right-hand sides see the pre-state; nondeterministic actions fan out
  std::vector<std::map<std::string, Value>> posts{pre.variables};
  for (const auto& a : ev.actions) {
    switch (a.kind) {
      case Action::Kind::Skip:
        break;
      case Action::Kind::Deterministic: {
        for (std::size_t i = 0; i < a.lhs.size(); ++i) {
          Value rhs = eval_.eval(a.rhs[i], env);
          for (auto& post : posts) {
            if (a.pointArgs[i]) {
              const Value arg = eval_.eval(a.pointArgs[i], env);
              const Value upd = Value::set({Value::pair(arg, rhs)});
              post[a.lhs[i]] =
                  relval::combine(post.at(a.lhs[i]), upd, relval::CombineOp::Override);
            } else {
              post[a.lhs[i]] = rhs;
            }
          }
        }
        break;
      }
      case Action::Kind::MemberOf: {
        const Value s = eval_.eval(a.rhs[0], env);
        std::vector<std::map<std::string, Value>> next;
        for (const auto& post : posts)
          for (const auto& v : s.elems()) {
            auto n = post;
            n[a.lhs[0]] = v;
            next.push_back(std::move(n));
          }
        posts = std::move(next);
        break;
      }
      case Action::Kind::SuchThat: {
        // enumerate post-values of the assigned variables satisfying the predicate
        const ComponentEnv& cenv = analysis_.env(machine_.name);
        std::vector<std::vector<Value>> domains;
        for (const auto& v : a.lhs) domains.push_back(eval_.domainOfType(cenv.idents.at(v).type));
        std::vector<std::map<std::string, Value>> next;
        for (const auto& post : posts) {
          std::vector<std::size_t> idx(a.lhs.size(), 0);
          std::function<void(std::size_t)> rec = [&](std::size_t d) {
            if (d == a.lhs.size()) {
              for (std::size_t i = 0; i < a.lhs.size(); ++i)
                env.primed[a.lhs[i]] = domains[i][idx[i]];
              if (eval_.evalPred(a.predicate, env)) {
                auto n = post;
                for (std::size_t i = 0; i < a.lhs.size(); ++i)
                  n[a.lhs[i]] = domains[i][idx[i]];
                next.push_back(std::move(n));
              }
              for (const auto& v : a.lhs) env.primed.erase(v);
              return;
            }
            for (idx[d] = 0; idx[d] < domains[d].size(); ++idx[d]) rec(d + 1);
          };
          rec(0);
        }
        posts = std::move(next);
        break;
      }
    }
  }
  std::vector<MachineState> out;
  for (auto& post : posts) {
    MachineState s;
    s.constants = pre.constants;
    s.variables = std::move(post);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<MachineState> Animator::instantiate() {
  initFindings_.clear();
  const EventAst* init = machine_.findEvent("INITIALISATION");
  if (!init) throw EvalError("machine has no INITIALISATION event");
  std::vector<MachineState> out;
  for (const auto& model : constant_models()) {
    MachineState pre;
    pre.constants = model;
    // variables start undefined; INITIALISATION must assign all of them
    for (const auto& v : machine_.variables) pre.variables[v] = Value::emptySet();
    std::set<std::string> assigned;
    for (const auto& a : init->actions)
      for (const auto& v : a.lhs) assigned.insert(v);
    for (const auto& v : machine_.variables)
      if (!assigned.count(v))
        initFindings_.push_back("InitViolation: variable " + v + " is not initialised");
    EvalEnv env;
    env.consts = model;
    for (auto& st : applyActions(pre, *init, env)) {
      std::vector<std::string> bad;
      checkInvariants(st, bad);
      for (const auto& label : bad)
        initFindings_.push_back("InitViolation: invariant " + label + " false in initial state " +
                                st.show());
      out.push_back(std::move(st));
    }
  }
  return out;
}

void Animator::checkInvariants(const MachineState& s, std::vector<std::string>& out) {
  EvalEnv env;
  env.consts = s.constants;
  env.vars = s.variables;
  for (const auto& [label, pred] : chainInvariants_)
    if (!eval_.evalPred(pred, env)) out.push_back(label);
}

std::vector<std::map<std::string, Value>> Animator::enabledBindings(const MachineState& state,
                                                                    const EventAst& ev) {
  const ComponentEnv& cenv = analysis_.env(machine_.name);
  const auto& params = cenv.eventParams.at(ev.name);
  std::vector<std::map<std::string, Value>> found;

  EvalEnv env;
  env.consts = state.constants;
  env.vars = state.variables;

  // guards become checkable once all their parameters are bound
  std::vector<std::set<std::string>> guardParams;
  for (const auto& g : ev.guards) {
    std::set<std::string> ps;
    for (const auto& id : free_idents(g.pred))
      if (params.count(id)) ps.insert(id);
    guardParams.push_back(std::move(ps));
  }

  // a guard is evaluated at the level where its last parameter gets bound;
  // parameterless guards are evaluated at the first level
  std::function<void(std::size_t)> rec = [&](std::size_t idx) {
    if (idx == ev.params.size()) {
      std::map<std::string, Value> b;
      for (const auto& [k, v] : env.locals) b[k] = v;
      found.push_back(std::move(b));
      return;
    }
    const std::string& p = ev.params[idx];
    std::set<std::string> bound;
    for (std::size_t i = 0; i <= idx; ++i) bound.insert(ev.params[i]);
    for (const auto& v : eval_.domainOfType(params.at(p).type)) {
      env.locals.emplace_back(p, v);
      bool ok = true;
      for (std::size_t gi = 0; gi < ev.guards.size() && ok; ++gi) {
        const auto& needs = guardParams[gi];
        const bool lastBindsHere = needs.empty() ? idx == 0 : needs.count(p) > 0;
        bool ready = lastBindsHere;
        for (const auto& need : needs) ready &= bound.count(need) > 0;
        if (ready) ok = eval_.evalPred(ev.guards[gi].pred, env);
      }
      if (ok) rec(idx + 1);
      env.locals.pop_back();
    }
  };

  if (ev.params.empty()) {
    bool ok = true;
    for (const auto& g : ev.guards)
      if (!eval_.evalPred(g.pred, env)) {
        ok = false;
        break;
      }
    if (ok) found.push_back({});
    return found;
  }
  rec(0);
  return found;
}

std::vector<MachineState> Animator::step(const MachineState& state, const std::string& eventName,
                                         const std::optional<std::map<std::string, Value>>& bindings) {
  const EventAst* ev = machine_.findEvent(eventName);
  if (!ev) throw EvalError("unknown event " + eventName);

  EvalEnv env;
  env.consts = state.constants;
  env.vars = state.variables;

  std::vector<MachineState> out;
  if (bindings) {
    for (const auto& [k, v] : *bindings) env.locals.emplace_back(k, v);
    for (const auto& g : ev->guards)
      if (!eval_.evalPred(g.pred, env)) throw EventDisabled(eventName, g.label);
    return applyActions(state, *ev, env);
  }
  for (const auto& b : enabledBindings(state, *ev)) {
    EvalEnv benv;
    benv.consts = state.constants;
    benv.vars = state.variables;
    for (const auto& [k, v] : b) benv.locals.emplace_back(k, v);
    auto succs = applyActions(state, *ev, benv);
    out.insert(out.end(), succs.begin(), succs.end());
  }
  return out;
}

TraceResult Animator::replay_trace(const TraceScript& script, std::size_t modelIndex) {
  const auto& models = constant_models();
  if (modelIndex >= models.size()) throw EvalError("constant model index out of range");
  TraceResult res;

  MachineState pre;
  pre.constants = models[modelIndex];
  for (const auto& v : machine_.variables) pre.variables[v] = Value::emptySet();
  EvalEnv env;
  env.consts = pre.constants;
  const EventAst* init = machine_.findEvent("INITIALISATION");
  auto states = applyActions(pre, *init, env);
  if (states.empty()) {
    res.failure = "INITIALISATION produced no state";
    return res;
  }
  MachineState current = states.front();
  res.initial = current;

  for (const auto& s : script.steps) {
    try {
      auto succs = step(current, s.event, s.bindings);
      if (succs.empty()) {
        res.failure = "event " + s.event + " produced no successor";
        res.final = current;
        return res;
      }
      current = succs.front();
      ++res.stepsExecuted;
      std::vector<std::string> bad;
      checkInvariants(current, bad);
      for (const auto& label : bad)
        res.invariantViolations.push_back("after step " + std::to_string(res.stepsExecuted) +
                                          " (" + s.event + "): " + label);
    } catch (const EventDisabled& e) {
      res.failure = std::string("EventDisabled(") + e.guardLabel + ") at step " +
                    std::to_string(res.stepsExecuted + 1) + " (" + s.event + ")";
      res.final = current;
      return res;
    }
  }
  res.completed = true;
  res.final = current;
  return res;
}

ExplorationReport Animator::explore() {
  ExplorationReport report;
  for (const auto& model : constant_models()) {
    ModelExploration ex;
    ex.constants = model;

    std::map<std::map<std::string, Value>, std::size_t> seen;
    std::deque<std::size_t> frontier;

    MachineState pre;
    pre.constants = model;
    for (const auto& v : machine_.variables) pre.variables[v] = Value::emptySet();
    EvalEnv env;
    env.consts = model;
    const EventAst* init = machine_.findEvent("INITIALISATION");
    for (auto& st : applyActions(pre, *init, env)) {
      if (seen.count(st.variables)) continue;
      seen[st.variables] = ex.states.size();
      ex.parentState.push_back(-1);
      ex.parentEvent.push_back("INITIALISATION");
      frontier.push_back(ex.states.size());
      ex.states.push_back(std::move(st));
    }

    std::set<std::string> fired;
    while (!frontier.empty()) {
      if (ex.states.size() > scope_.maxStates) {
        ex.capExceeded = true;
        report.capExceeded = true;
        break;
      }
      const std::size_t at = frontier.front();
      frontier.pop_front();
      const MachineState state = ex.states[at];

      std::vector<std::string> bad;
      checkInvariants(state, bad);
      for (const auto& label : bad) ex.violations.emplace_back(at, label);

      bool any = false;
      for (const auto& ev : machine_.events) {
        if (ev.name == "INITIALISATION") continue;
        for (const auto& b : enabledBindings(state, ev)) {
          EvalEnv benv;
          benv.consts = state.constants;
          benv.vars = state.variables;
          for (const auto& [k, v] : b) benv.locals.emplace_back(k, v);
          for (auto& succ : applyActions(state, ev, benv)) {
            any = true;
            fired.insert(ev.name);
            auto it = seen.find(succ.variables);
            std::size_t to;
            if (it == seen.end()) {
              to = ex.states.size();
              seen[succ.variables] = to;
              ex.parentState.push_back(static_cast<int>(at));
              ex.parentEvent.push_back(ev.name);
              ex.states.push_back(std::move(succ));
              frontier.push_back(to);
            } else {
              to = it->second;
            }
            ex.transitions.push_back({at, to, ev.name, b});
          }
        }
      }
      if (!any) ex.deadlocks.push_back(at);
    }

    for (const auto& ev : machine_.events)
      if (ev.name != "INITIALISATION" && !fired.count(ev.name)) ex.uncovered.push_back(ev.name);
    report.models.push_back(std::move(ex));
  }
  return report;
}

std::vector<std::string> ModelExploration::pathTo(std::size_t state) const {
  std::vector<std::string> path;
  int at = static_cast<int>(state);
  while (at >= 0) {
    path.push_back(parentEvent[static_cast<std::size_t>(at)]);
    at = parentState[static_cast<std::size_t>(at)];
  }
  path.push_back("SETUP_CONSTANTS");
  std::reverse(path.begin(), path.end());
  return path;
}

std::string ExplorationReport::render() const {
  std::ostringstream os;
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    const auto& m = models[mi];
    os << "MODEL " << mi + 1 << "\n";
    os << "  constants:";
    for (const auto& [k, v] : m.constants) os << " " << k << "=" << v.show();
    os << "\n  states: " << m.states.size() << "\n  transitions: " << m.transitions.size()
       << "\n";
    if (m.capExceeded) os << "  cap-exceeded: partial exploration\n";
    for (const auto& [idx, label] : m.violations)
      os << "  violation: " << label << " at " << m.states[idx].show() << "\n";
    for (const auto& d : m.deadlocks) {
      os << "  deadlock: " << m.states[d].show() << "\n    trace:";
      for (const auto& step : m.pathTo(d)) os << " " << step;
      os << "\n";
    }
    if (!m.uncovered.empty()) {
      os << "  uncovered:";
      for (const auto& e : m.uncovered) os << " " << e;
      os << "\n";
    }
  }
  std::size_t deadlocked = 0, violations = 0;
  for (const auto& m : models) {
    deadlocked += m.deadlocks.size();
    violations += m.violations.size();
  }
  os << "TOTAL models=" << models.size() << " deadlocked-states=" << deadlocked
     << " invariant-violations=" << violations << "\n";
  return os.str();
}

std::size_t DischargeReport::discharged() const {
  std::size_t n = 0;
  for (const auto& v : verdicts) n += v.verdict == Verdict::Discharged;
  return n;
}

std::size_t DischargeReport::violated() const {
  std::size_t n = 0;
  for (const auto& v : verdicts) n += v.verdict == Verdict::Violated;
  return n;
}

std::string DischargeReport::render() const {
  std::ostringstream os;
  for (const auto& v : verdicts) {
    os << v.name << " ";
    switch (v.verdict) {
      case Verdict::Discharged: os << "discharged"; break;
      case Verdict::Violated: os << "violated " << v.counterexample; break;
      case Verdict::CapExceeded: os << "cap-exceeded"; break;
    }
    os << " (" << v.instantiations << " instantiations)"
       << (v.autoDischarged ? " [auto]" : "") << "\n";
  }
  os << "TOTAL " << verdicts.size() << " pos, " << discharged() << " discharged, " << violated()
     << " violated\n";
  return os.str();
}

DischargeReport Animator::discharge_finite(const PoSet& pos, DischargeMode mode) {
  DischargeReport report;
  eval_.setExtraBinds(&pos.synthBinds);
  const ComponentEnv& cenv = analysis_.env(machine_.name);

  std::optional<ExplorationReport> reach;
  if (mode == DischargeMode::Reachable) reach = explore();

  for (const auto& po : pos.pos) {
    PoVerdict v;
    v.name = po.name;
    v.autoDischarged = po.autoDischarged;

    auto tryInstance = [&](EvalEnv& env) -> bool {
      // returns false on a counterexample
      for (const auto& h : po.sequent.hypotheses)
        if (!eval_.evalPred(h, env)) return true;  // hypothesis false: vacuous
      ++v.instantiations;
      if (eval_.evalPred(po.sequent.goal, env)) return true;
      std::ostringstream os;
      for (const auto& [k, val] : env.consts) os << k << "=" << val.show() << " ";
      for (const auto& [k, val] : env.vars) os << k << "=" << val.show() << " ";
      for (const auto& [k, val] : env.locals) os << k << "=" << val.show() << " ";
      for (const auto& [k, val] : env.primed) os << k << "'=" << val.show() << " ";
      v.counterexample = os.str();
      return false;
    };

    try {
      if (mode == DischargeMode::Reachable) {
        bool ok = true;
        for (const auto& model : reach->models) {
          if (!ok) break;
          if (po.event.empty()) {
            for (const auto& st : model.states) {
              EvalEnv env;
              env.consts = st.constants;
              env.vars = st.variables;
              if (!(ok = tryInstance(env))) break;
            }
          } else {
            for (const auto& tr : model.transitions) {
              if (tr.event != po.event) continue;
              EvalEnv env;
              env.consts = model.states[tr.from].constants;
              env.vars = model.states[tr.from].variables;
              for (const auto& [k, val] : tr.bindings) env.locals.emplace_back(k, val);
              env.primed = model.states[tr.to].variables;
              if (!(ok = tryInstance(env))) break;
            }
            if (ok && po.event == "INITIALISATION") {
              // initialisation transitions are implicit: states without parents
              for (std::size_t i = 0; i < model.states.size(); ++i) {
                if (model.parentState[i] != -1) continue;
                EvalEnv env;
                env.consts = model.states[i].constants;
                env.primed = model.states[i].variables;
                // substituted INIT goals read no variables at all
                env.vars = model.states[i].variables;
                if (!(ok = tryInstance(env))) break;
              }
            }
          }
          if (model.capExceeded) v.verdict = Verdict::CapExceeded;
        }
        if (!ok) v.verdict = Verdict::Violated;
      } else {
        // enumerate-mode: every valuation of the sequent's free identifiers
        std::set<std::string> frees;
        for (const auto& h : po.sequent.hypotheses)
          for (const auto& id : free_idents(h)) frees.insert(id);
        for (const auto& id : free_idents(po.sequent.goal)) frees.insert(id);

        // order: constants (declaration order), variables, params, primed
        std::vector<std::pair<std::string, SemType>> slots;
        std::vector<std::string> constOrder;
        for (const auto& cn : analysis_.structure.contextClosure.at(machine_.name)) {
          const ContextAst* c = project_.context(cn);
          for (const auto& k : c->constants) constOrder.push_back(k);
        }
        for (const auto& k : constOrder)
          if (frees.count(k)) slots.emplace_back(k, cenv.idents.at(k).type);
        for (const auto& var : machine_.variables)
          if (frees.count(var)) slots.emplace_back(var, cenv.idents.at(var).type);
        if (!po.event.empty()) {
          const auto& params = cenv.eventParams.at(po.event);
          for (const auto& [p, info] : params)
            if (frees.count(p)) slots.emplace_back(p, info.type);
        }
        for (const auto& var : machine_.variables)
          if (frees.count(var + "'")) slots.emplace_back(var + "'", cenv.idents.at(var).type);

        std::size_t tried = 0;
        bool ok = true;
        EvalEnv env;
        std::function<void(std::size_t)> rec = [&](std::size_t idx) {
          if (!ok || v.verdict == Verdict::CapExceeded) return;
          if (idx == slots.size()) {
            if (++tried > scope_.enumCap) {
              v.verdict = Verdict::CapExceeded;
              return;
            }
            ok = tryInstance(env);
            return;
          }
          const auto& [name, type] = slots[idx];
          for (const auto& val : eval_.domainOfType(type)) {
            if (!ok || v.verdict == Verdict::CapExceeded) return;
            if (name.back() == '\'')
              env.primed[name.substr(0, name.size() - 1)] = val;
            else if (cenv.idents.count(name) && cenv.idents.at(name).role == "constant")
              env.consts[name] = val;
            else if (cenv.idents.count(name) && cenv.idents.at(name).role == "variable")
              env.vars[name] = val;
            else
              env.locals.emplace_back(name, val);
            // prune: evaluate hypotheses that are fully bound
            bool pruned = false;
            std::set<std::string> boundNow;
            for (std::size_t i = 0; i <= idx; ++i) boundNow.insert(slots[i].first);
            for (const auto& h : po.sequent.hypotheses) {
              bool ready = true;
              bool usesThis = false;
              for (const auto& id : free_idents(h)) {
                if (id == name) usesThis = true;
                if (frees.count(id) && !boundNow.count(id)) ready = false;
              }
              if (ready && usesThis && !eval_.evalPred(h, env)) {
                pruned = true;
                break;
              }
            }
            if (!pruned) rec(idx + 1);
            if (name.back() == '\'')
              env.primed.erase(name.substr(0, name.size() - 1));
            else if (cenv.idents.count(name) && cenv.idents.at(name).role == "constant")
              env.consts.erase(name);
            else if (cenv.idents.count(name) && cenv.idents.at(name).role == "variable")
              env.vars.erase(name);
            else
              env.locals.pop_back();
          }
        };
        rec(0);
        if (!ok) v.verdict = Verdict::Violated;
      }
    } catch (const CapExceeded&) {
      v.verdict = Verdict::CapExceeded;
    } catch (const EvalError& err) {
      // e.g. witness identifiers that reachable instantiation cannot bind
      v.verdict = Verdict::CapExceeded;
      v.counterexample = std::string("not finitely checkable: ") + err.what();
    }
    report.verdicts.push_back(std::move(v));
  }
  eval_.setExtraBinds(nullptr);
  return report;
}

}  // namespace ebx
