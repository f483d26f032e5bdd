// Explicit-state semantics: carrier instantiation, event firing, trace replay,
// reachability exploration and finite discharge of proof obligations.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ebx/eval.hpp"
#include "ebx/pogen.hpp"

namespace ebx {

struct Scope {
  std::map<std::string, int> carrierSizes;
  std::size_t maxModels = 24;
  std::size_t maxStates = 20000;
  std::size_t maxDepth = 50;
  std::size_t enumCap = 500000;
  long long intMin = 0;
  long long intMax = 3;

  Universe universe() const;
  // `SET NAME = k` lines plus cap.* keys; // comments allowed.
  static Scope parse_file(const std::string& path);
  static Scope parse_text(const std::string& text);
};

struct MachineState {
  std::map<std::string, Value> constants;
  std::map<std::string, Value> variables;

  friend bool operator==(const MachineState& a, const MachineState& b) {
    return a.constants == b.constants && a.variables == b.variables;
  }
  std::string show() const;
};

struct NoConstantModel : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EventDisabled : std::runtime_error {
  EventDisabled(std::string event, std::string guard)
      : std::runtime_error("event " + event + " disabled: guard " + guard + " false"),
        eventName(std::move(event)),
        guardLabel(std::move(guard)) {}
  std::string eventName;
  std::string guardLabel;
};

struct TraceStep {
  std::string event;
  std::map<std::string, Value> bindings;
};

struct TraceScript {
  std::vector<TraceStep> steps;
  // one `event(name=value, ...)` call per line
  static TraceScript parse_file(const std::string& path, const Universe& universe);
  static TraceScript parse_text(const std::string& text, const Universe& universe);
};

struct TraceResult {
  bool completed = false;
  std::size_t stepsExecuted = 0;
  std::string failure;  // empty when completed; else EventDisabled(...) etc.
  std::vector<std::string> invariantViolations;
  MachineState initial;
  MachineState final;
};

struct Transition {
  std::size_t from = 0;
  std::size_t to = 0;
  std::string event;
  std::map<std::string, Value> bindings;
};

struct ModelExploration {
  std::map<std::string, Value> constants;
  std::vector<MachineState> states;  // BFS order, initial states first
  std::vector<Transition> transitions;
  std::vector<std::pair<std::size_t, std::string>> violations;  // state, invariant label
  std::vector<std::size_t> deadlocks;
  std::vector<std::string> uncovered;  // events never fired in this model
  bool capExceeded = false;

  // path of event names from SETUP_CONSTANTS to the given state
  std::vector<std::string> pathTo(std::size_t state) const;
  std::vector<int> parentState;  // -1 for initial states
  std::vector<std::string> parentEvent;
};

struct ExplorationReport {
  std::vector<ModelExploration> models;
  bool capExceeded = false;
  std::string render() const;  // deterministic text form
};

enum class DischargeMode { Enumerate, Reachable };
enum class Verdict { Discharged, Violated, CapExceeded };

struct PoVerdict {
  std::string name;
  Verdict verdict = Verdict::Discharged;
  std::size_t instantiations = 0;
  std::string counterexample;
  bool autoDischarged = false;
};

struct DischargeReport {
  std::vector<PoVerdict> verdicts;
  std::size_t discharged() const;
  std::size_t violated() const;
  std::string render() const;
};

class Animator {
 public:
  Animator(const MachineAst& machine, const Project& project, const Analysis& analysis,
           const Scope& scope);

  // Constant valuations satisfying the axioms, canonical order, capped.
  const std::vector<std::map<std::string, Value>>& constant_models();

  // Initial states (one per model, more if INITIALISATION is nondeterministic).
  std::vector<MachineState> instantiate();
  std::vector<std::string> instantiationFindings() const { return initFindings_; }

  // All successors under an event; with explicit bindings, throws EventDisabled
  // naming the first false guard.
  std::vector<MachineState> step(const MachineState& state, const std::string& eventName,
                                 const std::optional<std::map<std::string, Value>>& bindings);

  // Enabled bindings of an event in a state, in canonical enumeration order.
  std::vector<std::map<std::string, Value>> enabledBindings(const MachineState& state,
                                                            const EventAst& ev);

  TraceResult replay_trace(const TraceScript& script, std::size_t modelIndex = 0);
  ExplorationReport explore();
  DischargeReport discharge_finite(const PoSet& pos, DischargeMode mode);

  const MachineAst& machine() const { return machine_; }
  const Evaluator& evaluator() const { return eval_; }

 private:
  std::vector<MachineState> applyActions(const MachineState& pre, const EventAst& ev,
                                         EvalEnv& env);
  void checkInvariants(const MachineState& s, std::vector<std::string>& out);
  std::vector<std::pair<std::string, ExprPtr>> chainInvariants_;

  const MachineAst& machine_;
  const Project& project_;
  const Analysis& analysis_;
  Scope scope_;
  Universe universe_;
  Evaluator eval_;
  std::vector<std::map<std::string, Value>> models_;
  bool modelsComputed_ = false;
  std::vector<std::string> initFindings_;
};

}  // namespace ebx
