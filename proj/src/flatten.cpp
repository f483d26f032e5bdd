#include "ebx/flatten.hpp"

#include <algorithm>
#include <set>

namespace ebx {

ContextAst flatten_context(const std::string& name, const Project& project) {
  const StructureReport rep = check_structure(project);
  for (const auto& f : rep.findings)
    if (f.code == "Cycle" || f.code == "DanglingReference" || f.code == "NameClash")
      throw FlattenError(f.code + " in " + f.component + ": " + f.detail);
  auto it = rep.extendsClosure.find(name);
  if (it == rep.extendsClosure.end()) throw FlattenError("unknown context " + name);

  ContextAst flat;
  flat.name = name;
  std::set<std::string> seenSets, seenConsts;
  for (const auto& cn : it->second) {
    const ContextAst* c = project.context(cn);
    for (const auto& s : c->sets)
      if (seenSets.insert(s).second) flat.sets.push_back(s);
    for (const auto& k : c->constants)
      if (seenConsts.insert(k).second) flat.constants.push_back(k);
    flat.axioms.insert(flat.axioms.end(), c->axioms.begin(), c->axioms.end());
    flat.theorems.insert(flat.theorems.end(), c->theorems.begin(), c->theorems.end());
  }
  return flat;
}

MachineAst flatten_machine(const std::string& name, const Project& project) {
  const StructureReport rep = check_structure(project);
  for (const auto& f : rep.findings)
    if (f.code == "Cycle" || f.code == "DanglingReference")
      throw FlattenError(f.code + " in " + f.component + ": " + f.detail);
  auto it = rep.refinesChain.find(name);
  if (it == rep.refinesChain.end()) throw FlattenError("unknown machine " + name);
  const std::vector<std::string>& chain = it->second;

  MachineAst flat;
  flat.name = name;
  std::set<std::string> seenVars;
  for (const auto& mn : chain) {
    const MachineAst* m = project.machine(mn);
    for (const auto& v : m->variables)
      if (seenVars.insert(v).second) flat.variables.push_back(v);
    flat.invariants.insert(flat.invariants.end(), m->invariants.begin(), m->invariants.end());
    flat.theorems.insert(flat.theorems.end(), m->theorems.begin(), m->theorems.end());
  }
  // no variable may disappear along the chain
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const MachineAst* abs = project.machine(chain[i]);
    const MachineAst* conc = project.machine(chain[i + 1]);
    for (const auto& v : abs->variables)
      if (std::find(conc->variables.begin(), conc->variables.end(), v) == conc->variables.end())
        throw FlattenError("DataRefinementUnsupported: variable " + v + " of " + chain[i] +
                           " disappears in " + chain[i + 1]);
  }

  // SEES the flattened terminal context: the most concrete machine's sees
  const MachineAst* top = project.machine(name);
  flat.sees = top->sees;
  flat.variant = top->variant;

  // events: walk the chain from the abstract end; a concrete event replaces
  // every abstract event it refines, new events are appended
  struct Slot {
    EventAst event;
  };
  std::vector<EventAst> events;
  auto findSlot = [&](const std::string& n) -> int {
    for (std::size_t i = 0; i < events.size(); ++i)
      if (events[i].name == n) return static_cast<int>(i);
    return -1;
  };
  for (const auto& mn : chain) {
    const MachineAst* m = project.machine(mn);
    for (const auto& ev : m->events) {
      EventAst stripped = ev;
      stripped.refines.clear();
      if (ev.name == "INITIALISATION") {
        int at = findSlot("INITIALISATION");
        if (at >= 0)
          events[static_cast<std::size_t>(at)] = stripped;
        else
          events.push_back(stripped);
        continue;
      }
      if (ev.refines.empty()) {
        events.push_back(stripped);
        continue;
      }
      // replace the first refined slot, drop the others (event merge)
      int target = -1;
      for (const auto& absName : ev.refines) {
        int at = findSlot(absName);
        if (at < 0) continue;
        if (target < 0) {
          target = at;
        } else {
          events.erase(events.begin() + at);
          if (at < target) --target;
        }
      }
      if (target >= 0)
        events[static_cast<std::size_t>(target)] = stripped;
      else
        events.push_back(stripped);
    }
  }
  flat.events = std::move(events);
  return flat;
}

}  // namespace ebx
