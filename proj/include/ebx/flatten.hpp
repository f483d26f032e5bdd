// Collapse extends chains into one context and refines chains into one machine.
#pragma once

#include <stdexcept>

#include "ebx/analysis.hpp"

namespace ebx {

struct FlattenError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Union of SETS/CONSTANTS and ancestor-first concatenation of AXIOMS/THEOREMS,
// with EXTENDS removed and the original labels kept.
ContextAst flatten_context(const std::string& name, const Project& project);

// Variables and invariants accumulate ancestor-first; every event lineage is
// represented by its most concrete version with REFINES stripped. Rejects
// chains where an abstract variable disappears (data refinement).
MachineAst flatten_machine(const std::string& name, const Project& project);

}  // namespace ebx
