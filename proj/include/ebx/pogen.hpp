// Proof-obligation generation: the eleven rule families plus the refinement
// sequent shapes, with a well-definedness calculus.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ebx/analysis.hpp"

namespace ebx {

enum class PoFamily { INV, FIS, GRD, MRG, SIM, NAT, FIN, VAR, WFIS, THM, WD };

std::string familyName(PoFamily f);
// Accepts both the MRG and MKG spellings from the sources.
bool parseFamily(const std::string& s, PoFamily& out);

struct Sequent {
  std::vector<ExprPtr> hypotheses;
  ExprPtr goal;
};

struct ProofObligation {
  std::string name;  // slash convention: "check_in/inv0_1/INV"
  PoFamily family = PoFamily::INV;
  Sequent sequent;
  std::string event;            // owning event, empty for machine/context POs
  bool autoDischarged = false;  // goal syntactically identical to a hypothesis
  SourcePos origin;
};

struct PogenError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PoSet {
  std::vector<ProofObligation> pos;
  // bound-variable types for quantifiers synthesized here (FIS/WFIS goals)
  std::map<const Expr*, std::vector<SemType>> synthBinds;
};

PoSet generate_pos(const MachineAst& machine, const Project& project, const Analysis& analysis);

// Well-definedness conditions of a formula, left-to-right, each wrapped in the
// logical context it appears under. Function applications need the argument in
// the domain; division needs a non-zero divisor; card is total on finite sets.
// When `analysis` and `synthOut` are given, quantifiers synthesized while
// wrapping inherit the original binder's types so the conditions stay
// finitely evaluable.
std::vector<ExprPtr> wd_conditions(const ExprPtr& e, const ComponentEnv& env,
                                   const Analysis* analysis = nullptr,
                                   std::map<const Expr*, std::vector<SemType>>* synthOut = nullptr);

// Renders the PO file (sequents in the ASCII dialect) and the summary table.
std::string render_po_file(const std::string& machineName, const PoSet& pos);

}  // namespace ebx
