#pragma once

#include <map>
#include <string>
#include <vector>

#include "scaffml/check/config.hpp"
#include "scaffml/check/eval.hpp"
#include "scaffml/check/report.hpp"
#include "scaffml/frontend/program.hpp"
#include "scaffml/sim/state.hpp"
#include "scaffml/spec/model.hpp"

namespace scaffml::check {

struct ModuleOptions {
    ToleranceConfig tolerances;
    bool check_gates = false;
    std::map<std::string, double> bindings;
    int input = 0;  // copied into every verdict
};

/// Registers for a module's quantum parameters, in parameter order. qstruct
/// parameters contribute one register per member (`s.member`). Symbolic
/// widths come from `bindings`. Throws std::invalid_argument.
sim::RegisterLayout module_layout(const frontend::Program& program, const frontend::Decl& decl,
                                  const std::map<std::string, double>& bindings);

/// requires, old snapshot, body with inline assertions, ensures, behaviors,
/// frame. A failed requires skips the rest.
std::vector<ClauseVerdict> check_module(const frontend::Program& program, const frontend::Decl& decl,
                                        const sim::QuantumState& input, const ModuleOptions& options);

/// Final state of the module body alone, no contract evaluation. Local
/// registers are appended to the layout. Throws sim::SimulationError.
sim::QuantumState simulate_module(const frontend::Program& program, const frontend::Decl& decl,
                                  const sim::QuantumState& input, const std::map<std::string, double>& bindings);

/// Last annotated declaration, else the last module with a body.
const frontend::Decl* default_entry(const frontend::Program& program);

/// Throws std::invalid_argument naming the first unbound classical parameter.
void require_bindings(const frontend::Decl& decl, const std::map<std::string, double>& bindings);

/// Verdicts for one clause list evaluated in `env`; equation clauses in one
/// phase group share a phase factor.
std::vector<ClauseVerdict> check_clauses(const std::vector<spec::NormalClause>& clauses, ClauseKind kind,
                                         const EvalEnv& env);

std::vector<ClauseVerdict> check_behaviors(const spec::NormalContract& contract, const sim::QuantumState& old,
                                           const sim::QuantumState& post, const EvalEnv& env);

/// Every qubit of `old` outside `assigns` must keep its reduced density.
ClauseVerdict check_frame(const std::vector<spec::Expr>& assigns, const sim::QuantumState& old,
                          const sim::QuantumState& post, const EvalEnv& env);

/// Inputs for a run: a state file, seeded random product states, or basis
/// assignments (default: all qubits |0>). Throws std::invalid_argument.
std::vector<sim::QuantumState> make_inputs(const sim::RegisterLayout& layout, const RunConfig& config);

std::map<std::string, std::string> describe(const RunConfig& config);

/// Checks the entry module over every input; verdict order is by input
/// index whatever the job count. Throws std::invalid_argument for a missing
/// entry or bad configuration.
CheckReport run_program(const frontend::Program& program, const std::string& program_name, const RunConfig& config);

}  // namespace scaffml::check
