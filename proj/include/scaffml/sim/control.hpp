#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "scaffml/spec/ast.hpp"

namespace scaffml::sim {

class CompileError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// One column of a compiled conditional: an X on a control qubit, or a call
/// that fires when every listed control reads 1.
struct CircuitStep {
    enum class Kind { Flip, Call } kind = Kind::Flip;
    spec::QubitRef qubit;
    spec::CallStmt call;
    std::vector<spec::QubitRef> controls;

    bool operator==(const CircuitStep&) const = default;
};

/// `X(c[0])` or `CC-U{a[0],b[0]}(input, 1)`.
std::string to_string(const CircuitStep& step);

/// Lowers an if / else-if / else chain over conditions `q[i]==0|1 && ...`
/// into X-conjugated multi-controlled calls. Branches that overlap earlier
/// ones are narrowed to the uncovered assignments. Controls are left as the
/// last branch flipped them unless `restore_controls` is set.
std::vector<CircuitStep> compile_quantum_conditional(const spec::IfStmt& stmt, bool restore_controls = false);

}  // namespace scaffml::sim
