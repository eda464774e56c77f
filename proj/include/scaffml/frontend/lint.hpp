#pragma once

#include <vector>

#include "scaffml/frontend/parser.hpp"
#include "scaffml/frontend/program.hpp"

namespace scaffml::frontend {

/// Name resolution and static checks over a parsed program: unknown
/// identifiers, index bounds, predicate/call arity, control-qubit reuse,
/// behavior flags, \old placement, duplicate labels.
std::vector<Diagnostic> lint(const Program& program);

struct Analysis {
    SourceFile file;
    Program program;
    std::vector<Diagnostic> diagnostics;  // syntax + lint, sorted by position

    bool has_syntax_errors() const;
    bool has_errors() const { return scaffml::has_errors(diagnostics); }
};

/// tokenize + parse + lint.
Analysis analyze(SourceFile file);

}  // namespace scaffml::frontend
