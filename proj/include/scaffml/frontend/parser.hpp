#pragma once

#include <string_view>
#include <vector>

#include "scaffml/frontend/lexer.hpp"
#include "scaffml/frontend/program.hpp"

namespace scaffml::frontend {

struct ParseResult {
    Program program;
    std::vector<Diagnostic> diagnostics;
};

/// Parses a token stream produced by `tokenize(file)`. Annotation tokens are
/// parsed in place: blocks before a declaration become its contract, and
/// annotations inside a body become assertion points.
ParseResult parse_program(const SourceFile& file, const std::vector<Token>& tokens);

/// tokenize + parse_program
ParseResult parse_source(const SourceFile& file);

enum class AnnotationContext { Declaration, Statement };

struct AnnotationResult {
    spec::Contract contract;               // Declaration context
    std::vector<spec::Clause> assertions;  // Statement context
    std::vector<Diagnostic> diagnostics;
};

AnnotationResult parse_annotation(const SourceFile& file, const Token& annotation,
                                  AnnotationContext context);

/// Parses a single annotation-syntax expression, e.g. `q[0][|0>] == \old(q[0][|1>])`.
/// Throws std::invalid_argument with the first diagnostic on failure.
spec::Expr parse_spec_expression(std::string_view text);

}  // namespace scaffml::frontend
