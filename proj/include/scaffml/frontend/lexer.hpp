#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "scaffml/source.hpp"

namespace scaffml::frontend {

enum class TokenKind {
    // keywords (code)
    KwQreg, KwQbit, KwQstruct, KwGate, KwModule, KwInt, KwFloat, KwDouble, KwVoid,
    KwIf, KwElse, KwFor, KwReturn,
    Ident,
    IntLit,
    FloatLit,
    // punctuation
    LParen, RParen, LBrack, RBrack, LBrace, RBrace, Semi, Comma, Dot, DotDot, Colon,
    Plus, Minus, Star, Slash, Percent, Caret, Assign, PlusAssign, MinusAssign, PlusPlus,
    MinusMinus, EqEq, NotEq, Lt, Le, Gt, Ge, AndAnd, OrOr, Not, Amp, Pipe, Arrow, Hash,
    // annotation comment: `/*@ ... */` or `//@ ...`
    Annotation,
    // annotation-mode only
    Ket0,          // |0>
    Ket1,          // |1>
    BackslashWord, // \old, \valid, \nothing
    EmbeddedEnsures,  // a `//ensures ...` line inside an annotation block
    Unknown,
    Eof,
};

std::string_view to_string(TokenKind kind);

struct Token {
    TokenKind kind = TokenKind::Eof;
    std::string_view lexeme;
    std::string_view leading_trivia;
    SourceSpan span;
    /// Annotation and EmbeddedEnsures: byte range of the inner text.
    std::uint32_t inner_offset = 0;
    std::uint32_t inner_length = 0;

    /// Inner text of an Annotation/EmbeddedEnsures token with surrounding
    /// whitespace removed.
    std::string_view inner_text(const SourceFile& file) const;
};

enum class LexMode { Code, Annotation };

struct LexResult {
    std::vector<Token> tokens;  // always terminated by Eof
    std::vector<Diagnostic> diagnostics;
};

/// Tokenizes `file` (or the byte range [begin, end) of it). Ordinary comments
/// and whitespace become the leading trivia of the following token, so the
/// concatenation of `leading_trivia + lexeme` over all tokens reproduces the
/// input exactly.
LexResult tokenize(const SourceFile& file, LexMode mode = LexMode::Code);
LexResult tokenize(const SourceFile& file, std::uint32_t begin, std::uint32_t end, LexMode mode);

}  // namespace scaffml::frontend
