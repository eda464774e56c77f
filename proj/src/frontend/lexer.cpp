#include "scaffml/frontend/lexer.hpp"

#include <array>
#include <cctype>
#include <utility>

namespace scaffml::frontend {
namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

TokenKind keyword_kind(std::string_view word) {
    static constexpr std::array<std::pair<std::string_view, TokenKind>, 13> kKeywords{{
        {"qreg", TokenKind::KwQreg},     {"qbit", TokenKind::KwQbit},
        {"qstruct", TokenKind::KwQstruct}, {"gate", TokenKind::KwGate},
        {"module", TokenKind::KwModule}, {"int", TokenKind::KwInt},
        {"float", TokenKind::KwFloat},   {"double", TokenKind::KwDouble},
        {"void", TokenKind::KwVoid},     {"if", TokenKind::KwIf},
        {"else", TokenKind::KwElse},     {"for", TokenKind::KwFor},
        {"return", TokenKind::KwReturn},
    }};
    for (const auto& [text, kind] : kKeywords) {
        if (text == word) return kind;
    }
    return TokenKind::Ident;
}

class Lexer {
public:
    Lexer(const SourceFile& file, std::uint32_t begin, std::uint32_t end, LexMode mode)
        : file_(file), text_(file.content()), pos_(begin), end_(end), mode_(mode) {}

    LexResult run() {
        LexResult result;
        while (true) {
            const std::uint32_t trivia_start = pos_;
            skip_trivia(result.diagnostics);
            Token tok;
            tok.leading_trivia = text_.substr(trivia_start, pos_ - trivia_start);
            const std::uint32_t start = pos_;
            if (pos_ >= end_) {
                tok.kind = TokenKind::Eof;
                tok.lexeme = text_.substr(end_, 0);
                tok.span = file_.span(end_, 0);
                result.tokens.push_back(tok);
                break;
            }
            lex_token(tok, result.diagnostics);
            tok.lexeme = text_.substr(start, pos_ - start);
            tok.span = file_.span(start, pos_ - start);
            result.tokens.push_back(tok);
        }
        return result;
    }

private:
    char peek(std::uint32_t ahead = 0) const {
        const std::uint32_t at = pos_ + ahead;
        return at < end_ ? text_[at] : '\0';
    }
    bool starts_with(std::string_view s) const {
        return pos_ + s.size() <= end_ && text_.substr(pos_, s.size()) == s;
    }

    // Is the `//` at pos_ followed (after blanks) by the word `ensures`?
    bool at_embedded_ensures() const {
        std::uint32_t at = pos_ + 2;
        while (at < end_ && (text_[at] == ' ' || text_[at] == '\t')) ++at;
        constexpr std::string_view kw = "ensures";
        if (at + kw.size() > end_ || text_.substr(at, kw.size()) != kw) return false;
        const std::uint32_t after = at + static_cast<std::uint32_t>(kw.size());
        return after >= end_ || !is_ident_char(text_[after]);
    }

    // Inside an annotation block a line may begin with `@` (ACSL style).
    bool at_line_start_marker() const {
        if (peek() != '@') return false;
        std::uint32_t at = pos_;
        while (at > 0) {
            const char c = text_[at - 1];
            if (c == '\n') return true;
            if (c != ' ' && c != '\t') return false;
            --at;
        }
        return true;
    }

    void skip_trivia(std::vector<Diagnostic>& diags) {
        while (pos_ < end_) {
            const char c = peek();
            if (is_space(c)) {
                ++pos_;
            } else if (mode_ == LexMode::Annotation && at_line_start_marker()) {
                ++pos_;
            } else if (c == '/' && peek(1) == '/') {
                if (mode_ == LexMode::Code && peek(2) == '@') return;
                if (mode_ == LexMode::Annotation && at_embedded_ensures()) return;
                while (pos_ < end_ && peek() != '\n') ++pos_;
            } else if (c == '/' && peek(1) == '*') {
                if (mode_ == LexMode::Code && peek(2) == '@') return;
                const std::uint32_t start = pos_;
                pos_ += 2;
                while (pos_ < end_ && !starts_with("*/")) ++pos_;
                if (pos_ >= end_) {
                    diags.push_back({Severity::Error, file_.span(end_, 0),
                                     "unterminated block comment (opened at line " +
                                         std::to_string(file_.span(start, 2).line) + ")",
                                     true});
                    return;
                }
                pos_ += 2;
            } else {
                return;
            }
        }
    }

    void set_inner(Token& tok, std::uint32_t begin, std::uint32_t end) {
        while (begin < end && is_space(text_[begin])) ++begin;
        while (end > begin && is_space(text_[end - 1])) --end;
        tok.inner_offset = begin;
        tok.inner_length = end - begin;
    }

    void lex_annotation(Token& tok, std::vector<Diagnostic>& diags) {
        tok.kind = TokenKind::Annotation;
        if (peek(1) == '/') {
            pos_ += 3;
            const std::uint32_t begin = pos_;
            while (pos_ < end_ && peek() != '\n') ++pos_;
            set_inner(tok, begin, pos_);
            return;
        }
        const std::uint32_t start = pos_;
        pos_ += 3;
        const std::uint32_t begin = pos_;
        while (pos_ < end_ && !starts_with("*/")) ++pos_;
        if (pos_ >= end_) {
            diags.push_back({Severity::Error, file_.span(end_, 0),
                             "unterminated annotation comment (opened at line " +
                                 std::to_string(file_.span(start, 3).line) + ")",
                             true});
            set_inner(tok, begin, pos_);
            return;
        }
        set_inner(tok, begin, pos_);
        pos_ += 2;
    }

    // `//ensures ...` inside a block: extends to the `;` that ends the clause,
    // possibly across continuation lines, but never into another `//` line.
    void lex_embedded_ensures(Token& tok) {
        tok.kind = TokenKind::EmbeddedEnsures;
        pos_ += 2;
        const std::uint32_t begin = pos_;
        while (pos_ < end_) {
            const char c = peek();
            if (c == ';') {
                ++pos_;
                break;
            }
            if (c == '\n') {
                std::uint32_t at = pos_ + 1;
                while (at < end_ && (text_[at] == ' ' || text_[at] == '\t')) ++at;
                const bool blank = at >= end_ || text_[at] == '\n' || text_[at] == '\r';
                const bool comment = at + 1 < end_ && text_[at] == '/' && text_[at + 1] == '/';
                if (blank || comment) break;
                // Continuation lines never start a new clause or statement.
                std::uint32_t word_end = at;
                while (word_end < end_ && is_ident_char(text_[word_end])) ++word_end;
                const std::string_view word = text_.substr(at, word_end - at);
                if (word == "ensures" || word == "requires" || word == "assigns" ||
                    word == "behavior" || word == "assumes" || word == "complete" ||
                    word == "disjoint" || word == "module" || word == "int" || word == "for" ||
                    word == "if" || word == "else" || (at < end_ && text_[at] == '}')) {
                    break;
                }
            }
            ++pos_;
        }
        set_inner(tok, begin, pos_);
    }

    void lex_number(Token& tok) {
        tok.kind = TokenKind::IntLit;
        while (is_digit(peek())) ++pos_;
        if (peek() == '.' && is_digit(peek(1))) {
            tok.kind = TokenKind::FloatLit;
            ++pos_;
            while (is_digit(peek())) ++pos_;
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (is_digit(peek(1)) || ((peek(1) == '-' || peek(1) == '+') && is_digit(peek(2))))) {
            tok.kind = TokenKind::FloatLit;
            pos_ += 2;
            while (is_digit(peek())) ++pos_;
        }
    }

    void lex_token(Token& tok, std::vector<Diagnostic>& diags) {
        const char c = peek();
        if (mode_ == LexMode::Code && (starts_with("/*@") || starts_with("//@"))) {
            lex_annotation(tok, diags);
            return;
        }
        if (mode_ == LexMode::Annotation && c == '/' && peek(1) == '/') {
            lex_embedded_ensures(tok);
            return;
        }
        if (is_ident_start(c)) {
            while (is_ident_char(peek())) ++pos_;
            tok.kind = TokenKind::Ident;
            return;
        }
        if (is_digit(c)) {
            lex_number(tok);
            return;
        }
        if (mode_ == LexMode::Annotation) {
            if (c == '|' && (peek(1) == '0' || peek(1) == '1') && peek(2) == '>') {
                tok.kind = peek(1) == '0' ? TokenKind::Ket0 : TokenKind::Ket1;
                pos_ += 3;
                return;
            }
            if (c == '\\' && is_ident_start(peek(1))) {
                ++pos_;
                while (is_ident_char(peek())) ++pos_;
                tok.kind = TokenKind::BackslashWord;
                return;
            }
        }
        struct Punct {
            std::string_view text;
            TokenKind kind;
        };
        // Longest match first.
        static constexpr std::array<Punct, 37> kPunct{{
            {"..", TokenKind::DotDot},      {"+=", TokenKind::PlusAssign},
            {"-=", TokenKind::MinusAssign}, {"++", TokenKind::PlusPlus},
            {"--", TokenKind::MinusMinus},  {"==", TokenKind::EqEq},
            {"!=", TokenKind::NotEq},       {"<=", TokenKind::Le},
            {">=", TokenKind::Ge},          {"&&", TokenKind::AndAnd},
            {"||", TokenKind::OrOr},        {"->", TokenKind::Arrow},
            {"(", TokenKind::LParen},       {")", TokenKind::RParen},
            {"[", TokenKind::LBrack},       {"]", TokenKind::RBrack},
            {"{", TokenKind::LBrace},       {"}", TokenKind::RBrace},
            {";", TokenKind::Semi},         {",", TokenKind::Comma},
            {".", TokenKind::Dot},          {":", TokenKind::Colon},
            {"+", TokenKind::Plus},         {"-", TokenKind::Minus},
            {"*", TokenKind::Star},         {"/", TokenKind::Slash},
            {"%", TokenKind::Percent},      {"^", TokenKind::Caret},
            {"=", TokenKind::Assign},       {"<", TokenKind::Lt},
            {">", TokenKind::Gt},           {"!", TokenKind::Not},
            {"&", TokenKind::Amp},          {"|", TokenKind::Pipe},
            {"#", TokenKind::Hash},         {"\\", TokenKind::Unknown},
            {"?", TokenKind::Unknown},
        }};
        for (const auto& p : kPunct) {
            if (starts_with(p.text)) {
                tok.kind = p.kind;
                pos_ += static_cast<std::uint32_t>(p.text.size());
                return;
            }
        }
        // Unknown byte; consume a whole UTF-8 sequence so spans stay sane.
        tok.kind = TokenKind::Unknown;
        ++pos_;
        while (pos_ < end_ && (static_cast<unsigned char>(peek()) & 0xC0) == 0x80) ++pos_;
    }

    const SourceFile& file_;
    std::string_view text_;
    std::uint32_t pos_;
    std::uint32_t end_;
    LexMode mode_;
};

}  // namespace

std::string_view Token::inner_text(const SourceFile& file) const {
    return std::string_view(file.content()).substr(inner_offset, inner_length);
}

LexResult tokenize(const SourceFile& file, LexMode mode) {
    return tokenize(file, 0, static_cast<std::uint32_t>(file.content().size()), mode);
}

LexResult tokenize(const SourceFile& file, std::uint32_t begin, std::uint32_t end, LexMode mode) {
    LexResult result = Lexer(file, begin, end, mode).run();
    for (auto& tok : result.tokens) {
        if (tok.kind == TokenKind::Ident) tok.kind = keyword_kind(tok.lexeme);
    }
    return result;
}

std::string_view to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::KwQreg: return "'qreg'";
        case TokenKind::KwQbit: return "'qbit'";
        case TokenKind::KwQstruct: return "'qstruct'";
        case TokenKind::KwGate: return "'gate'";
        case TokenKind::KwModule: return "'module'";
        case TokenKind::KwInt: return "'int'";
        case TokenKind::KwFloat: return "'float'";
        case TokenKind::KwDouble: return "'double'";
        case TokenKind::KwVoid: return "'void'";
        case TokenKind::KwIf: return "'if'";
        case TokenKind::KwElse: return "'else'";
        case TokenKind::KwFor: return "'for'";
        case TokenKind::KwReturn: return "'return'";
        case TokenKind::Ident: return "identifier";
        case TokenKind::IntLit: return "integer literal";
        case TokenKind::FloatLit: return "number";
        case TokenKind::LParen: return "'('";
        case TokenKind::RParen: return "')'";
        case TokenKind::LBrack: return "'['";
        case TokenKind::RBrack: return "']'";
        case TokenKind::LBrace: return "'{'";
        case TokenKind::RBrace: return "'}'";
        case TokenKind::Semi: return "';'";
        case TokenKind::Comma: return "','";
        case TokenKind::Dot: return "'.'";
        case TokenKind::DotDot: return "'..'";
        case TokenKind::Colon: return "':'";
        case TokenKind::Plus: return "'+'";
        case TokenKind::Minus: return "'-'";
        case TokenKind::Star: return "'*'";
        case TokenKind::Slash: return "'/'";
        case TokenKind::Percent: return "'%'";
        case TokenKind::Caret: return "'^'";
        case TokenKind::Assign: return "'='";
        case TokenKind::PlusAssign: return "'+='";
        case TokenKind::MinusAssign: return "'-='";
        case TokenKind::PlusPlus: return "'++'";
        case TokenKind::MinusMinus: return "'--'";
        case TokenKind::EqEq: return "'=='";
        case TokenKind::NotEq: return "'!='";
        case TokenKind::Lt: return "'<'";
        case TokenKind::Le: return "'<='";
        case TokenKind::Gt: return "'>'";
        case TokenKind::Ge: return "'>='";
        case TokenKind::AndAnd: return "'&&'";
        case TokenKind::OrOr: return "'||'";
        case TokenKind::Not: return "'!'";
        case TokenKind::Amp: return "'&'";
        case TokenKind::Pipe: return "'|'";
        case TokenKind::Arrow: return "'->'";
        case TokenKind::Hash: return "'#'";
        case TokenKind::Annotation: return "annotation";
        case TokenKind::Ket0: return "'|0>'";
        case TokenKind::Ket1: return "'|1>'";
        case TokenKind::BackslashWord: return "backslash keyword";
        case TokenKind::EmbeddedEnsures: return "embedded ensures";
        case TokenKind::Unknown: return "unknown character";
        case TokenKind::Eof: return "end of file";
    }
    return "token";
}

}  // namespace scaffml::frontend
