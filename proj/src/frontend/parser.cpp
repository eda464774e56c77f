#include "scaffml/frontend/parser.hpp"

#include <charconv>
#include <stdexcept>
#include <string>
#include <utility>

namespace scaffml::frontend {

using spec::BinaryOp;
using spec::Clause;
using spec::Expr;
using spec::IndexForm;
using spec::QubitRef;
using spec::Statement;

namespace {

struct ParseAbort {};

const Token& eof_token() {
    static const Token tok{};
    return tok;
}

class Parser {
public:
    Parser(const SourceFile& file, const std::vector<Token>& tokens, LexMode mode,
           std::vector<Diagnostic>& diags)
        : file_(file), toks_(tokens), mode_(mode), diags_(diags) {}

    // ------------------------------------------------------------------
    // Token cursor

    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t at = pos_ + ahead;
        return at < toks_.size() ? toks_[at] : (toks_.empty() ? eof_token() : toks_.back());
    }
    bool check(TokenKind kind, std::size_t ahead = 0) const { return peek(ahead).kind == kind; }
    bool check_word(std::string_view word, std::size_t ahead = 0) const {
        return check(TokenKind::Ident, ahead) && peek(ahead).lexeme == word;
    }
    bool at_end() const { return check(TokenKind::Eof); }
    const Token& advance() {
        const Token& tok = peek();
        if (pos_ < toks_.size()) ++pos_;
        return tok;
    }
    bool accept(TokenKind kind) {
        if (!check(kind)) return false;
        advance();
        return true;
    }
    bool accept_word(std::string_view word) {
        if (!check_word(word)) return false;
        advance();
        return true;
    }

    static std::string describe(const Token& tok) {
        switch (tok.kind) {
            case TokenKind::Ident: return "identifier '" + std::string(tok.lexeme) + "'";
            case TokenKind::IntLit:
            case TokenKind::FloatLit: return "number '" + std::string(tok.lexeme) + "'";
            case TokenKind::Eof: return "end of input";
            case TokenKind::Annotation: return "annotation comment";
            default: return "'" + std::string(tok.lexeme) + "'";
        }
    }

    [[noreturn]] void fail_at(const Token& tok, std::string message) {
        error(tok.span, std::move(message));
        throw ParseAbort{};
    }
    void error(SourceSpan span, std::string message) {
        diags_.push_back({Severity::Error, span, std::move(message), true});
    }
    void warning(SourceSpan span, std::string message) {
        diags_.push_back({Severity::Warning, span, std::move(message), true});
    }
    [[noreturn]] void unsupported(const Token& tok, std::string_view construct) {
        fail_at(tok, "outside supported subset: " + std::string(construct));
    }

    const Token& expect(TokenKind kind, std::string_view context) {
        if (!check(kind)) {
            std::string msg = "expected " + std::string(to_string(kind));
            if (!context.empty()) msg += " " + std::string(context);
            msg += ", found " + describe(peek());
            fail_at(peek(), std::move(msg));
        }
        return advance();
    }

    SourceSpan span_from(std::size_t start) const {
        if (start >= toks_.size()) return {};
        const Token& first = toks_[start];
        const std::size_t last_index = pos_ > start ? pos_ - 1 : start;
        const Token& last = toks_[std::min(last_index, toks_.size() - 1)];
        const std::uint32_t end = last.span.offset + last.span.length;
        return file_.span(first.span.offset, end > first.span.offset ? end - first.span.offset : 0);
    }

    // `qbit` is a keyword, but the example programs also use it as a variable name.
    bool check_name(std::size_t ahead = 0) const {
        return check(TokenKind::Ident, ahead) || check(TokenKind::KwQbit, ahead);
    }
    std::string expect_name(std::string_view context) {
        if (!check_name()) {
            fail_at(peek(), "expected identifier " + std::string(context) + ", found " + describe(peek()));
        }
        return std::string(advance().lexeme);
    }

    void sync_to_statement_end() {
        int depth = 0;
        while (!at_end()) {
            if (check(TokenKind::LBrace)) ++depth;
            if (check(TokenKind::RBrace)) {
                if (depth == 0) return;
                --depth;
                advance();
                if (depth == 0) return;
                continue;
            }
            if (check(TokenKind::Semi) && depth == 0) {
                advance();
                return;
            }
            advance();
        }
    }

    // ------------------------------------------------------------------
    // Expressions

    Expr parse_expr() { return parse_or(); }

    Expr parse_or() {
        const std::size_t start = pos_;
        Expr lhs = parse_and();
        while (check(TokenKind::OrOr)) {
            advance();
            Expr rhs = parse_and();
            lhs = spec::make_binary(BinaryOp::Or, std::move(lhs), std::move(rhs), span_from(start));
        }
        return lhs;
    }

    Expr parse_and() {
        const std::size_t start = pos_;
        Expr lhs = parse_equality();
        while (check(TokenKind::AndAnd)) {
            advance();
            Expr rhs = parse_equality();
            lhs = spec::make_binary(BinaryOp::And, std::move(lhs), std::move(rhs), span_from(start));
        }
        return lhs;
    }

    Expr parse_equality() {
        const std::size_t start = pos_;
        Expr lhs = parse_relational();
        while (check(TokenKind::EqEq) || check(TokenKind::NotEq)) {
            const BinaryOp op = advance().kind == TokenKind::EqEq ? BinaryOp::Eq : BinaryOp::Ne;
            Expr rhs = parse_relational();
            lhs = spec::make_binary(op, std::move(lhs), std::move(rhs), span_from(start));
        }
        return lhs;
    }

    Expr parse_relational() {
        const std::size_t start = pos_;
        Expr lhs = parse_additive();
        while (true) {
            BinaryOp op;
            if (check(TokenKind::Lt)) op = BinaryOp::Lt;
            else if (check(TokenKind::Le)) op = BinaryOp::Le;
            else if (check(TokenKind::Gt)) op = BinaryOp::Gt;
            else if (check(TokenKind::Ge)) op = BinaryOp::Ge;
            else break;
            advance();
            Expr rhs = parse_additive();
            lhs = spec::make_binary(op, std::move(lhs), std::move(rhs), span_from(start));
        }
        return lhs;
    }

    Expr parse_additive() {
        const std::size_t start = pos_;
        Expr lhs = parse_multiplicative();
        while (check(TokenKind::Plus) || check(TokenKind::Minus)) {
            const BinaryOp op = advance().kind == TokenKind::Plus ? BinaryOp::Add : BinaryOp::Sub;
            Expr rhs = parse_multiplicative();
            lhs = spec::make_binary(op, std::move(lhs), std::move(rhs), span_from(start));
        }
        return lhs;
    }

    Expr parse_multiplicative() {
        const std::size_t start = pos_;
        Expr lhs = parse_unary();
        while (check(TokenKind::Star) || check(TokenKind::Slash) || check(TokenKind::Percent)) {
            if (check(TokenKind::Percent)) unsupported(peek(), "'%' operator");
            const BinaryOp op = advance().kind == TokenKind::Star ? BinaryOp::Mul : BinaryOp::Div;
            Expr rhs = parse_unary();
            lhs = spec::make_binary(op, std::move(lhs), std::move(rhs), span_from(start));
        }
        return lhs;
    }

    Expr parse_unary() {
        const std::size_t start = pos_;
        if (check(TokenKind::Minus) || check(TokenKind::Plus) || check(TokenKind::Not)) {
            const TokenKind k = advance().kind;
            const spec::UnaryOp op = k == TokenKind::Minus  ? spec::UnaryOp::Neg
                                     : k == TokenKind::Plus ? spec::UnaryOp::Plus
                                                            : spec::UnaryOp::Not;
            Expr operand = parse_unary();
            return spec::make_unary(op, std::move(operand), span_from(start));
        }
        if (check(TokenKind::Star) || check(TokenKind::Amp)) unsupported(peek(), "pointer expression");
        if (check(TokenKind::PlusPlus) || check(TokenKind::MinusMinus)) {
            unsupported(peek(), "prefix increment in expression");
        }
        return parse_power();
    }

    Expr parse_power() {
        const std::size_t start = pos_;
        Expr base = parse_primary();
        if (check(TokenKind::Caret)) {
            if (mode_ == LexMode::Code) unsupported(peek(), "'^' operator in code");
            advance();
            Expr exponent = parse_unary();
            return spec::make_binary(BinaryOp::Pow, std::move(base), std::move(exponent), span_from(start));
        }
        return base;
    }

    Expr parse_number() {
        const Token& tok = advance();
        spec::NumberLit lit;
        lit.text = std::string(tok.lexeme);
        lit.integral = tok.kind == TokenKind::IntLit;
        lit.value = std::stod(lit.text);
        return Expr{std::move(lit), tok.span};
    }

    // One `[...]` suffix on a reference; returns false if the bracket holds a ket
    // (left for the caller).
    void parse_index_suffix(QubitRef& ref) {
        const Token& open = expect(TokenKind::LBrack, "");
        (void)open;
        if (accept(TokenKind::RBrack)) {
            ref.form = IndexForm::All;
            return;
        }
        Expr first = parse_expr();
        if (accept(TokenKind::DotDot)) {
            Expr last = parse_expr();
            ref.form = IndexForm::Slice;
            ref.index = Box<Expr>(std::move(first));
            ref.slice_end = Box<Expr>(std::move(last));
        } else {
            ref.form = IndexForm::Element;
            ref.index = Box<Expr>(std::move(first));
        }
        expect(TokenKind::RBrack, "to close index");
    }

    bool at_ket_bracket() const {
        return check(TokenKind::LBrack) && (check(TokenKind::Ket0, 1) || check(TokenKind::Ket1, 1));
    }

    // Parses `name[.member][index]` (no amplitude suffix). Bare names with no
    // suffix are returned with `bare` set.
    QubitRef parse_ref_core(bool& bare) {
        QubitRef ref;
        ref.name = expect_name("in reference");
        bare = true;
        if (check(TokenKind::Dot) && check_name(1)) {
            advance();
            ref.member = std::string(advance().lexeme);
            bare = false;
        }
        if (check(TokenKind::Arrow)) unsupported(peek(), "pointer member access");
        if (check(TokenKind::LBrack) && !at_ket_bracket()) {
            parse_index_suffix(ref);
            bare = false;
        } else if (check(TokenKind::LBrace) && check(TokenKind::IntLit, 1) && check(TokenKind::RBrace, 2)) {
            // `control_1{0}`: report, then read it as an index to keep going.
            error(peek().span, "expected '[' for register index, found '{' (reading '" + ref.name + "{" +
                                   std::string(peek(1).lexeme) + "}' as '" + ref.name + "[" +
                                   std::string(peek(1).lexeme) + "]')");
            advance();
            Expr index = parse_number();
            advance();
            ref.form = IndexForm::Element;
            ref.index = Box<Expr>(std::move(index));
            bare = false;
        }
        if (check(TokenKind::LBrack) && !at_ket_bracket()) {
            unsupported(peek(), "multi-dimensional index");
        }
        return ref;
    }

    Expr parse_name_expr() {
        const std::size_t start = pos_;
        // Predicate call with epoch pair: Name{Here,Old}(...)
        if (check(TokenKind::LBrace, 1) && check(TokenKind::Ident, 2) && check(TokenKind::Comma, 3)) {
            std::string name(advance().lexeme);
            advance();
            const spec::Epoch first = parse_epoch();
            expect(TokenKind::Comma, "in epoch pair");
            const spec::Epoch second = parse_epoch();
            expect(TokenKind::RBrace, "to close epoch pair");
            spec::CallExpr call;
            call.name = std::move(name);
            call.epochs = std::make_pair(first, second);
            call.args = parse_call_args();
            return Expr{std::move(call), span_from(start)};
        }
        if (check(TokenKind::LParen, 1)) {
            std::string name(advance().lexeme);
            spec::CallExpr call;
            call.name = std::move(name);
            call.args = parse_call_args();
            return Expr{std::move(call), span_from(start)};
        }
        bool bare = false;
        QubitRef ref = parse_ref_core(bare);
        if (at_ket_bracket()) {
            advance();
            const spec::Basis basis = advance().kind == TokenKind::Ket0 ? spec::Basis::Zero : spec::Basis::One;
            if (check(TokenKind::DotDot)) {
                fail_at(peek(), "amplitude range '|0>..|1>' is only allowed in \\valid and assigns");
            }
            expect(TokenKind::RBrack, "after ket");
            return spec::make_amplitude(std::move(ref), basis, span_from(start));
        }
        if (bare) return spec::make_ident(ref.name, span_from(start));
        return Expr{std::move(ref), span_from(start)};
    }

    spec::Epoch parse_epoch() {
        const Token& tok = expect(TokenKind::Ident, "in epoch pair");
        if (tok.lexeme == "Here") return spec::Epoch::Here;
        if (tok.lexeme == "Old") return spec::Epoch::Old;
        fail_at(tok, "unknown epoch '" + std::string(tok.lexeme) + "' (expected Here or Old)");
    }

    std::vector<Expr> parse_call_args() {
        expect(TokenKind::LParen, "to open argument list");
        std::vector<Expr> args;
        if (accept(TokenKind::RParen)) return args;
        while (true) {
            args.push_back(parse_expr());
            if (accept(TokenKind::RParen)) break;
            expect(TokenKind::Comma, "between arguments");
        }
        return args;
    }

    Expr parse_primary() {
        const std::size_t start = pos_;
        const Token& tok = peek();
        switch (tok.kind) {
            case TokenKind::IntLit:
            case TokenKind::FloatLit: return parse_number();
            case TokenKind::LParen: {
                advance();
                Expr inner = parse_expr();
                expect(TokenKind::RParen, "to close parenthesis");
                inner.span = span_from(start);
                return inner;
            }
            case TokenKind::Ident:
            case TokenKind::KwQbit: return parse_name_expr();
            case TokenKind::BackslashWord: return parse_backslash();
            case TokenKind::Ket0:
            case TokenKind::Ket1: fail_at(tok, "ket " + std::string(tok.lexeme) + " outside an amplitude accessor");
            default: break;
        }
        fail_at(tok, "expected expression, found " + describe(tok));
    }

    Expr parse_backslash() {
        const std::size_t start = pos_;
        const Token& tok = advance();
        if (tok.lexeme == "\\old") {
            expect(TokenKind::LParen, "after \\old");
            Expr inner = parse_expr();
            expect(TokenKind::RParen, "to close \\old");
            return spec::make_old(std::move(inner), span_from(start));
        }
        if (tok.lexeme == "\\valid") {
            expect(TokenKind::LParen, "after \\valid");
            bool bare = false;
            spec::ValidExpr valid;
            valid.ref = parse_ref_core(bare);
            if (accept(TokenKind::Plus)) {
                expect(TokenKind::LParen, "before amplitude range");
                expect(TokenKind::Ket0, "in amplitude range");
                expect(TokenKind::DotDot, "in amplitude range");
                expect(TokenKind::Ket1, "in amplitude range");
                expect(TokenKind::RParen, "after amplitude range");
                valid.amplitude_range = true;
            }
            expect(TokenKind::RParen, "to close \\valid");
            return Expr{std::move(valid), span_from(start)};
        }
        if (tok.lexeme == "\\nothing") fail_at(tok, "\\nothing is only allowed in assigns");
        fail_at(tok, "unknown builtin '" + std::string(tok.lexeme) + "'");
    }

    // ------------------------------------------------------------------
    // Statements

    std::vector<Statement> parse_block_or_statement() {
        std::vector<Statement> out;
        if (check(TokenKind::LBrace)) {
            out = parse_block();
        } else {
            parse_statement_into(out);
        }
        return out;
    }

    std::vector<Statement> parse_block() {
        expect(TokenKind::LBrace, "to open block");
        std::vector<Statement> body;
        while (!check(TokenKind::RBrace) && !at_end()) {
            const std::size_t before = pos_;
            try {
                parse_statement_into(body);
            } catch (const ParseAbort&) {
                if (pos_ == before) advance();
                sync_to_statement_end();
            }
        }
        expect(TokenKind::RBrace, "to close block");
        return body;
    }

    static bool is_unsupported_keyword(std::string_view w) {
        return w == "while" || w == "do" || w == "switch" || w == "goto" || w == "break" ||
               w == "continue" || w == "cbit" || w == "typedef" || w == "struct" || w == "case";
    }

    void parse_statement_into(std::vector<Statement>& out) {
        const std::size_t start = pos_;
        const Token& tok = peek();
        switch (tok.kind) {
            case TokenKind::Annotation: {
                advance();
                AnnotationResult ann = parse_annotation(file_, tok, AnnotationContext::Statement);
                diags_.insert(diags_.end(), ann.diagnostics.begin(), ann.diagnostics.end());
                if (!ann.assertions.empty()) {
                    out.push_back(Statement{spec::AssertStmt{std::move(ann.assertions)}, tok.span});
                }
                return;
            }
            case TokenKind::EmbeddedEnsures: {
                advance();
                if (mode_ != LexMode::Annotation) fail_at(tok, "unexpected embedded ensures");
                out.push_back(Statement{spec::EmitStmt{parse_embedded_clause(tok)}, tok.span});
                return;
            }
            case TokenKind::Semi: advance(); return;
            case TokenKind::LBrace: {
                unsupported(tok, "nested block statement");
            }
            case TokenKind::KwInt:
            case TokenKind::KwFloat:
            case TokenKind::KwDouble: {
                out.push_back(parse_var_decl());
                expect(TokenKind::Semi, "after declaration");
                return;
            }
            case TokenKind::KwQreg: {
                out.push_back(parse_quantum_decl());
                return;
            }
            case TokenKind::KwQbit:
                if (check(TokenKind::Ident, 1) || check(TokenKind::KwQbit, 1)) {
                    out.push_back(parse_quantum_decl());
                    return;
                }
                break;
            case TokenKind::KwFor: out.push_back(parse_for()); return;
            case TokenKind::KwIf: out.push_back(parse_if()); return;
            case TokenKind::KwReturn: {
                advance();
                spec::ReturnStmt ret;
                if (!check(TokenKind::Semi)) ret.value = parse_expr();
                expect(TokenKind::Semi, "after return");
                out.push_back(Statement{std::move(ret), span_from(start)});
                return;
            }
            case TokenKind::Hash: unsupported(tok, "preprocessor directive");
            case TokenKind::KwModule:
            case TokenKind::KwGate: fail_at(tok, "nested " + std::string(tok.lexeme) + " declaration");
            default: break;
        }
        if (tok.kind == TokenKind::Ident) {
            if (is_unsupported_keyword(tok.lexeme)) {
                unsupported(tok, "'" + std::string(tok.lexeme) + "' statement");
            }
            if (tok.lexeme == "MeasZ" || tok.lexeme == "measZ") {
                unsupported(tok, "measurement statement");
            }
            // `struct1 qst;`
            if (check(TokenKind::Ident, 1) && (check(TokenKind::Semi, 2) || check(TokenKind::LBrack, 2))) {
                out.push_back(parse_quantum_decl());
                return;
            }
        }
        out.push_back(parse_simple_statement());
        expect(TokenKind::Semi, "after statement");
    }

    Statement parse_var_decl() {
        const std::size_t start = pos_;
        const TokenKind type = advance().kind;
        spec::VarDecl decl;
        decl.type = type == TokenKind::KwInt ? spec::ScalarType::Int : spec::ScalarType::Float;
        if (check(TokenKind::Star)) unsupported(peek(), "pointer declaration");
        decl.name = expect_name("in declaration");
        if (check(TokenKind::LBrack)) unsupported(peek(), "classical array");
        if (accept(TokenKind::Assign)) decl.init = parse_expr();
        if (check(TokenKind::Comma)) unsupported(peek(), "multiple declarators");
        return Statement{std::move(decl), span_from(start)};
    }

    Statement parse_quantum_decl() {
        const std::size_t start = pos_;
        spec::QuantumDecl decl;
        decl.type_name = std::string(advance().lexeme);
        if (check(TokenKind::Star)) unsupported(peek(), "pointer declaration");
        decl.name = expect_name("in register declaration");
        if (accept(TokenKind::LBrack)) {
            decl.width = parse_expr();
            expect(TokenKind::RBrack, "after register width");
        }
        expect(TokenKind::Semi, "after register declaration");
        return Statement{std::move(decl), span_from(start)};
    }

    // Call or assignment, without the trailing ';'.
    Statement parse_simple_statement() {
        const std::size_t start = pos_;
        if (!check_name()) fail_at(peek(), "expected statement, found " + describe(peek()));
        if (check(TokenKind::LParen, 1)) {
            spec::CallStmt call;
            call.callee = std::string(advance().lexeme);
            call.args = parse_call_args();
            return Statement{std::move(call), span_from(start)};
        }
        spec::AssignStmt assign;
        assign.target = std::string(advance().lexeme);
        if (check(TokenKind::LBrack) || check(TokenKind::Dot)) {
            unsupported(peek(), "assignment to an indexed or member location");
        }
        if (accept(TokenKind::PlusPlus)) {
            assign.op = spec::AssignOp::Increment;
        } else if (accept(TokenKind::MinusMinus)) {
            assign.op = spec::AssignOp::Decrement;
        } else if (accept(TokenKind::Assign)) {
            assign.op = spec::AssignOp::Set;
            assign.value = parse_expr();
        } else if (accept(TokenKind::PlusAssign)) {
            assign.op = spec::AssignOp::Add;
            assign.value = parse_expr();
        } else if (accept(TokenKind::MinusAssign)) {
            assign.op = spec::AssignOp::Sub;
            assign.value = parse_expr();
        } else {
            fail_at(peek(), "expected '(' or assignment after '" + assign.target + "', found " + describe(peek()));
        }
        return Statement{std::move(assign), span_from(start)};
    }

    Statement parse_for() {
        const std::size_t start = pos_;
        advance();
        expect(TokenKind::LParen, "after 'for'");
        spec::ForStmt loop;
        if (!check(TokenKind::Semi)) {
            if (check(TokenKind::KwInt) || check(TokenKind::KwFloat) || check(TokenKind::KwDouble)) {
                loop.init.push_back(parse_var_decl());
            } else {
                loop.init.push_back(parse_simple_statement());
            }
        }
        expect(TokenKind::Semi, "after for-loop initializer");
        if (!check(TokenKind::Semi)) loop.cond = parse_expr();
        expect(TokenKind::Semi, "after for-loop condition");
        if (!check(TokenKind::RParen)) loop.step.push_back(parse_simple_statement());
        expect(TokenKind::RParen, "to close for-loop header");
        loop.body = parse_block_or_statement();
        return Statement{std::move(loop), span_from(start)};
    }

    Statement parse_if() {
        const std::size_t start = pos_;
        advance();
        expect(TokenKind::LParen, "after 'if'");
        Expr cond = parse_expr();
        expect(TokenKind::RParen, "to close condition");
        spec::IfStmt node{std::move(cond), parse_block_or_statement(), {}, false};
        if (accept(TokenKind::KwElse)) {
            node.has_else = true;
            node.else_body = parse_block_or_statement();
        }
        return Statement{std::move(node), span_from(start)};
    }

    // `//ensures lhs == rhs;` inside a spec-predicate body.
    Clause parse_embedded_clause(const Token& tok) {
        const auto inner = tokenize(file_, tok.inner_offset, tok.inner_offset + tok.inner_length,
                                    LexMode::Annotation);
        diags_.insert(diags_.end(), inner.diagnostics.begin(), inner.diagnostics.end());
        Parser sub(file_, inner.tokens, LexMode::Annotation, diags_);
        sub.expect(TokenKind::Ident, "");
        Clause clause;
        clause.label = sub.parse_label();
        clause.expr = sub.parse_expr();
        sub.accept(TokenKind::Semi);
        if (!sub.at_end()) sub.fail_at(sub.peek(), "unexpected " + describe(sub.peek()) + " after embedded ensures");
        clause.span = tok.span;
        return clause;
    }

    // ------------------------------------------------------------------
    // Annotations

    // IDENT ('[' INT? ']')* ':'
    bool at_label() const {
        if (!check_name()) return false;
        std::size_t k = 1;
        while (check(TokenKind::LBrack, k)) {
            ++k;
            if (check(TokenKind::IntLit, k)) ++k;
            if (!check(TokenKind::RBrack, k)) return false;
            ++k;
        }
        return check(TokenKind::Colon, k);
    }

    std::string parse_label() {
        if (!at_label()) return {};
        std::string label;
        while (!check(TokenKind::Colon)) label += advance().lexeme;
        advance();
        return label;
    }

    Clause parse_clause_body(std::size_t clause_start) {
        Clause clause;
        clause.label = parse_label();
        clause.expr = parse_expr();
        expect(TokenKind::Semi, "after clause");
        clause.span = span_from(clause_start);
        return clause;
    }

    Expr parse_assigns_target() {
        const std::size_t start = pos_;
        bool bare = false;
        QubitRef ref = parse_ref_core(bare);
        if (at_ket_bracket()) {
            advance();
            expect(TokenKind::Ket0, "in amplitude range");
            expect(TokenKind::DotDot, "in amplitude range");
            expect(TokenKind::Ket1, "in amplitude range");
            expect(TokenKind::RBrack, "after amplitude range");
        }
        return Expr{std::move(ref), span_from(start)};
    }

    spec::SpecPredicateDef parse_predicate_def() {
        const std::size_t start = pos_;
        advance();  // module
        spec::SpecPredicateDef def;
        def.name = std::string(expect(TokenKind::Ident, "after 'module'").lexeme);
        expect(TokenKind::LParen, "to open predicate parameters");
        if (!check(TokenKind::RParen)) {
            while (true) {
                spec::PredicateParam param;
                bool typed_quantum = false;
                if (check(TokenKind::KwInt) && check_name(1)) {
                    advance();
                    param.kind = spec::PredicateParamKind::ClassicalInt;
                } else if ((check(TokenKind::KwFloat) || check(TokenKind::KwDouble)) && check_name(1)) {
                    advance();
                    param.kind = spec::PredicateParamKind::ClassicalFloat;
                } else if ((check(TokenKind::KwQreg) || check(TokenKind::KwQbit)) && check_name(1)) {
                    advance();
                    typed_quantum = true;
                }
                param.name = expect_name("in predicate parameters");
                if (accept(TokenKind::LBrack)) {
                    if (!check(TokenKind::RBrack)) parse_expr();
                    expect(TokenKind::RBrack, "in array parameter");
                    param.kind = spec::PredicateParamKind::QubitArray;
                } else if (typed_quantum) {
                    param.kind = spec::PredicateParamKind::QubitArray;
                }
                def.params.push_back(std::move(param));
                if (accept(TokenKind::RParen)) break;
                expect(TokenKind::Comma, "between predicate parameters");
            }
        } else {
            advance();
        }
        def.body = parse_block();
        def.span = span_from(start);
        return def;
    }

    spec::Contract parse_contract() {
        spec::Contract contract;
        std::optional<std::size_t> current_index;
        auto current_behavior = [&]() -> spec::Behavior* {
            return current_index ? &contract.behaviors[*current_index] : nullptr;
        };
        while (!at_end()) {
            const std::size_t start = pos_;
            try {
                const Token& tok = peek();
                if (tok.kind == TokenKind::EmbeddedEnsures) {
                    advance();  // explanatory equivalent of the clause above it
                    continue;
                }
                if (tok.kind == TokenKind::KwModule) {
                    contract.predicates.push_back(parse_predicate_def());
                    continue;
                }
                if (tok.kind != TokenKind::Ident) {
                    fail_at(tok, "expected contract clause, found " + describe(tok));
                }
                const std::string_view kw = tok.lexeme;
                advance();
                if (kw == "requires") {
                    contract.preconditions.push_back(parse_clause_body(start));
                } else if (kw == "ensures") {
                    Clause c = parse_clause_body(start);
                    spec::Behavior* current = current_behavior();
                    (current ? current->ensures : contract.postconditions).push_back(std::move(c));
                } else if (kw == "assumes") {
                    spec::Behavior* current = current_behavior();
                    if (!current) fail_at(tok, "'assumes' outside a behavior");
                    current->assumes.push_back(parse_clause_body(start));
                } else if (kw == "assigns") {
                    if (!contract.assigns) contract.assigns.emplace();
                    if (check(TokenKind::BackslashWord) && peek().lexeme == "\\nothing") {
                        advance();
                    } else {
                        while (true) {
                            contract.assigns->push_back(parse_assigns_target());
                            if (!accept(TokenKind::Comma)) break;
                        }
                    }
                    expect(TokenKind::Semi, "after assigns clause");
                } else if (kw == "behavior") {
                    if (!check_name()) fail_at(peek(), "behavior block missing a name");
                    spec::Behavior behavior;
                    behavior.name = std::string(advance().lexeme);
                    expect(TokenKind::Colon, "after behavior name");
                    behavior.span = span_from(start);
                    contract.behaviors.push_back(std::move(behavior));
                    current_index = contract.behaviors.size() - 1;
                } else if (kw == "complete" || kw == "disjoint") {
                    if (!accept_word("behaviors")) {
                        fail_at(peek(), "expected 'behaviors' after '" + std::string(kw) + "'");
                    }
                    if (check_name()) {
                        // Named behavior lists are accepted but must cover all behaviors.
                        while (check_name()) {
                            advance();
                            if (!accept(TokenKind::Comma)) break;
                        }
                    }
                    expect(TokenKind::Semi, "after behaviors flag");
                    (kw == "complete" ? contract.complete_behaviors : contract.disjoint_behaviors) = true;
                    current_index.reset();
                } else if (kw == "assert") {
                    fail_at(tok, "assertion in module-contract position (use '//@ assert' inside the body)");
                } else {
                    fail_at(tok, "unknown clause keyword '" + std::string(kw) + "'");
                }
            } catch (const ParseAbort&) {
                if (pos_ == start) advance();
                sync_to_statement_end();
            }
        }
        return contract;
    }

    std::vector<Clause> parse_assertion_list() {
        std::vector<Clause> out;
        while (!at_end()) {
            const std::size_t start = pos_;
            try {
                const Token& tok = peek();
                if (tok.kind == TokenKind::Ident && tok.lexeme == "assert") {
                    advance();
                    out.push_back(parse_clause_body(start));
                    continue;
                }
                if (tok.kind == TokenKind::Ident &&
                    (tok.lexeme == "requires" || tok.lexeme == "ensures" || tok.lexeme == "assigns" ||
                     tok.lexeme == "behavior" || tok.lexeme == "assumes" || tok.lexeme == "complete" ||
                     tok.lexeme == "disjoint")) {
                    fail_at(tok, "contract clause '" + std::string(tok.lexeme) + "' in statement position");
                }
                if (tok.kind == TokenKind::Ident && (tok.lexeme == "loop" || tok.lexeme == "invariant")) {
                    unsupported(tok, "loop annotation");
                }
                fail_at(tok, "expected 'assert', found " + describe(tok));
            } catch (const ParseAbort&) {
                if (pos_ == start) advance();
                sync_to_statement_end();
            }
        }
        return out;
    }

    // ------------------------------------------------------------------
    // Declarations

    Param parse_param() {
        const std::size_t start = pos_;
        Param param;
        while (check_word("const") || check_word("unsigned")) advance();
        const Token& type = peek();
        switch (type.kind) {
            case TokenKind::KwQreg:
            case TokenKind::KwQbit: param.kind = ParamKind::QuantumRegister; break;
            case TokenKind::KwInt: param.kind = ParamKind::ClassicalInt; break;
            case TokenKind::KwFloat:
            case TokenKind::KwDouble: param.kind = ParamKind::ClassicalFloat; break;
            case TokenKind::Ident:
                if (type.lexeme == "char") {
                    param.kind = ParamKind::ClassicalInt;
                } else if (type.lexeme == "cbit") {
                    unsupported(type, "cbit parameter");
                } else {
                    param.kind = ParamKind::Struct;
                }
                break;
            default: fail_at(type, "expected parameter type, found " + describe(type));
        }
        param.type_name = std::string(advance().lexeme);
        if (check(TokenKind::Star) || check(TokenKind::Amp)) unsupported(peek(), "pointer parameter");
        param.name = expect_name("for parameter name");
        if (accept(TokenKind::LBrack)) {
            param.bracketed = true;
            if (!check(TokenKind::RBrack)) param.width = parse_expr();
            expect(TokenKind::RBrack, "after register width");
            if (param.kind != ParamKind::QuantumRegister) unsupported(type, "classical array parameter");
        }
        param.span = span_from(start);
        return param;
    }

    std::vector<Param> parse_params() {
        expect(TokenKind::LParen, "to open parameter list");
        std::vector<Param> params;
        if (accept(TokenKind::RParen)) return params;
        if (check(TokenKind::KwVoid) && check(TokenKind::RParen, 1)) {
            advance();
            advance();
            return params;
        }
        while (true) {
            params.push_back(parse_param());
            if (accept(TokenKind::RParen)) break;
            expect(TokenKind::Comma, "between parameters");
        }
        return params;
    }

    StructDef parse_struct() {
        const std::size_t start = pos_;
        advance();
        StructDef def;
        def.name = std::string(expect(TokenKind::Ident, "after 'qstruct'").lexeme);
        expect(TokenKind::LBrace, "to open qstruct body");
        while (!check(TokenKind::RBrace) && !at_end()) {
            const std::size_t field_start = pos_;
            if (!check(TokenKind::KwQreg) && !check(TokenKind::KwQbit)) {
                fail_at(peek(), "expected 'qreg' field in qstruct, found " + describe(peek()));
            }
            advance();
            StructField field;
            field.name = expect_name("for qstruct field");
            if (accept(TokenKind::LBrack)) {
                const Token& width = expect(TokenKind::IntLit, "for register width");
                field.width = std::stol(std::string(width.lexeme));
                expect(TokenKind::RBrack, "after register width");
            }
            expect(TokenKind::Semi, "after qstruct field");
            field.span = span_from(field_start);
            def.fields.push_back(std::move(field));
        }
        expect(TokenKind::RBrace, "to close qstruct body");
        accept(TokenKind::Semi);
        def.span = span_from(start);
        return def;
    }

    Decl parse_decl() {
        const std::size_t start = pos_;
        Decl decl;
        if (accept(TokenKind::KwGate)) {
            decl.kind = DeclKind::Gate;
        } else {
            decl.kind = DeclKind::Module;
            if (!check(TokenKind::KwModule)) {
                decl.return_type = std::string(advance().lexeme);
                if (check(TokenKind::Star)) unsupported(peek(), "pointer return type");
            }
            accept(TokenKind::KwModule);
        }
        if (!check(TokenKind::Ident)) fail_at(peek(), "expected declaration name, found " + describe(peek()));
        decl.name_span = peek().span;
        decl.name = std::string(advance().lexeme);
        decl.params = parse_params();
        if (check(TokenKind::LBrace)) {
            if (decl.kind == DeclKind::Gate) unsupported(peek(), "gate body (gates are prototypes)");
            decl.body = parse_block();
        } else if (decl.kind == DeclKind::Gate) {
            accept(TokenKind::Semi);  // the example programs often omit it
        } else {
            expect(TokenKind::Semi, "after module prototype");
        }
        decl.span = span_from(start);
        return decl;
    }

    bool at_decl() const {
        if (check(TokenKind::KwGate) || check(TokenKind::KwModule)) return true;
        const bool type_word = check(TokenKind::KwVoid) || check(TokenKind::KwInt) ||
                               check(TokenKind::KwFloat) || check(TokenKind::KwDouble) ||
                               check(TokenKind::Ident);
        if (!type_word) return false;
        if (check(TokenKind::KwModule, 1)) return true;
        return check(TokenKind::Ident, 1) && check(TokenKind::LParen, 2);
    }

    void merge_contract(spec::Contract& into, spec::Contract&& from) {
        auto append = [](auto& dst, auto& src) {
            for (auto& x : src) dst.push_back(std::move(x));
        };
        append(into.preconditions, from.preconditions);
        if (from.assigns) {
            if (!into.assigns) into.assigns.emplace();
            append(*into.assigns, *from.assigns);
        }
        append(into.postconditions, from.postconditions);
        append(into.behaviors, from.behaviors);
        append(into.predicates, from.predicates);
        into.complete_behaviors = into.complete_behaviors || from.complete_behaviors;
        into.disjoint_behaviors = into.disjoint_behaviors || from.disjoint_behaviors;
    }

    Program parse_program() {
        Program program;
        std::optional<spec::Contract> pending;
        SourceSpan pending_span;
        while (!at_end()) {
            const std::size_t start = pos_;
            try {
                const Token& tok = peek();
                if (tok.kind == TokenKind::Annotation) {
                    advance();
                    AnnotationResult ann = parse_annotation(file_, tok, AnnotationContext::Declaration);
                    diags_.insert(diags_.end(), ann.diagnostics.begin(), ann.diagnostics.end());
                    ann.contract.span = tok.span;
                    if (!pending) {
                        pending = std::move(ann.contract);
                        pending_span = tok.span;
                    } else {
                        merge_contract(*pending, std::move(ann.contract));
                    }
                    continue;
                }
                if (tok.kind == TokenKind::Hash) {
                    error(tok.span, "outside supported subset: preprocessor directive");
                    const std::uint32_t line = tok.span.line;
                    while (!at_end() && peek().span.line == line) advance();
                    continue;
                }
                if (tok.kind == TokenKind::Semi) {
                    advance();
                    continue;
                }
                if (tok.kind == TokenKind::KwQstruct) {
                    program.items.emplace_back(parse_struct());
                    if (pending) {
                        warning(pending_span, "annotation does not precede a gate or module declaration");
                        pending.reset();
                    }
                    continue;
                }
                if (tok.kind == TokenKind::KwQreg || tok.kind == TokenKind::KwQbit) {
                    unsupported(tok, "global register declaration");
                }
                if (tok.kind == TokenKind::Ident && is_unsupported_keyword(tok.lexeme)) {
                    unsupported(tok, "'" + std::string(tok.lexeme) + "' declaration");
                }
                if (!at_decl()) fail_at(tok, "expected gate, module, or qstruct declaration, found " + describe(tok));
                Decl decl = parse_decl();
                if (pending) {
                    decl.contract = std::move(*pending);
                    decl.has_contract = true;
                    pending.reset();
                }
                program.items.emplace_back(std::move(decl));
            } catch (const ParseAbort&) {
                if (pos_ == start) advance();
                sync_to_statement_end();
                pending.reset();
            }
        }
        if (pending) warning(pending_span, "annotation is not attached to any declaration");
        return program;
    }

    bool finished() const { return at_end(); }

private:
    const SourceFile& file_;
    const std::vector<Token>& toks_;
    LexMode mode_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_ = 0;
};

}  // namespace

AnnotationResult parse_annotation(const SourceFile& file, const Token& annotation, AnnotationContext context) {
    AnnotationResult result;
    const LexResult lexed = tokenize(file, annotation.inner_offset,
                                     annotation.inner_offset + annotation.inner_length, LexMode::Annotation);
    result.diagnostics = lexed.diagnostics;
    Parser parser(file, lexed.tokens, LexMode::Annotation, result.diagnostics);
    if (context == AnnotationContext::Declaration) {
        result.contract = parser.parse_contract();
        result.contract.span = annotation.span;
    } else {
        result.assertions = parser.parse_assertion_list();
    }
    return result;
}

ParseResult parse_program(const SourceFile& file, const std::vector<Token>& tokens) {
    ParseResult result;
    Parser parser(file, tokens, LexMode::Code, result.diagnostics);
    result.program = parser.parse_program();
    return result;
}

ParseResult parse_source(const SourceFile& file) {
    LexResult lexed = tokenize(file);
    ParseResult result = parse_program(file, lexed.tokens);
    result.diagnostics.insert(result.diagnostics.begin(), lexed.diagnostics.begin(), lexed.diagnostics.end());
    return result;
}

spec::Expr parse_spec_expression(std::string_view text) {
    const SourceFile file("<expr>", std::string(text));
    const LexResult lexed = tokenize(file, LexMode::Annotation);
    std::vector<Diagnostic> diags = lexed.diagnostics;
    Parser parser(file, lexed.tokens, LexMode::Annotation, diags);
    std::optional<Expr> expr;
    try {
        expr = parser.parse_expr();
        if (!parser.finished()) parser.fail_at(parser.peek(), "trailing input after expression");
    } catch (const ParseAbort&) {
    }
    if (!diags.empty() || !expr) {
        throw std::invalid_argument(diags.empty() ? "parse error" : diags.front().message);
    }
    return *std::move(expr);
}

}  // namespace scaffml::frontend
