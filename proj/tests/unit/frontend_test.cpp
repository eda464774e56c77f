#include <filesystem>

#include <gtest/gtest.h>

#include "scaffml/frontend/lexer.hpp"
#include "scaffml/frontend/lint.hpp"
#include "scaffml/frontend/parser.hpp"
#include "scaffml/frontend/printer.hpp"
#include "scaffml/spec/printer.hpp"
#include "support.hpp"

using namespace scaffml;
using namespace scaffml::testing;

namespace {

std::vector<std::string> corpus_files(const std::string& dir) {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(source_path("corpus/" + dir))) {
        if (e.path().extension() == ".scaffold") out.push_back("corpus/" + dir + "/" + e.path().filename().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> all_corpus_files() {
    std::vector<std::string> out;
    for (const char* d : {"paper", "corrected", "mutated"}) {
        for (auto& f : corpus_files(d)) out.push_back(f);
    }
    return out;
}

std::string stem(const std::string& rel) { return std::filesystem::path(rel).stem().string(); }

int count_errors(const frontend::Analysis& a, const std::string& needle) {
    int n = 0;
    for (const auto& d : a.diagnostics) {
        if (d.severity == Severity::Error && d.message.find(needle) != std::string::npos) ++n;
    }
    return n;
}

class PaperFile : public ::testing::TestWithParam<std::string> {};

TEST_P(PaperFile, LintMatchesGolden) {
    const auto a = load_corpus(GetParam());
    EXPECT_EQ(format_all(a), read_text("tests/golden/lint/" + stem(GetParam()) + ".txt"));
}

INSTANTIATE_TEST_SUITE_P(Corpus, PaperFile, ::testing::ValuesIn(corpus_files("paper")),
                         [](const auto& info) { return stem(info.param); });

class AnyFile : public ::testing::TestWithParam<std::string> {};

TEST_P(AnyFile, TokensReproduceSource) {
    const SourceFile f(GetParam(), read_text(GetParam()));
    const auto lexed = frontend::tokenize(f);
    std::string joined;
    for (const auto& t : lexed.tokens) {
        joined += t.leading_trivia;
        joined += t.lexeme;
    }
    EXPECT_EQ(joined, f.content());
    EXPECT_EQ(lexed.tokens.back().kind, frontend::TokenKind::Eof);
}

TEST_P(AnyFile, PrintedProgramReparsesEqual) {
    const auto a = load_corpus(GetParam());
    if (a.has_syntax_errors()) GTEST_SKIP() << "recovered syntax error; no round trip";
    const std::string printed = frontend::print_program(a.program);
    const auto again = frontend::parse_source(SourceFile("<printed>", printed));
    EXPECT_FALSE(has_errors(again.diagnostics)) << printed;
    EXPECT_EQ(again.program, a.program) << printed;
    // printing is a fixed point after one pass
    EXPECT_EQ(frontend::print_program(again.program), printed);
}

INSTANTIATE_TEST_SUITE_P(Corpus, AnyFile, ::testing::ValuesIn(all_corpus_files()), [](const auto& info) {
    std::string n = info.param.substr(7);
    for (auto& c : n) {
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    }
    return n;
});

TEST(Corpus, CorrectedAndMutatedFilesLintClean) {
    for (const char* dir : {"corrected", "mutated"}) {
        for (const auto& f : corpus_files(dir)) {
            const auto a = load_corpus(f);
            EXPECT_FALSE(a.has_errors()) << f << "\n" << format_all(a);
        }
    }
}

TEST(Corpus, HadamardListingNamesInputButDeclaresT) {
    const auto a = load_corpus("corpus/paper/h_gate.scaffold");
    ASSERT_EQ(a.diagnostics.size(), 4u);
    std::vector<unsigned> lines;
    for (const auto& d : a.diagnostics) {
        EXPECT_EQ(d.severity, Severity::Error);
        EXPECT_EQ(d.message, "unknown identifier 'input' (in scope: t)");
        lines.push_back(d.span.line);
    }
    EXPECT_EQ(lines, (std::vector<unsigned>{2, 4, 7, 8}));
    EXPECT_FALSE(a.has_syntax_errors());
}

TEST(Corpus, QftListingReferencesDataAndQbit) {
    const auto a = load_corpus("corpus/paper/qft.scaffold");
    EXPECT_EQ(count_errors(a, "unknown identifier 'data'"), 2);
    EXPECT_EQ(count_errors(a, "unknown identifier 'qbit'"), 4);
    EXPECT_FALSE(a.has_syntax_errors());
}

TEST(Corpus, ControlListingRecoversFromBraceIndex) {
    const auto a = load_corpus("corpus/paper/control_program.scaffold");
    ASSERT_TRUE(a.has_syntax_errors());
    EXPECT_NE(a.program.find_decl("control_example"), nullptr);
    int syntax = 0;
    for (const auto& d : a.diagnostics) syntax += d.syntax;
    EXPECT_EQ(syntax, 1);
}

TEST(Corpus, DeclarationShapes) {
    const auto cnot = load_corpus("corpus/paper/cnot_gate.scaffold");
    const auto& d = decl_of(cnot, "CNOT");
    EXPECT_EQ(d.kind, frontend::DeclKind::Gate);
    EXPECT_FALSE(d.body.has_value());
    ASSERT_EQ(d.params.size(), 2u);
    EXPECT_EQ(d.params[1].type_name, "qbit");
    EXPECT_TRUE(d.params[1].bracketed);
    EXPECT_EQ(d.contract.behaviors.size(), 2u);
    EXPECT_TRUE(d.contract.complete_behaviors);
    EXPECT_TRUE(d.contract.disjoint_behaviors);

    const auto qft = load_corpus("corpus/corrected/qft.scaffold");
    const auto& q = decl_of(qft, "QFT");
    ASSERT_EQ(q.contract.predicates.size(), 1u);
    EXPECT_EQ(q.contract.predicates[0].name, "QFTCheck");
    EXPECT_EQ(q.contract.predicates[0].params.size(), 3u);
    ASSERT_TRUE(q.params[0].width.has_value());

    const auto qs = load_corpus("corpus/corrected/qstruct_demo.scaffold");
    const auto* s = qs.program.find_struct("struct1");
    ASSERT_NE(s, nullptr);
    ASSERT_EQ(s->fields.size(), 2u);
    EXPECT_EQ(s->fields[1].name, "second");
    EXPECT_EQ(s->fields[1].width, 10);
}

TEST(Corpus, InlineAssertionsBecomeStatements) {
    const auto a = load_corpus("corpus/paper/assertion_example.scaffold");
    const auto& body = *decl_of(a, "PrepareBellPair").body;
    int asserts = 0;
    for (const auto& s : body) asserts += s.as<spec::AssertStmt>() != nullptr;
    EXPECT_EQ(asserts, 2);
    EXPECT_EQ(body.size(), 4u);
}

// ---------------------------------------------------------------------------

frontend::Analysis lint_text(const std::string& text) { return analyze_text(text); }

TEST(Lint, IndexOutOfRange) {
    const auto a = lint_text("module M(qreg q[2]) { X(q[2]); }\n");
    EXPECT_EQ(count_errors(a, "index 2 out of range for q"), 1) << format_all(a);
}

TEST(Lint, GateArity) {
    const auto a = lint_text("module M(qreg q[2]) { CNOT(q[0]); }\n");
    EXPECT_EQ(count_errors(a, "call to 'CNOT' passes 1 argument(s), expected 2"), 1) << format_all(a);
}

TEST(Lint, OldInRequires) {
    const auto a = lint_text("/*@ requires r: \\old(q[0][|0>]) == 1; */\nmodule M(qreg q[1]) { X(q[0]); }\n");
    EXPECT_EQ(count_errors(a, "\\old is not allowed in requires"), 1) << format_all(a);
}

TEST(Lint, UnknownPredicate) {
    const auto a = lint_text("/*@ ensures e: Flip{Here,Old}(q[0], 2); */\nmodule M(qreg q[1]) { X(q[0]); }\n");
    EXPECT_EQ(count_errors(a, "unknown predicate 'Flip'"), 1) << format_all(a);
}

TEST(Lint, DuplicateLabelIsAWarning) {
    const auto a = lint_text(
        "/*@ ensures e: Reverse{Here,Old}(q[0], 2);\n    ensures e: qbitselfCheck(q[0]); */\n"
        "module M(qreg q[1]) { X(q[0]); }\n");
    ASSERT_EQ(a.diagnostics.size(), 1u) << format_all(a);
    EXPECT_EQ(a.diagnostics[0].severity, Severity::Warning);
    EXPECT_FALSE(a.has_errors());
}

TEST(Lint, ControlQubitReusedInBranch) {
    const auto a = lint_text(
        "module M(qreg q[2]) {\n  if (q[0]==1) { X(q[0]); }\n}\n");
    EXPECT_GE(count_errors(a, "control qubit"), 1) << format_all(a);
}

TEST(Lint, CompleteBehaviorsWithoutBehaviors) {
    const auto a = lint_text("/*@ complete behaviors; */\nmodule M(qreg q[1]) { X(q[0]); }\n");
    EXPECT_FALSE(a.diagnostics.empty());
}

TEST(Lint, DiagnosticsAreSortedByPosition) {
    const auto a = load_corpus("corpus/paper/qft.scaffold");
    for (std::size_t k = 1; k < a.diagnostics.size(); ++k) {
        EXPECT_LE(a.diagnostics[k - 1].span.offset, a.diagnostics[k].span.offset);
    }
}

TEST(Parser, SpecExpressionRoundTrip) {
    for (const char* text : {"q[0][|0>] == \\old(q[0][|1>])", "a[0][|0>] == sqrt(1 / 2)",
                             "measZ(a[0]) == 0 || measZ(b[0]) == 1", "x[|1>] == \\old(x[|1>]) * e^(i * angle)",
                             "\\valid(q[0] + (|0>..|1>))", "Reverse{Here,Old}(q[0], 2)"}) {
        const auto e = frontend::parse_spec_expression(text);
        EXPECT_EQ(frontend::parse_spec_expression(spec::to_string(e)), e) << text;
    }
    EXPECT_THROW(frontend::parse_spec_expression("q[0][|0> =="), std::invalid_argument);
}

TEST(Parser, FormatDiagnostic) {
    Diagnostic d;
    d.severity = Severity::Warning;
    d.span.line = 3;
    d.span.column = 9;
    d.message = "m";
    EXPECT_EQ(format_diagnostic("f.scaffold", d), "f.scaffold:3:9: warning: m");
}

}  // namespace
