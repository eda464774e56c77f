#include <gtest/gtest.h>

#include "scaffml/check/checker.hpp"
#include "scaffml/frontend/parser.hpp"
#include "scaffml/sim/random.hpp"
#include "support.hpp"

using namespace scaffml;
using namespace scaffml::testing;
using check::ClauseKind;
using check::Verdict;

namespace {

struct Run {
    frontend::Analysis analysis;
    std::vector<check::ClauseVerdict> verdicts;
};

Run run(const std::string& text, const std::string& entry, const sim::BasisAssignment& init = {},
        check::ModuleOptions opts = {}) {
    Run r{analyze_text(text), {}};
    const auto& d = decl_of(r.analysis, entry);
    const auto layout = check::module_layout(r.analysis.program, d, opts.bindings);
    r.verdicts = check::check_module(r.analysis.program, d, sim::init_state(layout, init), opts);
    return r;
}

Run run_file(const std::string& path, const std::string& entry, const sim::BasisAssignment& init = {},
             check::ModuleOptions opts = {}) {
    return run(read_text(path), entry, init, std::move(opts));
}

TEST(Check, CorrectedBellPassesEverything) {
    const auto r = run_file("corpus/corrected/bell_state.scaffold", "PrepareBellPair");
    const auto s = check::summarize(r.verdicts);
    EXPECT_EQ(s.fail, 0);
    EXPECT_EQ(s.error, 0);
    EXPECT_EQ(s.pass, 13);
}

TEST(Check, VerbatimBellReportsEntangledEnsures) {
    const auto r = run_file("corpus/paper/bell_state.scaffold", "PrepareBellPair");
    int errors = 0;
    for (const auto& v : only(r.verdicts, ClauseKind::Ensures)) {
        if (v.verdict == Verdict::Error) {
            ++errors;
            EXPECT_NE(v.detail.find("entangled"), std::string::npos) << v.detail;
        }
    }
    EXPECT_EQ(errors, 6);  // four amplitude equations, two qbitself checks
    EXPECT_TRUE(all_pass(only(r.verdicts, ClauseKind::BehaviorEnsures)));
}

TEST(Check, StatedPreconditionEnsuresReadTheSnapshot) {
    const auto r = run_file("corpus/corrected/bell_state.scaffold", "PrepareBellPair", {{{"a", 0}, 1}});
    int failed = 0;
    for (const auto& v : only(r.verdicts, ClauseKind::Ensures)) failed += v.verdict == Verdict::Fail;
    EXPECT_EQ(failed, 2);  // \old(a[0][|0>]) == 1 and \old(a[0][|1>]) == 0
}

TEST(Check, AssertionsSeeIntermediateState) {
    const auto r = run_file("corpus/paper/assertion_example.scaffold", "PrepareBellPair");
    const auto asserts = only(r.verdicts, ClauseKind::Assert);
    ASSERT_EQ(asserts.size(), 2u);
    EXPECT_TRUE(all_pass(asserts));
    // flipping a first makes the second assertion's sign wrong
    const auto flipped = run_file("corpus/paper/assertion_example.scaffold", "PrepareBellPair", {{{"a", 0}, 1}});
    const auto fa = only(flipped.verdicts, ClauseKind::Assert);
    ASSERT_EQ(fa.size(), 2u);
    EXPECT_EQ(fa[0].verdict, Verdict::Pass);
    EXPECT_EQ(fa[1].verdict, Verdict::Fail);
}

TEST(Check, FailedRequiresSkipsTheRest) {
    const auto r = run(
        "/*@ requires zero: q[0][|0>] == 1;\n    ensures e: Reverse{Here,Old}(q[0], 2); */\n"
        "module M(qreg q[1]) { X(q[0]); }\n",
        "M", {{{"q", 0}, 1}});
    ASSERT_EQ(r.verdicts.size(), 1u);
    EXPECT_EQ(r.verdicts[0].kind, ClauseKind::Requires);
    EXPECT_EQ(r.verdicts[0].verdict, Verdict::Fail);
}

TEST(Check, MixedAssumesIsAnError) {
    const auto r = run(
        "/*@ behavior b:\n    assumes measZ(q[0]) == 1 && q[0][|0>] == 0;\n    ensures measZ(q[0]) == 1; */\n"
        "module M(qreg q[1]) { X(q[0]); }\n",
        "M");
    const auto bs = only(r.verdicts, ClauseKind::BehaviorEnsures);
    ASSERT_FALSE(bs.empty());
    EXPECT_EQ(bs[0].verdict, Verdict::Error);
    EXPECT_NE(bs[0].detail.find("mix"), std::string::npos) << bs[0].detail;
}

TEST(Check, ClassicalAssumesReadThePreState) {
    const std::string text =
        "/*@ behavior was_zero:\n    assumes \\old(q[0][|0>]) == 1;\n    ensures q[0][|1>] == 1;\n"
        "    behavior was_one:\n    assumes \\old(q[0][|1>]) == 1;\n    ensures q[0][|0>] == 1;\n"
        "    complete behaviors;\n    disjoint behaviors; */\n"
        "module M(qreg q[1]) { X(q[0]); }\n";
    for (int bit = 0; bit < 2; ++bit) {
        const auto r = run(text, "M", {{{"q", 0}, bit}});
        const std::string fired = bit ? "was_one" : "was_zero";
        for (const auto& v : only(r.verdicts, ClauseKind::BehaviorEnsures)) {
            EXPECT_EQ(v.verdict, v.behavior == fired ? Verdict::Pass : Verdict::Vacuous) << v.behavior;
        }
        EXPECT_TRUE(all_pass(only(r.verdicts, ClauseKind::Completeness)));
        EXPECT_TRUE(all_pass(only(r.verdicts, ClauseKind::Disjointness)));
    }
}

TEST(Check, OverlappingBehaviorsAreNotDisjoint) {
    const auto r = run(
        "/*@ behavior a:\n    assumes measZ(q[0]) == 0 || measZ(q[0]) == 1;\n    ensures measZ(q[0]) == 1;\n"
        "    behavior b:\n    assumes measZ(q[0]) == 1;\n    ensures measZ(q[0]) == 1;\n"
        "    disjoint behaviors; */\nmodule M(qreg q[1]) { H(q[0]); }\n",
        "M");
    const auto d = only(r.verdicts, ClauseKind::Disjointness);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].verdict, Verdict::Fail);
}

TEST(Check, FrameNamesTheChangedQubit) {
    const auto r = run_file("corpus/mutated/frame_violation.scaffold", "FlipFirst");
    const auto f = only(r.verdicts, ClauseKind::AssignsFrame);
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f[0].verdict, Verdict::Fail);
    EXPECT_NE(f[0].detail.find("q[1]"), std::string::npos);
    const auto ok = run_file("corpus/corrected/frame_demo.scaffold", "FlipFirst");
    EXPECT_TRUE(all_pass(ok.verdicts));
}

TEST(Check, FrameIgnoresGlobalPhase) {
    // Z on |1> only changes the global phase of q[1]'s factor
    const auto r = run(
        "/*@ assigns q[0][|0>..|1>]; */\nmodule M(qreg q[2]) { Z(q[1]); }\n", "M", {{{"q", 1}, 1}});
    EXPECT_EQ(only(r.verdicts, ClauseKind::AssignsFrame).at(0).verdict, Verdict::Pass);
}

TEST(Check, QstructMembersAreRegisters) {
    const auto r = run_file("corpus/corrected/qstruct_demo.scaffold", "FlipSecond");
    EXPECT_TRUE(all_pass(r.verdicts));
    const auto a = load_corpus("corpus/corrected/qstruct_demo.scaffold");
    const auto l = check::module_layout(a.program, decl_of(a, "FlipSecond"), {});
    EXPECT_EQ(l.size(), 20);
    ASSERT_NE(l.find("qst.second"), nullptr);
    EXPECT_EQ(l.find("qst.second")->offset, 10);
}

TEST(Check, PhaseModes) {
    // S|+> = (|0> + i|1>)/sqrt2; the ensures state it times a global i
    const std::string text =
        "/*@ ensures e1: q[0][|0>] == sqrt(1/2)*i;\n    ensures e2: q[0][|1>] == -sqrt(1/2); */\n"
        "module M(qreg q[1]) { H(q[0]); S(q[0]); }\n";
    const auto shared = run(text, "M");
    EXPECT_TRUE(all_pass(only(shared.verdicts, ClauseKind::Ensures)));
    check::ModuleOptions exact;
    exact.tolerances.phase = spec::PhaseMode::Exact;
    const auto ex = run(text, "M", {}, exact);
    for (const auto& v : only(ex.verdicts, ClauseKind::Ensures)) EXPECT_EQ(v.verdict, Verdict::Fail) << v.label;
}

TEST(Check, GlobalPhaseFitIsSharedWithinAGroup) {
    // each equation alone holds up to a phase, but not with one common phase
    const std::string text =
        "/*@ ensures e1: q[0][|0>] == sqrt(1/2);\n    ensures e2: q[0][|1>] == sqrt(1/2); */\n"
        "module M(qreg q[1]) { H(q[0]); Z(q[0]); }\n";
    const auto r = run(text, "M");
    int failed = 0;
    for (const auto& v : only(r.verdicts, ClauseKind::Ensures)) failed += v.verdict == Verdict::Fail;
    EXPECT_GE(failed, 1);
}

TEST(Check, RuntimeErrorBecomesAVerdict) {
    const auto r = run_file("corpus/corrected/control_program.scaffold", "control_example");
    int runtime = 0;
    for (const auto& v : r.verdicts) {
        if (v.label == "<runtime>") {
            ++runtime;
            EXPECT_EQ(v.verdict, Verdict::Error);
            EXPECT_NE(v.detail.find("'U' has no body"), std::string::npos) << v.detail;
        }
    }
    EXPECT_EQ(runtime, 1);
}

TEST(Check, ClassicalBindingsAreRequired) {
    const auto a = load_corpus("corpus/corrected/rx_gate.scaffold");
    EXPECT_THROW(check::require_bindings(decl_of(a, "Rx"), {}), std::invalid_argument);
    EXPECT_NO_THROW(check::require_bindings(decl_of(a, "Rx"), {{"angle", 0.5}}));
    const auto q = load_corpus("corpus/corrected/qft.scaffold");
    EXPECT_THROW(check::module_layout(q.program, decl_of(q, "QFT"), {}), std::invalid_argument);
}

TEST(Check, CheckGatesRunsCalleeContracts) {
    // the corrupted X contract attached to a gate, called from a module
    const std::string text = read_text("corpus/mutated/x_gate_corrupted.scaffold") +
                             "\nmodule Caller(qreg q[1]) { X(q[0]); }\n";
    check::ModuleOptions on;
    on.check_gates = true;
    const auto with = run(text, "Caller", {}, on);
    bool callee_failed = false;
    for (const auto& v : with.verdicts) callee_failed |= v.module == "X" && v.verdict == Verdict::Fail;
    EXPECT_TRUE(callee_failed);
    const auto without = run(text, "Caller");
    for (const auto& v : without.verdicts) EXPECT_NE(v.module, "X");
}

TEST(Check, SimulateBodyOnly) {
    const auto a = load_corpus("corpus/paper/assertion_example.scaffold");
    const auto& d = decl_of(a, "PrepareBellPair");
    const auto l = check::module_layout(a.program, d, {});
    const auto s = check::simulate_module(a.program, d, sim::init_state(l), {});
    EXPECT_NEAR(std::abs(s.amplitudes()(0)), std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(std::abs(s.amplitudes()(3)), std::sqrt(0.5), 1e-12);
}

TEST(Check, DefaultEntry) {
    const auto a = load_corpus("corpus/corrected/qft.scaffold");
    EXPECT_EQ(check::default_entry(a.program)->name, "QFT");
    const auto c = load_corpus("corpus/corrected/control_program.scaffold");
    EXPECT_EQ(check::default_entry(c.program)->name, "control_example");
}

// ---------------------------------------------------------------------------

check::RunConfig random_config(int count, std::uint64_t seed) {
    check::RunConfig c;
    c.random_count = count;
    c.seed = seed;
    return c;
}

TEST(Run, SeededRunsAreIdentical) {
    const auto a = load_corpus("corpus/paper/x_gate.scaffold");
    const auto r1 = check::run_program(a.program, "x", random_config(50, 7));
    const auto r2 = check::run_program(a.program, "x", random_config(50, 7));
    EXPECT_EQ(check::to_json(r1), check::to_json(r2));
    EXPECT_EQ(check::to_text(r1), check::to_text(r2));
    EXPECT_TRUE(r1.ok());
    EXPECT_EQ(r1.summary().total(), 50 * 4);  // requires, two ensures, frame
}

TEST(Run, JobCountDoesNotChangeTheReport) {
    const auto a = load_corpus("corpus/corrected/swap_gate.scaffold");
    auto c = random_config(40, 11);
    const auto one = check::run_program(a.program, "swap", c);
    c.jobs = 4;
    const auto four = check::run_program(a.program, "swap", c);
    EXPECT_EQ(check::to_json(one), check::to_json(four));
    for (std::size_t k = 1; k < four.clauses.size(); ++k) EXPECT_LE(four.clauses[k - 1].input, four.clauses[k].input);
}

TEST(Run, RandomInputsNeedASeed) {
    const auto a = load_corpus("corpus/paper/x_gate.scaffold");
    check::RunConfig c;
    c.random_count = 3;
    EXPECT_THROW(check::run_program(a.program, "x", c), std::invalid_argument);
}

TEST(Run, ZeroRandomStatesGiveAnEmptyReport) {
    const auto a = load_corpus("corpus/paper/x_gate.scaffold");
    const auto r = check::run_program(a.program, "x", random_config(0, 1));
    EXPECT_TRUE(r.clauses.empty());
    EXPECT_TRUE(r.ok());
    // without any input request the all-zero state is used
    EXPECT_EQ(check::run_program(a.program, "x", {}).clauses.size(), 4u);
}

TEST(Run, UnknownEntry) {
    const auto a = load_corpus("corpus/paper/x_gate.scaffold");
    check::RunConfig c;
    c.entry = "Nope";
    EXPECT_THROW(check::run_program(a.program, "x", c), std::invalid_argument);
}

TEST(Run, ToleranceValidation) {
    check::ToleranceConfig t;
    EXPECT_NO_THROW(t.validate());
    t.eps_eq = 0;
    EXPECT_THROW(t.validate(), std::invalid_argument);
    t.eps_eq = 1e-2;
    EXPECT_THROW(t.validate(), std::invalid_argument);
}

TEST(Run, ConfigIsEchoed) {
    check::RunConfig c;
    c.tolerances.phase = spec::PhaseMode::Exact;
    c.bindings["angle"] = 0.25;
    const auto d = check::describe(c);
    EXPECT_EQ(d.at("phase"), "exact");
    EXPECT_EQ(d.at("eps_eq"), "1e-09");
    EXPECT_EQ(d.at("bind.angle"), "0.25");
}

TEST(Run, StateFileInput) {
    const auto a = load_corpus("corpus/paper/x_gate.scaffold");
    check::RunConfig c;
    c.state = sim::parse_state_dump("0 0.6 0\n1 0 0.8\n", 2);
    const auto r = check::run_program(a.program, "x", c);
    EXPECT_TRUE(r.ok());
    c.state = sim::parse_state_dump("0 1 0\n", 4);
    EXPECT_THROW(check::run_program(a.program, "x", c), std::invalid_argument);
}

TEST(Report, JsonCarriesEvidence) {
    const auto a = load_corpus("corpus/paper/x_gate.scaffold");
    const auto r = check::run_program(a.program, "x_gate.scaffold", {});
    const auto j = check::to_json(r);
    EXPECT_NE(j.find("\"version\": \"1\""), std::string::npos) << j;
    EXPECT_NE(j.find("\"measured\""), std::string::npos);
    EXPECT_NE(j.find("\"reverse_input\""), std::string::npos);
    const auto t = check::to_text(r);
    EXPECT_NE(t.find("reverse_input"), std::string::npos);
}

}  // namespace
