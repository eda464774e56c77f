#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "scaffml/source.hpp"

namespace scaffml::check {

enum class ClauseKind { Requires, Ensures, Assert, AssignsFrame, BehaviorEnsures, Completeness, Disjointness };
enum class Verdict { Pass, Fail, Vacuous, Error };

std::string_view to_string(ClauseKind kind);
std::string_view to_string(Verdict verdict);

struct ClauseVerdict {
    std::string module;
    std::string label;
    ClauseKind kind = ClauseKind::Ensures;
    Verdict verdict = Verdict::Pass;
    SourceSpan span;
    std::string detail;
    std::string behavior;  // enclosing behavior, if any
    int input = 0;         // index of the input state
    /// Numeric evidence: equation left/right sides, or event probabilities.
    std::vector<std::complex<double>> measured;
    std::vector<std::complex<double>> expected;
};

struct Summary {
    int pass = 0;
    int fail = 0;
    int vacuous = 0;
    int error = 0;
    int total() const { return pass + fail + vacuous + error; }
    bool operator==(const Summary&) const = default;
};

Summary summarize(const std::vector<ClauseVerdict>& clauses);

struct CheckReport {
    static constexpr const char* kVersion = "1";

    std::string program;
    /// Resolved configuration, echoed as key/value text.
    std::map<std::string, std::string> config;
    std::vector<ClauseVerdict> clauses;

    Summary summary() const { return summarize(clauses); }
    bool ok() const {
        const Summary s = summary();
        return s.fail == 0 && s.error == 0;
    }
};

/// Verdicts grouped by input, module, and clause label.
std::string to_text(const CheckReport& report);
/// Machine-readable report (see docs/report.schema.json).
std::string to_json(const CheckReport& report);

}  // namespace scaffml::check
