#include "scaffml/check/report.hpp"

#include <sstream>

#include "json.hpp"

namespace scaffml::check {

std::string_view to_string(ClauseKind kind) {
    switch (kind) {
        case ClauseKind::Requires: return "requires";
        case ClauseKind::Ensures: return "ensures";
        case ClauseKind::Assert: return "assert";
        case ClauseKind::AssignsFrame: return "assigns-frame";
        case ClauseKind::BehaviorEnsures: return "behavior-ensures";
        case ClauseKind::Completeness: return "completeness";
        case ClauseKind::Disjointness: return "disjointness";
    }
    return "?";
}

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Vacuous: return "vacuous";
        case Verdict::Error: return "error";
    }
    return "?";
}

Summary summarize(const std::vector<ClauseVerdict>& clauses) {
    Summary s;
    for (const auto& c : clauses) {
        switch (c.verdict) {
            case Verdict::Pass: ++s.pass; break;
            case Verdict::Fail: ++s.fail; break;
            case Verdict::Vacuous: ++s.vacuous; break;
            case Verdict::Error: ++s.error; break;
        }
    }
    return s;
}

std::string to_text(const CheckReport& report) {
    std::ostringstream out;
    out << "program: " << report.program << '\n';
    for (const auto& [key, value] : report.config) out << "  " << key << " = " << value << '\n';
    int input = -1;
    std::string module;
    for (const auto& c : report.clauses) {
        if (c.input != input) {
            input = c.input;
            module.clear();
            out << "input " << input << ":\n";
        }
        if (c.module != module) {
            module = c.module;
            out << "  module " << module << ":\n";
        }
        out << "    " << to_string(c.verdict) << "  " << to_string(c.kind) << "  ";
        if (!c.behavior.empty()) out << c.behavior << '/';
        out << c.label;
        if (c.span.line) out << "  (" << c.span.line << ':' << c.span.column << ')';
        if (!c.detail.empty()) out << "\n        " << c.detail;
        out << '\n';
    }
    const Summary s = report.summary();
    out << "summary: " << s.pass << " pass, " << s.fail << " fail, " << s.vacuous << " vacuous, " << s.error
        << " error\n";
    return out.str();
}

std::string to_json(const CheckReport& report) {
    nlohmann::ordered_json doc;
    doc["version"] = CheckReport::kVersion;
    doc["program"] = report.program;
    doc["config"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : report.config) doc["config"][key] = value;
    doc["clauses"] = nlohmann::ordered_json::array();
    for (const auto& c : report.clauses) {
        nlohmann::ordered_json j;
        j["module"] = c.module;
        j["label"] = c.label;
        j["kind"] = std::string(to_string(c.kind));
        j["verdict"] = std::string(to_string(c.verdict));
        j["span"] = {{"line", c.span.line}, {"col", c.span.column}};
        j["detail"] = c.detail;
        j["behavior"] = c.behavior;
        j["input"] = c.input;
        for (const char* key : {"measured", "expected"}) {
            const auto& values = key[0] == 'm' ? c.measured : c.expected;
            j[key] = nlohmann::ordered_json::array();
            for (const auto& z : values) j[key].push_back({z.real(), z.imag()});
        }
        doc["clauses"].push_back(std::move(j));
    }
    const Summary s = report.summary();
    doc["summary"] = {{"pass", s.pass}, {"fail", s.fail}, {"vacuous", s.vacuous}, {"error", s.error},
                      {"total", s.total()}};
    return doc.dump(2) + "\n";
}

}  // namespace scaffml::check
