#include "scaffml/source.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace scaffml {

SourceFile::SourceFile(std::string path, std::string content)
    : path_(std::move(path)), content_(std::move(content)) {
    line_starts_.push_back(0);
    for (std::uint32_t i = 0; i < content_.size(); ++i) {
        if (content_[i] == '\n') line_starts_.push_back(i + 1);
    }
}

SourceFile SourceFile::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return SourceFile(path, buf.str());
}

std::pair<std::uint32_t, std::uint32_t> SourceFile::line_column(std::uint32_t offset) const {
    auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
    const auto line = static_cast<std::uint32_t>(it - line_starts_.begin());
    const std::uint32_t start = line_starts_[line - 1];
    return {line, offset - start + 1};
}

SourceSpan SourceFile::span(std::uint32_t offset, std::uint32_t length) const {
    auto [line, col] = line_column(offset);
    return SourceSpan{offset, length, line, col};
}

std::string_view to_string(Severity severity) {
    switch (severity) {
        case Severity::Note: return "note";
        case Severity::Warning: return "warning";
        case Severity::Error: return "error";
    }
    return "error";
}

std::string format_diagnostic(std::string_view path, const Diagnostic& diag) {
    std::ostringstream out;
    out << path << ':' << diag.span.line << ':' << diag.span.column << ": "
        << to_string(diag.severity) << ": " << diag.message;
    return out.str();
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

void sort_diagnostics(std::vector<Diagnostic>& diags) {
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
        if (a.span.line != b.span.line) return a.span.line < b.span.line;
        return a.span.column < b.span.column;
    });
}

}  // namespace scaffml
