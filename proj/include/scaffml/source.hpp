#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scaffml {

/// Location of a token or syntax node inside a SourceFile.
///
/// Spans are location metadata only: two spans always compare equal so that
/// defaulted structural comparisons of syntax trees ignore where a node came
/// from.
struct SourceSpan {
    std::uint32_t offset = 0;
    std::uint32_t length = 0;
    std::uint32_t line = 0;  // 1-based, 0 = unknown
    std::uint32_t column = 0;

    friend bool operator==(const SourceSpan&, const SourceSpan&) { return true; }
};

class SourceFile {
public:
    SourceFile() = default;
    SourceFile(std::string path, std::string content);

    static SourceFile load(const std::string& path);

    const std::string& path() const { return path_; }
    const std::string& content() const { return content_; }

    /// Line/column (both 1-based) of a byte offset.
    std::pair<std::uint32_t, std::uint32_t> line_column(std::uint32_t offset) const;
    SourceSpan span(std::uint32_t offset, std::uint32_t length) const;

private:
    std::string path_;
    std::string content_;
    std::vector<std::uint32_t> line_starts_;
};

enum class Severity { Note, Warning, Error };

std::string_view to_string(Severity severity);

struct Diagnostic {
    Severity severity = Severity::Error;
    SourceSpan span;
    std::string message;
    bool syntax = false;  // produced by the lexer/parser rather than analysis
};

/// `path:line:col: severity: message`
std::string format_diagnostic(std::string_view path, const Diagnostic& diag);

bool has_errors(const std::vector<Diagnostic>& diags);

/// Stable sort by source position; analysis order is kept for ties.
void sort_diagnostics(std::vector<Diagnostic>& diags);

}  // namespace scaffml
