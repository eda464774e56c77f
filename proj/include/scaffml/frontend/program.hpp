#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scaffml/source.hpp"
#include "scaffml/spec/ast.hpp"

namespace scaffml::frontend {

enum class ParamKind : std::uint8_t { QuantumRegister, ClassicalInt, ClassicalFloat, Struct };

struct Param {
    std::string type_name;  // as written: qreg, qbit, int, float, double, or a qstruct name
    std::string name;
    ParamKind kind = ParamKind::ClassicalInt;
    /// Register width as written; a number or a symbolic name (`qbits[width]`).
    /// Absent for `qbit x` (width 1) and for classical parameters.
    std::optional<spec::Expr> width;
    bool bracketed = false;  // `qbit x[1]` vs `qbit x`
    SourceSpan span;
    bool operator==(const Param&) const = default;
};

enum class DeclKind : std::uint8_t { Gate, Module };

/// Gate prototype, module prototype, or module definition.
struct Decl {
    DeclKind kind = DeclKind::Module;
    std::string return_type;  // empty when omitted
    std::string name;
    std::vector<Param> params;
    std::optional<std::vector<spec::Statement>> body;  // nullopt for prototypes
    spec::Contract contract;
    bool has_contract = false;
    SourceSpan span;
    SourceSpan name_span;

    const Param* find_param(std::string_view n) const {
        for (const auto& p : params) {
            if (p.name == n) return &p;
        }
        return nullptr;
    }
    bool operator==(const Decl&) const = default;
};

struct StructField {
    std::string name;
    long width = 1;
    SourceSpan span;
    bool operator==(const StructField&) const = default;
};

struct StructDef {
    std::string name;
    std::vector<StructField> fields;
    SourceSpan span;
    bool operator==(const StructDef&) const = default;
};

using Item = std::variant<StructDef, Decl>;

struct Program {
    std::vector<Item> items;  // in source order

    std::vector<const Decl*> decls() const;
    std::vector<const StructDef*> structs() const;
    /// Last definition with a body wins over prototypes of the same name.
    const Decl* find_decl(std::string_view name) const;
    const StructDef* find_struct(std::string_view name) const;

    bool operator==(const Program&) const = default;
};

}  // namespace scaffml::frontend
