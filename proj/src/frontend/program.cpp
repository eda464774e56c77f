#include "scaffml/frontend/program.hpp"

namespace scaffml::frontend {

std::vector<const Decl*> Program::decls() const {
    std::vector<const Decl*> out;
    for (const auto& item : items) {
        if (const auto* d = std::get_if<Decl>(&item)) out.push_back(d);
    }
    return out;
}

std::vector<const StructDef*> Program::structs() const {
    std::vector<const StructDef*> out;
    for (const auto& item : items) {
        if (const auto* s = std::get_if<StructDef>(&item)) out.push_back(s);
    }
    return out;
}

const Decl* Program::find_decl(std::string_view name) const {
    const Decl* found = nullptr;
    for (const auto& item : items) {
        const auto* d = std::get_if<Decl>(&item);
        if (!d || d->name != name) continue;
        if (!found || d->body || (!found->body && d->has_contract)) found = d;
    }
    return found;
}

const StructDef* Program::find_struct(std::string_view name) const {
    for (const auto& item : items) {
        const auto* s = std::get_if<StructDef>(&item);
        if (s && s->name == name) return s;
    }
    return nullptr;
}

}  // namespace scaffml::frontend
