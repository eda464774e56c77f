#include "scaffml/frontend/printer.hpp"

#include <sstream>

#include "scaffml/spec/printer.hpp"

namespace scaffml::frontend {
namespace {

using spec::Statement;

class ProgramPrinter {
public:
    explicit ProgramPrinter(std::ostringstream& out) : out_(out) {}

    void program(const Program& p) {
        bool first = true;
        for (const auto& item : p.items) {
            if (!first) out_ << '\n';
            first = false;
            std::visit([&](const auto& node) { print(node); }, item);
        }
    }

private:
    void indent() {
        for (int i = 0; i < depth_; ++i) out_ << "  ";
    }

    void print(const StructDef& s) {
        out_ << "qstruct " << s.name << " {\n";
        for (const auto& f : s.fields) out_ << "  qreg " << f.name << '[' << f.width << "];\n";
        out_ << "};\n";
    }

    void print(const Decl& d) {
        if (d.has_contract) contract(d.contract);
        if (d.kind == DeclKind::Gate) {
            out_ << "gate ";
        } else {
            if (!d.return_type.empty()) out_ << d.return_type << ' ';
            if (d.return_type.empty() || d.name != "main") out_ << "module ";
        }
        out_ << d.name << '(';
        for (std::size_t i = 0; i < d.params.size(); ++i) {
            if (i) out_ << ", ";
            const Param& p = d.params[i];
            out_ << p.type_name << ' ' << p.name;
            if (p.bracketed) {
                out_ << '[';
                if (p.width) out_ << spec::to_string(*p.width);
                out_ << ']';
            }
        }
        out_ << ')';
        if (d.body) {
            out_ << " {\n";
            ++depth_;
            block(*d.body);
            --depth_;
            out_ << "}\n";
        } else {
            out_ << ";\n";
        }
    }

    void clause(std::string_view keyword, const spec::Clause& c) {
        indent();
        out_ << keyword << ' ';
        if (!c.label.empty()) out_ << c.label << ": ";
        out_ << spec::to_string(c.expr) << ";\n";
    }

    void contract(const spec::Contract& c) {
        out_ << "/*@\n";
        ++depth_;
        for (const auto& pre : c.preconditions) clause("requires", pre);
        if (c.assigns) {
            indent();
            out_ << "assigns ";
            if (c.assigns->empty()) out_ << "\\nothing";
            for (std::size_t i = 0; i < c.assigns->size(); ++i) {
                if (i) out_ << ", ";
                out_ << spec::to_string((*c.assigns)[i]) << "[|0>..|1>]";
            }
            out_ << ";\n";
        }
        for (const auto& def : c.predicates) predicate(def);
        // Plain ensures go first: after a behavior header they would join it.
        for (const auto& post : c.postconditions) clause("ensures", post);
        for (const auto& b : c.behaviors) {
            indent();
            out_ << "behavior " << b.name << ":\n";
            ++depth_;
            for (const auto& a : b.assumes) clause("assumes", a);
            for (const auto& e : b.ensures) clause("ensures", e);
            --depth_;
        }
        if (c.complete_behaviors) {
            indent();
            out_ << "complete behaviors;\n";
        }
        if (c.disjoint_behaviors) {
            indent();
            out_ << "disjoint behaviors;\n";
        }
        --depth_;
        out_ << "*/\n";
    }

    void predicate(const spec::SpecPredicateDef& def) {
        indent();
        out_ << "module " << def.name << '(';
        for (std::size_t i = 0; i < def.params.size(); ++i) {
            if (i) out_ << ", ";
            const auto& p = def.params[i];
            switch (p.kind) {
                case spec::PredicateParamKind::QubitArray: out_ << p.name << "[]"; break;
                case spec::PredicateParamKind::ClassicalInt: out_ << "int " << p.name; break;
                case spec::PredicateParamKind::ClassicalFloat: out_ << p.name; break;
            }
        }
        out_ << ") {\n";
        ++depth_;
        block(def.body);
        --depth_;
        indent();
        out_ << "}\n";
    }

    void block(const std::vector<Statement>& body) {
        for (const auto& s : body) statement(s);
    }

    // Statement without indentation or terminator (for-loop header parts).
    std::string simple(const Statement& s) {
        std::ostringstream o;
        if (const auto* d = s.as<spec::VarDecl>()) {
            o << (d->type == spec::ScalarType::Int ? "int " : "float ") << d->name;
            if (d->init) o << " = " << spec::to_string(*d->init);
        } else if (const auto* a = s.as<spec::AssignStmt>()) {
            o << a->target;
            switch (a->op) {
                case spec::AssignOp::Set: o << " = " << spec::to_string(*a->value); break;
                case spec::AssignOp::Add: o << " += " << spec::to_string(*a->value); break;
                case spec::AssignOp::Sub: o << " -= " << spec::to_string(*a->value); break;
                case spec::AssignOp::Increment: o << "++"; break;
                case spec::AssignOp::Decrement: o << "--"; break;
            }
        } else if (const auto* c = s.as<spec::CallStmt>()) {
            o << c->callee << '(';
            for (std::size_t i = 0; i < c->args.size(); ++i) {
                if (i) o << ", ";
                o << spec::to_string(c->args[i]);
            }
            o << ')';
        }
        return o.str();
    }

    void statement(const Statement& s) {
        if (s.as<spec::VarDecl>() || s.as<spec::AssignStmt>() || s.as<spec::CallStmt>()) {
            indent();
            out_ << simple(s) << ";\n";
        } else if (const auto* q = s.as<spec::QuantumDecl>()) {
            indent();
            out_ << q->type_name << ' ' << q->name;
            if (q->width) out_ << '[' << spec::to_string(*q->width) << ']';
            out_ << ";\n";
        } else if (const auto* f = s.as<spec::ForStmt>()) {
            indent();
            out_ << "for (";
            if (!f->init.empty()) out_ << simple(f->init.front());
            out_ << "; ";
            if (f->cond) out_ << spec::to_string(*f->cond);
            out_ << "; ";
            if (!f->step.empty()) out_ << simple(f->step.front());
            out_ << ") {\n";
            ++depth_;
            block(f->body);
            --depth_;
            indent();
            out_ << "}\n";
        } else if (const auto* i = s.as<spec::IfStmt>()) {
            indent();
            if_chain(*i);
        } else if (const auto* a = s.as<spec::AssertStmt>()) {
            // One annotation per assertion point, so multi-clause points use a block.
            indent();
            out_ << (a->clauses.size() == 1 ? "//@" : "/*@");
            for (const auto& c : a->clauses) {
                out_ << " assert ";
                if (!c.label.empty()) out_ << c.label << ": ";
                out_ << spec::to_string(c.expr) << ';';
            }
            out_ << (a->clauses.size() == 1 ? "\n" : " */\n");
        } else if (const auto* r = s.as<spec::ReturnStmt>()) {
            indent();
            out_ << "return";
            if (r->value) out_ << ' ' << spec::to_string(*r->value);
            out_ << ";\n";
        } else if (const auto* e = s.as<spec::EmitStmt>()) {
            indent();
            out_ << "//ensures ";
            if (!e->clause.label.empty()) out_ << e->clause.label << ": ";
            out_ << spec::to_string(e->clause.expr) << ";\n";
        }
    }

    void if_chain(const spec::IfStmt& i) {
        out_ << "if (" << spec::to_string(i.cond) << ") {\n";
        ++depth_;
        block(i.then_body);
        --depth_;
        indent();
        out_ << '}';
        if (i.has_else) {
            if (i.else_body.size() == 1 && i.else_body.front().as<spec::IfStmt>()) {
                out_ << " else ";
                if_chain(*i.else_body.front().as<spec::IfStmt>());
                return;
            }
            out_ << " else {\n";
            ++depth_;
            block(i.else_body);
            --depth_;
            indent();
            out_ << '}';
        }
        out_ << '\n';
    }

    std::ostringstream& out_;
    int depth_ = 0;
};

}  // namespace

std::string print_program(const Program& program) {
    std::ostringstream out;
    ProgramPrinter(out).program(program);
    return out.str();
}

}  // namespace scaffml::frontend
