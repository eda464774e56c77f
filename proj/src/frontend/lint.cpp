#include "scaffml/frontend/lint.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "scaffml/spec/builtins.hpp"
#include "scaffml/spec/printer.hpp"

namespace scaffml::frontend {

using namespace spec;

namespace {

struct Symbol {
    enum class Kind { Register, Classical, Struct } kind = Kind::Classical;
    std::optional<long> width;  // registers with a literal width
    std::string struct_name;
};

class Scope {
public:
    void push() { frames_.emplace_back(); }
    void pop() { frames_.pop_back(); }
    void add(const std::string& name, Symbol sym) { frames_.back().emplace_back(name, std::move(sym)); }

    const Symbol* find(std::string_view name) const {
        for (auto f = frames_.rbegin(); f != frames_.rend(); ++f) {
            for (auto s = f->rbegin(); s != f->rend(); ++s) {
                if (s->first == name) return &s->second;
            }
        }
        return nullptr;
    }

    std::string listing() const {
        std::vector<std::string> names;
        for (const auto& f : frames_) {
            for (const auto& s : f) {
                if (std::find(names.begin(), names.end(), s.first) == names.end()) names.push_back(s.first);
            }
        }
        if (names.empty()) return "nothing";
        std::string out;
        for (const auto& n : names) {
            if (!out.empty()) out += ", ";
            out += n;
        }
        return out;
    }

private:
    std::vector<std::vector<std::pair<std::string, Symbol>>> frames_;
};

std::optional<double> const_eval(const Expr& e) {
    if (const auto* n = e.as<NumberLit>()) return n->value;
    if (const auto* u = e.as<UnaryExpr>()) {
        auto v = const_eval(*u->operand);
        if (!v) return std::nullopt;
        if (u->op == UnaryOp::Neg) return -*v;
        if (u->op == UnaryOp::Plus) return *v;
        return std::nullopt;
    }
    if (const auto* b = e.as<BinaryExpr>()) {
        auto l = const_eval(*b->lhs);
        auto r = const_eval(*b->rhs);
        if (!l || !r) return std::nullopt;
        switch (b->op) {
            case BinaryOp::Add: return *l + *r;
            case BinaryOp::Sub: return *l - *r;
            case BinaryOp::Mul: return *l * *r;
            case BinaryOp::Div:
                if (*r == 0) return std::nullopt;
                return *l / *r;
            default: return std::nullopt;
        }
    }
    return std::nullopt;
}

enum class Where { Code, Requires, Assigns, Ensures, Assumes, Assert, PredicateBody };

struct ControlQubit {
    std::string reg;
    std::optional<long> index;
};

bool overlaps(const QubitRef& ref, const ControlQubit& c) {
    if (ref.register_name() != c.reg) return false;
    if (ref.form != IndexForm::Element || !c.index) return true;
    auto idx = const_eval(**ref.index);
    return !idx || static_cast<long>(*idx) == *c.index;
}

class Linter {
public:
    explicit Linter(const Program& program) : program_(program) {}

    std::vector<Diagnostic> run() {
        std::map<std::string, int> bodies;
        for (const Decl* d : program_.decls()) {
            if (d->body && ++bodies[d->name] == 2) {
                error(d->name_span, "duplicate definition of module '" + d->name + "'");
            }
        }
        for (const Decl* d : program_.decls()) decl(*d);
        return std::move(diags_);
    }

private:
    void error(SourceSpan span, std::string msg) { diags_.push_back({Severity::Error, span, std::move(msg), false}); }
    void warning(SourceSpan span, std::string msg) {
        diags_.push_back({Severity::Warning, span, std::move(msg), false});
    }

    void add_param(const Param& p) {
        Symbol sym;
        switch (p.kind) {
            case ParamKind::QuantumRegister:
                sym.kind = Symbol::Kind::Register;
                if (!p.bracketed) {
                    sym.width = 1;
                } else if (p.width) {
                    if (auto w = const_eval(*p.width)) {
                        sym.width = static_cast<long>(*w);
                        if (*w <= 0 || std::floor(*w) != *w) {
                            error(p.width->span, "register width of '" + p.name + "' must be a positive integer");
                        }
                    } else if (const auto* id = p.width->as<Identifier>()) {
                        // `qreg qbits[width]`: the width name is bound at call time.
                        if (!scope_.find(id->name)) scope_.add(id->name, Symbol{});
                    } else {
                        error(p.width->span, "register width must be an integer or a name");
                    }
                } else {
                    error(p.span, "register parameter '" + p.name + "' needs a width");
                }
                break;
            case ParamKind::Struct:
                sym.kind = Symbol::Kind::Struct;
                sym.struct_name = p.type_name;
                if (!program_.find_struct(p.type_name)) {
                    error(p.span, "unknown type '" + p.type_name + "'");
                }
                break;
            default: break;
        }
        scope_.add(p.name, std::move(sym));
    }

    void decl(const Decl& d) {
        current_ = &d;
        scope_ = Scope{};
        scope_.push();
        for (const auto& p : d.params) add_param(p);
        if (d.has_contract) contract(d.contract);
        if (d.body) {
            scope_.push();
            controls_.clear();
            statements(*d.body, Where::Code);
            scope_.pop();
        }
        current_ = nullptr;
    }

    // ------------------------------------------------------------------

    void check_labels(const std::vector<Clause>& clauses) {
        std::set<std::string> seen;
        for (const auto& c : clauses) {
            if (c.label.empty()) continue;
            if (!seen.insert(c.label).second) warning(c.span, "duplicate clause label '" + c.label + "'");
        }
    }

    void contract(const Contract& c) {
        predicates_.clear();
        for (const auto& def : c.predicates) {
            if (find_predicate(def.name)) {
                error(def.span, "spec predicate '" + def.name + "' redefines a pre-defined predicate");
            }
            predicates_[def.name] = &def;
        }
        for (const auto& def : c.predicates) predicate_def(def);
        for (const auto& pre : c.preconditions) clause(pre, Where::Requires);
        if (c.assigns) {
            for (const auto& target : *c.assigns) expr(target, Where::Assigns, false);
        }
        for (const auto& post : c.postconditions) clause(post, Where::Ensures);
        check_labels(c.preconditions);
        check_labels(c.postconditions);
        std::set<std::string> names;
        for (const auto& b : c.behaviors) {
            if (!names.insert(b.name).second) error(b.span, "duplicate behavior name '" + b.name + "'");
            for (const auto& a : b.assumes) clause(a, Where::Assumes);
            for (const auto& e : b.ensures) clause(e, Where::Ensures);
            check_labels(b.ensures);
        }
        if (c.behaviors.empty()) {
            if (c.complete_behaviors) error(c.span, "'complete behaviors' without any behavior");
            if (c.disjoint_behaviors) error(c.span, "'disjoint behaviors' without any behavior");
        } else if (!c.complete_behaviors || !c.disjoint_behaviors) {
            std::string missing;
            if (!c.complete_behaviors) missing = "'complete behaviors'";
            if (!c.disjoint_behaviors) missing += std::string(missing.empty() ? "" : " and ") + "'disjoint behaviors'";
            warning(c.behaviors.front().span, "behaviors declared without " + missing);
        }
    }

    void predicate_def(const SpecPredicateDef& def) {
        Scope saved = scope_;
        scope_ = Scope{};
        scope_.push();
        for (const auto& p : def.params) {
            Symbol sym;
            if (p.kind == PredicateParamKind::QubitArray) sym.kind = Symbol::Kind::Register;
            scope_.add(p.name, sym);
        }
        statements(def.body, Where::PredicateBody);
        scope_ = std::move(saved);
    }

    void clause(const Clause& c, Where where) { expr(c.expr, where, true); }

    // ------------------------------------------------------------------

    void check_register(const QubitRef& ref, SourceSpan span, Where where) {
        const Symbol* sym = scope_.find(ref.name);
        if (!sym) {
            error(span, "unknown identifier '" + ref.name + "' (in scope: " + scope_.listing() + ")");
            return;
        }
        std::optional<long> width = sym->width;
        if (ref.member) {
            if (sym->kind != Symbol::Kind::Struct) {
                error(span, "'" + ref.name + "' is not a qstruct");
                return;
            }
            const StructDef* def = program_.find_struct(sym->struct_name);
            if (!def) return;
            const auto field = std::find_if(def->fields.begin(), def->fields.end(),
                                            [&](const StructField& f) { return f.name == *ref.member; });
            if (field == def->fields.end()) {
                error(span, "qstruct '" + def->name + "' has no register '" + *ref.member + "'");
                return;
            }
            width = field->width;
        } else if (sym->kind == Symbol::Kind::Classical) {
            if (ref.form != IndexForm::Whole || where != Where::Code) {
                error(span, "'" + ref.name + "' is not a quantum register");
            }
            return;
        } else if (sym->kind == Symbol::Kind::Struct && ref.form != IndexForm::Whole) {
            error(span, "qstruct '" + ref.name + "' must be accessed through a member");
            return;
        }
        auto check_index = [&](const Expr& e) {
            expr(e, where == Where::Code || where == Where::PredicateBody ? where : Where::Code, false);
            const auto idx = const_eval(e);
            if (idx && width && (*idx < 0 || *idx >= static_cast<double>(*width))) {
                error(e.span, "index " + spec::to_string(e) + " out of range for " + ref.register_name() + "[" +
                                  std::to_string(*width) + "]");
            }
        };
        if (ref.index) check_index(**ref.index);
        if (ref.slice_end) check_index(**ref.slice_end);
    }

    bool is_register_arg(const Expr& e) const {
        if (e.is<QubitRef>()) return true;
        if (const auto* id = e.as<Identifier>()) {
            const Symbol* s = scope_.find(id->name);
            return s && s->kind != Symbol::Kind::Classical;
        }
        return false;
    }

    bool unresolved(const Expr& e) const {
        const auto* id = e.as<Identifier>();
        return id && !scope_.find(id->name);
    }

    void predicate_call(const CallExpr& call, SourceSpan span, Where where) {
        const PredicateInfo* info = find_predicate(call.name);
        const auto user = predicates_.find(call.name);
        const int arity = info ? info->arity : static_cast<int>(user->second->params.size());
        if (static_cast<int>(call.args.size()) != arity) {
            error(span, "predicate '" + call.name + "' expects " + std::to_string(arity) + " argument(s), got " +
                            std::to_string(call.args.size()));
            return;
        }
        if (where == Where::Requires || where == Where::Assumes) {
            if (info && info->id != PredicateId::QbitselfCheck) {
                error(span, "predicate '" + call.name + "' relates two states and cannot appear in requires/assumes");
            }
        }
        if (call.epochs && call.epochs->first == call.epochs->second) {
            error(span, "epoch pair of '" + call.name + "' must name both Here and Old");
        }
        for (const auto& a : call.args) expr(a, where, false);
        if (!info) {
            const SpecPredicateDef& def = *user->second;
            for (std::size_t k = 0; k < def.params.size(); ++k) {
                const bool quantum = def.params[k].kind == PredicateParamKind::QubitArray;
                if (quantum != is_register_arg(call.args[k])) {
                    error(call.args[k].span, "argument " + std::to_string(k + 1) + " of '" + call.name + "' must be " +
                                                 (quantum ? "a qubit reference" : "a classical value"));
                }
            }
            return;
        }
        if (!is_register_arg(call.args[0])) {
            error(call.args[0].span, "first argument of '" + call.name + "' must be a qubit reference");
        }
        if (info->id == PredicateId::EqualRanges && !is_register_arg(call.args[2])) {
            error(call.args[2].span, "third argument of 'EqualRanges' must be a qubit reference");
        }
        if (arity >= 2) {
            const auto len = const_eval(call.args[1]);
            if (!len || *len != 2) {
                error(call.args[1].span, "length argument of '" + call.name +
                                             "' must be 2 (the two amplitudes of one qubit)");
            }
        }
        if (info->id == PredicateId::EqualRanges && call.args[0] == call.args[2]) {
            warning(span, "EqualRanges compares " + spec::to_string(call.args[0]) + " with itself");
        }
        if ((info->id == PredicateId::PhaseCheck || info->id == PredicateId::PhaseCheckRx)) {
            const Symbol* angle = scope_.find("angle");
            if (!angle || angle->kind != Symbol::Kind::Classical) {
                error(span, "'" + call.name + "' needs a classical parameter named 'angle' in scope");
            }
        }
    }

    void expr(const Expr& e, Where where, bool top) {
        const bool spec_ctx = where != Where::Code;
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, NumberLit>) {
                } else if constexpr (std::is_same_v<T, Identifier>) {
                    if (!scope_.find(node.name) && !is_builtin_constant(node.name)) {
                        error(e.span, "unknown identifier '" + node.name + "' (in scope: " + scope_.listing() + ")");
                    }
                } else if constexpr (std::is_same_v<T, QubitRef>) {
                    check_register(node, e.span, where);
                } else if constexpr (std::is_same_v<T, AmplitudeExpr>) {
                    if (!spec_ctx) {
                        error(e.span, "amplitude accessor outside an annotation");
                        return;
                    }
                    check_register(node.ref, e.span, where);
                    if (node.ref.form == IndexForm::All || node.ref.form == IndexForm::Slice) {
                        error(e.span, "amplitude accessor needs a single qubit, not " + spec::to_string(node.ref));
                    } else if (node.ref.form == IndexForm::Whole && !node.ref.member) {
                        const Symbol* s = scope_.find(node.ref.name);
                        if (s && s->kind == Symbol::Kind::Register && s->width && *s->width != 1) {
                            error(e.span, "amplitude shorthand " + node.ref.name + "[|0>] needs a width-1 register");
                        }
                    }
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    expr(*node.operand, where, false);
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    expr(*node.lhs, where, false);
                    expr(*node.rhs, where, false);
                } else if constexpr (std::is_same_v<T, CallExpr>) {
                    const bool predicate = find_predicate(node.name) || predicates_.count(node.name);
                    if (predicate && spec_ctx && where != Where::PredicateBody) {
                        if (!top) error(e.span, "predicate call '" + node.name + "' must form a whole clause");
                        predicate_call(node, e.span, where);
                        return;
                    }
                    const FunctionInfo* fn = find_function(node.name);
                    if (!fn || (fn->spec_only && !spec_ctx)) {
                        error(e.span, std::string(node.epochs || (top && spec_ctx) ? "unknown predicate '"
                                                                                    : "unknown function '") +
                                          node.name + "'");
                        for (const auto& a : node.args) expr(a, where, false);
                        return;
                    }
                    if (static_cast<int>(node.args.size()) != fn->arity) {
                        error(e.span, "'" + node.name + "' expects " + std::to_string(fn->arity) +
                                          " argument(s), got " + std::to_string(node.args.size()));
                    }
                    if (node.epochs) error(e.span, "epoch pair on non-predicate '" + node.name + "'");
                    for (const auto& a : node.args) expr(a, where, false);
                    if ((node.name == "measZ" || node.name == "length") && node.args.size() == 1 &&
                        !is_register_arg(node.args[0]) && !unresolved(node.args[0])) {
                        error(node.args[0].span, "'" + node.name + "' needs a qubit reference");
                    }
                    if (node.name == "measZ" && in_old_) {
                        error(e.span, "\\old(measZ(...)) is not supported");
                    }
                } else if constexpr (std::is_same_v<T, OldExpr>) {
                    if (where == Where::Requires) {
                        error(e.span, "\\old is not allowed in requires (there is no earlier state)");
                    } else if (where == Where::Code || where == Where::Assigns || where == Where::PredicateBody) {
                        error(e.span, "\\old outside ensures, behaviors, or assertions");
                    }
                    const bool saved = in_old_;
                    in_old_ = true;
                    expr(*node.inner, where, false);
                    in_old_ = saved;
                } else if constexpr (std::is_same_v<T, ValidExpr>) {
                    check_register(node.ref, e.span, where);
                }
            },
            e.node);
    }

    // ------------------------------------------------------------------

    void statements(const std::vector<Statement>& body, Where where) {
        for (const auto& s : body) statement(s, where);
    }

    void check_control_reuse(const Expr& arg) {
        const QubitRef* ref = arg.as<QubitRef>();
        QubitRef whole;
        if (!ref) {
            const auto* id = arg.as<Identifier>();
            if (!id) return;
            whole.name = id->name;
            ref = &whole;
        }
        for (const auto& c : controls_) {
            if (overlaps(*ref, c)) {
                error(arg.span, "control qubit " + c.reg + (c.index ? "[" + std::to_string(*c.index) + "]" : "") +
                                    " of a quantum-controlled conditional is reused");
                return;
            }
        }
    }

    void call(const CallStmt& c, SourceSpan span, Where where) {
        if (where == Where::PredicateBody) {
            error(span, "spec predicate bodies cannot call gates or modules ('" + c.callee + "')");
            return;
        }
        const Decl* target = program_.find_decl(c.callee);
        int arity = -1;
        if (target) {
            arity = static_cast<int>(target->params.size());
        } else if (const GateInfo* g = find_gate(c.callee)) {
            arity = g->qubits + g->params;
        } else {
            error(span, "unknown gate or module '" + c.callee + "'");
        }
        if (arity >= 0 && static_cast<int>(c.args.size()) != arity) {
            error(span, "call to '" + c.callee + "' passes " + std::to_string(c.args.size()) +
                            " argument(s), expected " + std::to_string(arity));
        }
        for (const auto& a : c.args) {
            expr(a, where, false);
            check_control_reuse(a);
        }
    }

    // Conjunction of `q[i] == 0|1`; collects the controls. Returns false if
    // the condition has another shape.
    bool quantum_condition(const Expr& e, std::vector<ControlQubit>& out) {
        if (const auto* b = e.as<BinaryExpr>()) {
            if (b->op == BinaryOp::And) return quantum_condition(*b->lhs, out) && quantum_condition(*b->rhs, out);
            if (b->op == BinaryOp::Eq) {
                const auto* ref = b->lhs->as<QubitRef>();
                const auto value = const_eval(*b->rhs);
                if (!ref || ref->form != IndexForm::Element || !value || (*value != 0 && *value != 1)) return false;
                ControlQubit c{ref->register_name(), std::nullopt};
                if (auto idx = const_eval(**ref->index)) c.index = static_cast<long>(*idx);
                out.push_back(std::move(c));
                return true;
            }
        }
        return false;
    }

    bool mentions_qubits(const Expr& e) const {
        bool found = false;
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, QubitRef>) {
                    found = true;
                } else if constexpr (std::is_same_v<T, Identifier>) {
                    const Symbol* s = scope_.find(node.name);
                    found = s && s->kind != Symbol::Kind::Classical;
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    found = mentions_qubits(*node.operand);
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    found = mentions_qubits(*node.lhs) || mentions_qubits(*node.rhs);
                }
            },
            e.node);
        return found;
    }

    void quantum_if(const IfStmt& top, SourceSpan span) {
        std::vector<ControlQubit> controls;
        const IfStmt* branch = &top;
        std::vector<const std::vector<Statement>*> bodies;
        while (branch) {
            expr(branch->cond, Where::Code, false);
            if (!quantum_condition(branch->cond, controls)) {
                error(branch->cond.span,
                      "outside supported subset: quantum condition must be a conjunction of q[i]==0|1");
            }
            bodies.push_back(&branch->then_body);
            const IfStmt* next = nullptr;
            if (branch->has_else) {
                if (branch->else_body.size() == 1 && branch->else_body.front().as<IfStmt>()) {
                    next = branch->else_body.front().as<IfStmt>();
                    if (!mentions_qubits(next->cond)) {
                        error(next->cond.span, "outside supported subset: mixed classical and quantum conditions");
                        next = nullptr;
                    }
                } else {
                    bodies.push_back(&branch->else_body);
                }
            }
            branch = next;
        }
        for (const auto* body : bodies) {
            for (const auto& s : *body) {
                const auto* c = s.as<CallStmt>();
                if (!c) {
                    error(s.span, "outside supported subset: quantum-controlled branches may only call modules or gates");
                    continue;
                }
                for (const auto& a : c->args) {
                    const QubitRef* ref = a.as<QubitRef>();
                    QubitRef whole;
                    if (const auto* id = a.as<Identifier>()) {
                        whole.name = id->name;
                        ref = &whole;
                    }
                    if (!ref) continue;
                    for (const auto& ctl : controls) {
                        if (overlaps(*ref, ctl)) {
                            error(a.span, "branch uses control qubit " + ctl.reg +
                                              (ctl.index ? "[" + std::to_string(*ctl.index) + "]" : ""));
                        }
                    }
                }
                call(*c, s.span, Where::Code);
            }
        }
        (void)span;
        controls_.insert(controls_.end(), controls.begin(), controls.end());
    }

    void statement(const Statement& s, Where where) {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, CallStmt>) {
                    call(node, s.span, where);
                } else if constexpr (std::is_same_v<T, VarDecl>) {
                    if (node.init) expr(*node.init, where, false);
                    scope_.add(node.name, Symbol{});
                } else if constexpr (std::is_same_v<T, QuantumDecl>) {
                    if (where == Where::PredicateBody) {
                        error(s.span, "spec predicate bodies cannot declare registers");
                        return;
                    }
                    Symbol sym;
                    sym.kind = Symbol::Kind::Register;
                    if (node.type_name == "qreg" || node.type_name == "qbit") {
                        if (!node.width) {
                            sym.width = 1;
                        } else if (auto w = const_eval(*node.width)) {
                            sym.width = static_cast<long>(*w);
                            if (*w <= 0 || std::floor(*w) != *w) {
                                error(node.width->span, "register width of '" + node.name + "' must be a positive integer");
                            }
                        } else {
                            expr(*node.width, where, false);
                        }
                    } else if (program_.find_struct(node.type_name)) {
                        sym.kind = Symbol::Kind::Struct;
                        sym.struct_name = node.type_name;
                    } else {
                        error(s.span, "unknown type '" + node.type_name + "'");
                    }
                    scope_.add(node.name, std::move(sym));
                } else if constexpr (std::is_same_v<T, AssignStmt>) {
                    const Symbol* sym = scope_.find(node.target);
                    if (!sym) {
                        error(s.span, "unknown identifier '" + node.target + "' (in scope: " + scope_.listing() + ")");
                    } else if (sym->kind != Symbol::Kind::Classical) {
                        error(s.span, "cannot assign to quantum register '" + node.target + "'");
                    }
                    if (node.value) expr(*node.value, where, false);
                } else if constexpr (std::is_same_v<T, ForStmt>) {
                    scope_.push();
                    for (const auto& i : node.init) statement(i, where);
                    if (node.cond) expr(*node.cond, where, false);
                    for (const auto& st : node.step) statement(st, where);
                    scope_.push();
                    statements(node.body, where);
                    scope_.pop();
                    scope_.pop();
                } else if constexpr (std::is_same_v<T, IfStmt>) {
                    if (where == Where::Code && mentions_qubits(node.cond)) {
                        quantum_if(node, s.span);
                        return;
                    }
                    expr(node.cond, where, false);
                    scope_.push();
                    statements(node.then_body, where);
                    scope_.pop();
                    scope_.push();
                    statements(node.else_body, where);
                    scope_.pop();
                } else if constexpr (std::is_same_v<T, AssertStmt>) {
                    for (const auto& c : node.clauses) clause(c, Where::Assert);
                    check_labels(node.clauses);
                } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                    if (node.value) expr(*node.value, where, false);
                } else if constexpr (std::is_same_v<T, EmitStmt>) {
                    const auto* eq = node.clause.expr.template as<BinaryExpr>();
                    if (!eq || eq->op != BinaryOp::Eq || !eq->lhs->template is<AmplitudeExpr>()) {
                        error(s.span, "embedded ensures must have the form amplitude == expression");
                    }
                    const Scope saved = scope_;
                    expr(node.clause.expr, Where::Ensures, false);
                    (void)saved;
                }
            },
            s.node);
    }

    const Program& program_;
    const Decl* current_ = nullptr;
    Scope scope_;
    std::map<std::string, const SpecPredicateDef*> predicates_;
    std::vector<ControlQubit> controls_;
    bool in_old_ = false;
    std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> lint(const Program& program) { return Linter(program).run(); }

bool Analysis::has_syntax_errors() const {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.syntax && d.severity == Severity::Error; });
}

Analysis analyze(SourceFile file) {
    Analysis out;
    out.file = std::move(file);
    ParseResult parsed = parse_source(out.file);
    out.program = std::move(parsed.program);
    out.diagnostics = std::move(parsed.diagnostics);
    auto more = lint(out.program);
    out.diagnostics.insert(out.diagnostics.end(), more.begin(), more.end());
    sort_diagnostics(out.diagnostics);
    return out;
}

}  // namespace scaffml::frontend
