#include "scaffml/check/checker.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <set>
#include <thread>

#include "scaffml/sim/control.hpp"
#include "scaffml/sim/errors.hpp"
#include "scaffml/sim/random.hpp"
#include "scaffml/spec/builtins.hpp"
#include "scaffml/spec/printer.hpp"

namespace scaffml::check {

using frontend::Decl;
using frontend::Param;
using frontend::ParamKind;
using frontend::Program;
using namespace spec;
using sim::Complex;
using sim::QuantumState;

namespace {

constexpr int kMaxDepth = 256;
constexpr long kMaxLoopSteps = 1'000'000;

std::string clause_label(const NormalClause& c) { return c.label.empty() ? spec::to_string(c.expr) : c.label; }

std::string format_values(const std::vector<Complex>& values) {
    std::string out = "[";
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) out += ", ";
        out += format_complex(values[k]);
    }
    return out + "]";
}

ClauseVerdict verdict_for(const NormalClause& c, ClauseKind kind) {
    ClauseVerdict v;
    v.label = clause_label(c);
    v.kind = kind;
    v.span = c.span;
    return v;
}

void error_verdict(ClauseVerdict& v, const std::exception& err) {
    v.verdict = Verdict::Error;
    v.detail = err.what();
}

std::optional<double> binding(const std::map<std::string, double>& bindings, const std::string& name) {
    const auto it = bindings.find(name);
    if (it == bindings.end()) return std::nullopt;
    return it->second;
}

int literal_width(const Param& p, const std::map<std::string, double>& bindings) {
    if (!p.bracketed) return 1;
    if (!p.width) throw std::invalid_argument("register parameter '" + p.name + "' has no width");
    if (const auto* n = p.width->as<NumberLit>()) return static_cast<int>(n->value);
    if (const auto* id = p.width->as<Identifier>()) {
        if (const auto v = binding(bindings, id->name)) return static_cast<int>(*v);
        throw std::invalid_argument("register width '" + id->name + "' of '" + p.name + "' needs a value (bind " +
                                    id->name + "=N)");
    }
    throw std::invalid_argument("unsupported width for '" + p.name + "'");
}

bool body_has_asserts(const std::vector<Statement>& body) {
    for (const auto& s : body) {
        if (s.as<AssertStmt>()) return true;
        if (const auto* f = s.as<ForStmt>(); f && body_has_asserts(f->body)) return true;
        if (const auto* i = s.as<IfStmt>(); i && (body_has_asserts(i->then_body) || body_has_asserts(i->else_body))) {
            return true;
        }
    }
    return false;
}

/// Evaluates one clause on its own (no shared phase group).
void evaluate_single(const NormalClause& c, ClauseVerdict& v, const EvalEnv& env) {
    switch (c.form) {
        case ClauseForm::Equations: {
            const EquationResult r = check_equations(c.equations.equations, c.equations.phase, env);
            v.verdict = r.pass ? Verdict::Pass : Verdict::Fail;
            v.measured = r.lhs;
            v.expected = r.rhs;
            v.detail = "lhs " + format_values(r.lhs) + " rhs " + format_values(r.rhs);
            if (r.phase != Complex(1)) v.detail += " phase " + format_complex(r.phase);
            if (!r.pass) {
                char buf[64];
                std::snprintf(buf, sizeof buf, " residual %.3g", r.max_residual);
                v.detail += buf;
            }
            break;
        }
        case ClauseForm::Snapshot:
        case ClauseForm::Boolean: {
            if (!c.predicate.empty()) throw EvalError("predicate '" + c.predicate + "' did not expand");
            if (const auto event = compile_event(c.expr, env)) {
                const double p = sim::event_probability(*env.here, *event);
                v.measured = {p};
                v.verdict = p >= 1.0 - env.tol.eps_prob ? Verdict::Pass : Verdict::Fail;
                char buf[64];
                std::snprintf(buf, sizeof buf, "probability %.12g", p);
                v.detail = buf;
            } else {
                v.verdict = eval_bool(c.expr, env) ? Verdict::Pass : Verdict::Fail;
            }
            if (c.form == ClauseForm::Snapshot) {
                v.detail = std::string("stated-precondition (checked on the entry state)") +
                           (v.detail.empty() ? "" : "; " + v.detail);
            }
            break;
        }
    }
}

}  // namespace

std::vector<ClauseVerdict> check_clauses(const std::vector<NormalClause>& clauses, ClauseKind kind,
                                         const EvalEnv& env) {
    std::vector<ClauseVerdict> out;
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t k = 0; k < clauses.size(); ++k) {
        if (clauses[k].form == ClauseForm::Equations && clauses[k].predicate.empty()) {
            groups[clauses[k].phase_group].push_back(k);
        }
    }
    for (std::size_t k = 0; k < clauses.size(); ++k) {
        const NormalClause& c = clauses[k];
        ClauseVerdict v = verdict_for(c, kind);
        try {
            const auto g = groups.find(c.phase_group);
            if (c.form == ClauseForm::Equations && c.predicate.empty() && g != groups.end() && g->second.size() > 1) {
                // plain equations on one qubit: fit a phase over the group, judge this clause
                std::vector<Equation> eqs;
                std::size_t self = 0;
                for (std::size_t idx : g->second) {
                    if (idx == k) self = eqs.size();
                    eqs.push_back(clauses[idx].equations.equations.front());
                }
                const EquationResult r = check_equations(eqs, PhaseMode::SharedGlobalPhase, env);
                const double residual = std::abs(r.lhs[self] - r.phase * r.rhs[self]);
                v.verdict = residual <= env.tol.eps_eq ? Verdict::Pass : Verdict::Fail;
                v.measured = {r.lhs[self]};
                v.expected = {r.rhs[self]};
                v.detail = "lhs " + format_complex(r.lhs[self]) + " rhs " + format_complex(r.rhs[self]);
                if (r.phase != Complex(1)) v.detail += " phase " + format_complex(r.phase);
            } else {
                evaluate_single(c, v, env);
            }
        } catch (const EvalError& err) {
            error_verdict(v, err);
        } catch (const sim::SimulationError& err) {
            error_verdict(v, err);
        } catch (const ExpansionError& err) {
            error_verdict(v, err);
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<ClauseVerdict> check_behaviors(const NormalContract& contract, const QuantumState& old,
                                           const QuantumState& post, const EvalEnv& env) {
    std::vector<ClauseVerdict> out;
    // Event of each behavior over the post-state basis; nullopt = error.
    std::vector<std::optional<sim::BasisEvent>> events;
    EvalEnv pre_env = env;
    pre_env.here = &old;
    pre_env.old = &old;  // classical assumes read the entry state, with or without \old

    for (const auto& b : contract.behaviors) {
        std::optional<sim::BasisEvent> event;
        bool classical_true = true;
        std::string problem;
        std::vector<sim::BasisEvent> parts;
        for (const auto& a : b.assumes) {
            try {
                if (auto e = compile_event(a.expr, env)) {
                    parts.push_back(*e);
                } else if (!eval_bool(a.expr, pre_env)) {
                    classical_true = false;
                }
            } catch (const std::exception& err) {
                problem = err.what();
            }
        }
        if (!parts.empty() && parts.size() != b.assumes.size() && problem.empty()) {
            problem = "behavior " + b.name + " mixes classical and measurement assumptions";
        }
        auto emit_all = [&](Verdict verdict, const std::string& detail) {
            for (const auto& c : b.ensures) {
                ClauseVerdict v = verdict_for(c, ClauseKind::BehaviorEnsures);
                v.behavior = b.name;
                v.verdict = verdict;
                v.detail = detail;
                out.push_back(std::move(v));
            }
        };
        if (!problem.empty()) {
            emit_all(Verdict::Error, problem);
            events.emplace_back(std::nullopt);
            continue;
        }
        if (!classical_true) {
            emit_all(Verdict::Vacuous, "assumptions do not hold on the entry state");
            events.emplace_back(sim::BasisEvent([](std::uint64_t) { return false; }));
            continue;
        }
        if (parts.empty()) {
            events.emplace_back(sim::BasisEvent([](std::uint64_t) { return true; }));
            auto verdicts = check_clauses(b.ensures, ClauseKind::BehaviorEnsures, env);
            for (auto& v : verdicts) v.behavior = b.name;
            out.insert(out.end(), verdicts.begin(), verdicts.end());
            continue;
        }
        event = [parts](std::uint64_t i) {
            return std::all_of(parts.begin(), parts.end(), [i](const auto& p) { return p(i); });
        };
        events.emplace_back(event);
        const double p = sim::event_probability(post, *event);
        if (p < env.tol.eps_prob) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "assumed event has probability %.3g", p);
            emit_all(Verdict::Vacuous, buf);
            continue;
        }
        const QuantumState projected = sim::project_event(post, *event, 0.0);
        std::string note;
        std::optional<QuantumState> projected_old;
        if (old.qubits() == post.qubits()) {
            const double p_old = sim::event_probability(old, *event);
            if (p_old >= 1.0 - env.tol.eps_prob) {
                projected_old = sim::project_event(old, *event, 0.0);
            } else {
                note = "note: \\old evaluated on the unconditioned entry state";
            }
        }
        EvalEnv cond = env;
        cond.here = &projected;
        cond.old = projected_old ? &*projected_old : &old;
        auto verdicts = check_clauses(b.ensures, ClauseKind::BehaviorEnsures, cond);
        for (auto& v : verdicts) {
            v.behavior = b.name;
            char buf[64];
            std::snprintf(buf, sizeof buf, "given P(assumes) = %.12g", p);
            v.detail = std::string(buf) + (v.detail.empty() ? "" : "; " + v.detail);
            if (!note.empty()) v.detail += "; " + note;
        }
        out.insert(out.end(), verdicts.begin(), verdicts.end());
    }

    const bool broken = std::any_of(events.begin(), events.end(), [](const auto& e) { return !e.has_value(); });
    if (contract.complete_behaviors) {
        ClauseVerdict v;
        v.label = "complete behaviors";
        v.kind = ClauseKind::Completeness;
        if (broken) {
            v.verdict = Verdict::Error;
            v.detail = "a behavior's assumptions could not be evaluated";
        } else {
            const double p = sim::event_probability(post, [&](std::uint64_t i) {
                return std::any_of(events.begin(), events.end(), [i](const auto& e) { return (*e)(i); });
            });
            v.measured = {p};
            v.verdict = p >= 1.0 - env.tol.eps_prob ? Verdict::Pass : Verdict::Fail;
            char buf[64];
            std::snprintf(buf, sizeof buf, "P(some behavior applies) = %.12g", p);
            v.detail = buf;
        }
        out.push_back(std::move(v));
    }
    if (contract.disjoint_behaviors) {
        ClauseVerdict v;
        v.label = "disjoint behaviors";
        v.kind = ClauseKind::Disjointness;
        if (broken) {
            v.verdict = Verdict::Error;
            v.detail = "a behavior's assumptions could not be evaluated";
        } else {
            double worst = 0;
            std::string pair;
            for (std::size_t a = 0; a < events.size(); ++a) {
                for (std::size_t b = a + 1; b < events.size(); ++b) {
                    const double p = sim::event_probability(
                        post, [&](std::uint64_t i) { return (*events[a])(i) && (*events[b])(i); });
                    if (p > worst || pair.empty()) {
                        worst = std::max(worst, p);
                        pair = contract.behaviors[a].name + "/" + contract.behaviors[b].name;
                    }
                }
            }
            v.measured = {worst};
            v.verdict = worst <= env.tol.eps_prob ? Verdict::Pass : Verdict::Fail;
            char buf[128];
            std::snprintf(buf, sizeof buf, "max joint probability %.12g", worst);
            v.detail = buf;
            if (!pair.empty()) v.detail += " (" + pair + ")";
        }
        out.push_back(std::move(v));
    }
    return out;
}

ClauseVerdict check_frame(const std::vector<Expr>& assigns, const QuantumState& old, const QuantumState& post,
                          const EvalEnv& env) {
    ClauseVerdict v;
    v.label = "assigns";
    v.kind = ClauseKind::AssignsFrame;
    if (!assigns.empty()) v.span = assigns.front().span;
    std::set<int> assigned;
    try {
        for (const auto& e : assigns) {
            QubitRef ref;
            if (const auto* r = e.as<QubitRef>()) {
                ref = *r;
            } else if (const auto* id = e.as<Identifier>()) {
                ref.name = id->name;
            } else {
                throw EvalError("assigns entry " + spec::to_string(e) + " is not a qubit reference");
            }
            for (int p : resolve_ref(ref, env)) assigned.insert(p);
        }
    } catch (const std::exception& err) {
        error_verdict(v, err);
        return v;
    }
    double worst = 0;
    int worst_qubit = -1;
    for (int q = 0; q < old.qubits(); ++q) {
        if (assigned.count(q)) continue;
        const sim::Density1 diff = sim::reduced_density(old, q) - sim::reduced_density(post, q);
        const double dev = diff.cwiseAbs().maxCoeff();
        if (dev > worst) {
            worst = dev;
            worst_qubit = q;
        }
    }
    v.measured = {worst};
    v.verdict = worst <= env.tol.eps_eq ? Verdict::Pass : Verdict::Fail;
    if (v.verdict == Verdict::Fail) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " changed (max density deviation %.6g)", worst);
        v.detail = post.layout().qubit_name(worst_qubit) + buf;
    } else {
        v.detail = std::to_string(old.qubits() - static_cast<int>(assigned.size())) + " unassigned qubit(s) unchanged";
    }
    return v;
}

// ---------------------------------------------------------------------------

sim::RegisterLayout module_layout(const Program& program, const Decl& decl,
                                  const std::map<std::string, double>& bindings) {
    sim::RegisterLayout layout;
    for (const auto& p : decl.params) {
        if (p.kind == ParamKind::QuantumRegister) {
            layout.add(p.name, literal_width(p, bindings));
        } else if (p.kind == ParamKind::Struct) {
            const auto* s = program.find_struct(p.type_name);
            if (!s) throw std::invalid_argument("unknown qstruct '" + p.type_name + "'");
            for (const auto& f : s->fields) layout.add(p.name + "." + f.name, static_cast<int>(f.width));
        }
    }
    return layout;
}

namespace {

struct ReturnSignal {};

class Executor {
public:
    Executor(const Program& program, const ModuleOptions& options, QuantumState state)
        : program_(program), options_(options), state_(std::move(state)) {}

    std::vector<ClauseVerdict> run_entry(const Decl& decl) {
        Scope scope;
        bind_entry(scope, decl);
        try {
            checked_invoke(decl, scope, /*entry=*/true);
        } catch (const Abort&) {
        }
        for (auto& v : verdicts_) v.input = options_.input;
        return std::move(verdicts_);
    }

    /// Runs the body alone; contracts and assertions are ignored.
    QuantumState simulate(const Decl& decl) {
        Scope scope;
        bind_entry(scope, decl);
        try {
            run_body(decl, scope, nullptr);
        } catch (const Abort&) {
            throw sim::SimulationError(verdicts_.back().detail);
        }
        return state_;
    }

private:
    void bind_entry(Scope& scope, const Decl& decl) {
        for (const auto& p : decl.params) {
            switch (p.kind) {
                case ParamKind::QuantumRegister: {
                    bind_layout_register(scope, p.name, p.name);
                    if (p.width) {
                        if (const auto* id = p.width->as<Identifier>()) {
                            scope.bind(id->name, static_cast<double>(scope.reg(p.name)->positions.size()), true);
                        }
                    }
                    break;
                }
                case ParamKind::Struct: {
                    const auto* s = program_.find_struct(p.type_name);
                    std::vector<std::string> members;
                    for (const auto& f : s->fields) {
                        members.push_back(f.name);
                        bind_layout_register(scope, p.name + "." + f.name, p.name + "." + f.name);
                    }
                    scope.bind_struct(p.name, members);
                    break;
                }
                default: {
                    const auto v = binding(options_.bindings, p.name);
                    if (!v) {
                        throw std::invalid_argument("classical parameter '" + p.name + "' of '" + decl.name +
                                                    "' needs a value (bind " + p.name + "=...)");
                    }
                    scope.bind(p.name, *v, p.kind == ParamKind::ClassicalInt);
                }
            }
        }
        bind_constants(scope, decl);
    }

    void bind_layout_register(Scope& scope, const std::string& scope_name, const std::string& layout_name) {
        const auto* r = state_.layout().find(layout_name);
        RegisterView view;
        for (int k = 0; k < r->width; ++k) view.positions.push_back(r->offset + k);
        scope.bind_register(scope_name, std::move(view));
    }

    // Rebound constants (`M_PI=...`) are visible everywhere.
    void bind_constants(Scope& scope, const Decl& decl) {
        for (const char* name : {"M_PI", "PI", "pi"}) {
            if (decl.find_param(name)) continue;
            if (const auto v = binding(options_.bindings, name)) scope.bind(name, *v, false);
        }
    }

    EvalEnv env(const Scope& scope, const QuantumState* old) const {
        EvalEnv e;
        e.here = &state_;
        e.old = old;
        e.scope = &scope;
        e.tol = options_.tolerances;
        return e;
    }

    void add(std::vector<ClauseVerdict> vs, const std::string& module) {
        for (auto& v : vs) {
            v.module = module;
            verdicts_.push_back(std::move(v));
        }
    }

    void runtime_error(const std::string& module, SourceSpan span, const std::string& what) {
        ClauseVerdict v;
        v.module = module;
        v.label = "<runtime>";
        v.kind = ClauseKind::Ensures;
        v.verdict = Verdict::Error;
        v.span = span;
        v.detail = what;
        verdicts_.push_back(std::move(v));
    }

    spec::ExpansionContext expansion(const Decl& decl, const Scope& scope, const EvalEnv& e) const {
        spec::ExpansionContext ctx;
        const Param* angle = decl.find_param("angle");
        ctx.angle_in_scope = angle && (angle->kind == ParamKind::ClassicalFloat || angle->kind == ParamKind::ClassicalInt);
        ctx.user_predicates = &decl.contract.predicates;
        ctx.width = [&scope, e](const QubitRef& r) -> std::optional<long> {
            try {
                QubitRef whole = r;
                whole.form = IndexForm::Whole;
                return static_cast<long>(resolve_ref(whole, e).size());
            } catch (const std::exception&) {
                return std::nullopt;
            }
        };
        ctx.classical = [e](const Expr& x) -> std::optional<double> {
            try {
                return eval_real(x, e);
            } catch (const std::exception&) {
                return std::nullopt;
            }
        };
        return ctx;
    }

    /// Normalizes clause lists, turning expansion failures into error verdicts.
    std::vector<NormalClause> normalize(const std::vector<Clause>& clauses, const spec::ExpansionContext& ctx,
                                        ClauseKind kind, const std::string& module, const std::string& behavior = {}) {
        std::vector<Clause> ok;
        for (const auto& c : clauses) {
            try {
                spec::normalize_clauses({c}, ctx);
                ok.push_back(c);
            } catch (const spec::ClauseError& err) {
                ClauseVerdict v;
                v.module = module;
                v.label = c.label.empty() ? spec::to_string(c.expr) : c.label;
                v.kind = kind;
                v.span = c.span;
                v.behavior = behavior;
                v.verdict = Verdict::Error;
                v.detail = err.what();
                verdicts_.push_back(std::move(v));
            }
        }
        return spec::normalize_clauses(ok, ctx);
    }

    void checked_invoke(const Decl& decl, Scope& scope, bool entry) {
        const std::string& module = decl.name;
        const Contract& contract = decl.contract;
        if (!decl.has_contract) {
            run_body(decl, scope, nullptr);
            return;
        }
        const EvalEnv pre = env(scope, nullptr);
        const auto ctx = expansion(decl, scope, pre);
        const std::size_t before = verdicts_.size();
        add(check_clauses(normalize(contract.preconditions, ctx, ClauseKind::Requires, module), ClauseKind::Requires,
                          pre),
            module);
        const bool requires_ok = std::none_of(verdicts_.begin() + static_cast<std::ptrdiff_t>(before), verdicts_.end(),
                                              [](const ClauseVerdict& v) { return v.verdict != Verdict::Pass; });
        if (!requires_ok && entry) return;

        const QuantumState old = state_;
        run_body(decl, scope, &old);
        if (!requires_ok) return;

        const EvalEnv post = env(scope, &old);
        add(check_clauses(normalize(contract.postconditions, ctx, ClauseKind::Ensures, module), ClauseKind::Ensures,
                          post),
            module);
        if (!contract.behaviors.empty()) {
            NormalContract nc;
            nc.complete_behaviors = contract.complete_behaviors;
            nc.disjoint_behaviors = contract.disjoint_behaviors;
            for (const auto& b : contract.behaviors) {
                NormalBehavior nb;
                nb.name = b.name;
                nb.span = b.span;
                for (const auto& a : b.assumes) {
                    NormalClause n;
                    n.label = a.label;
                    n.span = a.span;
                    n.expr = a.expr;
                    nb.assumes.push_back(std::move(n));
                }
                nb.ensures = normalize(b.ensures, ctx, ClauseKind::BehaviorEnsures, module, b.name);
                nc.behaviors.push_back(std::move(nb));
            }
            add(check_behaviors(nc, old, state_, post), module);
        }
        if (contract.assigns) {
            auto v = check_frame(*contract.assigns, old, state_, post);
            v.module = module;
            verdicts_.push_back(std::move(v));
        }
    }

    /// Runs a module body or a builtin gate; a runtime error is recorded and
    /// aborts the whole run.
    void run_body(const Decl& decl, Scope& scope, const QuantumState* old) {
        const std::string& name = decl.name;
        try {
            if (decl.body) {
                std::optional<QuantumState> snapshot;
                if (!old && body_has_asserts(*decl.body)) {
                    snapshot = state_;
                    old = &*snapshot;
                }
                Frame frame{&decl, old};
                try {
                    exec_block(*decl.body, scope, frame);
                } catch (const ReturnSignal&) {
                }
            } else if (const GateInfo* g = find_gate(decl.name)) {
                apply_builtin(*g, &decl, scope);
            } else {
                throw EvalError("module '" + decl.name + "' has no body");
            }
        } catch (const EvalError& err) {
            runtime_error(name, decl.span, err.what());
            throw Abort{};
        } catch (const sim::SimulationError& err) {
            runtime_error(name, decl.span, err.what());
            throw Abort{};
        }
    }

public:
    struct Abort {};

private:
    struct Frame {
        const Decl* decl;
        const QuantumState* old;  // module-entry snapshot for assertions
    };

    // -- statements -------------------------------------------------------

    void exec_block(const std::vector<Statement>& body, Scope& scope, const Frame& frame) {
        scope.push();
        try {
            for (const auto& s : body) exec(s, scope, frame);
        } catch (...) {
            scope.pop();
            throw;
        }
        scope.pop();
    }

    bool mentions_qubits(const Expr& e, const Scope& scope) const {
        bool found = false;
        std::function<void(const Expr&)> walk = [&](const Expr& x) {
            if (found) return;
            if (x.is<QubitRef>()) {
                found = true;
            } else if (const auto* id = x.as<Identifier>()) {
                found = scope.reg(id->name) != nullptr;
            } else if (const auto* u = x.as<UnaryExpr>()) {
                walk(*u->operand);
            } else if (const auto* b = x.as<BinaryExpr>()) {
                walk(*b->lhs);
                walk(*b->rhs);
            }
        };
        walk(e);
        return found;
    }

    void exec(const Statement& s, Scope& scope, const Frame& frame) {
        const EvalEnv e = env(scope, frame.old);
        if (const auto* d = s.as<VarDecl>()) {
            scope.bind(d->name, d->init ? eval_real(*d->init, e) : 0.0, d->type == ScalarType::Int);
        } else if (const auto* q = s.as<QuantumDecl>()) {
            allocate(*q, scope, e);
        } else if (const auto* a = s.as<AssignStmt>()) {
            const auto* var = scope.var(a->target);
            if (!var) throw EvalError("assignment to unbound '" + a->target + "'");
            double v = var->value;
            switch (a->op) {
                case AssignOp::Set: v = eval_real(*a->value, e); break;
                case AssignOp::Add: v += eval_real(*a->value, e); break;
                case AssignOp::Sub: v -= eval_real(*a->value, e); break;
                case AssignOp::Increment: v += 1; break;
                case AssignOp::Decrement: v -= 1; break;
            }
            scope.assign(a->target, v);
        } else if (const auto* f = s.as<ForStmt>()) {
            scope.push();
            try {
                for (const auto& i : f->init) exec(i, scope, frame);
                long steps = 0;
                while (!f->cond || eval_bool(*f->cond, env(scope, frame.old))) {
                    if (++steps > kMaxLoopSteps) throw EvalError("loop does not terminate");
                    exec_block(f->body, scope, frame);
                    for (const auto& st : f->step) exec(st, scope, frame);
                }
            } catch (...) {
                scope.pop();
                throw;
            }
            scope.pop();
        } else if (const auto* i = s.as<IfStmt>()) {
            if (mentions_qubits(i->cond, scope)) {
                quantum_if(*i, scope, frame);
            } else if (eval_bool(i->cond, e)) {
                exec_block(i->then_body, scope, frame);
            } else {
                exec_block(i->else_body, scope, frame);
            }
        } else if (const auto* as = s.as<AssertStmt>()) {
            const auto ctx = expansion(*frame.decl, scope, e);
            add(check_clauses(normalize(as->clauses, ctx, ClauseKind::Assert, frame.decl->name), ClauseKind::Assert, e),
                frame.decl->name);
        } else if (s.as<ReturnStmt>()) {
            throw ReturnSignal{};
        } else if (const auto* c = s.as<CallStmt>()) {
            call(*c, scope, s.span);
        } else {
            throw EvalError("statement not supported in module bodies");
        }
    }

    void allocate(const QuantumDecl& q, Scope& scope, const EvalEnv& e) {
        auto add_register = [&](const std::string& local, int width) {
            const std::string global = local + "#" + std::to_string(++allocations_);
            sim::RegisterLayout layout = state_.layout();
            const int offset = layout.add(global, width);
            // new qubits start in |0>, above every existing position
            sim::Amplitudes amps = sim::Amplitudes::Zero(static_cast<Eigen::Index>(std::uint64_t{1} << layout.size()));
            amps.head(state_.amplitudes().size()) = state_.amplitudes();
            state_ = QuantumState(std::move(layout), std::move(amps));
            RegisterView view;
            for (int k = 0; k < width; ++k) view.positions.push_back(offset + k);
            scope.bind_register(local, std::move(view));
        };
        if (q.type_name == "qreg" || q.type_name == "qbit") {
            const double w = q.width ? eval_real(*q.width, e) : 1.0;
            if (w < 1 || std::floor(w) != w) throw EvalError("register '" + q.name + "' needs a positive width");
            add_register(q.name, static_cast<int>(w));
            return;
        }
        const auto* s = program_.find_struct(q.type_name);
        if (!s) throw EvalError("unknown type '" + q.type_name + "'");
        std::vector<std::string> members;
        for (const auto& f : s->fields) {
            members.push_back(f.name);
            add_register(q.name + "." + f.name, static_cast<int>(f.width));
        }
        scope.bind_struct(q.name, members);
    }

    void quantum_if(const IfStmt& i, Scope& scope, const Frame& frame) {
        const EvalEnv e = env(scope, frame.old);
        std::vector<sim::CircuitStep> steps;
        try {
            steps = sim::compile_quantum_conditional(i, /*restore_controls=*/true);
        } catch (const sim::CompileError& err) {
            throw EvalError(err.what());
        }
        for (const auto& step : steps) {
            if (step.kind == sim::CircuitStep::Kind::Flip) {
                const auto pos = resolve_ref(step.qubit, e);
                sim::apply_gate(state_, GateId::X, pos, {}, controls_);
                continue;
            }
            const std::size_t mark = controls_.size();
            for (const auto& c : step.controls) {
                for (int p : resolve_ref(c, e)) controls_.push_back(p);
            }
            try {
                call(step.call, scope, {});
            } catch (...) {
                controls_.resize(mark);
                throw;
            }
            controls_.resize(mark);
        }
    }

    // -- calls --------------------------------------------------------------

    std::vector<int> qubit_arg(const Expr& arg, const EvalEnv& e) {
        if (const auto* r = arg.as<QubitRef>()) return resolve_ref(*r, e);
        if (const auto* id = arg.as<Identifier>()) {
            QubitRef r;
            r.name = id->name;
            return resolve_ref(r, e);
        }
        throw EvalError("expected a qubit argument, got " + spec::to_string(arg));
    }

    void call(const CallStmt& c, Scope& caller, SourceSpan span) {
        (void)span;
        const Decl* decl = program_.find_decl(c.callee);
        const GateInfo* gate = find_gate(c.callee);
        if (!decl && !gate) throw EvalError("unknown gate or module '" + c.callee + "'");
        const EvalEnv e = env(caller, nullptr);
        if (!decl) {
            // builtin called directly: default role order
            const auto wires_params = builtin_args(*gate, c.args, e);
            sim::apply_gate(state_, gate->id, wires_params.first, wires_params.second, controls_);
            return;
        }
        if (c.args.size() != decl->params.size()) {
            throw EvalError("call to '" + c.callee + "' passes " + std::to_string(c.args.size()) +
                            " argument(s), expected " + std::to_string(decl->params.size()));
        }
        Scope callee;
        for (std::size_t k = 0; k < decl->params.size(); ++k) {
            const Param& p = decl->params[k];
            const Expr& arg = c.args[k];
            switch (p.kind) {
                case ParamKind::QuantumRegister: {
                    RegisterView view{qubit_arg(arg, e)};
                    const long got = static_cast<long>(view.positions.size());
                    if (!p.bracketed && got != 1) throw EvalError("'" + p.name + "' takes one qubit");
                    if (p.width) {
                        if (const auto* n = p.width->as<NumberLit>()) {
                            if (static_cast<long>(n->value) != got) {
                                throw EvalError("argument for " + p.name + "[" + n->text + "] has " +
                                                std::to_string(got) + " qubit(s)");
                            }
                        } else if (const auto* id = p.width->as<Identifier>()) {
                            callee.bind(id->name, static_cast<double>(got), true);
                        }
                    }
                    callee.bind_register(p.name, std::move(view));
                    break;
                }
                case ParamKind::Struct: {
                    const auto* id = arg.as<Identifier>();
                    const auto* members = id ? caller.struct_members(id->name) : nullptr;
                    if (!members) throw EvalError("argument for '" + p.name + "' must be a " + p.type_name);
                    for (const auto& m : *members) callee.bind_register(p.name + "." + m, *caller.reg(id->name + "." + m));
                    callee.bind_struct(p.name, *members);
                    break;
                }
                default: callee.bind(p.name, eval_real(arg, e), p.kind == ParamKind::ClassicalInt);
            }
        }
        bind_constants(callee, *decl);
        if (++depth_ > kMaxDepth) throw EvalError("recursion deeper than " + std::to_string(kMaxDepth));
        try {
            if (options_.check_gates && decl->has_contract && controls_.empty()) {
                checked_invoke(*decl, callee, false);
            } else if (decl->body) {
                std::optional<QuantumState> snapshot;
                if (body_has_asserts(*decl->body)) snapshot = state_;
                Frame frame{decl, snapshot ? &*snapshot : nullptr};
                try {
                    exec_block(*decl->body, callee, frame);
                } catch (const ReturnSignal&) {
                }
            } else if (gate) {
                apply_builtin(*gate, decl, callee);
            } else {
                throw EvalError("module '" + decl->name + "' has no body");
            }
        } catch (...) {
            --depth_;
            throw;
        }
        --depth_;
    }

    std::pair<std::vector<int>, std::vector<double>> builtin_args(const GateInfo& g, const std::vector<Expr>& args,
                                                                  const EvalEnv& e) {
        if (static_cast<int>(args.size()) != g.qubits + g.params) {
            throw EvalError("call to '" + std::string(g.name) + "' passes " + std::to_string(args.size()) +
                            " argument(s), expected " + std::to_string(g.qubits + g.params));
        }
        std::vector<int> wires;
        std::vector<double> params;
        for (int k = 0; k < g.qubits; ++k) {
            const auto pos = qubit_arg(args[static_cast<std::size_t>(k)], e);
            if (pos.size() != 1) throw EvalError(std::string(g.name) + " takes single qubits");
            wires.push_back(pos.front());
        }
        for (std::size_t k = static_cast<std::size_t>(g.qubits); k < args.size(); ++k) {
            params.push_back(eval_real(args[k], e));
        }
        return {wires, params};
    }

    /// Gate prototype: map parameters to roles by name when every quantum
    /// parameter is a role name, else positionally.
    void apply_builtin(const GateInfo& g, const Decl* decl, const Scope& scope) {
        std::vector<const Param*> quantum;
        std::vector<double> params;
        for (const auto& p : decl->params) {
            if (p.kind == ParamKind::QuantumRegister) {
                quantum.push_back(&p);
            } else if (p.kind != ParamKind::Struct) {
                params.push_back(scope.var(p.name)->value);
            }
        }
        if (static_cast<int>(quantum.size()) != g.qubits || static_cast<int>(params.size()) != g.params) {
            throw EvalError("declaration of '" + decl->name + "' does not match the builtin gate's signature");
        }
        std::vector<const Param*> ordered(quantum.size(), nullptr);
        bool by_name = true;
        for (const Param* p : quantum) {
            const auto it = std::find(g.roles.begin(), g.roles.begin() + g.qubits, p->name);
            if (it == g.roles.begin() + g.qubits) {
                by_name = false;
                break;
            }
            ordered[static_cast<std::size_t>(it - g.roles.begin())] = p;
        }
        if (!by_name) ordered = quantum;
        std::vector<int> wires;
        for (const Param* p : ordered) {
            const auto& pos = scope.reg(p->name)->positions;
            if (pos.size() != 1) throw EvalError(std::string(g.name) + " takes single qubits");
            wires.push_back(pos.front());
        }
        sim::apply_gate(state_, g.id, wires, params, controls_);
    }

    const Program& program_;
    const ModuleOptions& options_;
    QuantumState state_;
    std::vector<int> controls_;
    std::vector<ClauseVerdict> verdicts_;
    int depth_ = 0;
    int allocations_ = 0;
};

}  // namespace

std::vector<ClauseVerdict> check_module(const Program& program, const Decl& decl, const QuantumState& input,
                                        const ModuleOptions& options) {
    return Executor(program, options, input).run_entry(decl);
}

QuantumState simulate_module(const Program& program, const Decl& decl, const QuantumState& input,
                             const std::map<std::string, double>& bindings) {
    ModuleOptions options;
    options.bindings = bindings;
    return Executor(program, options, input).simulate(decl);
}

const Decl* default_entry(const Program& program) {
    const Decl* annotated = nullptr;
    const Decl* defined = nullptr;
    for (const Decl* d : program.decls()) {
        if (d->has_contract) annotated = d;
        if (d->body) defined = d;
    }
    return annotated ? program.find_decl(annotated->name) : defined;
}

void require_bindings(const Decl& decl, const std::map<std::string, double>& bindings) {
    for (const auto& p : decl.params) {
        if ((p.kind == ParamKind::ClassicalInt || p.kind == ParamKind::ClassicalFloat) && !bindings.count(p.name)) {
            throw std::invalid_argument("classical parameter '" + p.name + "' of '" + decl.name +
                                        "' needs a value (bind " + p.name + "=...)");
        }
    }
}

void ToleranceConfig::validate() const {
    for (const auto& [name, v] : {std::pair{"eps_eq", eps_eq}, {"eps_prob", eps_prob}, {"eps_pure", eps_pure}}) {
        if (!(v > 0 && v <= 1e-3)) {
            throw std::invalid_argument(std::string(name) + " must be in (0, 1e-3], got " + std::to_string(v));
        }
    }
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::vector<QuantumState> make_inputs(const sim::RegisterLayout& layout, const RunConfig& config) {
    if (layout.size() == 0) throw std::invalid_argument("entry module has no quantum parameters");
    if (layout.size() > sim::kMaxQubits) {
        throw std::invalid_argument("layout needs " + std::to_string(layout.size()) + " qubits, limit is " +
                                    std::to_string(sim::kMaxQubits));
    }
    const int random = config.random_count.value_or(0);
    if (random < 0) throw std::invalid_argument("random input count must be non-negative");
    std::vector<QuantumState> out;
    try {
        if (config.state) out.emplace_back(layout, *config.state);
        for (const auto& init : config.inits) out.push_back(sim::init_state(layout, init));
        if (random > 0 && !config.seed) throw std::invalid_argument("random inputs need a seed");
        const std::uint64_t seed = config.seed.value_or(0);
        for (int k = 0; k < random; ++k) {
            sim::Rng rng(splitmix(seed ^ splitmix(static_cast<std::uint64_t>(k))));
            out.push_back(sim::random_product_state(layout, rng));
        }
    } catch (const sim::SimulationError& err) {
        throw std::invalid_argument(err.what());
    }
    if (out.empty() && !config.random_count) out.push_back(sim::init_state(layout));
    return out;
}

std::map<std::string, std::string> describe(const RunConfig& config) {
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    std::map<std::string, std::string> out;
    out["entry"] = config.entry;
    out["eps_eq"] = num(config.tolerances.eps_eq);
    out["eps_prob"] = num(config.tolerances.eps_prob);
    out["eps_pure"] = num(config.tolerances.eps_pure);
    out["phase"] = std::string(spec::to_string(config.tolerances.phase));
    out["check_gates"] = config.check_gates ? "true" : "false";
    if (config.random_count) out["random"] = std::to_string(*config.random_count);
    if (config.seed) out["seed"] = std::to_string(*config.seed);
    if (config.state) out["state"] = "file";
    if (!config.inits.empty()) {
        std::string inits;
        for (const auto& init : config.inits) {
            if (!inits.empty()) inits += ";";
            std::string one;
            for (const auto& [q, bit] : init) {
                if (!one.empty()) one += ",";
                one += q.first + "[" + std::to_string(q.second) + "]=" + std::to_string(bit);
            }
            inits += one;
        }
        out["init"] = inits;
    }
    for (const auto& [name, v] : config.bindings) out["bind." + name] = num(v);
    return out;
}

CheckReport run_program(const Program& program, const std::string& program_name, const RunConfig& config) {
    config.tolerances.validate();
    const Decl* decl = nullptr;
    if (config.entry.empty()) {
        decl = default_entry(program);
        if (!decl) throw std::invalid_argument("no module to check; pass an entry name");
    } else {
        decl = program.find_decl(config.entry);
        if (!decl) throw std::invalid_argument("no module named '" + config.entry + "'");
    }
    require_bindings(*decl, config.bindings);
    const sim::RegisterLayout layout = module_layout(program, *decl, config.bindings);
    const std::vector<QuantumState> inputs = make_inputs(layout, config);

    std::vector<std::vector<ClauseVerdict>> results(inputs.size());
    auto work = [&](std::size_t k) {
        ModuleOptions options{config.tolerances, config.check_gates, config.bindings, static_cast<int>(k)};
        results[k] = check_module(program, *decl, inputs[k], options);
    };
    const int jobs = std::clamp(config.jobs, 1, std::max(1, static_cast<int>(inputs.size())));
    if (jobs == 1) {
        for (std::size_t k = 0; k < inputs.size(); ++k) work(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < inputs.size(); k = next++) work(k);
            });
        }
        for (auto& t : pool) t.join();
    }

    CheckReport report;
    report.program = program_name;
    RunConfig echo = config;
    echo.entry = decl->name;
    report.config = describe(echo);
    for (auto& r : results) report.clauses.insert(report.clauses.end(), r.begin(), r.end());
    return report;
}

}  // namespace scaffml::check
