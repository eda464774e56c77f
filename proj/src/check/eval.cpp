#include "scaffml/check/eval.hpp"

#include <cmath>
#include <cstdio>

#include "scaffml/sim/errors.hpp"
#include "scaffml/spec/builtins.hpp"
#include "scaffml/spec/printer.hpp"

namespace scaffml::check {

using namespace spec;
using sim::Complex;

void Scope::bind(const std::string& name, double value, bool integer) {
    frames_.back().vars[name] = Var{integer ? spec::to_int_value(value) : value, integer};
}

bool Scope::assign(const std::string& name, double value) {
    for (auto f = frames_.rbegin(); f != frames_.rend(); ++f) {
        const auto it = f->vars.find(name);
        if (it != f->vars.end()) {
            it->second.value = it->second.integer ? spec::to_int_value(value) : value;
            return true;
        }
    }
    return false;
}

const Scope::Var* Scope::var(const std::string& name) const {
    for (auto f = frames_.rbegin(); f != frames_.rend(); ++f) {
        const auto it = f->vars.find(name);
        if (it != f->vars.end()) return &it->second;
    }
    return nullptr;
}

void Scope::bind_register(const std::string& name, RegisterView view) { frames_.back().regs[name] = std::move(view); }

const RegisterView* Scope::reg(const std::string& name) const {
    for (auto f = frames_.rbegin(); f != frames_.rend(); ++f) {
        const auto it = f->regs.find(name);
        if (it != f->regs.end()) return &it->second;
    }
    return nullptr;
}

void Scope::bind_struct(const std::string& name, std::vector<std::string> members) {
    frames_.back().structs[name] = std::move(members);
}

const std::vector<std::string>* Scope::struct_members(const std::string& name) const {
    for (auto f = frames_.rbegin(); f != frames_.rend(); ++f) {
        const auto it = f->structs.find(name);
        if (it != f->structs.end()) return &it->second;
    }
    return nullptr;
}

std::string format_complex(Complex z) {
    char buf[64];
    if (std::abs(z.imag()) < 1e-15) {
        std::snprintf(buf, sizeof buf, "%.12g", z.real());
    } else {
        std::snprintf(buf, sizeof buf, "%.12g%+.12gi", z.real(), z.imag());
    }
    return buf;
}

namespace {

bool is_integer(double v) { return std::floor(v) == v; }

const Scope& scope_of(const EvalEnv& env) {
    if (!env.scope) throw EvalError("no scope for name resolution");
    return *env.scope;
}

long index_value(const Expr& e, const EvalEnv& env) {
    const double v = eval_real(e, env);
    if (!is_integer(v)) throw EvalError("non-integer index " + spec::to_string(e));
    return static_cast<long>(v);
}

const sim::QuantumState& state_of(const EvalEnv& env) {
    if (!env.here) throw EvalError("no quantum state in this context");
    return *env.here;
}

int single_position(const QubitRef& ref, const EvalEnv& env) {
    const auto pos = resolve_ref(ref, env);
    if (pos.size() != 1) {
        throw EvalError(spec::to_string(ref) + " names " + std::to_string(pos.size()) + " qubits, expected one");
    }
    return pos.front();
}

const QubitRef* measured_ref(const Expr& e, QubitRef& storage) {
    const auto* call = e.as<CallExpr>();
    if (!call || call->name != "measZ" || call->args.size() != 1) return nullptr;
    if (const auto* r = call->args[0].as<QubitRef>()) return r;
    if (const auto* id = call->args[0].as<Identifier>()) {
        storage = QubitRef{};
        storage.name = id->name;
        return &storage;
    }
    throw EvalError("measZ needs a qubit reference");
}

double rebindable_constant(const std::string& name, const EvalEnv& env, bool& found) {
    found = true;
    if (env.scope) {
        if (const auto* v = env.scope->var(name)) return v->value;
    }
    if (name == "PI" || name == "pi" || name == "M_PI") return M_PI;
    if (name == "e") return std::exp(1.0);
    found = false;
    return 0;
}

Value eval(const Expr& e, const EvalEnv& env);

Complex number(const Expr& e, const EvalEnv& env) {
    const Value v = eval(e, env);
    if (const auto* z = std::get_if<Complex>(&v)) return *z;
    throw EvalError("expected a number, got a boolean in " + spec::to_string(e));
}

bool boolean(const Expr& e, const EvalEnv& env) {
    const Value v = eval(e, env);
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    throw EvalError("expected a boolean, got a number in " + spec::to_string(e));
}

double real_part(Complex z, const Expr& e) {
    if (std::abs(z.imag()) > 1e-12) throw EvalError("ordering comparison of a complex value in " + spec::to_string(e));
    return z.real();
}

Complex amplitude(const AmplitudeExpr& a, const EvalEnv& env) {
    const sim::QuantumState& state = state_of(env);
    const int pos = single_position(a.ref, env);
    if (pos >= state.qubits()) throw EvalError(spec::to_string(a.ref) + " does not exist in this state");
    const auto [alpha, beta] = sim::amplitude_pair(state, pos, env.tol.eps_pure);
    return a.basis == Basis::Zero ? alpha : beta;
}

Complex call(const CallExpr& c, const Expr& e, const EvalEnv& env) {
    auto arity = [&](std::size_t n) {
        if (c.args.size() != n) throw EvalError("'" + c.name + "' expects " + std::to_string(n) + " argument(s)");
    };
    if (find_predicate(c.name)) throw EvalError("predicate '" + c.name + "' must form a whole clause");
    if (c.name == "length") {
        arity(1);
        if (const auto* r = c.args[0].as<QubitRef>()) return static_cast<double>(resolve_ref(*r, env).size());
        if (const auto* id = c.args[0].as<Identifier>()) {
            QubitRef r;
            r.name = id->name;
            return static_cast<double>(resolve_ref(r, env).size());
        }
        throw EvalError("length needs a register");
    }
    if (c.name == "measZ") throw EvalError("measZ must be compared with 0 or 1");
    if (c.name == "pow" || c.name == "power") {
        arity(2);
        const Complex exponent = number(c.args[1], env);
        // pow(amplitude, 2) is |amplitude|^2
        if (c.args[0].is<AmplitudeExpr>() || c.args[0].is<OldExpr>()) {
            const Complex base = number(c.args[0], env);
            if (exponent == Complex(2)) return std::norm(base);
        }
        const Complex base = number(c.args[0], env);
        if (base.imag() == 0 && exponent.imag() == 0) return std::pow(base.real(), exponent.real());
        return std::pow(base, exponent);
    }
    arity(1);
    const Complex x = number(c.args[0], env);
    if (c.name == "sqrt") return x.imag() == 0 && x.real() >= 0 ? Complex(std::sqrt(x.real())) : std::sqrt(x);
    if (c.name == "cos") return std::cos(x);
    if (c.name == "sin") return std::sin(x);
    if (c.name == "isin") return Complex(0, 1) * std::sin(x);
    if (c.name == "exp") return std::exp(x);
    if (c.name == "abs") return std::abs(x);
    throw EvalError("unknown function '" + c.name + "' in " + spec::to_string(e));
}

bool measured_event(const Expr& e, const EvalEnv& env) {
    const auto event = compile_event(e, env);
    return sim::event_probability(state_of(env), *event) >= 1.0 - env.tol.eps_prob;
}

Value eval(const Expr& e, const EvalEnv& env) {
    return std::visit(
        [&](const auto& node) -> Value {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, NumberLit>) {
                return Complex(node.value);
            } else if constexpr (std::is_same_v<T, Identifier>) {
                if (env.scope) {
                    if (const auto* v = env.scope->var(node.name)) return Complex(v->value);
                    if (env.scope->reg(node.name)) throw EvalError("register '" + node.name + "' used as a number");
                }
                if (node.name == "i") return Complex(0, 1);
                bool found = false;
                const double c = rebindable_constant(node.name, env, found);
                if (found) return Complex(c);
                throw EvalError("unbound name '" + node.name + "'");
            } else if constexpr (std::is_same_v<T, QubitRef>) {
                throw EvalError("qubit reference " + spec::to_string(node) + " used as a value");
            } else if constexpr (std::is_same_v<T, AmplitudeExpr>) {
                return amplitude(node, env);
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                if (node.op == UnaryOp::Not) {
                    if (mentions_measurement(e)) return measured_event(e, env);
                    return !boolean(*node.operand, env);
                }
                const Complex v = number(*node.operand, env);
                return node.op == UnaryOp::Neg ? -v : v;
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                switch (node.op) {
                    case BinaryOp::And:
                    case BinaryOp::Or:
                        if (mentions_measurement(e)) return measured_event(e, env);
                        if (node.op == BinaryOp::And) return boolean(*node.lhs, env) && boolean(*node.rhs, env);
                        return boolean(*node.lhs, env) || boolean(*node.rhs, env);
                    case BinaryOp::Eq:
                    case BinaryOp::Ne: {
                        if (mentions_measurement(e)) return measured_event(e, env);
                        const Value l = eval(*node.lhs, env);
                        const Value r = eval(*node.rhs, env);
                        bool equal = false;
                        if (l.index() != r.index()) throw EvalError("comparison of a boolean with a number");
                        if (const auto* lb = std::get_if<bool>(&l)) {
                            equal = *lb == std::get<bool>(r);
                        } else {
                            equal = std::abs(std::get<Complex>(l) - std::get<Complex>(r)) <= env.tol.eps_eq;
                        }
                        return node.op == BinaryOp::Eq ? equal : !equal;
                    }
                    case BinaryOp::Lt:
                    case BinaryOp::Le:
                    case BinaryOp::Gt:
                    case BinaryOp::Ge: {
                        const double l = real_part(number(*node.lhs, env), e);
                        const double r = real_part(number(*node.rhs, env), e);
                        if (node.op == BinaryOp::Lt) return l < r;
                        if (node.op == BinaryOp::Le) return l <= r;
                        if (node.op == BinaryOp::Gt) return l > r;
                        return l >= r;
                    }
                    case BinaryOp::Pow: {
                        const Complex exponent = number(*node.rhs, env);
                        if (const auto* id = node.lhs->template as<Identifier>(); id && id->name == "e") {
                            if (!env.scope || !env.scope->var("e")) return std::exp(exponent);
                        }
                        const Complex base = number(*node.lhs, env);
                        if (base.imag() == 0 && exponent.imag() == 0 && base.real() >= 0) {
                            return std::pow(base.real(), exponent.real());
                        }
                        return std::pow(base, exponent);
                    }
                    default: break;
                }
                const Complex l = number(*node.lhs, env);
                const Complex r = number(*node.rhs, env);
                switch (node.op) {
                    case BinaryOp::Add: return l + r;
                    case BinaryOp::Sub: return l - r;
                    case BinaryOp::Mul: return l * r;
                    case BinaryOp::Div:
                        if (r == Complex(0)) throw EvalError("division by zero in " + spec::to_string(e));
                        return l / r;
                    default: break;
                }
                throw EvalError("unsupported operator in " + spec::to_string(e));
            } else if constexpr (std::is_same_v<T, CallExpr>) {
                return call(node, e, env);
            } else if constexpr (std::is_same_v<T, OldExpr>) {
                if (!env.old) throw EvalError("\\old has no snapshot here");
                if (mentions_measurement(*node.inner)) throw EvalError("\\old(measZ(...)) is not supported");
                EvalEnv old_env = env;
                old_env.here = env.old;
                old_env.old = nullptr;
                return eval(*node.inner, old_env);
            } else if constexpr (std::is_same_v<T, ValidExpr>) {
                try {
                    return !resolve_ref(node.ref, env).empty();
                } catch (const EvalError&) {
                    return false;
                } catch (const sim::SimulationError&) {
                    return false;
                }
            }
        },
        e.node);
}

}  // namespace

Value eval_expr(const Expr& expr, const EvalEnv& env) { return eval(expr, env); }
bool eval_bool(const Expr& expr, const EvalEnv& env) { return boolean(expr, env); }
Complex eval_number(const Expr& expr, const EvalEnv& env) { return number(expr, env); }
double eval_real(const Expr& expr, const EvalEnv& env) { return real_part(number(expr, env), expr); }

std::vector<int> resolve_ref(const QubitRef& ref, const EvalEnv& env) {
    const Scope& scope = scope_of(env);
    const std::string name = ref.register_name();
    const RegisterView* view = scope.reg(name);
    if (!view) {
        if (!ref.member && scope.struct_members(ref.name) && ref.form == IndexForm::Whole) {
            std::vector<int> all;
            for (const auto& m : *scope.struct_members(ref.name)) {
                const RegisterView* v = scope.reg(ref.name + "." + m);
                if (v) all.insert(all.end(), v->positions.begin(), v->positions.end());
            }
            return all;
        }
        throw EvalError("undeclared register " + name);
    }
    const auto& p = view->positions;
    const long width = static_cast<long>(p.size());
    auto at = [&](long k) {
        if (k < 0 || k >= width) {
            throw EvalError("index " + std::to_string(k) + " out of range for " + name + "[" + std::to_string(width) +
                            "]");
        }
        return p[static_cast<std::size_t>(k)];
    };
    switch (ref.form) {
        case IndexForm::Whole:
        case IndexForm::All: return p;
        case IndexForm::Element: return {at(index_value(**ref.index, env))};
        case IndexForm::Slice: {
            const long lo = index_value(**ref.index, env);
            const long hi = index_value(**ref.slice_end, env);
            std::vector<int> out;
            for (long k = lo; k <= hi; ++k) out.push_back(at(k));
            if (out.empty()) throw EvalError("empty slice " + spec::to_string(ref));
            return out;
        }
    }
    return {};
}

std::optional<sim::BasisEvent> compile_event(const Expr& expr, const EvalEnv& env) {
    if (!mentions_measurement(expr)) return std::nullopt;
    if (const auto* u = expr.as<UnaryExpr>(); u && u->op == UnaryOp::Not) {
        auto inner = *compile_event(*u->operand, env);
        return sim::BasisEvent([inner](std::uint64_t i) { return !inner(i); });
    }
    const auto* b = expr.as<BinaryExpr>();
    if (b && (b->op == BinaryOp::And || b->op == BinaryOp::Or)) {
        const auto l = compile_event(*b->lhs, env);
        const auto r = compile_event(*b->rhs, env);
        if (!l || !r) throw EvalError("mixed classical and measurement conditions in " + spec::to_string(expr));
        if (b->op == BinaryOp::And) {
            return sim::BasisEvent([l = *l, r = *r](std::uint64_t i) { return l(i) && r(i); });
        }
        return sim::BasisEvent([l = *l, r = *r](std::uint64_t i) { return l(i) || r(i); });
    }
    if (b && (b->op == BinaryOp::Eq || b->op == BinaryOp::Ne)) {
        QubitRef storage;
        const Expr* value = &*b->rhs;
        const QubitRef* ref = measured_ref(*b->lhs, storage);
        if (!ref) {
            ref = measured_ref(*b->rhs, storage);
            value = &*b->lhs;
        }
        if (ref && !mentions_measurement(*value)) {
            const double v = eval_real(*value, env);
            if (v != 0 && v != 1) throw EvalError("measZ is compared with " + spec::to_string(*value) + ", not 0 or 1");
            const int pos = single_position(*ref, env);
            const std::uint64_t mask = std::uint64_t{1} << pos;
            const bool want = (v == 1) == (b->op == BinaryOp::Eq);
            return sim::BasisEvent([mask, want](std::uint64_t i) { return ((i & mask) != 0) == want; });
        }
    }
    throw EvalError("unsupported measurement condition " + spec::to_string(expr));
}

EquationResult check_equations(const std::vector<Equation>& equations, PhaseMode set_mode, const EvalEnv& env) {
    EquationResult r;
    for (const auto& eqn : equations) {
        r.lhs.push_back(number(eqn.lhs, env));
        r.rhs.push_back(number(eqn.rhs, env));
    }
    const bool shared = env.tol.phase == PhaseMode::SharedGlobalPhase && set_mode == PhaseMode::SharedGlobalPhase &&
                        equations.size() >= 2;
    if (shared) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < r.rhs.size(); ++k) {
            if (std::abs(r.rhs[k]) > std::abs(r.rhs[best])) best = k;
        }
        const Complex cross = r.lhs[best] * std::conj(r.rhs[best]);
        if (std::abs(cross) > 1e-15) r.phase = cross / std::abs(cross);
    }
    r.pass = true;
    for (std::size_t k = 0; k < r.lhs.size(); ++k) {
        const double residual = std::abs(r.lhs[k] - r.phase * r.rhs[k]);
        r.max_residual = std::max(r.max_residual, residual);
        if (!(residual <= env.tol.eps_eq)) r.pass = false;
    }
    return r;
}

}  // namespace scaffml::check
