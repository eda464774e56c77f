#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "scaffml/check/config.hpp"
#include "scaffml/sim/state.hpp"
#include "scaffml/spec/ast.hpp"
#include "scaffml/spec/model.hpp"

namespace scaffml::check {

/// Type errors, unbound names, unsupported forms. The checker reports these
/// as error verdicts.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RegisterView {
    std::vector<int> positions;  // global positions, index order
};

/// Names visible inside one module invocation. qstruct members are stored
/// as registers named `s.member`.
class Scope {
public:
    struct Var {
        double value = 0;
        bool integer = false;
    };

    Scope() { push(); }

    void push() { frames_.emplace_back(); }
    void pop() { frames_.pop_back(); }

    void bind(const std::string& name, double value, bool integer);
    /// Assigns an existing variable (truncating ints). False if unbound.
    bool assign(const std::string& name, double value);
    const Var* var(const std::string& name) const;

    void bind_register(const std::string& name, RegisterView view);
    const RegisterView* reg(const std::string& name) const;
    void bind_struct(const std::string& name, std::vector<std::string> members);
    const std::vector<std::string>* struct_members(const std::string& name) const;

private:
    struct Frame {
        std::map<std::string, Var> vars;
        std::map<std::string, RegisterView> regs;
        std::map<std::string, std::vector<std::string>> structs;
    };
    std::vector<Frame> frames_;
};

struct EvalEnv {
    const sim::QuantumState* here = nullptr;
    const sim::QuantumState* old = nullptr;
    const Scope* scope = nullptr;
    ToleranceConfig tol;
};

using Value = std::variant<sim::Complex, bool>;

Value eval_expr(const spec::Expr& expr, const EvalEnv& env);
bool eval_bool(const spec::Expr& expr, const EvalEnv& env);
sim::Complex eval_number(const spec::Expr& expr, const EvalEnv& env);
/// Real value of a classical expression; throws if it has an imaginary part.
double eval_real(const spec::Expr& expr, const EvalEnv& env);

/// Global positions named by a reference (one for `q[i]`, all for `q`/`q[]`).
std::vector<int> resolve_ref(const spec::QubitRef& ref, const EvalEnv& env);

/// Event over basis indices for a boolean built from `measZ(q) == 0|1`,
/// `&&`, `||`, `!`. nullopt when the expression has no measurement. Throws
/// EvalError when measurements are mixed with other conditions.
std::optional<sim::BasisEvent> compile_event(const spec::Expr& expr, const EvalEnv& env);

struct EquationResult {
    bool pass = false;
    double max_residual = 0;
    sim::Complex phase{1, 0};  // factor applied to the right-hand sides
    std::vector<sim::Complex> lhs;
    std::vector<sim::Complex> rhs;
};

/// Shared-global-phase mode fits one unit factor to the largest-magnitude
/// right-hand side; a single equation, an exact set, or exact config
/// compare component-wise.
EquationResult check_equations(const std::vector<spec::Equation>& equations, PhaseMode set_mode,
                               const EvalEnv& env);

std::string format_complex(sim::Complex z);

}  // namespace scaffml::check
