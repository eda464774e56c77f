#include "scaffml/sim/control.hpp"

#include <algorithm>
#include <map>

#include "scaffml/spec/printer.hpp"

namespace scaffml::sim {

using namespace spec;

std::string to_string(const CircuitStep& step) {
    if (step.kind == CircuitStep::Kind::Flip) return "X(" + spec::to_string(step.qubit) + ")";
    std::string out(step.controls.size(), 'C');
    if (!out.empty()) out += '-';
    out += step.call.callee;
    if (!step.controls.empty()) {
        out += '{';
        for (std::size_t k = 0; k < step.controls.size(); ++k) {
            if (k) out += ',';
            out += spec::to_string(step.controls[k]);
        }
        out += '}';
    }
    out += '(';
    for (std::size_t k = 0; k < step.call.args.size(); ++k) {
        if (k) out += ", ";
        out += spec::to_string(step.call.args[k]);
    }
    return out + ')';
}

namespace {

constexpr int kMaxControls = 10;

struct Literal {
    int control;
    int value;
};

class ConditionalCompiler {
public:
    std::vector<CircuitStep> run(const IfStmt& top, bool restore) {
        std::vector<std::pair<std::vector<Literal>, const std::vector<Statement>*>> branches;
        const IfStmt* branch = &top;
        while (branch) {
            std::vector<Literal> cube;
            collect(branch->cond, cube);
            branches.emplace_back(std::move(cube), &branch->then_body);
            const IfStmt* next = nullptr;
            if (branch->has_else) {
                if (branch->else_body.size() == 1 && branch->else_body.front().as<IfStmt>()) {
                    next = branch->else_body.front().as<IfStmt>();
                } else {
                    branches.emplace_back(std::vector<Literal>{}, &branch->else_body);
                }
            }
            branch = next;
        }
        const int m = static_cast<int>(controls_.size());
        if (m > kMaxControls) throw CompileError("too many control qubits in a quantum conditional");
        for (const auto& [cube, body] : branches) check_body(*body);

        covered_.assign(std::size_t{1} << m, false);
        flipped_.assign(m, false);
        for (const auto& [cube, body] : branches) {
            std::vector<bool> wanted(covered_.size(), false);
            for (std::size_t a = 0; a < wanted.size(); ++a) wanted[a] = !covered_[a] && matches(cube, a);
            for (const auto& part : decompose(wanted)) {
                for (std::size_t a = 0; a < wanted.size(); ++a) {
                    if (matches(part, a)) covered_[a] = true;
                }
                emit(part, *body);
            }
        }
        if (restore) {
            for (int j = 0; j < m; ++j) {
                if (flipped_[j]) flip(j);
            }
        }
        return std::move(steps_);
    }

private:
    int control_id(const QubitRef& ref) {
        if (ref.form != IndexForm::Element || !(*ref.index)->is<NumberLit>()) {
            throw CompileError("control qubit " + spec::to_string(ref) + " needs a constant index");
        }
        const std::string key = spec::to_string(ref);
        const auto it = std::find(keys_.begin(), keys_.end(), key);
        if (it != keys_.end()) return static_cast<int>(it - keys_.begin());
        keys_.push_back(key);
        controls_.push_back(ref);
        return static_cast<int>(controls_.size()) - 1;
    }

    void collect(const Expr& e, std::vector<Literal>& cube) {
        const auto* b = e.as<BinaryExpr>();
        if (b && b->op == BinaryOp::And) {
            collect(*b->lhs, cube);
            collect(*b->rhs, cube);
            return;
        }
        if (b && b->op == BinaryOp::Eq) {
            const auto* ref = b->lhs->as<QubitRef>();
            const auto* value = b->rhs->as<NumberLit>();
            if (ref && value && (value->value == 0 || value->value == 1)) {
                const int id = control_id(*ref);
                const int v = static_cast<int>(value->value);
                for (const Literal& l : cube) {
                    if (l.control == id && l.value != v) {
                        // contradictory cube: never fires
                        cube.push_back({id, v});
                        return;
                    }
                }
                cube.push_back({id, v});
                return;
            }
        }
        throw CompileError("condition must be a conjunction of q[i]==0|1, got " + spec::to_string(e));
    }

    bool touches_control(const Expr& arg) const {
        std::string name;
        const QubitRef* ref = arg.as<QubitRef>();
        if (ref) {
            name = ref->register_name();
        } else if (const auto* id = arg.as<Identifier>()) {
            name = id->name;
        } else {
            return false;
        }
        for (const auto& c : controls_) {
            if (c.register_name() != name) continue;
            if (!ref || ref->form != IndexForm::Element) return true;
            if (spec::to_string(*ref) == spec::to_string(c)) return true;
            if (!(*ref->index)->is<NumberLit>()) return true;
        }
        return false;
    }

    void check_body(const std::vector<Statement>& body) {
        for (const auto& s : body) {
            const auto* call = s.as<CallStmt>();
            if (!call) throw CompileError("quantum-controlled branches may only call modules or gates");
            for (const auto& a : call->args) {
                if (touches_control(a)) throw CompileError("branch uses control qubit " + spec::to_string(a));
            }
        }
    }

    static bool matches(const std::vector<Literal>& cube, std::size_t assignment) {
        return std::all_of(cube.begin(), cube.end(), [&](const Literal& l) {
            return static_cast<int>((assignment >> l.control) & 1U) == l.value;
        });
    }

    // Covers `wanted` with disjoint cubes, largest first.
    std::vector<std::vector<Literal>> decompose(std::vector<bool> wanted) const {
        const int m = static_cast<int>(controls_.size());
        std::vector<std::vector<Literal>> cubes;
        std::size_t total = 1;
        for (int j = 0; j < m; ++j) total *= 3;
        std::vector<std::vector<Literal>> all;
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<Literal> cube;
            std::size_t c = code;
            for (int j = 0; j < m; ++j, c /= 3) {
                if (c % 3 != 2) cube.push_back({j, static_cast<int>(c % 3)});
            }
            all.push_back(std::move(cube));
        }
        std::stable_sort(all.begin(), all.end(),
                         [](const auto& a, const auto& b) { return a.size() < b.size(); });
        while (std::find(wanted.begin(), wanted.end(), true) != wanted.end()) {
            for (const auto& cube : all) {
                bool inside = true;
                for (std::size_t a = 0; a < wanted.size() && inside; ++a) {
                    if (matches(cube, a) && !wanted[a]) inside = false;
                }
                if (!inside) continue;
                for (std::size_t a = 0; a < wanted.size(); ++a) {
                    if (matches(cube, a)) wanted[a] = false;
                }
                cubes.push_back(cube);
                break;
            }
        }
        return cubes;
    }

    void flip(int j) {
        CircuitStep step;
        step.kind = CircuitStep::Kind::Flip;
        step.qubit = controls_[j];
        steps_.push_back(std::move(step));
        flipped_[j] = !flipped_[j];
    }

    void emit(const std::vector<Literal>& cube, const std::vector<Statement>& body) {
        for (int j = 0; j < static_cast<int>(controls_.size()); ++j) {
            bool want = false;
            for (const Literal& l : cube) {
                if (l.control == j) want = l.value == 0;
            }
            if (flipped_[j] != want) flip(j);
        }
        std::vector<QubitRef> ctl;
        for (const Literal& l : cube) ctl.push_back(controls_[l.control]);
        for (const auto& s : body) {
            CircuitStep step;
            step.kind = CircuitStep::Kind::Call;
            step.call = *s.as<CallStmt>();
            step.controls = ctl;
            steps_.push_back(std::move(step));
        }
    }

    std::vector<std::string> keys_;
    std::vector<QubitRef> controls_;
    std::vector<bool> covered_;
    std::vector<bool> flipped_;
    std::vector<CircuitStep> steps_;
};

}  // namespace

std::vector<CircuitStep> compile_quantum_conditional(const IfStmt& stmt, bool restore_controls) {
    return ConditionalCompiler().run(stmt, restore_controls);
}

}  // namespace scaffml::sim
