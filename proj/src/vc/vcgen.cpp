#include "scaffml/vc/vcgen.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <memory>
#include <set>

#include "scaffml/spec/builtins.hpp"
#include "scaffml/spec/model.hpp"
#include "scaffml/spec/printer.hpp"

namespace scaffml::vc {

using frontend::Decl;
using frontend::Param;
using frontend::ParamKind;
using frontend::Program;
using namespace spec;

namespace {

constexpr int kMaxInline = 64;
using Pair = std::pair<CTerm, CTerm>;
using Matrix = std::array<CTerm, 4>;  // row-major 2x2

CTerm cnum(double re, double im = 0) { return {Term::num(re), Term::num(im)}; }

std::string sanitize(const std::string& s) {
    std::string out;
    for (char ch : s) out += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
    return out;
}

bool is_basis(const Pair& p, int bit) {
    const CTerm& on = bit ? p.second : p.first;
    const CTerm& off = bit ? p.first : p.second;
    return on.re.is_num(1) && on.im.is_num(0) && off.re.is_num(0) && off.im.is_num(0);
}

Angle add(const Angle& a, const Angle& b, double sign) {
    if (!a.symbol.empty() && !b.symbol.empty() && a.symbol != b.symbol) {
        throw Unsupported("angle mixes parameters '" + a.symbol + "' and '" + b.symbol + "'");
    }
    Angle out;
    out.symbol = a.symbol.empty() ? b.symbol : a.symbol;
    out.coeff = a.coeff + sign * b.coeff;
    out.offset = a.offset + sign * b.offset;
    if (out.coeff == 0) out.symbol.clear();
    return out;
}

bool constant(const Angle& a) { return a.symbol.empty(); }

/// Shared symbol table and auxiliary constraints for one module.
class Symbols {
public:
    Term c() {
        if (!c_used_) {
            c_used_ = true;
            Symbol s;
            s.kind = Symbol::Kind::Sqrt2Half;
            s.name = "c";
            symbols.push_back(s);
            const Term c = Term::var("c");
            side.push_back(eq(Term::num(2) * (c * c), Term::num(1)));
            side.push_back(Term::make(Term::Op::Ge, {c, Term::num(0)}));
        }
        return Term::var("c");
    }

    Term param(const std::string& name) {
        if (params_.insert(name).second) {
            Symbol s;
            s.kind = Symbol::Kind::Param;
            s.name = name;
            symbols.push_back(s);
        }
        return Term::var(name);
    }

    Term amplitude(const std::string& name, int qubit, int basis, bool imag) {
        Symbol s;
        s.kind = Symbol::Kind::Amplitude;
        s.name = name;
        s.qubit = qubit;
        s.basis = basis;
        s.imag = imag;
        symbols.push_back(s);
        return Term::var(name);
    }

    /// (cos, sin) of an angle; exact for constant multiples of pi/4.
    std::pair<Term, Term> trig(const Angle& a) {
        if (constant(a)) {
            const double k = a.offset / (M_PI / 4);
            const double r = std::round(k);
            if (std::fabs(k - r) < 1e-12) {
                const int m = static_cast<int>(((static_cast<long>(r) % 8) + 8) % 8);
                static constexpr int kCos[8] = {2, 1, 0, -1, -2, -1, 0, 1};  // 2 = one, 1 = c
                static constexpr int kSin[8] = {0, 1, 2, 1, 0, -1, -2, -1};
                auto value = [this](int v) -> Term {
                    if (v == 0) return Term::num(0);
                    if (v == 2 || v == -2) return Term::num(v / 2);
                    return v > 0 ? c() : -c();
                };
                return {value(kCos[m]), value(kSin[m])};
            }
        }
        auto it = trig_.find(a);
        if (it == trig_.end()) {
            const int n = static_cast<int>(trig_.size());
            it = trig_.emplace(a, n).first;
            for (const auto kind : {Symbol::Kind::Cos, Symbol::Kind::Sin}) {
                Symbol s;
                s.kind = kind;
                s.name = (kind == Symbol::Kind::Cos ? "cos_" : "sin_") + std::to_string(n);
                s.angle = a;
                symbols.push_back(s);
            }
            const Term cs = Term::var("cos_" + std::to_string(n));
            const Term sn = Term::var("sin_" + std::to_string(n));
            side.push_back(eq(cs * cs + sn * sn, Term::num(1)));
        }
        return {Term::var("cos_" + std::to_string(it->second)), Term::var("sin_" + std::to_string(it->second))};
    }

    CTerm cis(const Angle& a) {
        auto [cs, sn] = trig(a);
        return {cs, sn};
    }

    std::vector<Symbol> symbols;
    std::vector<Term> side;

private:
    bool c_used_ = false;
    std::set<std::string> params_;
    std::map<Angle, int> trig_;
};

struct Frame {
    std::map<std::string, std::vector<int>> regs;
    std::map<std::string, std::vector<std::string>> structs;
    std::map<std::string, Angle> classical;
};

class Executor {
public:
    Executor(const Program& program, const std::map<std::string, double>& bindings, Symbols& symbols)
        : program_(program), bindings_(bindings), sym_(symbols) {}

    std::vector<Pair> state;

    Angle angle_of(const Expr& e, const Frame& f) const {
        if (const auto* n = e.as<NumberLit>()) return {"", 0, n->value};
        if (const auto* id = e.as<Identifier>()) {
            if (const auto it = f.classical.find(id->name); it != f.classical.end()) return it->second;
            if (const auto it = bindings_.find(id->name); it != bindings_.end()) return {"", 0, it->second};
            if (id->name == "M_PI" || id->name == "PI" || id->name == "pi") return {"", 0, M_PI};
            throw Unsupported("unknown classical name '" + id->name + "'");
        }
        if (const auto* u = e.as<UnaryExpr>()) {
            Angle a = angle_of(*u->operand, f);
            if (u->op == UnaryOp::Neg) {
                a.coeff = -a.coeff;
                a.offset = -a.offset;
            } else if (u->op == UnaryOp::Not) {
                throw Unsupported("boolean used as an angle");
            }
            return a;
        }
        if (const auto* b = e.as<BinaryExpr>()) {
            const Angle l = angle_of(*b->lhs, f);
            const Angle r = angle_of(*b->rhs, f);
            switch (b->op) {
                case BinaryOp::Add: return add(l, r, 1);
                case BinaryOp::Sub: return add(l, r, -1);
                case BinaryOp::Mul:
                    if (constant(l)) return {r.symbol, r.coeff * l.offset, r.offset * l.offset};
                    if (constant(r)) return {l.symbol, l.coeff * r.offset, l.offset * r.offset};
                    throw Unsupported("product of symbolic angles");
                case BinaryOp::Div:
                    if (!constant(r) || r.offset == 0) throw Unsupported("division by a symbolic or zero value");
                    return {l.symbol, l.coeff / r.offset, l.offset / r.offset};
                case BinaryOp::Pow:
                    if (constant(l) && constant(r)) return {"", 0, std::pow(l.offset, r.offset)};
                    break;
                default: break;
            }
        }
        if (const auto* c = e.as<CallExpr>(); c && c->args.size() == 2 && (c->name == "pow" || c->name == "power")) {
            const Angle l = angle_of(c->args[0], f);
            const Angle r = angle_of(c->args[1], f);
            if (constant(l) && constant(r)) return {"", 0, std::pow(l.offset, r.offset)};
        }
        throw Unsupported("classical expression '" + spec::to_string(e) + "' is not linear in one parameter");
    }

    long constant_int(const Expr& e, const Frame& f) const {
        const Angle a = angle_of(e, f);
        if (!constant(a) || a.offset != std::floor(a.offset)) {
            throw Unsupported("index '" + spec::to_string(e) + "' is not a constant integer");
        }
        return static_cast<long>(a.offset);
    }

    std::vector<int> resolve(const QubitRef& ref, const Frame& f) const {
        const auto it = f.regs.find(ref.register_name());
        if (it == f.regs.end()) throw Unsupported("unknown register '" + ref.register_name() + "'");
        const auto& pos = it->second;
        auto at = [&](long k) {
            if (k < 0 || k >= static_cast<long>(pos.size())) {
                throw Unsupported("index " + std::to_string(k) + " out of range for " + ref.register_name());
            }
            return pos[static_cast<std::size_t>(k)];
        };
        switch (ref.form) {
            case IndexForm::Whole:
            case IndexForm::All: return pos;
            case IndexForm::Element: return {at(constant_int(**ref.index, f))};
            case IndexForm::Slice: {
                std::vector<int> out;
                const long lo = constant_int(**ref.index, f);
                const long hi = constant_int(**ref.slice_end, f);
                for (long k = lo; k <= hi; ++k) out.push_back(at(k));
                return out;
            }
        }
        return pos;
    }

    std::vector<int> qubit_arg(const Expr& arg, const Frame& f) const {
        if (const auto* r = arg.as<QubitRef>()) return resolve(*r, f);
        if (const auto* id = arg.as<Identifier>()) {
            QubitRef r;
            r.name = id->name;
            return resolve(r, f);
        }
        throw Unsupported("expected a qubit argument, got " + spec::to_string(arg));
    }

    void exec_body(const std::vector<Statement>& body, Frame& f) {
        for (std::size_t k = 0; k < body.size(); ++k) {
            const Statement& s = body[k];
            if (const auto* c = s.as<CallStmt>()) {
                call(*c, f);
            } else if (const auto* v = s.as<VarDecl>()) {
                f.classical[v->name] = v->init ? angle_of(*v->init, f) : Angle{};
            } else if (const auto* a = s.as<AssignStmt>()) {
                auto it = f.classical.find(a->target);
                if (it == f.classical.end()) throw Unsupported("assignment to unknown '" + a->target + "'");
                switch (a->op) {
                    case AssignOp::Set: it->second = angle_of(*a->value, f); break;
                    case AssignOp::Add: it->second = add(it->second, angle_of(*a->value, f), 1); break;
                    case AssignOp::Sub: it->second = add(it->second, angle_of(*a->value, f), -1); break;
                    case AssignOp::Increment: it->second.offset += 1; break;
                    case AssignOp::Decrement: it->second.offset -= 1; break;
                }
            } else if (const auto* q = s.as<QuantumDecl>()) {
                allocate(*q, f);
            } else if (s.as<AssertStmt>()) {
                skipped_asserts = true;
            } else if (s.as<ReturnStmt>()) {
                if (k + 1 != body.size()) throw Unsupported("early return");
            } else if (s.as<ForStmt>()) {
                throw Unsupported("loop");
            } else if (s.as<IfStmt>()) {
                throw Unsupported("conditional");
            } else {
                throw Unsupported("statement outside the symbolic fragment");
            }
        }
    }

    bool skipped_asserts = false;

private:
    void allocate(const QuantumDecl& q, Frame& f) {
        auto fresh = [&](const std::string& name, long width) {
            std::vector<int> pos;
            for (long k = 0; k < width; ++k) {
                pos.push_back(static_cast<int>(state.size()));
                state.push_back({cnum(1), cnum(0)});
            }
            f.regs[name] = pos;
        };
        if (q.type_name == "qreg" || q.type_name == "qbit") {
            fresh(q.name, q.width ? constant_int(*q.width, f) : 1);
            return;
        }
        const auto* s = program_.find_struct(q.type_name);
        if (!s) throw Unsupported("unknown type '" + q.type_name + "'");
        std::vector<std::string> members;
        for (const auto& field : s->fields) {
            members.push_back(field.name);
            fresh(q.name + "." + field.name, field.width);
        }
        f.structs[q.name] = members;
    }

    void call(const CallStmt& c, const Frame& caller) {
        const Decl* decl = program_.find_decl(c.callee);
        const GateInfo* gate = find_gate(c.callee);
        if (!decl && !gate) throw Unsupported("unknown gate or module '" + c.callee + "'");
        if (!decl) {
            if (static_cast<int>(c.args.size()) != gate->qubits + gate->params) {
                throw Unsupported("wrong argument count for '" + c.callee + "'");
            }
            std::vector<int> wires;
            std::vector<Angle> params;
            for (int k = 0; k < gate->qubits; ++k) {
                const auto pos = qubit_arg(c.args[static_cast<std::size_t>(k)], caller);
                if (pos.size() != 1) throw Unsupported(c.callee + " takes single qubits");
                wires.push_back(pos.front());
            }
            for (std::size_t k = static_cast<std::size_t>(gate->qubits); k < c.args.size(); ++k) {
                params.push_back(angle_of(c.args[k], caller));
            }
            apply(*gate, wires, params);
            return;
        }
        if (c.args.size() != decl->params.size()) throw Unsupported("wrong argument count for '" + c.callee + "'");
        Frame callee;
        for (std::size_t k = 0; k < decl->params.size(); ++k) {
            const Param& p = decl->params[k];
            if (p.kind == ParamKind::QuantumRegister) {
                callee.regs[p.name] = qubit_arg(c.args[k], caller);
                if (p.width) {
                    if (const auto* id = p.width->as<Identifier>()) {
                        callee.classical[id->name] = {"", 0, static_cast<double>(callee.regs[p.name].size())};
                    }
                }
            } else if (p.kind == ParamKind::Struct) {
                const auto* id = c.args[k].as<Identifier>();
                const auto it = id ? caller.structs.find(id->name) : caller.structs.end();
                if (it == caller.structs.end()) throw Unsupported("argument for '" + p.name + "' must be a qstruct");
                for (const auto& m : it->second) callee.regs[p.name + "." + m] = caller.regs.at(id->name + "." + m);
                callee.structs[p.name] = it->second;
            } else {
                callee.classical[p.name] = angle_of(c.args[k], caller);
            }
        }
        run(*decl, callee);
    }

public:
    void run(const Decl& decl, Frame& f) {
        if (++depth_ > kMaxInline) throw Unsupported("recursion");
        if (decl.body) {
            exec_body(*decl.body, f);
        } else if (const GateInfo* g = find_gate(decl.name)) {
            apply_prototype(*g, decl, f);
        } else {
            throw Unsupported("module '" + decl.name + "' has no body");
        }
        --depth_;
    }

private:
    void apply_prototype(const GateInfo& g, const Decl& decl, const Frame& f) {
        std::vector<const Param*> quantum;
        std::vector<Angle> params;
        for (const auto& p : decl.params) {
            if (p.kind == ParamKind::QuantumRegister) {
                quantum.push_back(&p);
            } else if (p.kind != ParamKind::Struct) {
                params.push_back(f.classical.at(p.name));
            }
        }
        if (static_cast<int>(quantum.size()) != g.qubits || static_cast<int>(params.size()) != g.params) {
            throw Unsupported("declaration of '" + decl.name + "' does not match the builtin gate");
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
            const auto& pos = f.regs.at(p->name);
            if (pos.size() != 1) throw Unsupported(std::string(g.name) + " takes single qubits");
            wires.push_back(pos.front());
        }
        apply(g, wires, params);
    }

    void apply1(int q, const Matrix& m) {
        auto& [a, b] = state[static_cast<std::size_t>(q)];
        const CTerm na = m[0] * a + m[1] * b;
        const CTerm nb = m[2] * a + m[3] * b;
        a = na;
        b = nb;
    }

    Matrix phase_matrix(const Angle& phi) { return {cnum(1), cnum(0), cnum(0), sym_.cis(phi)}; }

    Matrix matrix(GateId id, const std::vector<Angle>& p) {
        const CTerm zero = cnum(0);
        const CTerm one = cnum(1);
        auto half = [&](const Angle& a) { return Angle{a.symbol, a.coeff / 2, a.offset / 2}; };
        switch (id) {
            case GateId::X: return {zero, one, one, zero};
            case GateId::Y: return {zero, cnum(0, -1), cnum(0, 1), zero};
            case GateId::Z: return {one, zero, zero, cnum(-1)};
            case GateId::H: {
                const CTerm c = real(sym_.c());
                return {c, c, c, -c};
            }
            case GateId::S: return phase_matrix({"", 0, M_PI / 2});
            case GateId::Sdag: return phase_matrix({"", 0, -M_PI / 2});
            case GateId::T: return phase_matrix({"", 0, M_PI / 4});
            case GateId::Tdag: return phase_matrix({"", 0, -M_PI / 4});
            case GateId::Phase: return phase_matrix(p[0]);
            case GateId::Rx: {
                const auto [cs, sn] = sym_.trig(half(p[0]));
                const CTerm off{Term::num(0), -sn};
                return {real(cs), off, off, real(cs)};
            }
            case GateId::Ry: {
                const auto [cs, sn] = sym_.trig(half(p[0]));
                return {real(cs), real(-sn), real(sn), real(cs)};
            }
            case GateId::Rz: {
                const auto [cs, sn] = sym_.trig(half(p[0]));
                return {CTerm{cs, -sn}, zero, zero, CTerm{cs, sn}};
            }
            default: break;
        }
        throw Unsupported("gate has no single-qubit matrix");
    }

    /// Control must be a known basis state; returns whether it reads 1.
    bool control_bit(int q, const char* gate) const {
        const Pair& p = state[static_cast<std::size_t>(q)];
        if (is_basis(p, 0)) return false;
        if (is_basis(p, 1)) return true;
        throw Unsupported(std::string("entangling gate ") + gate + ": control is not symbolically classical");
    }

    void apply(const GateInfo& g, const std::vector<int>& w, const std::vector<Angle>& p) {
        switch (g.id) {
            case GateId::CNOT:
                if (control_bit(w[0], "CNOT")) apply1(w[1], matrix(GateId::X, {}));
                return;
            case GateId::Toffoli:
                if (control_bit(w[0], "Toffoli") & control_bit(w[1], "Toffoli")) apply1(w[2], matrix(GateId::X, {}));
                return;
            case GateId::SWAP:
                std::swap(state[static_cast<std::size_t>(w[0])], state[static_cast<std::size_t>(w[1])]);
                return;
            case GateId::ControlledRz:
                if (control_bit(w[1], "controlledRz")) apply1(w[0], phase_matrix(p[0]));
                return;
            case GateId::ControlledRd: {
                if (!constant(p[0])) throw Unsupported("controlledRd needs a constant d");
                if (control_bit(w[1], "controlledRd")) {
                    apply1(w[0], phase_matrix({"", 0, M_PI / std::pow(2.0, p[0].offset)}));
                }
                return;
            }
            case GateId::PrepZ: {
                if (!constant(p[0]) || (p[0].offset != 0 && p[0].offset != 1)) {
                    throw Unsupported("PrepZ needs a constant basis bit");
                }
                const bool bit = p[0].offset == 1;
                state[static_cast<std::size_t>(w[0])] = {cnum(bit ? 0 : 1), cnum(bit ? 1 : 0)};
                return;
            }
            default: apply1(w[0], matrix(g.id, p));
        }
    }

    const Program& program_;
    const std::map<std::string, double>& bindings_;
    Symbols& sym_;
    int depth_ = 0;
};

int literal_width(const Param& p, const std::map<std::string, double>& bindings) {
    if (!p.bracketed) return 1;
    if (const auto* n = p.width->as<NumberLit>()) return static_cast<int>(n->value);
    if (const auto* id = p.width->as<Identifier>()) {
        if (const auto it = bindings.find(id->name); it != bindings.end()) return static_cast<int>(it->second);
        throw Unsupported("register width '" + id->name + "' needs a value");
    }
    throw Unsupported("unsupported width for '" + p.name + "'");
}

struct Entry {
    Frame frame;
    SymbolicState state;
};

Entry prepare(const Program& program, const Decl& decl, const std::map<std::string, double>& bindings,
              Symbols& sym) {
    Entry e;
    auto add_register = [&](const std::string& name, int width) {
        const int offset = e.state.layout.add(name, width);
        std::vector<int> pos;
        for (int k = 0; k < width; ++k) {
            const int q = offset + k;
            pos.push_back(q);
            const std::string stem = sanitize(name) + "_" + std::to_string(k) + "_";
            auto component = [&](const char* ab, int basis) {
                return CTerm{sym.amplitude(stem + ab + "_re", q, basis, false),
                             sym.amplitude(stem + ab + "_im", q, basis, true)};
            };
            const CTerm a = component("a", 0);
            const CTerm b = component("b", 1);
            e.state.input.push_back({a, b});
        }
        e.frame.regs[name] = pos;
    };
    for (const auto& p : decl.params) {
        switch (p.kind) {
            case ParamKind::QuantumRegister:
                add_register(p.name, literal_width(p, bindings));
                if (p.width) {
                    if (const auto* id = p.width->as<Identifier>()) {
                        e.frame.classical[id->name] = {"", 0, static_cast<double>(e.frame.regs[p.name].size())};
                    }
                }
                break;
            case ParamKind::Struct: {
                const auto* s = program.find_struct(p.type_name);
                if (!s) throw Unsupported("unknown qstruct '" + p.type_name + "'");
                std::vector<std::string> members;
                for (const auto& f : s->fields) {
                    members.push_back(f.name);
                    add_register(p.name + "." + f.name, static_cast<int>(f.width));
                }
                e.frame.structs[p.name] = members;
                break;
            }
            default:
                if (const auto it = bindings.find(p.name); it != bindings.end()) {
                    e.frame.classical[p.name] = {"", 0, it->second};
                } else {
                    e.frame.classical[p.name] = {p.name, 1, 0};
                }
        }
    }
    if (e.state.layout.size() == 0) throw Unsupported("module has no quantum parameters");
    return e;
}

/// Spec expressions over the symbolic post state (Here) and inputs (Old).
class Translator {
public:
    Translator(const Executor& exec, const Frame& frame, const SymbolicState& st, Symbols& sym,
               const std::map<std::string, double>& bindings)
        : exec_(exec), frame_(frame), st_(st), sym_(sym), bindings_(bindings) {}

    CTerm value(const Expr& e, bool old) {
        if (const auto* n = e.as<NumberLit>()) return cnum(n->value);
        if (const auto* id = e.as<Identifier>()) return ident(id->name);
        if (const auto* a = e.as<AmplitudeExpr>()) {
            const auto pos = exec_.resolve(a->ref, frame_);
            if (pos.size() != 1) throw Unsupported("amplitude of a multi-qubit reference");
            const auto& pair = old ? st_.input.at(static_cast<std::size_t>(pos[0]))
                                   : exec_.state.at(static_cast<std::size_t>(pos[0]));
            return a->basis == Basis::Zero ? pair.first : pair.second;
        }
        if (const auto* o = e.as<OldExpr>()) return value(*o->inner, true);
        if (const auto* u = e.as<UnaryExpr>()) {
            if (u->op == UnaryOp::Not) throw Unsupported("boolean used as a number");
            const CTerm v = value(*u->operand, old);
            return u->op == UnaryOp::Neg ? -v : v;
        }
        if (const auto* b = e.as<BinaryExpr>()) {
            switch (b->op) {
                case BinaryOp::Add: return value(*b->lhs, old) + value(*b->rhs, old);
                case BinaryOp::Sub: return value(*b->lhs, old) - value(*b->rhs, old);
                case BinaryOp::Mul: return value(*b->lhs, old) * value(*b->rhs, old);
                case BinaryOp::Div: {
                    const CTerm d = value(*b->rhs, old);
                    if (!d.im.is_num(0)) throw Unsupported("division by a complex value");
                    const CTerm n = value(*b->lhs, old);
                    return {n.re / d.re, n.im / d.re};
                }
                case BinaryOp::Pow: {
                    const auto* base = b->lhs->as<Identifier>();
                    if (base && base->name == "e" && !rebound("e")) return exp_i(*b->rhs);
                    return power(value(*b->lhs, old), *b->rhs);
                }
                default: throw Unsupported("boolean used as a number");
            }
        }
        if (const auto* c = e.as<CallExpr>()) return call(*c, old);
        throw Unsupported("expression '" + spec::to_string(e) + "' outside the symbolic fragment");
    }

    Term truth(const Expr& e, bool old) {
        if (e.is<ValidExpr>()) return Term::truth(true);
        if (const auto* u = e.as<UnaryExpr>(); u && u->op == UnaryOp::Not) return negate(truth(*u->operand, old));
        if (const auto* o = e.as<OldExpr>()) return truth(*o->inner, true);
        if (const auto* b = e.as<BinaryExpr>()) {
            switch (b->op) {
                case BinaryOp::And: return conj({truth(*b->lhs, old), truth(*b->rhs, old)});
                case BinaryOp::Or: return disj({truth(*b->lhs, old), truth(*b->rhs, old)});
                case BinaryOp::Eq:
                case BinaryOp::Ne: {
                    const CTerm l = value(*b->lhs, old);
                    const CTerm r = value(*b->rhs, old);
                    const Term same = conj({eq(l.re, r.re), eq(l.im, r.im)});
                    return b->op == BinaryOp::Eq ? same : negate(same);
                }
                case BinaryOp::Lt:
                case BinaryOp::Le:
                case BinaryOp::Gt:
                case BinaryOp::Ge: {
                    const CTerm l = value(*b->lhs, old);
                    const CTerm r = value(*b->rhs, old);
                    if (!l.im.is_num(0) || !r.im.is_num(0)) throw Unsupported("ordering of complex values");
                    const Term::Op op = b->op == BinaryOp::Lt   ? Term::Op::Lt
                                        : b->op == BinaryOp::Le ? Term::Op::Le
                                        : b->op == BinaryOp::Gt ? Term::Op::Gt
                                                                : Term::Op::Ge;
                    if (l.re.is_num() && r.re.is_num()) {
                        const double x = l.re.value();
                        const double y = r.re.value();
                        return Term::truth(op == Term::Op::Lt   ? x < y
                                           : op == Term::Op::Le ? x <= y
                                           : op == Term::Op::Gt ? x > y
                                                                : x >= y);
                    }
                    return Term::make(op, {l.re, r.re});
                }
                default: break;
            }
        }
        if (const auto* c = e.as<CallExpr>(); c && c->name == "measZ") throw Unsupported("measurement");
        const CTerm v = value(e, old);
        return negate(conj({eq(v.re, Term::num(0)), eq(v.im, Term::num(0))}));
    }

    Angle angle(const Expr& e) {
        Frame f = frame_;
        for (const auto& [name, a] : frame_.classical) {
            if (!constant(a)) sym_.param(name);  // keep parameter symbols registered
            f.classical[name] = a;
        }
        return exec_.angle_of(e, f);
    }

private:
    bool rebound(const std::string& name) const {
        return frame_.classical.count(name) || bindings_.count(name);
    }

    CTerm ident(const std::string& name) {
        if (name == "i" && !rebound("i")) return cnum(0, 1);
        if (const auto it = frame_.classical.find(name); it != frame_.classical.end()) {
            const Angle& a = it->second;
            if (constant(a)) return cnum(a.offset);
            return real(Term::num(a.coeff) * sym_.param(a.symbol) + Term::num(a.offset));
        }
        if (const auto it = bindings_.find(name); it != bindings_.end()) return cnum(it->second);
        if (name == "M_PI" || name == "PI" || name == "pi") return cnum(M_PI);
        if (name == "e") return cnum(std::exp(1.0));
        throw Unsupported("unknown name '" + name + "'");
    }

    /// e^(i*x) for a real angle x.
    CTerm exp_i(const Expr& exponent) {
        const auto* b = exponent.as<BinaryExpr>();
        if (b && b->op == BinaryOp::Mul) {
            const auto* l = b->lhs->as<Identifier>();
            const auto* r = b->rhs->as<Identifier>();
            if (l && l->name == "i") return sym_.cis(angle(*b->rhs));
            if (r && r->name == "i") return sym_.cis(angle(*b->lhs));
        }
        throw Unsupported("exponential of a non-imaginary argument");
    }

    CTerm power(const CTerm& base, const Expr& exponent) {
        const Angle n = angle(exponent);
        if (!constant(n) || n.offset < 0 || n.offset != std::floor(n.offset) || n.offset > 16) {
            throw Unsupported("non-integer power");
        }
        CTerm out = cnum(1);
        for (int k = 0; k < static_cast<int>(n.offset); ++k) out = out * base;
        return out;
    }

    CTerm call(const CallExpr& c, bool old) {
        auto arg = [&](std::size_t k) -> const Expr& {
            if (k >= c.args.size()) throw Unsupported("missing argument to '" + c.name + "'");
            return c.args[k];
        };
        if (c.name == "sqrt") {
            const CTerm v = value(arg(0), old);
            if (!v.re.is_num() || !v.im.is_num(0)) throw Unsupported("sqrt of a symbolic value");
            const double x = v.re.value();
            if (x == 0.5) return real(sym_.c());
            if (x == 2) return real(Term::num(2) * sym_.c());
            const double r = std::sqrt(x);
            if (r == std::floor(r)) return cnum(r);
            throw Unsupported("sqrt of a non-square constant");
        }
        if (c.name == "cos") return real(sym_.trig(angle(arg(0))).first);
        if (c.name == "sin") return real(sym_.trig(angle(arg(0))).second);
        if (c.name == "isin") return {Term::num(0), sym_.trig(angle(arg(0))).second};
        if (c.name == "exp") {
            const auto* b = arg(0).as<BinaryExpr>();
            if (b) return exp_i(arg(0));
            throw Unsupported("exponential of a non-imaginary argument");
        }
        if (c.name == "pow" || c.name == "power") {
            // pow(amplitude, 2) reads as |amplitude|^2
            if (arg(0).is<AmplitudeExpr>() || (arg(0).is<OldExpr>() && arg(0).as<OldExpr>()->inner->is<AmplitudeExpr>())) {
                const Angle n = angle(arg(1));
                if (constant(n) && n.offset == 2) return real(norm2(value(arg(0), old)));
            }
            return power(value(arg(0), old), arg(1));
        }
        if (c.name == "length") {
            const auto* r = arg(0).as<QubitRef>();
            QubitRef ref;
            if (r) {
                ref = *r;
            } else if (const auto* id = arg(0).as<Identifier>()) {
                ref.name = id->name;
            } else {
                throw Unsupported("length of a non-register");
            }
            ref.form = IndexForm::Whole;
            return cnum(static_cast<double>(exec_.resolve(ref, frame_).size()));
        }
        if (c.name == "measZ") throw Unsupported("measurement");
        throw Unsupported("call to '" + c.name + "' outside the symbolic fragment");
    }

    const Executor& exec_;
    const Frame& frame_;
    const SymbolicState& st_;
    Symbols& sym_;
    const std::map<std::string, double>& bindings_;
};

struct Run {
    Symbols sym;
    Entry entry;
    std::unique_ptr<Executor> exec;
};

std::unique_ptr<Run> execute(const Program& program, const Decl& decl, const std::map<std::string, double>& bindings) {
    auto run = std::make_unique<Run>();
    run->entry = prepare(program, decl, bindings, run->sym);
    run->exec = std::make_unique<Executor>(program, bindings, run->sym);
    run->exec->state = run->entry.state.input;
    Frame frame = run->entry.frame;
    run->exec->run(decl, frame);
    return run;
}

ExpansionContext expansion_context(const Decl& decl, const Executor& exec, const Frame& frame,
                                   const std::map<std::string, double>& bindings) {
    ExpansionContext ctx;
    const Param* angle = decl.find_param("angle");
    ctx.angle_in_scope = angle && (angle->kind == ParamKind::ClassicalFloat || angle->kind == ParamKind::ClassicalInt);
    ctx.user_predicates = &decl.contract.predicates;
    ctx.width = [&exec, &frame](const QubitRef& r) -> std::optional<long> {
        try {
            QubitRef whole = r;
            whole.form = IndexForm::Whole;
            return static_cast<long>(exec.resolve(whole, frame).size());
        } catch (const Unsupported&) {
            return std::nullopt;
        }
    };
    ctx.classical = [&exec, &frame, &bindings](const Expr& x) -> std::optional<double> {
        (void)bindings;
        try {
            const Angle a = exec.angle_of(x, frame);
            if (constant(a)) return a.offset;
        } catch (const Unsupported&) {
        }
        return std::nullopt;
    };
    return ctx;
}

}  // namespace

SymbolicState symbolic_exec(const Program& program, const Decl& decl, const std::map<std::string, double>& bindings) {
    auto run = execute(program, decl, bindings);
    SymbolicState out = run->entry.state;
    out.post.assign(run->exec->state.begin(),
                    run->exec->state.begin() + static_cast<std::ptrdiff_t>(out.input.size()));
    out.side = run->sym.side;
    out.symbols = run->sym.symbols;
    return out;
}

VcDocument generate_vc(const Program& program, const Decl& decl, const std::map<std::string, double>& bindings) {
    if (!decl.has_contract) throw Unsupported("module has no contract");
    auto run = execute(program, decl, bindings);
    const Frame& frame = run->entry.frame;
    Translator tr(*run->exec, frame, run->entry.state, run->sym, bindings);
    const ExpansionContext ctx = expansion_context(decl, *run->exec, frame, bindings);
    const Contract& contract = decl.contract;

    VcDocument doc;
    doc.module = decl.name;
    doc.comments.push_back("tool: " + std::string(kToolVersion));
    doc.comments.push_back("module: " + decl.name);

    std::vector<NormalClause> requires_clauses;
    std::vector<NormalClause> ensures_clauses;
    try {
        requires_clauses = normalize_clauses(contract.preconditions, ctx);
        ensures_clauses = normalize_clauses(contract.postconditions, ctx);
    } catch (const ClauseError& err) {
        throw Unsupported("clause '" + err.label + "': " + err.what());
    }
    auto label = [](const NormalClause& c) { return c.label.empty() ? spec::to_string(c.expr) : c.label; };
    auto clause_term = [&](const NormalClause& c) {
        if (c.form != ClauseForm::Equations) return tr.truth(c.expr, false);
        std::vector<Term> parts;
        for (const auto& e : c.equations.equations) {
            const CTerm l = tr.value(e.lhs, false);
            const CTerm r = tr.value(e.rhs, false);
            parts.push_back(eq(l.re, r.re));
            parts.push_back(eq(l.im, r.im));
        }
        return conj(std::move(parts));
    };

    for (std::size_t q = 0; q < run->entry.state.input.size(); ++q) {
        const auto& [a, b] = run->entry.state.input[q];
        doc.assumptions.emplace_back("normalization " + run->entry.state.layout.qubit_name(static_cast<int>(q)),
                                     eq(norm2(a) + norm2(b), Term::num(1)));
    }
    for (const auto& c : requires_clauses) {
        const Term t = clause_term(c);
        if (t.op() != Term::Op::True) doc.assumptions.emplace_back("requires " + label(c), t);
    }
    for (const auto& c : ensures_clauses) {
        if (mentions_measurement(c.expr)) throw Unsupported("ensures '" + label(c) + "' uses a measurement");
        doc.goals.emplace_back(label(c), clause_term(c));
    }
    if (doc.goals.empty()) throw Unsupported("module has no ensures clauses");
    // auxiliary constraints last: translation may have introduced constants
    std::vector<std::pair<std::string, Term>> side;
    for (const auto& t : run->sym.side) side.emplace_back("auxiliary", t);
    doc.assumptions.insert(doc.assumptions.begin(), side.begin(), side.end());

    std::string req_labels;
    for (const auto& c : requires_clauses) req_labels += (req_labels.empty() ? "" : ", ") + label(c);
    std::string ens_labels;
    for (const auto& [l, t] : doc.goals) ens_labels += (ens_labels.empty() ? "" : ", ") + l;
    if (!req_labels.empty()) doc.comments.push_back("requires: " + req_labels);
    doc.comments.push_back("ensures: " + ens_labels);
    for (const auto& b : contract.behaviors) doc.comments.push_back("skipped behavior: " + b.name);
    if (contract.assigns) doc.comments.push_back("skipped: assigns frame");
    if (run->exec->skipped_asserts) doc.comments.push_back("skipped: inline assertions");
    doc.comments.push_back("phase: exact (symbolic inputs carry no gauge)");

    std::set<std::string> used;
    for (const auto& [r, t] : doc.assumptions) t.collect_vars(used);
    for (const auto& [r, t] : doc.goals) t.collect_vars(used);
    for (const auto& s : run->sym.symbols) {
        if (used.count(s.name)) doc.symbols.push_back(s);
    }
    for (const auto& s : doc.symbols) {
        if (s.kind == Symbol::Kind::Cos) {
            const Angle& a = s.angle;
            char buf[128];
            if (a.symbol.empty()) {
                std::snprintf(buf, sizeof buf, "%s = cos(%.17g)", s.name.c_str(), a.offset);
            } else {
                std::snprintf(buf, sizeof buf, "%s = cos(%.17g*%s + %.17g)", s.name.c_str(), a.coeff, a.symbol.c_str(),
                              a.offset);
            }
            doc.comments.push_back(buf);
        }
    }
    return doc;
}

std::string VcDocument::to_smt2() const {
    std::string out;
    for (const auto& c : comments) out += "; " + c + "\n";
    out += "(set-logic QF_NRA)\n";
    for (const auto& s : symbols) out += "(declare-const " + s.name + " Real)\n";
    for (const auto& [reason, t] : assumptions) {
        out += "; " + reason + "\n";
        out += "(assert " + t.smt() + ")\n";
    }
    out += "; goal: some ensures clause fails\n";
    out += goals.size() == 1 ? "(assert (not" : "(assert (not (and";
    for (const auto& [label, t] : goals) out += "\n  " + t.smt() + "  ; " + label;
    out += goals.size() == 1 ? "\n))\n" : "\n)))\n";
    out += "(check-sat)\n";
    return out;
}

std::map<std::string, double> concrete_assignment(
    const VcDocument& doc, const std::vector<std::pair<std::complex<double>, std::complex<double>>>& input,
    const std::map<std::string, double>& params) {
    std::map<std::string, double> env;
    auto param = [&](const std::string& name) {
        const auto it = params.find(name);
        if (it == params.end()) throw std::out_of_range("no value for parameter '" + name + "'");
        return it->second;
    };
    for (const auto& s : doc.symbols) {
        switch (s.kind) {
            case Symbol::Kind::Amplitude: {
                const auto& pair = input.at(static_cast<std::size_t>(s.qubit));
                const std::complex<double> z = s.basis == 0 ? pair.first : pair.second;
                env[s.name] = s.imag ? z.imag() : z.real();
                break;
            }
            case Symbol::Kind::Cos:
            case Symbol::Kind::Sin: {
                const double x = s.angle.coeff * (s.angle.symbol.empty() ? 0.0 : param(s.angle.symbol)) + s.angle.offset;
                env[s.name] = s.kind == Symbol::Kind::Cos ? std::cos(x) : std::sin(x);
                break;
            }
            case Symbol::Kind::Param: env[s.name] = param(s.name); break;
            case Symbol::Kind::Sqrt2Half: env[s.name] = std::sqrt(0.5); break;
        }
    }
    return env;
}

}  // namespace scaffml::vc
