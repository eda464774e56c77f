#include "scaffml/vc/term.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace scaffml::vc {

Term Term::num(double value) {
    if (value == 0) value = 0;  // no negative zero
    auto n = std::make_shared<Node>();
    n->op = Op::Num;
    n->value = value;
    return Term(std::move(n));
}

Term Term::var(std::string name) {
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->name = std::move(name);
    return Term(std::move(n));
}

Term Term::truth(bool value) {
    auto n = std::make_shared<Node>();
    n->op = value ? Op::True : Op::False;
    return Term(std::move(n));
}

Term Term::make(Op op, std::vector<Term> kids) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->kids = std::move(kids);
    return Term(std::move(n));
}

Term operator+(const Term& a, const Term& b) {
    if (a.is_num() && b.is_num()) return Term::num(a.value() + b.value());
    if (a.is_num(0)) return b;
    if (b.is_num(0)) return a;
    if (b.op() == Term::Op::Neg) return a - b.kids()[0];
    return Term::make(Term::Op::Add, {a, b});
}

Term operator-(const Term& a, const Term& b) {
    if (a.is_num() && b.is_num()) return Term::num(a.value() - b.value());
    if (b.is_num(0)) return a;
    if (a.is_num(0)) return -b;
    if (b.op() == Term::Op::Neg) return a + b.kids()[0];
    return Term::make(Term::Op::Sub, {a, b});
}

Term operator*(const Term& a, const Term& b) {
    if (a.is_num() && b.is_num()) return Term::num(a.value() * b.value());
    if (a.is_num(0) || b.is_num(0)) return Term::num(0);
    if (a.is_num(1)) return b;
    if (b.is_num(1)) return a;
    if (a.is_num(-1)) return -b;
    if (b.is_num(-1)) return -a;
    if (a.op() == Term::Op::Neg) return -(a.kids()[0] * b);
    if (b.op() == Term::Op::Neg) return -(a * b.kids()[0]);
    return Term::make(Term::Op::Mul, {a, b});
}

Term operator/(const Term& a, const Term& b) {
    if (b.is_num(0)) throw std::domain_error("division by zero in a verification condition");
    if (b.is_num(1)) return a;
    if (a.is_num(0)) return Term::num(0);
    if (a.is_num() && b.is_num()) return Term::num(a.value() / b.value());
    return Term::make(Term::Op::Div, {a, b});
}

Term operator-(const Term& a) {
    if (a.is_num()) return Term::num(-a.value());
    if (a.op() == Term::Op::Neg) return a.kids()[0];
    return Term::make(Term::Op::Neg, {a});
}

Term eq(const Term& a, const Term& b) {
    if (a.is_num() && b.is_num()) return Term::truth(a.value() == b.value());
    return Term::make(Term::Op::Eq, {a, b});
}

Term conj(std::vector<Term> parts) {
    std::vector<Term> kept;
    for (auto& p : parts) {
        if (p.op() == Term::Op::False) return p;
        if (p.op() == Term::Op::True) continue;
        if (p.op() == Term::Op::And) {
            kept.insert(kept.end(), p.kids().begin(), p.kids().end());
        } else {
            kept.push_back(std::move(p));
        }
    }
    if (kept.empty()) return Term::truth(true);
    if (kept.size() == 1) return kept.front();
    return Term::make(Term::Op::And, std::move(kept));
}

Term disj(std::vector<Term> parts) {
    std::vector<Term> kept;
    for (auto& p : parts) {
        if (p.op() == Term::Op::True) return p;
        if (p.op() == Term::Op::False) continue;
        kept.push_back(std::move(p));
    }
    if (kept.empty()) return Term::truth(false);
    if (kept.size() == 1) return kept.front();
    return Term::make(Term::Op::Or, std::move(kept));
}

Term negate(const Term& t) {
    if (t.op() == Term::Op::True) return Term::truth(false);
    if (t.op() == Term::Op::False) return Term::truth(true);
    if (t.op() == Term::Op::Not) return t.kids()[0];
    return Term::make(Term::Op::Not, {t});
}

std::string smt_number(double v) {
    if (!std::isfinite(v)) throw std::domain_error("non-finite constant in a verification condition");
    const bool negative = v < 0;
    const double a = std::fabs(v);
    char buf[64];
    if (a == std::floor(a) && a < 1e15) {
        std::snprintf(buf, sizeof buf, "%.1f", a);
    } else {
        // shortest round-tripping digits, written without an exponent
        for (int prec = 1; prec < 40; ++prec) {
            std::snprintf(buf, sizeof buf, "%.*f", prec, a);
            if (std::strtod(buf, nullptr) == a) break;
        }
        std::string s(buf);
        while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
        return negative ? "(- " + s + ")" : s;
    }
    return negative ? "(- " + std::string(buf) + ")" : std::string(buf);
}

namespace {

const char* op_name(Term::Op op) {
    switch (op) {
        case Term::Op::Add: return "+";
        case Term::Op::Sub: return "-";
        case Term::Op::Mul: return "*";
        case Term::Op::Div: return "/";
        case Term::Op::Neg: return "-";
        case Term::Op::Eq: return "=";
        case Term::Op::Le: return "<=";
        case Term::Op::Lt: return "<";
        case Term::Op::Ge: return ">=";
        case Term::Op::Gt: return ">";
        case Term::Op::And: return "and";
        case Term::Op::Or: return "or";
        case Term::Op::Not: return "not";
        default: return "?";
    }
}

}  // namespace

std::string Term::smt() const {
    switch (op()) {
        case Op::Num: return smt_number(value());
        case Op::Var: return name();
        case Op::True: return "true";
        case Op::False: return "false";
        default: break;
    }
    std::string out = "(";
    out += op_name(op());
    for (const auto& k : kids()) out += " " + k.smt();
    return out + ")";
}

void Term::collect_vars(std::set<std::string>& out) const {
    if (op() == Op::Var) out.insert(name());
    for (const auto& k : kids()) k.collect_vars(out);
}

void Term::collect_vars_ordered(std::vector<std::string>& out, std::set<std::string>& seen) const {
    if (op() == Op::Var && seen.insert(name()).second) out.push_back(name());
    for (const auto& k : kids()) k.collect_vars_ordered(out, seen);
}

double Term::eval(const std::map<std::string, double>& env, double tol) const {
    auto k = [&](std::size_t i) { return kids()[i].eval(env, tol); };
    switch (op()) {
        case Op::Num: return value();
        case Op::Var: {
            const auto it = env.find(name());
            if (it == env.end()) throw std::out_of_range("no value for '" + name() + "'");
            return it->second;
        }
        case Op::True: return 1;
        case Op::False: return 0;
        case Op::Add: return k(0) + k(1);
        case Op::Sub: return k(0) - k(1);
        case Op::Mul: return k(0) * k(1);
        case Op::Div: return k(0) / k(1);
        case Op::Neg: return -k(0);
        case Op::Eq: return std::fabs(k(0) - k(1)) <= tol;
        case Op::Le: return k(0) <= k(1) + tol;
        case Op::Lt: return k(0) < k(1);
        case Op::Ge: return k(0) + tol >= k(1);
        case Op::Gt: return k(0) > k(1);
        case Op::And:
            for (std::size_t i = 0; i < kids().size(); ++i) {
                if (k(i) == 0) return 0;
            }
            return 1;
        case Op::Or:
            for (std::size_t i = 0; i < kids().size(); ++i) {
                if (k(i) != 0) return 1;
            }
            return 0;
        case Op::Not: return k(0) == 0;
    }
    return 0;
}

CTerm operator+(const CTerm& a, const CTerm& b) { return {a.re + b.re, a.im + b.im}; }
CTerm operator-(const CTerm& a, const CTerm& b) { return {a.re - b.re, a.im - b.im}; }
CTerm operator*(const CTerm& a, const CTerm& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
CTerm operator-(const CTerm& a) { return {-a.re, -a.im}; }
CTerm scale(const CTerm& a, const Term& r) { return {a.re * r, a.im * r}; }
Term norm2(const CTerm& a) { return a.re * a.re + a.im * a.im; }
CTerm real(const Term& r) { return {r, Term::num(0)}; }

}  // namespace scaffml::vc
