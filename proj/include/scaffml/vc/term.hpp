#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace scaffml::vc {

/// Real-valued or boolean term over named real constants. Built through the
/// folding constructors below; printed as SMT-LIB2.
class Term {
public:
    enum class Op { Num, Var, Add, Sub, Mul, Div, Neg, Eq, Le, Lt, Ge, Gt, And, Or, Not, True, False };

    Term() : Term(num(0)) {}

    static Term num(double value);
    static Term var(std::string name);
    static Term truth(bool value);

    Op op() const { return node_->op; }
    bool is_num() const { return node_->op == Op::Num; }
    bool is_num(double v) const { return is_num() && node_->value == v; }
    double value() const { return node_->value; }
    const std::string& name() const { return node_->name; }
    const std::vector<Term>& kids() const { return node_->kids; }

    std::string smt() const;
    void collect_vars(std::set<std::string>& out) const;
    void collect_vars_ordered(std::vector<std::string>& out, std::set<std::string>& seen) const;

    /// Numeric value; booleans evaluate to 1/0 with `=` compared within tol.
    double eval(const std::map<std::string, double>& env, double tol = 1e-9) const;

    friend Term operator+(const Term& a, const Term& b);
    friend Term operator-(const Term& a, const Term& b);
    friend Term operator*(const Term& a, const Term& b);
    friend Term operator/(const Term& a, const Term& b);
    friend Term operator-(const Term& a);

    static Term make(Op op, std::vector<Term> kids);

private:
    struct Node {
        Op op = Op::Num;
        double value = 0;
        std::string name;
        std::vector<Term> kids;
    };
    explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

Term eq(const Term& a, const Term& b);
Term conj(std::vector<Term> parts);
Term disj(std::vector<Term> parts);
Term negate(const Term& t);

/// SMT-LIB2 decimal literal (`0.5`, `(- 2.0)`).
std::string smt_number(double v);

struct CTerm {
    Term re;
    Term im;
};

CTerm operator+(const CTerm& a, const CTerm& b);
CTerm operator-(const CTerm& a, const CTerm& b);
CTerm operator*(const CTerm& a, const CTerm& b);
CTerm operator-(const CTerm& a);
CTerm scale(const CTerm& a, const Term& r);
/// re² + im²
Term norm2(const CTerm& a);
CTerm real(const Term& r);

}  // namespace scaffml::vc
