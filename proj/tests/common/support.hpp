#pragma once

#include <complex>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "scaffml/check/checker.hpp"
#include "scaffml/frontend/lint.hpp"

namespace scaffml::testing {

using C = std::complex<double>;

inline std::string source_path(const std::string& rel) { return std::string(SCAFFML_SOURCE_DIR) + "/" + rel; }

inline std::string read_text(const std::string& rel) {
    std::ifstream in(source_path(rel), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Analysis with diagnostics reported against the repository-relative path.
inline frontend::Analysis load_corpus(const std::string& rel) { return frontend::analyze(SourceFile(rel, read_text(rel))); }

inline frontend::Analysis analyze_text(const std::string& text) { return frontend::analyze(SourceFile("<test>", text)); }

inline const frontend::Decl& decl_of(const frontend::Analysis& a, const std::string& name) {
    const auto* d = a.program.find_decl(name);
    if (!d) throw std::runtime_error("no declaration " + name);
    return *d;
}

inline std::string format_all(const frontend::Analysis& a) {
    std::string out;
    for (const auto& d : a.diagnostics) out += format_diagnostic(a.file.path(), d) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Dense oracle: explicit Kronecker products, independent of the simulator's
// index arithmetic. Qubit k is bit k of the basis index.

using Dense = Eigen::MatrixXcd;

inline Dense kron(const Dense& a, const Dense& b) {
    Dense out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
}

/// Operator on n qubits applying `u` (2x2) to qubit q.
inline Dense on_qubit(const Dense& u, int q, int n) {
    Dense out = Dense::Identity(1, 1);
    for (int k = n - 1; k >= 0; --k) out = kron(out, k == q ? u : Dense::Identity(2, 2));
    return out;
}

/// |0><0| and |1><1| projectors.
inline Dense proj(int bit) {
    Dense p = Dense::Zero(2, 2);
    p(bit, bit) = 1;
    return p;
}

/// Controlled-u: identity when control reads 0, u on target when it reads 1.
inline Dense controlled_on(const Dense& u, int control, int target, int n) {
    return on_qubit(proj(0), control, n) + on_qubit(proj(1), control, n) * on_qubit(u, target, n);
}

inline Dense mat2(C a, C b, C c, C d) {
    Dense m(2, 2);
    m << a, b, c, d;
    return m;
}

inline Dense dft(int n_qubits) {
    const long n = 1L << n_qubits;
    Dense f(n, n);
    for (long j = 0; j < n; ++j) {
        for (long k = 0; k < n; ++k) f(j, k) = std::polar(1.0 / std::sqrt(double(n)), 2 * M_PI * double(j * k) / double(n));
    }
    return f;
}

inline long reverse_bits(long x, int n) {
    long r = 0;
    for (int b = 0; b < n; ++b) {
        if (x & (1L << b)) r |= 1L << (n - 1 - b);
    }
    return r;
}

inline Dense bit_reversal(int n_qubits) {
    const long n = 1L << n_qubits;
    Dense p = Dense::Zero(n, n);
    for (long x = 0; x < n; ++x) p(reverse_bits(x, n_qubits), x) = 1;
    return p;
}

/// Independent random unit qubit: normalized complex Gaussian pair.
inline std::pair<C, C> oracle_qubit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    C a(g(rng), g(rng));
    C b(g(rng), g(rng));
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    return {a / n, b / n};
}

inline Eigen::VectorXcd product_vector(const std::vector<std::pair<C, C>>& qubits) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
    for (const auto& [a, b] : qubits) {  // qubit k = bit k, so later qubits are more significant
        Eigen::VectorXcd q(2);
        q << a, b;
        v = kron(q, v);
    }
    return v;
}

/// Equal up to a global phase, fitted on the largest component of `want`.
inline bool equal_up_to_phase(const std::vector<C>& got, const std::vector<C>& want, double tol) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < want.size(); ++i) {
        if (std::abs(want[i]) > std::abs(want[k])) k = i;
    }
    C phase = 1;
    if (std::abs(want[k]) > 1e-12 && std::abs(got[k]) > 1e-12) phase = (got[k] / want[k]) / std::abs(got[k] / want[k]);
    for (std::size_t i = 0; i < want.size(); ++i) {
        if (std::abs(got[i] - phase * want[i]) > tol) return false;
    }
    return true;
}

inline std::vector<check::ClauseVerdict> only(const std::vector<check::ClauseVerdict>& vs, check::ClauseKind kind) {
    std::vector<check::ClauseVerdict> out;
    for (const auto& v : vs) {
        if (v.kind == kind) out.push_back(v);
    }
    return out;
}

inline const check::ClauseVerdict* find_verdict(const std::vector<check::ClauseVerdict>& vs, const std::string& label,
                                                const std::string& behavior = {}) {
    for (const auto& v : vs) {
        if (v.label == label && v.behavior == behavior) return &v;
    }
    return nullptr;
}

inline bool all_pass(const std::vector<check::ClauseVerdict>& vs) {
    for (const auto& v : vs) {
        if (v.verdict != check::Verdict::Pass) return false;
    }
    return !vs.empty();
}

}  // namespace scaffml::testing
