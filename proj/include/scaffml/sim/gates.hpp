#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "scaffml/spec/builtins.hpp"

namespace scaffml::sim {

template <typename Scalar>
using Matrix2 = Eigen::Matrix<std::complex<Scalar>, 2, 2>;
template <typename Scalar>
using Matrix4 = Eigen::Matrix<std::complex<Scalar>, 4, 4>;

using spec::GateId;

// Multi-qubit matrices index their first wire as the most significant bit:
// row/column r of a CNOT is |control target> with r = 2*control + target.

template <typename Scalar>
Matrix2<Scalar> pauli_x() {
    Matrix2<Scalar> m;
    m << 0, 1, 1, 0;
    return m;
}

template <typename Scalar>
Matrix2<Scalar> pauli_y() {
    using C = std::complex<Scalar>;
    Matrix2<Scalar> m;
    m << C(0), C(0, -1), C(0, 1), C(0);
    return m;
}

template <typename Scalar>
Matrix2<Scalar> pauli_z() {
    Matrix2<Scalar> m;
    m << 1, 0, 0, -1;
    return m;
}

template <typename Scalar>
Matrix2<Scalar> hadamard() {
    const Scalar h = Scalar(1) / std::sqrt(Scalar(2));
    Matrix2<Scalar> m;
    m << h, h, h, -h;
    return m;
}

template <typename Scalar>
Matrix2<Scalar> phase(Scalar phi) {
    Matrix2<Scalar> m;
    m << 1, 0, 0, std::polar(Scalar(1), phi);
    return m;
}

template <typename Scalar>
Matrix2<Scalar> rx(Scalar theta) {
    using C = std::complex<Scalar>;
    const Scalar c = std::cos(theta / 2);
    const Scalar s = std::sin(theta / 2);
    Matrix2<Scalar> m;
    m << C(c), C(0, -s), C(0, -s), C(c);
    return m;
}

template <typename Scalar>
Matrix2<Scalar> ry(Scalar theta) {
    const Scalar c = std::cos(theta / 2);
    const Scalar s = std::sin(theta / 2);
    Matrix2<Scalar> m;
    m << c, -s, s, c;
    return m;
}

template <typename Scalar>
Matrix2<Scalar> rz(Scalar theta) {
    Matrix2<Scalar> m;
    m << std::polar(Scalar(1), -theta / 2), 0, 0, std::polar(Scalar(1), theta / 2);
    return m;
}

template <typename Scalar>
Matrix4<Scalar> cnot() {
    Matrix4<Scalar> m = Matrix4<Scalar>::Zero();
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
    return m;
}

template <typename Scalar>
Matrix4<Scalar> swap() {
    Matrix4<Scalar> m = Matrix4<Scalar>::Zero();
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
    return m;
}

/// diag(1, 1, 1, e^{i theta}); symmetric in its two wires.
template <typename Scalar>
Matrix4<Scalar> controlled_phase(Scalar theta) {
    Matrix4<Scalar> m = Matrix4<Scalar>::Identity();
    m(3, 3) = std::polar(Scalar(1), theta);
    return m;
}

/// Block-diagonal extension of u by `controls` leading control wires.
Eigen::MatrixXcd controlled(const Eigen::MatrixXcd& u, int controls = 1);

/// Dense unitary of a builtin gate. `params` must match the gate's arity.
/// Throws SimulationError for PrepZ (not unitary) or a bad parameter count.
Eigen::MatrixXcd gate_matrix(GateId id, std::span<const double> params = {});

struct GateApplication {
    GateId id;
    std::vector<double> params;
};

/// The gate undoing `id(params)`.
GateApplication inverse_gate(GateId id, std::span<const double> params = {});

/// Phase applied by controlledRd(target, control, d).
inline double controlled_rd_angle(double d) { return M_PI / std::pow(2.0, d); }

}  // namespace scaffml::sim
