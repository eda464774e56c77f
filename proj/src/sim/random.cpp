#include "scaffml/sim/random.hpp"

#include <cmath>
#include <vector>

namespace scaffml::sim {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0;
    do {
        u1 = uniform();
    } while (u1 <= 0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2 * M_PI * u2);
    has_spare_ = true;
    return r * std::cos(2 * M_PI * u2);
}

Amplitudes random_amplitudes(std::uint64_t dimension, Rng& rng) {
    Amplitudes a(static_cast<Eigen::Index>(dimension));
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = rng.complex_normal();
    return a / a.norm();
}

std::pair<Complex, Complex> random_qubit(Rng& rng) {
    const Amplitudes a = random_amplitudes(2, rng);
    return {a(0), a(1)};
}

QuantumState random_state(const RegisterLayout& layout, Rng& rng) {
    return QuantumState(layout, random_amplitudes(std::uint64_t{1} << layout.size(), rng));
}

QuantumState random_product_state(const RegisterLayout& layout, Rng& rng) {
    std::vector<std::pair<Complex, Complex>> factors;
    for (int k = 0; k < layout.size(); ++k) factors.push_back(random_qubit(rng));
    Amplitudes a = product_amplitudes(factors);
    return QuantumState(layout, a / a.norm());
}

Eigen::MatrixXcd random_unitary(Eigen::Index dimension, Rng& rng) {
    Eigen::MatrixXcd g(dimension, dimension);
    for (Eigen::Index r = 0; r < dimension; ++r) {
        for (Eigen::Index c = 0; c < dimension; ++c) g(r, c) = rng.complex_normal();
    }
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < dimension; ++k) {
        const Complex d = r(k, k);
        if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
    }
    return q;
}

}  // namespace scaffml::sim
