#pragma once

#include <cstdint>
#include <random>

#include "scaffml/sim/state.hpp"

namespace scaffml::sim {

/// Seeded source for reproducible random states. Uses its own uniform and
/// Box-Muller transforms so streams do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();  // [0, 1)
    double normal();
    Complex complex_normal() { return {normal(), normal()}; }
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0;
};

/// Normalized vector of i.i.d. complex Gaussians (uniform on the sphere).
Amplitudes random_amplitudes(std::uint64_t dimension, Rng& rng);
std::pair<Complex, Complex> random_qubit(Rng& rng);
QuantumState random_state(const RegisterLayout& layout, Rng& rng);
/// Each qubit independently random, so every per-qubit amplitude is defined.
QuantumState random_product_state(const RegisterLayout& layout, Rng& rng);
/// Haar-distributed unitary (QR of a Gaussian matrix with phase fix).
Eigen::MatrixXcd random_unitary(Eigen::Index dimension, Rng& rng);

}  // namespace scaffml::sim
