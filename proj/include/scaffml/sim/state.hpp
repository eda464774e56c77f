#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "scaffml/sim/gates.hpp"
#include "scaffml/sim/layout.hpp"

namespace scaffml::sim {

using Complex = std::complex<double>;
using Amplitudes = Eigen::VectorXcd;
using Density1 = Eigen::Matrix2cd;

inline constexpr double kNormTolerance = 1e-12;

class QuantumState {
public:
    QuantumState() = default;
    /// Throws SimulationError unless amps has 2^n entries with unit norm.
    QuantumState(RegisterLayout layout, Amplitudes amps);

    const RegisterLayout& layout() const { return layout_; }
    const Amplitudes& amplitudes() const { return amps_; }
    Amplitudes& amplitudes() { return amps_; }
    int qubits() const { return layout_.size(); }
    std::uint64_t dimension() const { return std::uint64_t{1} << layout_.size(); }

private:
    RegisterLayout layout_;
    Amplitudes amps_;
};

/// (register, index) -> basis bit.
using BasisAssignment = std::map<std::pair<std::string, long>, int>;

QuantumState init_state(const RegisterLayout& layout, const BasisAssignment& initial = {});

/// Applies u to `wires` (wires[0] is the most significant bit of u's index),
/// only on the subspace where every `controls` position is 1.
void apply_matrix(QuantumState& state, const Eigen::MatrixXcd& u, std::span<const int> wires,
                  std::span<const int> controls = {});

/// Builtin gate on global positions in the gate's default role order.
/// PrepZ resets its (unentangled) qubit to the basis bit params[0].
void apply_gate(QuantumState& state, GateId id, std::span<const int> wires, std::span<const double> params = {},
                std::span<const int> controls = {});

Density1 reduced_density(const QuantumState& state, int qubit);
double purity(const Density1& rho);

/// Canonical (alpha, beta): the dominant eigenvector of the reduced density,
/// first nonzero component real and non-negative. Throws EntangledError when
/// the purity is below 1 - eps_pure.
std::pair<Complex, Complex> amplitude_pair(const QuantumState& state, int qubit, double eps_pure = 1e-9);

double measure_prob(const QuantumState& state, int qubit, int outcome);

/// Predicate over basis indices, e.g. "qubit 0 reads 1 and qubit 2 reads 0".
using BasisEvent = std::function<bool(std::uint64_t)>;

double event_probability(const QuantumState& state, const BasisEvent& event);
/// Zeroes basis states outside the event and renormalizes. Throws
/// ZeroProbabilityError when the event has probability below eps_prob.
QuantumState project_event(const QuantumState& state, const BasisEvent& event, double eps_prob = 1e-12);
QuantumState project(const QuantumState& state, int qubit, int outcome, double eps_prob = 1e-12);

/// Tensor product with qubit k taking factors[k] (position k = bit k).
Amplitudes product_amplitudes(std::span<const std::pair<Complex, Complex>> factors);

/// `index  re  im` per line, 17 significant digits.
std::string dump_state(const Amplitudes& amps);
/// Inverse of dump_state; missing indices are zero. Throws SimulationError.
Amplitudes parse_state_dump(const std::string& text, std::uint64_t dimension);

}  // namespace scaffml::sim
