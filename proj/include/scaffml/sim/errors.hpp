#pragma once

#include <stdexcept>
#include <string>

namespace scaffml::sim {

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-qubit amplitudes requested for a qubit that is not in a pure state.
class EntangledError : public SimulationError {
public:
    EntangledError(std::string qubit, double purity)
        : SimulationError("qubit " + qubit + " is entangled (purity " + std::to_string(purity) + ")"),
          qubit(std::move(qubit)),
          purity(purity) {}
    std::string qubit;
    double purity;
};

class ZeroProbabilityError : public SimulationError {
public:
    ZeroProbabilityError(const std::string& what, double probability)
        : SimulationError(what), probability(probability) {}
    double probability;
};

}  // namespace scaffml::sim
