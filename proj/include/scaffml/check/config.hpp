#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scaffml/sim/state.hpp"
#include "scaffml/spec/model.hpp"

namespace scaffml::check {

using spec::PhaseMode;

struct ToleranceConfig {
    double eps_eq = 1e-9;
    double eps_prob = 1e-9;
    double eps_pure = 1e-9;
    PhaseMode phase = PhaseMode::SharedGlobalPhase;

    /// Throws std::invalid_argument unless every tolerance is in (0, 1e-3].
    void validate() const;
};

struct RunConfig {
    std::string entry;
    /// Explicit basis-state inputs; empty means one all-zero input unless a
    /// state file or random inputs are given.
    std::vector<sim::BasisAssignment> inits;
    std::optional<sim::Amplitudes> state;
    /// Set (even to zero) means exactly that many random inputs and no default.
    std::optional<int> random_count;
    std::optional<std::uint64_t> seed;
    /// Values for classical parameters, symbolic register widths, and
    /// rebindable constants such as M_PI.
    std::map<std::string, double> bindings;
    ToleranceConfig tolerances;
    bool check_gates = false;
    int jobs = 1;
};

}  // namespace scaffml::check
