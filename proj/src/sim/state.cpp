#include "scaffml/sim/state.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "scaffml/sim/errors.hpp"

namespace scaffml::sim {

QuantumState::QuantumState(RegisterLayout layout, Amplitudes amps) : layout_(std::move(layout)), amps_(std::move(amps)) {
    if (layout_.size() == 0) throw SimulationError("empty layout");
    if (static_cast<std::uint64_t>(amps_.size()) != dimension()) {
        throw SimulationError("state has " + std::to_string(amps_.size()) + " amplitudes, expected " +
                              std::to_string(dimension()));
    }
    const double norm = amps_.norm();
    if (std::abs(norm - 1.0) > 1e-9) {
        throw SimulationError("state is not normalized (norm " + std::to_string(norm) + ")");
    }
}

QuantumState init_state(const RegisterLayout& layout, const BasisAssignment& initial) {
    if (layout.size() == 0) throw SimulationError("empty layout");
    std::uint64_t index = 0;
    for (const auto& [qubit, bit] : initial) {
        const int pos = layout.position(qubit.first, qubit.second);
        if (bit != 0 && bit != 1) throw SimulationError("basis bit must be 0 or 1");
        if (bit) index |= std::uint64_t{1} << pos;
    }
    Amplitudes amps = Amplitudes::Zero(static_cast<Eigen::Index>(std::uint64_t{1} << layout.size()));
    amps(static_cast<Eigen::Index>(index)) = 1.0;
    return QuantumState(layout, std::move(amps));
}

void apply_matrix(QuantumState& state, const Eigen::MatrixXcd& u, std::span<const int> wires,
                  std::span<const int> controls) {
    const int k = static_cast<int>(wires.size());
    if (u.rows() != (Eigen::Index{1} << k) || u.cols() != u.rows()) {
        throw SimulationError("matrix size does not match " + std::to_string(k) + " wire(s)");
    }
    std::uint64_t wire_mask = 0;
    std::uint64_t control_mask = 0;
    for (int w : wires) {
        if (w < 0 || w >= state.qubits()) throw SimulationError("qubit position out of range");
        const std::uint64_t bit = std::uint64_t{1} << w;
        if (wire_mask & bit) throw SimulationError("duplicate target qubit " + state.layout().qubit_name(w));
        wire_mask |= bit;
    }
    for (int c : controls) {
        if (c < 0 || c >= state.qubits()) throw SimulationError("qubit position out of range");
        const std::uint64_t bit = std::uint64_t{1} << c;
        if ((wire_mask | control_mask) & bit) {
            throw SimulationError("control overlaps target " + state.layout().qubit_name(c));
        }
        control_mask |= bit;
    }
    // offsets[j]: basis offset of local index j on the wires, MSB = wires[0]
    std::vector<std::uint64_t> offsets(std::size_t{1} << k, 0);
    for (std::size_t j = 0; j < offsets.size(); ++j) {
        for (int b = 0; b < k; ++b) {
            if (j & (std::size_t{1} << (k - 1 - b))) offsets[j] |= std::uint64_t{1} << wires[b];
        }
    }
    Amplitudes& amps = state.amplitudes();
    Eigen::VectorXcd local(static_cast<Eigen::Index>(offsets.size()));
    for (std::uint64_t base = 0; base < state.dimension(); ++base) {
        if ((base & wire_mask) || (base & control_mask) != control_mask) continue;
        for (std::size_t j = 0; j < offsets.size(); ++j) local(j) = amps(base | offsets[j]);
        const Eigen::VectorXcd out = u * local;
        for (std::size_t j = 0; j < offsets.size(); ++j) amps(base | offsets[j]) = out(j);
    }
}

namespace {

void prep_z(QuantumState& state, int qubit, double bit) {
    if (bit != 0 && bit != 1) throw SimulationError("PrepZ expects a basis bit 0 or 1");
    const auto [alpha, beta] = amplitude_pair(state, qubit);
    const std::uint64_t mask = std::uint64_t{1} << qubit;
    Amplitudes& amps = state.amplitudes();
    for (std::uint64_t i = 0; i < state.dimension(); ++i) {
        if (i & mask) continue;
        const Complex rest = std::conj(alpha) * amps(i) + std::conj(beta) * amps(i | mask);
        amps(i) = bit == 0 ? rest : Complex(0);
        amps(i | mask) = bit == 0 ? Complex(0) : rest;
    }
}

}  // namespace

void apply_gate(QuantumState& state, GateId id, std::span<const int> wires, std::span<const double> params,
                std::span<const int> controls) {
    const spec::GateInfo& info = spec::kGates[static_cast<std::size_t>(id)];
    if (static_cast<int>(wires.size()) != info.qubits) {
        throw SimulationError("gate " + std::string(info.name) + " acts on " + std::to_string(info.qubits) +
                              " qubit(s), got " + std::to_string(wires.size()));
    }
    if (id == GateId::PrepZ) {
        if (!controls.empty()) throw SimulationError("PrepZ cannot be quantum-controlled");
        if (params.size() != 1) throw SimulationError("PrepZ expects one parameter");
        if (wires[0] < 0 || wires[0] >= state.qubits()) throw SimulationError("qubit position out of range");
        prep_z(state, wires[0], params[0]);
        return;
    }
    apply_matrix(state, gate_matrix(id, params), wires, controls);
}

Density1 reduced_density(const QuantumState& state, int qubit) {
    if (qubit < 0 || qubit >= state.qubits()) throw SimulationError("qubit position out of range");
    const std::uint64_t mask = std::uint64_t{1} << qubit;
    const Amplitudes& a = state.amplitudes();
    Density1 rho = Density1::Zero();
    for (std::uint64_t i = 0; i < state.dimension(); ++i) {
        if (i & mask) continue;
        const Complex a0 = a(i);
        const Complex a1 = a(i | mask);
        rho(0, 0) += std::norm(a0);
        rho(1, 1) += std::norm(a1);
        rho(0, 1) += a0 * std::conj(a1);
    }
    rho(1, 0) = std::conj(rho(0, 1));
    return rho;
}

double purity(const Density1& rho) { return (rho * rho).trace().real(); }

std::pair<Complex, Complex> amplitude_pair(const QuantumState& state, int qubit, double eps_pure) {
    const Density1 rho = reduced_density(state, qubit);
    const double p = purity(rho);
    if (p < 1.0 - eps_pure) throw EntangledError(state.layout().qubit_name(qubit), p);
    const Eigen::SelfAdjointEigenSolver<Density1> eig(rho);
    Eigen::Vector2cd v = eig.eigenvectors().col(1);
    const int lead = std::abs(v(0)) > 1e-12 ? 0 : 1;
    v *= std::conj(v(lead)) / std::abs(v(lead));
    v(lead) = std::abs(v(lead));
    return {v(0), v(1)};
}

double measure_prob(const QuantumState& state, int qubit, int outcome) {
    if (qubit < 0 || qubit >= state.qubits()) throw SimulationError("qubit position out of range");
    const std::uint64_t mask = std::uint64_t{1} << qubit;
    return event_probability(state, [&](std::uint64_t i) { return ((i & mask) != 0) == (outcome != 0); });
}

double event_probability(const QuantumState& state, const BasisEvent& event) {
    double p = 0;
    const Amplitudes& a = state.amplitudes();
    for (std::uint64_t i = 0; i < state.dimension(); ++i) {
        if (event(i)) p += std::norm(a(i));
    }
    return p;
}

QuantumState project_event(const QuantumState& state, const BasisEvent& event, double eps_prob) {
    const double p = event_probability(state, event);
    if (p < eps_prob) throw ZeroProbabilityError("projection onto an event of probability " + std::to_string(p), p);
    Amplitudes a = state.amplitudes();
    for (std::uint64_t i = 0; i < state.dimension(); ++i) {
        if (!event(i)) a(i) = 0;
    }
    a /= std::sqrt(p);
    return QuantumState(state.layout(), std::move(a));
}

QuantumState project(const QuantumState& state, int qubit, int outcome, double eps_prob) {
    if (qubit < 0 || qubit >= state.qubits()) throw SimulationError("qubit position out of range");
    const std::uint64_t mask = std::uint64_t{1} << qubit;
    return project_event(state, [&](std::uint64_t i) { return ((i & mask) != 0) == (outcome != 0); }, eps_prob);
}

Amplitudes product_amplitudes(std::span<const std::pair<Complex, Complex>> factors) {
    Amplitudes out = Amplitudes::Ones(1);
    // kron with the newest qubit as the most significant bit
    for (const auto& [alpha, beta] : factors) {
        Amplitudes next(out.size() * 2);
        next.head(out.size()) = alpha * out;
        next.tail(out.size()) = beta * out;
        out = std::move(next);
    }
    return out;
}

std::string dump_state(const Amplitudes& amps) {
    std::string out;
    char line[128];
    for (Eigen::Index i = 0; i < amps.size(); ++i) {
        std::snprintf(line, sizeof line, "%" PRId64 "  %.17g  %.17g\n", static_cast<std::int64_t>(i), amps(i).real(),
                      amps(i).imag());
        out += line;
    }
    return out;
}

Amplitudes parse_state_dump(const std::string& text, std::uint64_t dimension) {
    Amplitudes a = Amplitudes::Zero(static_cast<Eigen::Index>(dimension));
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        std::uint64_t index = 0;
        double re = 0;
        double im = 0;
        if (!(fields >> index >> re >> im)) {
            throw SimulationError("state file line " + std::to_string(lineno) + ": expected 'index re im'");
        }
        if (index >= dimension) {
            throw SimulationError("state file line " + std::to_string(lineno) + ": index " + std::to_string(index) +
                                  " out of range");
        }
        a(static_cast<Eigen::Index>(index)) = Complex(re, im);
    }
    return a;
}

}  // namespace scaffml::sim
