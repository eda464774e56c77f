#include "scaffml/sim/gates.hpp"

#include <string>

#include "scaffml/sim/errors.hpp"

namespace scaffml::sim {

Eigen::MatrixXcd controlled(const Eigen::MatrixXcd& u, int controls) {
    const Eigen::Index block = u.rows();
    const Eigen::Index dim = block << controls;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim, dim);
    m.bottomRightCorner(block, block) = u;
    return m;
}

Eigen::MatrixXcd gate_matrix(GateId id, std::span<const double> params) {
    const spec::GateInfo& info = spec::kGates[static_cast<std::size_t>(id)];
    if (static_cast<int>(params.size()) != info.params) {
        throw SimulationError("gate " + std::string(info.name) + " expects " + std::to_string(info.params) +
                              " parameter(s), got " + std::to_string(params.size()));
    }
    using std::complex;
    switch (id) {
        case GateId::X: return pauli_x<double>();
        case GateId::Y: return pauli_y<double>();
        case GateId::Z: return pauli_z<double>();
        case GateId::H: return hadamard<double>();
        case GateId::S: return phase<double>(M_PI / 2);
        case GateId::Sdag: return phase<double>(-M_PI / 2);
        case GateId::T: return phase<double>(M_PI / 4);
        case GateId::Tdag: return phase<double>(-M_PI / 4);
        case GateId::Rx: return rx<double>(params[0]);
        case GateId::Ry: return ry<double>(params[0]);
        case GateId::Rz: return rz<double>(params[0]);
        case GateId::Phase: return phase<double>(params[0]);
        case GateId::CNOT: return cnot<double>();
        case GateId::Toffoli: return controlled(pauli_x<double>(), 2);
        case GateId::SWAP: return swap<double>();
        case GateId::ControlledRz: return controlled_phase<double>(params[0]);
        case GateId::ControlledRd: return controlled_phase<double>(controlled_rd_angle(params[0]));
        case GateId::PrepZ: break;
    }
    throw SimulationError("gate " + std::string(info.name) + " has no unitary matrix");
}

GateApplication inverse_gate(GateId id, std::span<const double> params) {
    std::vector<double> p(params.begin(), params.end());
    switch (id) {
        case GateId::S: return {GateId::Sdag, p};
        case GateId::Sdag: return {GateId::S, p};
        case GateId::T: return {GateId::Tdag, p};
        case GateId::Tdag: return {GateId::T, p};
        case GateId::Rx:
        case GateId::Ry:
        case GateId::Rz:
        case GateId::Phase:
        case GateId::ControlledRz:
            for (double& v : p) v = -v;
            return {id, p};
        case GateId::ControlledRd:
            // no negative-d form; fall back to the equivalent controlledRz
            return {GateId::ControlledRz, {-controlled_rd_angle(p.at(0))}};
        case GateId::PrepZ: throw SimulationError("PrepZ has no inverse");
        default: return {id, p};
    }
}

}  // namespace scaffml::sim
