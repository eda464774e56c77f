#include "scaffml/sim/layout.hpp"

#include "scaffml/sim/errors.hpp"

namespace scaffml::sim {

int RegisterLayout::add(std::string name, int width) {
    if (width <= 0) throw SimulationError("register " + name + " must have positive width");
    if (find(name)) throw SimulationError("register " + name + " declared twice");
    if (size_ + width > kMaxQubits) {
        throw SimulationError("layout exceeds " + std::to_string(kMaxQubits) + " qubits");
    }
    const int offset = size_;
    registers_.push_back({std::move(name), width, offset});
    size_ += width;
    return offset;
}

const RegisterLayout::Register* RegisterLayout::find(const std::string& name) const {
    for (const auto& r : registers_) {
        if (r.name == name) return &r;
    }
    return nullptr;
}

int RegisterLayout::position(const std::string& name, long index) const {
    const Register* r = find(name);
    if (!r) throw SimulationError("undeclared register " + name);
    if (index < 0 || index >= r->width) {
        throw SimulationError("index " + std::to_string(index) + " out of range for " + name + "[" +
                              std::to_string(r->width) + "]");
    }
    return r->offset + static_cast<int>(index);
}

std::string RegisterLayout::qubit_name(int position) const {
    for (const auto& r : registers_) {
        if (position >= r.offset && position < r.offset + r.width) {
            return r.name + "[" + std::to_string(position - r.offset) + "]";
        }
    }
    return "#" + std::to_string(position);
}

}  // namespace scaffml::sim
