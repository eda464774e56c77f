#pragma once

#include <string>
#include <vector>

namespace scaffml::sim {

inline constexpr int kMaxQubits = 20;

/// Registers laid out in declaration order; register r element k sits at
/// global position offset(r) + k, which is bit k of a basis index.
class RegisterLayout {
public:
    struct Register {
        std::string name;
        int width;
        int offset;
        bool operator==(const Register&) const = default;
    };

    /// Returns the offset of the new register.
    int add(std::string name, int width);

    const std::vector<Register>& registers() const { return registers_; }
    int size() const { return size_; }
    const Register* find(const std::string& name) const;
    /// Throws SimulationError for an unknown register or index.
    int position(const std::string& name, long index) const;
    /// "q[1]" for a global position.
    std::string qubit_name(int position) const;

    bool operator==(const RegisterLayout&) const = default;

private:
    std::vector<Register> registers_;
    int size_ = 0;
};

}  // namespace scaffml::sim
