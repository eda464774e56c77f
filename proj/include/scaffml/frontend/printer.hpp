#pragma once

#include <string>

#include "scaffml/frontend/program.hpp"

namespace scaffml::frontend {

/// Renders a program back to source. Re-parsing the output yields a program
/// equal to the input (spans excepted).
std::string print_program(const Program& program);

}  // namespace scaffml::frontend
