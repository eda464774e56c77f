#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "scaffml/frontend/program.hpp"
#include "scaffml/sim/layout.hpp"
#include "scaffml/vc/term.hpp"

namespace scaffml::vc {

inline constexpr const char* kToolVersion = "scaffml-vcgen 1";

/// Raised for modules outside the symbolic fragment (loops, entangling
/// gates, measurements). Not fatal to other modules in the file.
class Unsupported : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Linear angle `coeff * symbol + offset`; an empty symbol means a constant.
struct Angle {
    std::string symbol;
    double coeff = 0;
    double offset = 0;
    bool operator<(const Angle& o) const {
        return std::tie(symbol, coeff, offset) < std::tie(o.symbol, o.coeff, o.offset);
    }
    bool operator==(const Angle&) const = default;
};

/// What a declared constant stands for, so concrete runs can be mapped onto
/// the document's variables.
struct Symbol {
    enum class Kind { Amplitude, Cos, Sin, Param, Sqrt2Half } kind = Kind::Amplitude;
    std::string name;
    int qubit = -1;      // Amplitude: global position
    int basis = 0;       // Amplitude: 0 for alpha, 1 for beta
    bool imag = false;   // Amplitude: imaginary component
    Angle angle;         // Cos / Sin
};

struct SymbolicState {
    sim::RegisterLayout layout;
    std::vector<std::pair<CTerm, CTerm>> input;  // per position (alpha, beta)
    std::vector<std::pair<CTerm, CTerm>> post;
    std::vector<Term> side;                      // constraints on auxiliary constants
    std::vector<Symbol> symbols;                 // in first-use order
};

struct VcDocument {
    std::string module;
    std::vector<std::string> comments;  // header lines without the leading ';'
    std::vector<Symbol> symbols;        // every one is used
    std::vector<std::pair<std::string, Term>> assumptions;  // (reason, term)
    std::vector<std::pair<std::string, Term>> goals;        // (clause label, term)

    /// Assumptions conjoined with the negated conjunction of goals.
    std::string to_smt2() const;
    std::string file_name() const { return module + ".vc.smt2"; }
};

/// Straight-line execution over symbolic input amplitudes.
SymbolicState symbolic_exec(const frontend::Program& program, const frontend::Decl& decl,
                            const std::map<std::string, double>& bindings = {});

VcDocument generate_vc(const frontend::Program& program, const frontend::Decl& decl,
                       const std::map<std::string, double>& bindings = {});

/// Concrete values for a document's constants: per-position input pairs and
/// classical parameter values. Auxiliary constants get their exact values.
std::map<std::string, double> concrete_assignment(const VcDocument& doc,
                                                  const std::vector<std::pair<std::complex<double>, std::complex<double>>>& input,
                                                  const std::map<std::string, double>& params);

}  // namespace scaffml::vc
