#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "scaffml/check/checker.hpp"
#include "scaffml/frontend/lint.hpp"
#include "scaffml/sim/errors.hpp"
#include "scaffml/sim/random.hpp"
#include "scaffml/vc/vcgen.hpp"

namespace {

using namespace scaffml;
using json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    const auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError("bad number '" + text + "' for " + what);
    }
}

/// `q[0]=1,b[0]=0`; a bare register name means index 0.
sim::BasisAssignment parse_init(const std::string& spec) {
    sim::BasisAssignment out;
    for (const auto& item : split(spec, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("bad --init item '" + item + "' (expected q[i]=0|1)");
        std::string lhs = trim(item.substr(0, eq));
        const std::string rhs = trim(item.substr(eq + 1));
        long index = 0;
        if (const auto open = lhs.find('['); open != std::string::npos) {
            if (lhs.back() != ']') throw UsageError("bad --init item '" + item + "'");
            index = static_cast<long>(parse_number(lhs.substr(open + 1, lhs.size() - open - 2), "--init index"));
            lhs = lhs.substr(0, open);
        }
        if (rhs != "0" && rhs != "1") throw UsageError("--init bits must be 0 or 1, got '" + rhs + "'");
        out[{lhs, index}] = rhs == "1";
    }
    return out;
}

void parse_bindings(const std::vector<std::string>& items, std::map<std::string, double>& out) {
    for (const auto& group : items) {
        for (const auto& item : split(group, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw UsageError("bad --bind item '" + item + "' (expected name=value)");
            const std::string name = trim(item.substr(0, eq));
            out[name] = parse_number(trim(item.substr(eq + 1)), "--bind " + name);
        }
    }
}

spec::PhaseMode parse_phase(const std::string& s) {
    if (s == "shared-global-phase" || s == "shared") return spec::PhaseMode::SharedGlobalPhase;
    if (s == "exact") return spec::PhaseMode::Exact;
    throw UsageError("phase must be 'shared-global-phase' or 'exact', got '" + s + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Options shared by the subcommands; strings so config files and the
/// environment can fill the same slots.
struct Options {
    std::vector<std::string> files;
    std::string entry;
    std::vector<std::string> inits;
    std::optional<int> random;
    std::string seed;
    std::string state_file;
    std::vector<std::string> binds;
    double eps_eq = 1e-9;
    double eps_prob = 1e-9;
    double eps_pure = 1e-9;
    std::string phase = "shared-global-phase";
    bool check_gates = false;
    int jobs = 1;
    std::string format = "text";
    std::string output;
    std::string output_dir = ".";
    std::string config;
};

/// key=value lines; flags and environment values win over the file.
void apply_config(CLI::App& cmd, const std::string& path) {
    static const std::map<std::string, std::string> kKeys{
        {"entry", "--entry"},         {"init", "--init"},         {"random", "--random"},
        {"seed", "--seed"},           {"state_file", "--state-file"}, {"bind", "--bind"},
        {"epsilon_eq", "--epsilon-eq"}, {"epsilon_prob", "--epsilon-prob"}, {"epsilon_pure", "--epsilon-pure"},
        {"phase", "--phase"},         {"check_gates", "--check-gates"}, {"jobs", "--jobs"},
        {"format", "--format"},       {"output", "--output"},     {"output_dir", "--output-dir"},
    };
    std::istringstream in(read_file(path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = kKeys.find(key);
        if (it == kKeys.end()) throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        CLI::Option* opt = cmd.get_option_no_throw(it->second);
        if (!opt) throw UsageError(path + ":" + std::to_string(lineno) + ": '" + key + "' does not apply to " + cmd.get_name());
        if (opt->count() > 0) continue;
        try {
            if (opt->get_expected_min() == 0) {
                if (value == "true" || value == "1") opt->add_result(std::string("true"));
                else if (value != "false" && value != "0")
                    throw UsageError(path + ":" + std::to_string(lineno) + ": '" + key + "' takes true or false");
            } else {
                opt->add_result(value);
            }
            opt->run_callback();
        } catch (const CLI::Error& err) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": " + err.what());
        }
    }
}

struct Loaded {
    frontend::Analysis analysis;
    bool ok = true;
};

Loaded load(const std::string& path, std::ostream& err) {
    if (!std::filesystem::exists(path)) throw UsageError("no such file '" + path + "'");
    Loaded l{frontend::analyze(SourceFile(path, read_file(path)))};
    for (const auto& d : l.analysis.diagnostics) err << format_diagnostic(path, d) << "\n";
    l.ok = !l.analysis.has_errors();
    return l;
}

json diagnostics_json(const std::string& path, const std::vector<Diagnostic>& diags) {
    json out = json::array();
    for (const auto& d : diags) {
        out.push_back({{"path", path},
                       {"line", d.span.line},
                       {"col", d.span.column},
                       {"severity", std::string(to_string(d.severity))},
                       {"message", d.message}});
    }
    return out;
}

json empty_report(const std::string& command, const std::string& program, const std::map<std::string, std::string>& config) {
    json doc;
    doc["version"] = check::CheckReport::kVersion;
    doc["command"] = command;
    doc["program"] = program;
    doc["config"] = json::object();
    for (const auto& [k, v] : config) doc["config"][k] = v;
    doc["clauses"] = json::array();
    doc["summary"] = {{"pass", 0}, {"fail", 0}, {"vacuous", 0}, {"error", 0}, {"total", 0}};
    return doc;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw UsageError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

check::RunConfig run_config(const Options& o) {
    check::RunConfig c;
    c.entry = o.entry;
    for (const auto& i : o.inits) c.inits.push_back(parse_init(i));
    c.random_count = o.random;
    if (!o.seed.empty()) {
        try {
            std::size_t used = 0;
            c.seed = std::stoull(o.seed, &used);
            if (used != o.seed.size()) throw std::invalid_argument(o.seed);
        } catch (const std::exception&) {
            throw UsageError("bad seed '" + o.seed + "'");
        }
    }
    if (c.random_count.value_or(0) > 0 && !c.seed) throw UsageError("--random needs --seed");
    parse_bindings(o.binds, c.bindings);
    c.tolerances.eps_eq = o.eps_eq;
    c.tolerances.eps_prob = o.eps_prob;
    c.tolerances.eps_pure = o.eps_pure;
    c.tolerances.phase = parse_phase(o.phase);
    c.check_gates = o.check_gates;
    c.jobs = o.jobs;
    return c;
}

/// The state file needs the entry's layout, so it is read once that is known.
void attach_state_file(check::RunConfig& c, const Options& o, const sim::RegisterLayout& layout) {
    if (o.state_file.empty()) return;
    try {
        c.state = sim::parse_state_dump(read_file(o.state_file), std::uint64_t{1} << layout.size());
    } catch (const sim::SimulationError& err) {
        throw UsageError(o.state_file + ": " + err.what());
    }
}

const frontend::Decl& entry_decl(const frontend::Program& program, std::string& entry) {
    if (entry.empty()) {
        const auto* d = check::default_entry(program);
        if (!d) throw UsageError("no module to run; pass --entry");
        entry = d->name;
    }
    const auto* d = program.find_decl(entry);
    if (!d) throw UsageError("no module named '" + entry + "'");
    return *d;
}

int cmd_lint(const Options& o) {
    Output out(o.output);
    bool errors = false;
    json diags = json::array();
    std::string programs;
    for (const auto& path : o.files) {
        std::ostringstream text;
        Loaded l = load(path, text);
        errors |= !l.ok;
        if (o.format == "json") {
            for (auto& d : diagnostics_json(path, l.analysis.diagnostics)) diags.push_back(d);
            programs += (programs.empty() ? "" : ", ") + path;
        } else {
            out.stream() << text.str();
        }
    }
    if (o.format == "json") {
        json doc = empty_report("lint", programs, {});
        doc["diagnostics"] = diags;
        out.stream() << doc.dump(2) << "\n";
    }
    return errors ? kFailed : kOk;
}

int cmd_check(Options o) {
    if (o.files.size() != 1) throw UsageError("check takes one source file");
    Output out(o.output);
    Loaded l = load(o.files[0], std::cerr);
    if (!l.ok) return kUsage;
    const auto& program = l.analysis.program;
    check::RunConfig config = run_config(o);
    const auto& decl = entry_decl(program, o.entry);
    config.entry = o.entry;
    try {
        check::require_bindings(decl, config.bindings);
        attach_state_file(config, o, check::module_layout(program, decl, config.bindings));
        const check::CheckReport report = check::run_program(program, o.files[0], config);
        if (o.format == "json") {
            json doc = json::parse(check::to_json(report));
            json shaped;
            for (auto it = doc.begin(); it != doc.end(); ++it) {
                shaped[it.key()] = it.value();
                if (it.key() == "version") shaped["command"] = "check";
            }
            shaped["diagnostics"] = diagnostics_json(o.files[0], l.analysis.diagnostics);
            out.stream() << shaped.dump(2) << "\n";
        } else {
            out.stream() << check::to_text(report);
        }
        return report.ok() ? kOk : kFailed;
    } catch (const std::invalid_argument& err) {
        throw UsageError(err.what());
    }
}

int cmd_simulate(Options o) {
    if (o.files.size() != 1) throw UsageError("simulate takes one source file");
    Output out(o.output);
    Loaded l = load(o.files[0], std::cerr);
    if (!l.ok) return kUsage;
    const auto& program = l.analysis.program;
    check::RunConfig config = run_config(o);
    const auto& decl = entry_decl(program, o.entry);
    config.entry = o.entry;
    if (config.random_count.value_or(0) > 1) throw UsageError("simulate takes at most one random input");
    std::vector<sim::QuantumState> inputs;
    sim::RegisterLayout layout;
    try {
        check::require_bindings(decl, config.bindings);
        layout = check::module_layout(program, decl, config.bindings);
        attach_state_file(config, o, layout);
        inputs = check::make_inputs(layout, config);
    } catch (const std::invalid_argument& err) {
        throw UsageError(err.what());
    }
    if (inputs.size() != 1) throw UsageError("simulate takes a single input state");
    try {
        const sim::QuantumState final = check::simulate_module(program, decl, inputs[0], config.bindings);
        if (o.format == "json") {
            json doc = empty_report("simulate", o.files[0], check::describe(config));
            doc["layout"] = json::array();
            for (const auto& r : final.layout().registers()) {
                doc["layout"].push_back({{"name", r.name}, {"width", r.width}, {"offset", r.offset}});
            }
            doc["state"] = json::array();
            const auto& a = final.amplitudes();
            for (Eigen::Index i = 0; i < a.size(); ++i) doc["state"].push_back({a(i).real(), a(i).imag()});
            out.stream() << doc.dump(2) << "\n";
        } else {
            for (const auto& r : final.layout().registers()) {
                out.stream() << "# " << r.name << "[" << r.width << "] at position " << r.offset << "\n";
            }
            out.stream() << sim::dump_state(final.amplitudes());
        }
        return kOk;
    } catch (const sim::SimulationError& err) {
        std::cerr << "error: " << err.what() << "\n";
        if (o.format == "json") {
            json doc = empty_report("simulate", o.files[0], check::describe(config));
            doc["diagnostics"] = json::array(
                {{{"path", o.files[0]}, {"line", 0}, {"col", 0}, {"severity", "error"}, {"message", err.what()}}});
            out.stream() << doc.dump(2) << "\n";
        }
        return kFailed;
    }
}

int cmd_vcgen(Options o) {
    if (o.files.size() != 1) throw UsageError("vcgen takes one source file");
    Output out(o.output);
    Loaded l = load(o.files[0], std::cerr);
    if (!l.ok) return kUsage;
    const auto& program = l.analysis.program;
    std::map<std::string, double> bindings;
    parse_bindings(o.binds, bindings);
    std::vector<const frontend::Decl*> targets;
    if (!o.entry.empty()) {
        const auto* d = program.find_decl(o.entry);
        if (!d) throw UsageError("no module named '" + o.entry + "'");
        targets.push_back(d);
    } else {
        std::set<std::string> seen;
        for (const auto* d : program.decls()) {
            if (d->has_contract && seen.insert(d->name).second) targets.push_back(program.find_decl(d->name));
        }
    }
    std::filesystem::create_directories(o.output_dir);
    json docs = json::array();
    int emitted = 0;
    for (const auto* d : targets) {
        try {
            const vc::VcDocument doc = vc::generate_vc(program, *d, bindings);
            const auto path = std::filesystem::path(o.output_dir) / doc.file_name();
            std::ofstream f(path, std::ios::binary);
            if (!f) throw UsageError("cannot write '" + path.string() + "'");
            f << doc.to_smt2();
            ++emitted;
            docs.push_back({{"module", d->name}, {"status", "emitted"}, {"file", path.string()}});
            if (o.format != "json") out.stream() << d->name << ": wrote " << path.string() << "\n";
        } catch (const vc::Unsupported& err) {
            docs.push_back({{"module", d->name}, {"status", "unsupported"}, {"reason", err.what()}});
            if (o.format != "json") out.stream() << d->name << ": unsupported: " << err.what() << "\n";
        }
    }
    if (o.format == "json") {
        json doc = empty_report("vcgen", o.files[0], {{"output_dir", o.output_dir}});
        doc["documents"] = docs;
        out.stream() << doc.dump(2) << "\n";
    }
    if (targets.empty()) {
        std::cerr << "error: no annotated modules\n";
        return kFailed;
    }
    return emitted == static_cast<int>(targets.size()) || (o.entry.empty() && emitted > 0) ? kOk : kFailed;
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("files", o.files, "source files")->required()->check(CLI::ExistingFile);
    cmd->add_option("--format", o.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->envname("SCAFFML_FORMAT");
    cmd->add_option("--output,-o", o.output, "write the report here instead of stdout");
    cmd->add_option("--config", o.config, "key=value configuration file")->envname("SCAFFML_CONFIG");
}

void add_run(CLI::App* cmd, Options& o) {
    cmd->add_option("--entry", o.entry, "module to run")->envname("SCAFFML_ENTRY");
    cmd->add_option("--init", o.inits, "basis input, e.g. a[0]=1,b[0]=0 (repeatable)");
    cmd->add_option("--random", o.random, "number of random product-state inputs")
        ->check(CLI::NonNegativeNumber)
        ->envname("SCAFFML_RANDOM");
    cmd->add_option("--seed", o.seed, "seed for random inputs")->envname("SCAFFML_SEED");
    cmd->add_option("--state-file", o.state_file, "input amplitudes as 'index re im' lines")
        ->check(CLI::ExistingFile);
    cmd->add_option("--bind", o.binds, "classical values, e.g. angle=0.5 (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Runtime checking, simulation and VC emission for annotated quantum programs", "scaffml"};
    app.require_subcommand(1);
    Options o;

    auto* lint = app.add_subcommand("lint", "parse and lint source files");
    add_common(lint, o);

    auto* check = app.add_subcommand("check", "check a module's contract on one or more inputs");
    add_common(check, o);
    add_run(check, o);
    check->add_option("--epsilon-eq", o.eps_eq, "amplitude tolerance")->envname("SCAFFML_EPSILON_EQ");
    check->add_option("--epsilon-prob", o.eps_prob, "probability tolerance")->envname("SCAFFML_EPSILON_PROB");
    check->add_option("--epsilon-pure", o.eps_pure, "purity tolerance")->envname("SCAFFML_EPSILON_PURE");
    check->add_option("--phase", o.phase, "shared-global-phase or exact")->envname("SCAFFML_PHASE");
    check->add_flag("--check-gates", o.check_gates, "check contracts of called modules")
        ->envname("SCAFFML_CHECK_GATES");
    check->add_option("--jobs,-j", o.jobs, "parallel inputs")->check(CLI::PositiveNumber)->envname("SCAFFML_JOBS");

    auto* simulate = app.add_subcommand("simulate", "run a module body and print the final state");
    add_common(simulate, o);
    add_run(simulate, o);

    auto* vcgen = app.add_subcommand("vcgen", "emit SMT-LIB2 verification conditions");
    add_common(vcgen, o);
    vcgen->add_option("--entry", o.entry, "module (default: every annotated module)")->envname("SCAFFML_ENTRY");
    vcgen->add_option("--bind", o.binds, "classical values, e.g. width=3");
    vcgen->add_option("--output-dir", o.output_dir, "directory for .vc.smt2 files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        if (code == 0) return kOk;
        const auto subs = app.get_subcommands();
        std::cerr << (subs.empty() ? app.help() : subs.back()->help());
        return kUsage;
    }
    try {
        CLI::App* cmd = app.get_subcommands().front();
        if (!o.config.empty()) apply_config(*cmd, o.config);
        if (cmd == lint) return cmd_lint(o);
        if (cmd == check) return cmd_check(o);
        if (cmd == simulate) return cmd_simulate(o);
        return cmd_vcgen(o);
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kUsage;
    }
}
