#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ratt/corpus.hpp"
#include "ratt/drivers.hpp"
#include "ratt/machine.hpp"
#include "ratt/surface.hpp"
#include "ratt/typecheck.hpp"

namespace {

using namespace ratt;

constexpr int kExitOk = 0;
constexpr int kExitSemantic = 1;
constexpr int kExitSyntax = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open '" << path << "'\n";
        std::exit(kExitSyntax);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

struct Loaded {
    SurfaceProgram program;
    std::vector<CheckedDef> defs;
};

Loaded load(const std::string& path, bool json) {
    Loaded l;
    try {
        l.program = parse(slurp(path));
    } catch (const SyntaxError& e) {
        if (json) {
            std::cout << "{\"def\":\"\",\"kind\":\"SyntaxError\",\"span\":{\"line\":"
                      << e.pos.line << ",\"col\":" << e.pos.col
                      << ",\"len\":1},\"msg\":\"" << json_escape(e.what()) << "\"}\n";
        }
        std::cerr << path << ":" << e.pos.line << ":" << e.pos.col
                  << ": syntax error: " << e.what() << "\n";
        std::exit(kExitSyntax);
    }
    try {
        l.defs = desugar(l.program);
    } catch (const DesugarError& e) {
        if (json) {
            std::cout << "{\"def\":\"" << json_escape(e.def_name) << "\",\"kind\":\""
                      << to_string(e.kind) << "\",\"span\":{\"line\":" << e.pos.line
                      << ",\"col\":" << e.pos.col << ",\"len\":1},\"msg\":\""
                      << json_escape(e.what()) << "\"}\n";
        }
        std::cerr << path << ":" << e.pos.line << ":" << e.pos.col << ": error ["
                  << to_string(e.kind) << "] in '" << e.def_name << "': " << e.what()
                  << "\n";
        std::exit(kExitSemantic);
    }
    return l;
}

SrcPos def_pos(const SurfaceProgram& p, const std::string& name) {
    for (const auto& d : p.defs)
        if (d.name == name) return d.pos;
    return SrcPos{};
}

int cmd_check(const std::string& path, bool json) {
    Loaded l = load(path, json);
    ProgramReport report = check_program(l.defs);
    int failures = 0;
    for (const auto& d : report.defs) {
        if (!d.error) continue;
        ++failures;
        SrcPos pos = def_pos(l.program, d.name);
        if (json) {
            std::cout << "{\"def\":\"" << json_escape(d.name) << "\",\"kind\":\""
                      << to_string(d.error->kind) << "\",\"span\":{\"line\":" << pos.line
                      << ",\"col\":" << pos.col << ",\"len\":" << d.name.size()
                      << "},\"msg\":\"" << json_escape(d.error->msg) << "\"}\n";
        }
        std::cerr << path << ":" << pos.line << ":" << pos.col << ": type error ["
                  << to_string(d.error->kind) << "] in '" << d.name
                  << "': " << d.error->msg << "\n";
    }
    if (failures == 0) {
        std::cerr << path << ": " << report.defs.size() << " definitions ok\n";
        return kExitOk;
    }
    return kExitSemantic;
}

const CheckedDef* find_def(const Loaded& l, const std::string& name) {
    for (const auto& d : l.defs)
        if (d.name == name) return &d;
    std::cerr << "error: no definition named '" << name << "'\n";
    std::exit(kExitSemantic);
}

// Checks one definition against its declared type; exits on failure.
void gate(const CheckedDef& def) {
    std::vector<CheckedDef> one{def};
    ProgramReport r = check_program(one);
    if (!r.ok()) {
        const auto& e = *r.defs[0].error;
        std::cerr << "type error [" << to_string(e.kind) << "] in '" << def.name
                  << "': " << e.msg << "\n";
        std::exit(kExitSemantic);
    }
}

struct RunFlags {
    std::uint64_t steps = 10;
    std::uint64_t fuel = 1'000'000;
    bool unsafe = false;
    bool nogc = false;
    bool trace = false;
    std::string stats_path;
    std::string input_path;
};

DriverOptions driver_options(const RunFlags& flags) {
    DriverOptions opts;
    opts.fuel_per_step = flags.fuel;
    opts.gc = !flags.nogc;
    if (flags.trace) {
        opts.trace = [](const std::string& rule, const Term& t, const Store& s) {
            std::string shown = pretty(t);
            if (shown.size() > 60) shown = shown.substr(0, 57) + "...";
            std::cerr << "[" << rule << "] " << shown << "  now=" << s.now.size()
                      << " later=" << s.later.size() << "\n";
        };
    }
    return opts;
}

int cmd_run(const std::string& path, const std::string& name, const RunFlags& flags) {
    Loaded l = load(path, false);
    const CheckedDef* def = find_def(l, name);
    DriverOptions opts = driver_options(flags);
    if (!flags.unsafe) {
        gate(*def);
        auto elem = stream_element_of(def->type);
        if (!elem || !is_value_type(*elem)) {
            std::cerr << "error: '" << name
                      << "' is not a stream of a value type (declared " << pretty(def->type)
                      << ")\n";
            return kExitSemantic;
        }
        opts.element = *elem;
    }
    std::ofstream stats;
    if (!flags.stats_path.empty()) stats.open(flags.stats_path);

    StreamState state = stream_init(def->term);
    for (std::uint64_t i = 0; i < flags.steps; ++i) {
        try {
            StreamStepResult r = stream_step(state, opts);
            std::cout << print_value(r.value) << "\n" << std::flush;
            if (stats.is_open()) stats << stats_json_line(r.stats) << "\n";
            state = std::move(r.next);
        } catch (const EvalFailure& f) {
            std::cerr << "error at step " << (i + 1) << ": [" << to_string(f.error.kind)
                      << "] " << f.error.msg << "\n";
            return kExitSemantic;
        } catch (const DriverFailure& f) {
            std::cerr << "error at step " << (i + 1) << ": " << f.what() << "\n";
            return kExitSemantic;
        }
    }
    return kExitOk;
}

int cmd_transduce(const std::string& path, const std::string& name, const RunFlags& flags) {
    Loaded l = load(path, false);
    const CheckedDef* def = find_def(l, name);
    DriverOptions opts = driver_options(flags);
    if (!flags.unsafe) {
        gate(*def);
        auto elems = transducer_elements_of(def->type);
        if (!elems || !is_value_type(elems->first) || !is_value_type(elems->second)) {
            std::cerr << "error: '" << name
                      << "' is not a stream transducer over value types (declared "
                      << pretty(def->type) << ")\n";
            return kExitSemantic;
        }
        opts.input_element = elems->first;
        opts.element = elems->second;
    }
    std::ifstream file_in;
    std::istream* in = &std::cin;
    if (!flags.input_path.empty()) {
        file_in.open(flags.input_path);
        if (!file_in) {
            std::cerr << "error: cannot open '" << flags.input_path << "'\n";
            return kExitSyntax;
        }
        in = &file_in;
    }
    std::ofstream stats;
    if (!flags.stats_path.empty()) stats.open(flags.stats_path);

    TransducerState state = transducer_init(def->term);
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(*in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Term input;
        try {
            input = parse_value(line);
        } catch (const SyntaxError& e) {
            std::cerr << "input line " << lineno << ": " << e.what() << "\n";
            return kExitSemantic;
        }
        try {
            TransducerStepResult r = transducer_step(state, input, opts);
            std::cout << print_value(r.value) << "\n" << std::flush;
            if (stats.is_open()) stats << stats_json_line(r.stats) << "\n";
            state = std::move(r.next);
        } catch (const EvalFailure& f) {
            std::cerr << "error at step " << lineno << ": [" << to_string(f.error.kind)
                      << "] " << f.error.msg << "\n";
            return kExitSemantic;
        } catch (const DriverFailure& f) {
            std::cerr << "error at step " << lineno << ": " << f.what() << "\n";
            return kExitSemantic;
        }
    }
    return kExitOk;
}

int cmd_desugar(const std::string& path) {
    Loaded l = load(path, false);
    for (const auto& d : l.defs) {
        std::cout << "def " << d.name;
        if (!d.params.empty()) {
            std::cout << " [";
            for (std::size_t i = 0; i < d.params.size(); ++i) {
                if (i) std::cout << ", ";
                std::cout << d.params[i];
                if (d.stable_params.count(d.params[i])) std::cout << " stable";
            }
            std::cout << "]";
        }
        std::cout << " : " << pretty(d.type) << " =\n  " << pretty(d.term) << "\n\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ratt: a modal stream calculus — checker, evaluator, drivers"};
    app.require_subcommand(1);

    std::string path, name;
    bool json = false;
    RunFlags flags;

    CLI::App* check = app.add_subcommand("check", "type check a .ratt file");
    check->add_option("file", path)->required();
    check->add_flag("--json", json, "emit machine-readable errors on stdout");

    CLI::App* run = app.add_subcommand("run", "run a stream definition");
    run->add_option("file", path)->required();
    run->add_option("name", name)->required();
    run->add_option("--steps", flags.steps, "number of steps")->required();
    run->add_option("--fuel", flags.fuel, "per-step fuel bound");
    run->add_flag("--unsafe", flags.unsafe, "skip the type gate");
    run->add_flag("--nogc", flags.nogc, "retain the now heap across steps");
    run->add_flag("--trace", flags.trace, "trace rule applications on stderr");
    run->add_option("--stats", flags.stats_path, "write per-step stats as JSON lines");

    CLI::App* transduce = app.add_subcommand("transduce", "run a stream transducer");
    transduce->add_option("file", path)->required();
    transduce->add_option("name", name)->required();
    transduce->add_option("--input", flags.input_path, "input file (default stdin)");
    transduce->add_option("--fuel", flags.fuel, "per-step fuel bound");
    transduce->add_flag("--unsafe", flags.unsafe, "skip the type gate");
    transduce->add_flag("--nogc", flags.nogc, "retain the now heap across steps");
    transduce->add_flag("--trace", flags.trace, "trace rule applications on stderr");
    transduce->add_option("--stats", flags.stats_path, "write per-step stats as JSON lines");

    CLI::App* desugar_cmd = app.add_subcommand("desugar", "print core terms");
    desugar_cmd->add_option("file", path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitSyntax;
    }

    if (check->parsed()) return cmd_check(path, json);
    if (run->parsed()) return cmd_run(path, name, flags);
    if (transduce->parsed()) return cmd_transduce(path, name, flags);
    if (desugar_cmd->parsed()) return cmd_desugar(path);
    return kExitSyntax;
}
