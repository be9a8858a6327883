// qamem: command-line front end.
//
//   qamem run --example 1
//   qamem run --config scenarios/example3.cfg --mode both --out result.json
//   qamem run --n 4 --marked 0010 --seed 3
//   qamem noise --channel depolarizing --n 1000 --eta-steps 101 --out dep.csv
//   qamem validate
//   qamem storage --n 3 --patterns 001,010,111 --out bdd.txt
//
// Exit codes: 0 success, 1 invalid input, 2 runtime or semantics error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "qamem/qamem.hpp"

namespace {

using namespace qamem;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

Complex parse_complex(const std::string& s) {
    const auto parts = split_list(s);
    try {
        if (parts.size() == 1) return {std::stod(parts[0]), 0.0};
        if (parts.size() == 2) return {std::stod(parts[0]), std::stod(parts[1])};
    } catch (const std::exception&) {
    }
    throw ValidationError("expected 're' or 're,im', got '" + s + "'");
}

void print_outcome(std::ostream& os, const RetrievalConfig& cfg, const RetrievalOutcome& o) {
    const auto& p = o.params;
    os << "params: n=" << p.n << " p=" << p.p << " t=" << p.t << " q=" << p.q << " m=" << p.m << " b=" << p.b
       << " c=" << p.c << " r=" << p.r << " sweeps=" << p.sweeps << " start_qubit=" << p.start_qubit << '\n';
    os << "mode: " << to_string(cfg.mode) << '\n';
    os << "schedule: qubits";
    for (int j : o.schedule) os << ' ' << j;
    os << '\n';
    for (const auto& note : o.notes) os << "note: " << note << '\n';
    for (const auto& t : o.transcript) os << t.label << ": " << t.support << '\n';
    os << "disentangled after: ";
    if (o.disentangled_after)
        os << *o.disentangled_after << " sweep(s)\n";
    else
        os << "never\n";
    os << "flag: " << o.flag_bit << (o.flag_exact ? " (exact)" : " (sampled)") << '\n';
    if (o.register_value) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", o.register_probability);
        os << "register: " << to_binary(*o.register_value, cfg.n) << " (p=" << buf << ")\n";
    } else {
        os << "register: not measured (no marked value)\n";
    }
    os << "sweeps: " << o.sweep_count_used << '\n';
}

nlohmann::json outcome_json(const RetrievalConfig& cfg, const RetrievalOutcome& o) {
    using nlohmann::json;
    const auto& p = o.params;
    json j;
    j["params"] = {{"n", p.n}, {"p", p.p}, {"t", p.t}, {"q", p.q}, {"m", p.m}, {"b", p.b},
                   {"c", p.c}, {"r", p.r}, {"sweeps", p.sweeps}, {"start_qubit", p.start_qubit}};
    j["mode"] = to_string(cfg.mode);
    j["seed"] = cfg.seed;
    j["schedule"] = o.schedule;
    j["sweep_count_used"] = o.sweep_count_used;
    j["residue_covered"] = o.residue_covered;
    j["fell_back"] = o.fell_back;
    j["disentangled_after"] = o.disentangled_after ? json(*o.disentangled_after) : json(nullptr);
    j["flag_bit"] = o.flag_bit;
    j["flag_exact"] = o.flag_exact;
    json sought = json::array();
    for (Index y : o.sought) sought.push_back(to_binary(y, cfg.n));
    j["sought"] = sought;
    j["register_value"] = o.register_value ? json(to_binary(*o.register_value, cfg.n)) : json(nullptr);
    json dist = json::object();
    for (Index y = 0; y < o.register_distribution.size(); ++y) {
        if (o.register_distribution[y] > kNormTol) dist[to_binary(y, cfg.n)] = o.register_distribution[y];
    }
    j["register_distribution"] = dist;
    json tr = json::array();
    for (const auto& t : o.transcript) tr.push_back({{"step", t.label}, {"support", t.support}});
    j["transcript"] = tr;
    j["notes"] = o.notes;
    return j;
}

template <typename F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const IndexError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum associative memory simulator with nonlinear search"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run a retrieval scenario");
    std::optional<int> example;
    std::string config_path, out_path;
    ScenarioKeys flags;
    run->add_option("--example", example, "Worked example preset (1, 2 or 3)")->check(CLI::Range(1, 3));
    run->add_option("--config", config_path, "Scenario file (key = value lines)");
    for (const auto& key : scenario_key_names()) {
        std::string flag = "--" + key;
        if (key == "known_bits") flag = "--known-bits";
        run->add_option_function<std::string>(flag, [&flags, key](const std::string& v) { flags[key] = v; },
                                              "Scenario key '" + key + "'");
    }
    run->add_option("--out", out_path, "Write the outcome as JSON");

    // noise
    auto* noise = app.add_subcommand("noise", "Emit the F0 fidelity curve as CSV");
    std::string channel = "depolarizing", alpha_s = "", beta_s = "", csv_path;
    int noise_n = 10, eta_steps = 101;
    noise->add_option("--channel", channel, "bit_flip, phase_flip, bit_phase_flip, amplitude_damping, "
                                            "phase_damping or depolarizing");
    noise->add_option("--n", noise_n, "Register qubits");
    noise->add_option("--eta-steps", eta_steps, "Grid points on [0, 1]");
    noise->add_option("--alpha", alpha_s, "alpha as 're' or 're,im' (default 1/sqrt2)");
    noise->add_option("--beta", beta_s, "beta as 're' or 're,im' (default 1/sqrt2)");
    noise->add_option("--out", csv_path, "CSV file (stdout when omitted)");

    // validate
    auto* validate = app.add_subcommand("validate", "Run the self-check report");

    // storage
    auto* storage = app.add_subcommand("storage", "Dump the storage unitary as a matrix");
    int st_n = 0;
    std::string st_patterns = "all", st_z = "0", st_out;
    storage->add_option("--n", st_n, "Register qubits (at most 12)")->required();
    storage->add_option("--patterns", st_patterns, "Stored patterns or 'all'");
    storage->add_option("--z", st_z, "Source basis state");
    storage->add_option("--out", st_out, "Output file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInvalid;
    }

    if (run->parsed()) {
        return guarded([&] {
            RetrievalConfig cfg;
            if (example) {
                if (!config_path.empty()) throw ValidationError("--example and --config are exclusive");
                for (const auto& [k, v] : flags) {
                    if (k != "mode" && k != "seed") throw ValidationError("--example only combines with --mode and --seed");
                }
                cfg = example_config(*example);
                if (flags.count("mode")) cfg.mode = parse_mode(flags["mode"]);
                if (flags.count("seed")) cfg.seed = parse_seed(flags["seed"]);
            } else {
                ScenarioKeys keys;
                if (!config_path.empty()) {
                    std::ifstream in(config_path);
                    if (!in) throw ValidationError("cannot open config file " + config_path);
                    keys = parse_scenario(in);
                }
                for (const auto& [k, v] : flags) keys[k] = v;
                cfg = build_config(keys);
            }
            const auto outcome = run_retrieval(cfg);
            print_outcome(std::cout, cfg, outcome);
            if (!out_path.empty()) {
                std::ofstream out(out_path);
                if (!out) throw std::runtime_error("cannot write " + out_path);
                out << outcome_json(cfg, outcome).dump(2) << '\n';
            }
            return kExitOk;
        });
    }

    if (noise->parsed()) {
        return guarded([&] {
            const auto kind = parse_channel(channel);
            const Complex a = alpha_s.empty() ? Complex(kInvSqrt2) : parse_complex(alpha_s);
            const Complex b = beta_s.empty() ? Complex(kInvSqrt2) : parse_complex(beta_s);
            const auto curve = fidelity_curve(kind, noise_n, eta_steps, a, b);
            if (csv_path.empty()) {
                write_curve_csv(std::cout, curve);
            } else {
                std::ofstream out(csv_path);
                if (!out) throw std::runtime_error("cannot write " + csv_path);
                write_curve_csv(out, curve);
                if (!out) throw std::runtime_error("write failed: " + csv_path);
            }
            return kExitOk;
        });
    }

    if (validate->parsed()) {
        return guarded([&] { return print_report(std::cout, validation_report()) ? kExitOk : kExitRuntime; });
    }

    if (storage->parsed()) {
        return guarded([&] {
            if (st_n < 1 || st_n > kMaxDenseQubits) throw CapacityError("storage: n must lie in [1, 12]");
            const auto pats = trim(st_patterns) == "all" ? all_patterns(st_n) : parse_values(st_patterns, st_n);
            const auto store = build_storage(pats, st_n, parse_value(trim(st_z), st_n));
            if (st_out.empty()) {
                write_matrix(std::cout, store.storage_unitary());
            } else {
                std::ofstream out(st_out);
                if (!out) throw std::runtime_error("cannot write " + st_out);
                write_matrix(out, store.storage_unitary());
            }
            return kExitOk;
        });
    }
    return kExitInvalid;
}
