#pragma once

// Scenario files, value parsing and the fidelity CSV format.
//
// Scenario grammar, one entry per line:
//     key = value        # comment
// Keys: n, patterns, marked, known_bits, z, x, mode, seed. List values are
// separated by commas and/or whitespace. patterns may be "all".
// A value token is binary when it starts with 0b, or when it has exactly the
// field width and contains only 0 and 1; otherwise it is decimal.
// known_bits lists 1-based register qubit indices (qubit 1 is the LSQ).

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qamem/core.hpp"
#include "qamem/noise.hpp"
#include "qamem/retrieval.hpp"

namespace qamem {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline Index parse_value(const std::string& tok, int width) {
    if (tok.empty()) throw ValidationError("empty value");
    auto parse_bits = [&](const std::string& bits) {
        if (bits.empty()) throw ValidationError("empty binary value '" + tok + "'");
        if (static_cast<int>(bits.size()) > 64) throw ValidationError("binary value too long: " + tok);
        Index v = 0;
        for (char c : bits) {
            if (c != '0' && c != '1') throw ValidationError("bad binary digit in '" + tok + "'");
            v = (v << 1) | static_cast<Index>(c - '0');
        }
        return v;
    };
    Index v = 0;
    if (tok.rfind("0b", 0) == 0) {
        v = parse_bits(tok.substr(2));
    } else if (static_cast<int>(tok.size()) == width && tok.find_first_not_of("01") == std::string::npos) {
        v = parse_bits(tok);
    } else {
        if (tok.find_first_not_of("0123456789") != std::string::npos) {
            throw ValidationError("cannot parse value '" + tok + "'");
        }
        try {
            v = std::stoull(tok);
        } catch (const std::exception&) {
            throw ValidationError("value out of range: " + tok);
        }
    }
    if (width < 64 && v >= pow2(width)) {
        throw ValidationError("value '" + tok + "' does not fit in " + std::to_string(width) + " bits");
    }
    return v;
}

inline std::vector<Index> parse_values(const std::string& s, int width) {
    std::vector<Index> out;
    for (const auto& t : split_list(s)) out.push_back(parse_value(t, width));
    return out;
}

inline int parse_int(const std::string& key, const std::string& s) {
    const auto t = trim(s);
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(t, &pos);
    } catch (const std::exception&) {
        throw ValidationError(key + ": expected an integer, got '" + s + "'");
    }
    if (pos != t.size()) throw ValidationError(key + ": expected an integer, got '" + s + "'");
    return v;
}

inline NleMode parse_mode(const std::string& s) {
    const auto t = trim(s);
    if (t == "or") return NleMode::Or;
    if (t == "casewise") return NleMode::Casewise;
    if (t == "both") return NleMode::Both;
    throw ValidationError("mode must be or, casewise or both, got '" + s + "'");
}

inline std::uint64_t parse_seed(const std::string& s) {
    const auto t = trim(s);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
        throw ValidationError("seed: expected a non-negative integer, got '" + s + "'");
    }
    try {
        return std::stoull(t);
    } catch (const std::exception&) {
        throw ValidationError("seed: out of range");
    }
}

/// Raw key/value pairs of a scenario; later assignments override earlier ones.
using ScenarioKeys = std::map<std::string, std::string>;

inline const std::vector<std::string>& scenario_key_names() {
    static const std::vector<std::string> keys = {"n", "patterns", "marked", "known_bits", "z", "x", "mode", "seed"};
    return keys;
}

inline ScenarioKeys parse_scenario(std::istream& is) {
    ScenarioKeys keys;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("scenario line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto& names = scenario_key_names();
        if (std::find(names.begin(), names.end(), key) == names.end()) {
            throw ValidationError("scenario line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        keys[key] = trim(line.substr(eq + 1));
    }
    return keys;
}

inline RetrievalConfig build_config(const ScenarioKeys& keys) {
    auto get = [&](const char* k) -> std::optional<std::string> {
        const auto it = keys.find(k);
        if (it == keys.end()) return std::nullopt;
        return it->second;
    };
    RetrievalConfig cfg;
    const auto n = get("n");
    if (!n) throw ValidationError("scenario: n is required");
    cfg.n = parse_int("n", *n);
    if (cfg.n < 1 || cfg.n > kMaxRegisterQubits) {
        throw CapacityError("scenario: n must lie in [1, " + std::to_string(kMaxRegisterQubits) + "]");
    }
    if (const auto kb = get("known_bits")) {
        for (const auto& t : split_list(*kb)) cfg.known_qubits.push_back(parse_int("known_bits", t));
    }
    const KnownQubits known(cfg.n, cfg.known_qubits);
    if (const auto p = get("patterns"); p && trim(*p) != "all") cfg.patterns = parse_values(*p, cfg.n);
    const int active = cfg.n - known.t();
    cfg.marked = MarkedSet(active, get("marked") ? parse_values(*get("marked"), active) : std::vector<Index>{});
    if (const auto z = get("z")) cfg.z = parse_value(trim(*z), cfg.n);
    if (const auto x = get("x")) cfg.x_override = TargetState::uniform_over(cfg.n, parse_values(*x, cfg.n));
    if (const auto m = get("mode")) cfg.mode = parse_mode(*m);
    if (const auto s = get("seed")) cfg.seed = parse_seed(*s);
    return cfg;
}

//-----------------------------------------------------------------------------
// Fidelity CSV: header "eta,fidelity", one row per grid point, 12 significant
// digits.
//-----------------------------------------------------------------------------

inline std::string format_g12(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& pts) {
    os << "eta,fidelity\n";
    for (const auto& p : pts) os << format_g12(p.eta) << ',' << format_g12(p.fidelity) << '\n';
}

inline std::vector<CurvePoint> read_curve_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || trim(line) != "eta,fidelity") throw ValidationError("csv: missing header");
    std::vector<CurvePoint> out;
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ValidationError("csv: malformed row '" + line + "'");
        // strtod rather than stod: subnormal fidelities are valid rows.
        auto number = [&](const std::string& field) {
            char* end = nullptr;
            const double v = std::strtod(field.c_str(), &end);
            if (field.empty() || end != field.c_str() + field.size()) {
                throw ValidationError("csv: malformed row '" + line + "'");
            }
            return v;
        };
        out.push_back({number(line.substr(0, comma)), number(line.substr(comma + 1))});
    }
    return out;
}

}  // namespace qamem
