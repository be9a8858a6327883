#pragma once

// Associative-memory retrieval driver: storage, oracle, NLE sweeps, flag
// observation, conditional restore, CS and final register measurement.

#include <optional>
#include <string>
#include <vector>

#include "qamem/core.hpp"
#include "qamem/gates.hpp"
#include "qamem/memory.hpp"
#include "qamem/oracle.hpp"
#include "qamem/qstate.hpp"

namespace qamem {

struct ComplexityParams {
    int n = 0;           // register qubits
    Index p = 0;         // stored patterns
    int t = 0;           // known qubits
    Index q = 0;         // effective patterns
    Index m = 0;         // marked values
    int b = 0;           // ceil(log2 p)
    int c = 0;           // ceil(log2 q)
    int r = 0;           // int(log2 m), 0 when m <= 1
    int sweeps = 0;      // c - r
    int start_qubit = 1; // r + 1, counted among the active qubits

    friend bool operator==(const ComplexityParams&, const ComplexityParams&) = default;
};

/// Step-count bookkeeping. q defaults to p when t = 0 and to
/// min(p, 2^(n-t)) otherwise.
inline ComplexityParams complexity_params(int n, Index p, int t, Index m, std::optional<Index> q = std::nullopt) {
    PureState::check_width(n);
    if (t < 0 || t > n) throw ValidationError("complexity: t must lie in [0, n]");
    if (p < 1 || p > pow2(n)) throw ValidationError("complexity: p must lie in [1, 2^n]");
    ComplexityParams cp;
    cp.n = n;
    cp.p = p;
    cp.t = t;
    cp.q = q.value_or(t == 0 ? p : std::min(p, pow2(n - t)));
    cp.m = m;
    if (cp.q < 1 || cp.q > p) throw ValidationError("complexity: q must lie in [1, p]");
    if (m > cp.q) throw ValidationError("complexity: m = " + std::to_string(m) + " exceeds q = " + std::to_string(cp.q));
    if (m > pow2(n - t)) throw ValidationError("complexity: m exceeds 2^(n-t)");
    cp.b = ceil_log2(p);
    cp.c = ceil_log2(cp.q);
    cp.r = floor_log2(m);
    cp.sweeps = cp.c - cp.r;
    cp.start_qubit = cp.r + 1;
    return cp;
}

/// True iff {v mod 2^r : v in values} = {0, ..., 2^r - 1}; r = 0 imposes nothing.
inline bool residue_coverage(const std::vector<Index>& values, int r) {
    if (r <= 0) return true;
    std::vector<bool> seen(pow2(r), false);
    Index hit = 0;
    for (Index v : values) {
        const Index res = v & (pow2(r) - 1);
        if (!seen[res]) {
            seen[res] = true;
            ++hit;
        }
    }
    return hit == pow2(r);
}

inline bool residue_coverage(const MarkedSet& marked, int r) { return residue_coverage(marked.values(), r); }

enum class NleMode { Or, Casewise, Both };

inline const char* to_string(NleMode m) {
    switch (m) {
        case NleMode::Or: return "or";
        case NleMode::Casewise: return "casewise";
        case NleMode::Both: return "both";
    }
    return "?";
}

struct RetrievalConfig {
    int n = 0;
    std::vector<Index> patterns;  // empty: all 2^n values
    Index z = 0;
    MarkedSet marked;             // over the n - t active qubits
    std::vector<int> known_qubits;
    std::optional<TargetState> x_override;
    NleMode mode = NleMode::Or;
    std::uint64_t seed = 0;
    NlPlusChoice nl_plus{};
    NlMinusResolver nl_minus = default_nl_minus;
    bool record_transcript = true;
};

struct TranscriptEntry {
    std::string label;
    std::string support;
};

struct RetrievalOutcome {
    ComplexityParams params;
    std::vector<Index> sought;        // stored values the oracle marks
    bool residue_covered = true;
    bool fell_back = false;
    std::vector<int> schedule;        // register qubits swept, in order
    int sweep_count_used = 0;
    std::optional<int> disentangled_after;  // sweeps done when the flag first factored out

    int flag_bit = 0;
    bool flag_exact = true;           // read from a disentangled flag rather than sampled
    double flag_probability = 1.0;

    std::optional<Index> register_value;
    double register_probability = 0.0;
    std::vector<double> register_distribution;  // exact, after CS
    std::optional<PureState> final_state;       // after CS

    std::vector<TranscriptEntry> transcript;
    std::vector<std::string> notes;
};

namespace detail {

inline std::string summarize(const PureState& s, std::size_t cap = 256) {
    const auto sup = support(s);
    if (sup.size() > cap) return "(" + std::to_string(sup.size()) + " basis states)";
    return format_support(s);
}

inline PureState nle_step(const PureState& s, int j, const RetrievalConfig& cfg) {
    switch (cfg.mode) {
        case NleMode::Or: return nle_step_or(s, j);
        case NleMode::Casewise: return nle_step_casewise(s, j, cfg.nl_minus, cfg.nl_plus);
        case NleMode::Both: {
            auto a = nle_step_or(s, j);
            const auto b = nle_step_casewise(s, j, cfg.nl_minus, cfg.nl_plus);
            const double d = max_abs_diff(a.amplitudes(), b.amplitudes());
            if (d > 1e-12) {
                throw SemanticsError("NLE or/casewise disagree on qubit " + std::to_string(j) + " by " + std::to_string(d));
            }
            return a;
        }
    }
    return s;
}

}  // namespace detail

inline RetrievalOutcome run_retrieval(const RetrievalConfig& cfg) {
    PureState::check_width(cfg.n);
    const KnownQubits known(cfg.n, cfg.known_qubits);
    const int t = known.t();
    if (cfg.marked.n() != cfg.n - t) {
        throw ValidationError("retrieval: marked width " + std::to_string(cfg.marked.n()) + " != n - t = " +
                              std::to_string(cfg.n - t));
    }
    const auto store = build_storage(cfg.patterns.empty() ? all_patterns(cfg.n) : cfg.patterns, cfg.n, cfg.z);

    RetrievalOutcome out;
    auto record = [&](std::string label, const PureState& s) {
        if (cfg.record_transcript) out.transcript.push_back({std::move(label), detail::summarize(s)});
    };

    const auto flagged = expand_marked(cfg.marked, known);
    for (Index y : flagged) {
        if (store.stores(y)) out.sought.push_back(y);
    }
    if (t == 0 && out.sought.size() != cfg.marked.size()) {
        out.notes.push_back("warning: " + std::to_string(cfg.marked.size() - out.sought.size()) +
                            " marked value(s) are not stored patterns");
    }

    const Index m = t == 0 ? out.sought.size() : cfg.marked.size();
    out.params = complexity_params(cfg.n, store.p(), t, m);
    const auto& cp = out.params;

    // Residues are taken in the coordinates the sweeps run over.
    std::vector<Index> residues;
    if (t == 0)
        residues = out.sought;
    else
        residues = cfg.marked.values();
    out.residue_covered = residue_coverage(residues, cp.r);

    const auto& active = known.active();
    const std::vector<int> full(active.begin(), active.end());
    std::vector<int> scheduled(active.begin() + cp.r, active.begin() + cp.r + cp.sweeps);

    PureState state = apply_storage(basis_state(cfg.n, cfg.z, 0), store);
    record("storage", state);
    state = t == 0 ? oracle_apply(state, cfg.marked) : restricted_oracle_apply(state, cfg.marked, known);
    record("oracle", state);
    const PureState post_oracle = state;

    auto run_schedule = [&](const std::vector<int>& schedule) {
        PureState s = post_oracle;
        out.schedule = schedule;
        out.disentangled_after.reset();
        if (flag_disentangled(s)) out.disentangled_after = 0;
        int i = 0;
        for (int j : schedule) {
            s = detail::nle_step(s, j, cfg);
            ++i;
            record("sweep " + std::to_string(i) + " (qubit " + std::to_string(j) + ")", s);
            if (!out.disentangled_after && flag_disentangled(s)) out.disentangled_after = i;
        }
        out.sweep_count_used = static_cast<int>(schedule.size());
        return s;
    };

    if (!out.residue_covered) {
        out.fell_back = true;
        out.notes.push_back("marked set misses a residue class mod 2^" + std::to_string(cp.r) +
                            "; sweeping every active qubit instead");
        state = run_schedule(full);
    } else {
        state = run_schedule(scheduled);
        if (!flag_disentangled(state) && scheduled != full) {
            out.fell_back = true;
            out.notes.push_back("flag still entangled after " + std::to_string(scheduled.size()) +
                                " sweep(s); sweeping every active qubit instead");
            state = run_schedule(full);
        }
    }

    Rng rng(cfg.seed);
    if (const auto bit = flag_disentangled(state)) {
        out.flag_bit = *bit;
        out.flag_exact = true;
        out.flag_probability = flag_probabilities(state)[static_cast<std::size_t>(*bit)];
    } else {
        out.notes.push_back("flag not disentangled; sampling it");
        const auto mo = measure_flag(state, rng);
        out.flag_bit = static_cast<int>(mo.value);
        out.flag_exact = false;
        out.flag_probability = mo.probability;
        state = mo.collapsed;
    }

    if (out.flag_bit == 0) {
        out.notes.push_back("flag is |0>: no stored pattern satisfies the query");
        return out;
    }

    state = apply_storage_inverse_conditional(state, store);
    record("C(BDD)^dagger", state);
    const TargetState x = cfg.x_override ? *cfg.x_override : TargetState::uniform_over(cfg.n, out.sought);
    state = cs_apply(state, cfg.z, x);
    record("CS", state);

    out.register_distribution = register_probabilities(state);
    const auto mo = measure_register(state, rng);
    out.register_value = mo.value;
    out.register_probability = mo.probability;
    out.final_state = state;
    return out;
}

//-----------------------------------------------------------------------------
// Worked-example presets
//-----------------------------------------------------------------------------

inline RetrievalConfig example_config(int which) {
    RetrievalConfig cfg;
    cfg.n = 4;
    switch (which) {
        case 1: cfg.marked = MarkedSet(4, {2}); break;
        case 2:
            // Most significant qubit known; oracle on the low three qubits marks 010.
            cfg.known_qubits = {4};
            cfg.marked = MarkedSet(3, {0b010});
            break;
        case 3: cfg.marked = MarkedSet(4, {2, 5, 8, 10, 11, 13, 15}); break;
        default: throw ValidationError("unknown example " + std::to_string(which) + " (expected 1, 2 or 3)");
    }
    return cfg;
}

}  // namespace qamem
