#pragma once

// Gate zoo for the nonlinear search and the nonlinear evolution (NLE) step.
//
// The NLE step acts on a (register qubit j, flag) pair. Fixing every other
// register qubit splits the state into groups of four amplitudes over
// |l k> in {|00>,|01>,|10>,|11>} (l = qubit j, k = flag). The nonlinear gates
// NL- and NL+ are only defined on the handful of canonical group states, so
// the step is provided twice:
//
//   nle_step_casewise  classifies each group and runs U, NL-, NL+, W (x) X on
//                      it, resolving NL-/NL+ per matched case;
//   nle_step_or        the induced global rule on uniform flag-function
//                      states: flag(y) <- flag(y) OR flag(y ^ 2^(j-1)).
//
// The two agree on every uniform flag-function state; tests check this
// exhaustively for small registers.

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qamem/core.hpp"
#include "qamem/gate_matrix.hpp"
#include "qamem/qstate.hpp"

namespace qamem {

//-----------------------------------------------------------------------------
// Fixed gates
//-----------------------------------------------------------------------------

/// W
inline GateMatrix hadamard() {
    const double h = kInvSqrt2;
    return {h, h, h, -h};
}

/// X
inline GateMatrix not_gate() { return {0.0, 1.0, 1.0, 0.0}; }

inline GateMatrix pauli_y() { return {0.0, Complex(0, -1), Complex(0, 1), 0.0}; }

inline GateMatrix pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }

inline GateMatrix identity2() { return {1.0, 0.0, 0.0, 1.0}; }

/// Two-qubit U of the NLE step, basis |l k>.
inline GateMatrix u_gate() {
    const double h = kInvSqrt2;
    // clang-format off
    return {h,   0.0, 0.0,  h,
            0.0, h,   h,    0.0,
            0.0, h,   -h,   0.0,
            h,   0.0, 0.0,  -h};
    // clang-format on
}

//-----------------------------------------------------------------------------
// Nonlinear-step gate families
//-----------------------------------------------------------------------------

/// gamma in {1, -1, i, -i} and the +/- branch of the M / Pi families.
struct NlPlusChoice {
    Complex gamma{1.0, 0.0};
    int sign = +1;
};

namespace detail {

inline void check_choice(const NlPlusChoice& c) {
    const bool unit = std::abs(c.gamma - Complex(1, 0)) < 1e-15 || std::abs(c.gamma - Complex(-1, 0)) < 1e-15 ||
                      std::abs(c.gamma - Complex(0, 1)) < 1e-15 || std::abs(c.gamma - Complex(0, -1)) < 1e-15;
    if (!unit) throw ValidationError("gamma must be one of 1, -1, i, -i");
    if (c.sign != 1 && c.sign != -1) throw ValidationError("sign must be +1 or -1");
}

inline void check_pair_normalized(Complex a, Complex b, const char* what) {
    const double dev = std::abs(std::norm(a) + std::norm(b) - 1.0);
    if (dev > kUnitaryTol) {
        std::ostringstream os;
        os << what << ": |a|^2 + |b|^2 deviates from 1 by " << dev;
        throw ValidationError(os.str());
    }
}

}  // namespace detail

/// NL+ realized as a unitary sending alpha|0> + beta|1> to |1>:
///   M = [[-/+ gamma beta, +/- gamma alpha], [alpha*, beta*]].
inline GateMatrix m_matrix(Complex alpha, Complex beta, NlPlusChoice choice = {}) {
    detail::check_pair_normalized(alpha, beta, "m_matrix");
    detail::check_choice(choice);
    const double s = choice.sign;
    const Complex g = choice.gamma;
    return {-s * g * beta, s * g * alpha, std::conj(alpha), std::conj(beta)};
}

/// NL+ for the |01>+|11> case, sending delta|0> + epsilon|1> to |0>:
///   Pi = [[delta*, epsilon*], [-/+ gamma epsilon, +/- gamma delta]].
inline GateMatrix pi_matrix(Complex delta, Complex epsilon, NlPlusChoice choice = {}) {
    detail::check_pair_normalized(delta, epsilon, "pi_matrix");
    detail::check_choice(choice);
    const double s = choice.sign;
    const Complex g = choice.gamma;
    return {std::conj(delta), std::conj(epsilon), -s * g * epsilon, s * g * delta};
}

/// The non-unitary V = [[1, 1/beta], [0, -alpha/beta]] proposed in earlier
/// work for NL+. Built without any unitarity check.
inline GateMatrix v_matrix(Complex alpha, Complex beta) {
    if (beta == Complex{}) throw DivisionError("v_matrix: beta must be nonzero");
    return {1.0, 1.0 / beta, 0.0, -alpha / beta};
}

//-----------------------------------------------------------------------------
// Conditional pair states
//-----------------------------------------------------------------------------

enum class NlePairCase {
    Case00_10,   // |00> + |10>
    Case10_01,   // |10> + |01>
    Case00_11,   // |00> + |11>
    Case01_11,   // |01> + |11>
    UniformAll,  // all four basis states
    LoneBranch,  // a single basis state: the partner register value is absent
    Unmatched,
};

inline const char* to_string(NlePairCase c) {
    switch (c) {
        case NlePairCase::Case00_10: return "|00>+|10>";
        case NlePairCase::Case10_01: return "|10>+|01>";
        case NlePairCase::Case00_11: return "|00>+|11>";
        case NlePairCase::Case01_11: return "|01>+|11>";
        case NlePairCase::UniformAll: return "|00>+|01>+|10>+|11>";
        case NlePairCase::LoneBranch: return "single basis state";
        case NlePairCase::Unmatched: return "unmatched";
    }
    return "?";
}

/// Classifies a four-amplitude conditional state over |l k> against the
/// canonical patterns, up to normalization and global phase.
inline NlePairCase classify_pair(std::span<const Complex, 4> v, double tol = kMatchTol) {
    double nrm2 = 0.0;
    for (const auto& a : v) nrm2 += std::norm(a);
    if (nrm2 <= tol * tol) return NlePairCase::Unmatched;
    const double nrm = std::sqrt(nrm2);

    unsigned mask = 0;
    int count = 0;
    Complex phase{};
    for (int i = 0; i < 4; ++i) {
        const Complex a = v[static_cast<std::size_t>(i)] / nrm;
        if (std::abs(a) > tol) {
            if (count == 0) phase = std::conj(a) / std::abs(a);
            mask |= 1U << i;
            ++count;
        }
    }
    const double expected = 1.0 / std::sqrt(static_cast<double>(count));
    for (int i = 0; i < 4; ++i) {
        if (!(mask & (1U << i))) continue;
        if (std::abs(v[static_cast<std::size_t>(i)] / nrm * phase - expected) > tol) return NlePairCase::Unmatched;
    }
    // bit i of mask <-> basis |l k> with i = 2l + k
    switch (mask) {
        case 0b0101: return NlePairCase::Case00_10;
        case 0b0110: return NlePairCase::Case10_01;
        case 0b1001: return NlePairCase::Case00_11;
        case 0b1010: return NlePairCase::Case01_11;
        case 0b1111: return NlePairCase::UniformAll;
        case 0b0001:
        case 0b0010:
        case 0b0100:
        case 0b1000: return NlePairCase::LoneBranch;
        default: return NlePairCase::Unmatched;
    }
}

/// Chooses the flag state NL- produces when its action is left open (the
/// cases where U leaves the flag in an equal superposition). Receives the
/// matched case and the normalized post-U group amplitudes; returns (a, b)
/// with |a|^2 + |b|^2 = 1.
using NlMinusResolver = std::function<std::array<Complex, 2>(NlePairCase, std::span<const Complex, 4>)>;

inline std::array<Complex, 2> default_nl_minus(NlePairCase, std::span<const Complex, 4>) {
    return {Complex(kInvSqrt2), Complex(kInvSqrt2)};
}

/// Group amplitudes after each stage of one NLE step.
struct NlePairTrace {
    NlePairCase matched = NlePairCase::Unmatched;
    std::array<Complex, 4> input{};
    std::array<Complex, 4> after_u{};
    std::array<Complex, 4> after_nl_minus{};
    std::array<Complex, 4> after_nl_plus{};
    std::array<Complex, 4> output{};
    GateMatrix nl_minus;  // effective 1-qubit action on the flag (X or I), identity when nonlinear
    GateMatrix nl_plus;   // M, Pi or I
};

/// Runs U, NL-, NL+ and W (x) X on one conditional group. The group may be
/// unnormalized; its norm and global phase are carried through unchanged.
/// Groups that do not match a canonical case raise SemanticsError; lone
/// branches pass through untouched.
inline NlePairTrace evolve_pair(std::span<const Complex, 4> group, const NlMinusResolver& resolve = default_nl_minus,
                                NlPlusChoice choice = {}) {
    NlePairTrace t;
    std::copy(group.begin(), group.end(), t.input.begin());
    t.matched = classify_pair(group);

    auto passthrough = [&] {
        t.after_u = t.after_nl_minus = t.after_nl_plus = t.output = t.input;
        return t;
    };

    switch (t.matched) {
        case NlePairCase::LoneBranch: return passthrough();
        case NlePairCase::Unmatched: {
            double nrm2 = 0.0;
            for (const auto& a : group) nrm2 += std::norm(a);
            if (nrm2 == 0.0) return passthrough();
            std::ostringstream os;
            os << "NLE: conditional (qubit, flag) state matches no case the nonlinear gates are defined on; "
                  "amplitudes over |00>,|01>,|10>,|11> = ";
            for (const auto& a : group) os << a << ' ';
            throw SemanticsError(os.str());
        }
        default: break;
    }

    double nrm2 = 0.0;
    for (const auto& a : group) nrm2 += std::norm(a);
    const double w = std::sqrt(nrm2);
    Complex phase{};
    for (const auto& a : group) {
        if (std::abs(a) > kMatchTol * w) {
            phase = a / std::abs(a);
            break;
        }
    }

    t.after_u = u_gate().apply(t.input);

    // NL-: either a fixed 1-qubit gate on the flag or the nonlinear collapse
    // onto |0>(a|0> + b|1>).
    std::array<Complex, 2> ab{};
    switch (t.matched) {
        case NlePairCase::Case10_01:
            t.nl_minus = not_gate();
            t.after_nl_minus = kron(identity2(), t.nl_minus).apply(t.after_u);
            break;
        case NlePairCase::Case00_11:
            t.nl_minus = identity2();
            t.after_nl_minus = t.after_u;
            break;
        default: {
            std::array<Complex, 4> normalized{};
            for (std::size_t i = 0; i < 4; ++i) normalized[i] = t.after_u[i] / (w * phase);
            ab = resolve(t.matched, normalized);
            detail::check_pair_normalized(ab[0], ab[1], "NL- resolver");
            t.nl_minus = identity2();
            t.after_nl_minus = {w * phase * ab[0], w * phase * ab[1], 0.0, 0.0};
            break;
        }
    }

    switch (t.matched) {
        case NlePairCase::Case00_10: t.nl_plus = m_matrix(ab[0], ab[1], choice); break;
        case NlePairCase::Case01_11:
        case NlePairCase::UniformAll: t.nl_plus = pi_matrix(ab[0], ab[1], choice); break;
        default: t.nl_plus = identity2(); break;
    }
    t.after_nl_plus = kron(identity2(), t.nl_plus).apply(t.after_nl_minus);
    t.output = kron(hadamard(), not_gate()).apply(t.after_nl_plus);
    return t;
}

//-----------------------------------------------------------------------------
// Whole-register NLE steps
//-----------------------------------------------------------------------------

namespace detail {

inline void check_register_qubit(const PureState& s, int j) {
    if (j < 1 || j > s.n()) {
        throw IndexError("NLE: register qubit " + std::to_string(j) + " out of range for n=" + std::to_string(s.n()));
    }
}

}  // namespace detail

/// Checks the preconditions of nle_step_or: every nonzero amplitude has the
/// same magnitude and each register value carries at most one flag value.
/// Returns an empty string when they hold, else a diagnostic.
inline std::string or_step_violation(const PureState& s, double tol = kMatchTol) {
    double ref = -1.0;
    for (Index y = 0; y < s.register_dim(); ++y) {
        const double m0 = std::abs(s.amplitude(y, 0));
        const double m1 = std::abs(s.amplitude(y, 1));
        if (m0 > tol && m1 > tol) {
            return "register value " + std::to_string(y) + " carries both flag values";
        }
        const double m = std::max(m0, m1);
        if (m <= tol) continue;
        if (ref < 0.0) ref = m;
        if (std::abs(m - ref) > tol) return "support amplitudes are not uniform in magnitude";
    }
    return {};
}

/// flag(y) <- flag(y) OR flag(y ^ 2^(j-1)); amplitudes move with their
/// register value. A register value whose partner is outside the support
/// keeps its flag.
inline PureState nle_step_or(const PureState& s, int j) {
    detail::check_register_qubit(s, j);
    if (const auto why = or_step_violation(s); !why.empty()) {
        throw SemanticsError("nle_step_or requires a uniform flag-function state (" + why +
                             "); use nle_step_casewise for other states");
    }
    const Index bit = pow2(j - 1);
    const Index dim = s.register_dim();
    auto flag_of = [&](Index y) -> int {
        if (std::abs(s.amplitude(y, 1)) > kMatchTol) return 1;
        return 0;
    };
    std::vector<Complex> out(s.size());
    for (Index y = 0; y < dim; ++y) {
        const int k = flag_of(y);
        const Complex a = s.amplitude(y, k);
        if (std::abs(a) <= kMatchTol) continue;
        const int nk = k | flag_of(y ^ bit);
        out[2 * y + static_cast<Index>(nk)] = a;
    }
    return StateBuilder::make(s.n(), std::move(out));
}

/// Applies the NLE step group by group through evolve_pair; the result is
/// renormalized to absorb rounding.
inline PureState nle_step_casewise(const PureState& s, int j, const NlMinusResolver& resolve = default_nl_minus,
                                   NlPlusChoice choice = {}) {
    detail::check_register_qubit(s, j);
    detail::check_choice(choice);
    const Index bit = pow2(j - 1);
    const Index dim = s.register_dim();
    std::vector<Complex> out(s.size());
    for (Index y = 0; y < dim; ++y) {
        if (y & bit) continue;
        const std::array<Index, 4> idx{2 * y, 2 * y + 1, 2 * (y | bit), 2 * (y | bit) + 1};
        std::array<Complex, 4> g{};
        for (std::size_t i = 0; i < 4; ++i) g[i] = s.amplitudes()[idx[i]];
        NlePairTrace t;
        try {
            t = evolve_pair(g, resolve, choice);
        } catch (const SemanticsError& e) {
            throw SemanticsError(std::string(e.what()) + " [qubit " + std::to_string(j) + ", other qubits " +
                                 to_binary(y, s.n()) + "]");
        }
        for (std::size_t i = 0; i < 4; ++i) out[idx[i]] = t.output[i];
    }
    return StateBuilder::make_normalized(s.n(), std::move(out));
}

}  // namespace qamem
