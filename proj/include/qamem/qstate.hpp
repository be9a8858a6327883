#pragma once

// Joint state of an n-qubit register plus one flag qubit.
//
// Layout: amplitude(y, k) is stored at position 2*y + k, i.e. the flag is the
// fastest-varying bit of the linear index and register qubit j (1-based, qubit
// 1 = least significant) sits at bit j of the index. Every module relies on
// this layout.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qamem/core.hpp"
#include "qamem/gate_matrix.hpp"

namespace qamem {

/// Identifies either a register qubit (1..n) or the flag qubit.
class Qubit {
public:
    static constexpr Qubit reg(int j) { return Qubit(j); }
    static constexpr Qubit flag() { return Qubit(kFlagId); }

    constexpr bool is_flag() const { return id_ == kFlagId; }
    constexpr int register_index() const { return id_; }
    /// Bit position inside the linear amplitude index.
    constexpr int bit() const { return is_flag() ? 0 : id_; }

    friend constexpr bool operator==(Qubit, Qubit) = default;

    std::string name() const { return is_flag() ? "flag" : "q" + std::to_string(id_); }

private:
    static constexpr int kFlagId = -1;
    constexpr explicit Qubit(int id) : id_(id) {}
    int id_;
};

/// Sampling engine used for measurements; draws are converted to doubles
/// with explicit bit manipulation so sequences are portable across standard
/// libraries.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

class PureState {
public:
    /// Validates size and normalization (|norm^2 - 1| <= kNormTol).
    static PureState from_amplitudes(int n, std::vector<Complex> amps) {
        check_width(n);
        if (amps.size() != pow2(n + 1)) {
            throw ValidationError("PureState: expected " + std::to_string(pow2(n + 1)) +
                                  " amplitudes, got " + std::to_string(amps.size()));
        }
        PureState s(n, std::move(amps));
        const double dev = std::abs(s.norm_squared() - 1.0);
        if (dev > kNormTol) {
            throw ValidationError("PureState: amplitudes not normalized (|norm^2-1| = " + std::to_string(dev) + ")");
        }
        return s;
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    static PureState normalized(int n, std::vector<Complex> amps) {
        check_width(n);
        if (amps.size() != pow2(n + 1)) throw ValidationError("PureState: wrong amplitude count");
        PureState s(n, std::move(amps));
        s.renormalize();
        return s;
    }

    int n() const { return n_; }
    Index register_dim() const { return pow2(n_); }
    Index size() const { return amps_.size(); }

    Complex amplitude(Index y, int k) const { return amps_[2 * y + static_cast<Index>(k)]; }
    std::span<const Complex> amplitudes() const { return amps_; }

    double norm_squared() const {
        double acc = 0.0;
        for (const auto& a : amps_) acc += std::norm(a);
        return acc;
    }

    /// Register amplitudes of the flag = k branch (unnormalized).
    std::vector<Complex> flag_branch(int k) const {
        std::vector<Complex> out(register_dim());
        for (Index y = 0; y < register_dim(); ++y) out[y] = amplitude(y, k);
        return out;
    }

    static void check_width(int n) {
        if (n < 1 || n > kMaxRegisterQubits) {
            throw CapacityError("register width " + std::to_string(n) + " outside [1, " +
                                std::to_string(kMaxRegisterQubits) + "]");
        }
    }

private:
    PureState(int n, std::vector<Complex> amps) : n_(n), amps_(std::move(amps)) {}

    void renormalize() {
        const double nrm = std::sqrt(norm_squared());
        if (nrm == 0.0) throw ValidationError("PureState: zero vector cannot be normalized");
        for (auto& a : amps_) a /= nrm;
    }

    // Operations below build new states through this back door; they are
    // responsible for preserving the norm.
    friend class StateBuilder;

    int n_;
    std::vector<Complex> amps_;
};

/// Internal construction helper for operations that produce states whose norm
/// is preserved by construction (unitary maps, projections + renormalization).
class StateBuilder {
public:
    static PureState make(int n, std::vector<Complex> amps) { return PureState(n, std::move(amps)); }
    static PureState make_normalized(int n, std::vector<Complex> amps) {
        PureState s(n, std::move(amps));
        s.renormalize();
        return s;
    }
};

struct MeasurementOutcome {
    Index value = 0;
    PureState collapsed;
    double probability = 0.0;
};

//-----------------------------------------------------------------------------
// Construction
//-----------------------------------------------------------------------------

/// Uniform superposition of all 2^n register values with the flag at |0>.
inline PureState uniform_state(int n) {
    PureState::check_width(n);
    const Index dim = pow2(n);
    std::vector<Complex> amps(2 * dim);
    const double a = 1.0 / std::sqrt(static_cast<double>(dim));
    for (Index y = 0; y < dim; ++y) amps[2 * y] = a;
    return StateBuilder::make(n, std::move(amps));
}

inline PureState basis_state(int n, Index y, int k = 0) {
    PureState::check_width(n);
    if (y >= pow2(n) || (k != 0 && k != 1)) throw IndexError("basis_state: index out of range");
    std::vector<Complex> amps(pow2(n + 1));
    amps[2 * y + static_cast<Index>(k)] = 1.0;
    return StateBuilder::make(n, std::move(amps));
}

/// Equal positive amplitude on each listed (register value, flag bit).
inline PureState from_support(int n, std::span<const std::pair<Index, int>> support) {
    PureState::check_width(n);
    if (support.empty()) throw ValidationError("from_support: empty support");
    std::vector<Complex> amps(pow2(n + 1));
    const double a = 1.0 / std::sqrt(static_cast<double>(support.size()));
    for (const auto& [y, k] : support) {
        if (y >= pow2(n) || (k != 0 && k != 1)) {
            throw IndexError("from_support: entry (" + std::to_string(y) + "," + std::to_string(k) + ") out of range");
        }
        auto& slot = amps[2 * y + static_cast<Index>(k)];
        if (slot != Complex{}) {
            throw ValidationError("from_support: duplicate entry (" + std::to_string(y) + "," + std::to_string(k) + ")");
        }
        slot = a;
    }
    return StateBuilder::make(n, std::move(amps));
}

inline PureState from_support(int n, std::initializer_list<std::pair<Index, int>> support) {
    return from_support(n, std::span<const std::pair<Index, int>>(support.begin(), support.size()));
}

/// Nonzero (|amp| > tol) entries in ascending (register value, flag) order.
inline std::vector<std::pair<Index, int>> support(const PureState& s, double tol = kNormTol) {
    std::vector<std::pair<Index, int>> out;
    for (Index i = 0; i < s.size(); ++i) {
        if (std::abs(s.amplitudes()[i]) > tol) out.emplace_back(i >> 1, static_cast<int>(i & 1U));
    }
    return out;
}

//-----------------------------------------------------------------------------
// Gate application
//-----------------------------------------------------------------------------

enum class GateCheck { Unitary, Bypass };

namespace detail {

inline void check_qubit(const PureState& s, Qubit q) {
    if (!q.is_flag() && (q.register_index() < 1 || q.register_index() > s.n())) {
        throw IndexError("qubit " + q.name() + " out of range for n=" + std::to_string(s.n()));
    }
}

inline void check_gate(const GateMatrix& g, int dim, GateCheck check) {
    if (g.dim() != dim) throw ValidationError("gate dimension " + std::to_string(g.dim()) + ", expected " + std::to_string(dim));
    if (check == GateCheck::Unitary && !g.is_unitary(kUnitaryTol)) {
        throw ValidationError("gate is not unitary (defect " + std::to_string(g.unitarity_defect()) + ")");
    }
}

}  // namespace detail

/// Applies a 2x2 gate to one qubit. With GateCheck::Bypass a non-unitary gate
/// is accepted and the result is renormalized.
inline PureState apply_1q(const PureState& s, Qubit target, const GateMatrix& g, GateCheck check = GateCheck::Unitary) {
    detail::check_qubit(s, target);
    detail::check_gate(g, 2, check);
    std::vector<Complex> out(s.amplitudes().begin(), s.amplitudes().end());
    const Index stride = pow2(target.bit());
    const Complex g00 = g(0, 0), g01 = g(0, 1), g10 = g(1, 0), g11 = g(1, 1);
    for (Index i = 0; i < out.size(); ++i) {
        if (i & stride) continue;
        const Complex a0 = out[i];
        const Complex a1 = out[i | stride];
        out[i] = g00 * a0 + g01 * a1;
        out[i | stride] = g10 * a0 + g11 * a1;
    }
    if (check == GateCheck::Bypass) return StateBuilder::make_normalized(s.n(), std::move(out));
    return StateBuilder::make(s.n(), std::move(out));
}

/// Applies a 4x4 gate on the ordered pair (a, b); the gate's basis is
/// |a b> in {|00>,|01>,|10>,|11>}, a being the more significant position.
inline PureState apply_2q(const PureState& s, Qubit a, Qubit b, const GateMatrix& g, GateCheck check = GateCheck::Unitary) {
    detail::check_qubit(s, a);
    detail::check_qubit(s, b);
    if (a == b) throw ValidationError("apply_2q: target qubits must differ");
    detail::check_gate(g, 4, check);
    std::vector<Complex> out(s.amplitudes().begin(), s.amplitudes().end());
    const Index sa = pow2(a.bit());
    const Index sb = pow2(b.bit());
    for (Index i = 0; i < out.size(); ++i) {
        if ((i & sa) || (i & sb)) continue;
        const std::array<Index, 4> idx{i, i | sb, i | sa, i | sa | sb};
        std::array<Complex, 4> v{};
        for (int k = 0; k < 4; ++k) v[static_cast<std::size_t>(k)] = out[idx[static_cast<std::size_t>(k)]];
        const auto w = g.apply(v);
        for (int k = 0; k < 4; ++k) out[idx[static_cast<std::size_t>(k)]] = w[static_cast<std::size_t>(k)];
    }
    if (check == GateCheck::Bypass) return StateBuilder::make_normalized(s.n(), std::move(out));
    return StateBuilder::make(s.n(), std::move(out));
}

//-----------------------------------------------------------------------------
// Measurement
//-----------------------------------------------------------------------------

/// Exact Born probabilities of the flag outcomes {0, 1}.
inline std::array<double, 2> flag_probabilities(const PureState& s) {
    std::array<double, 2> p{0.0, 0.0};
    for (Index i = 0; i < s.size(); ++i) p[i & 1U] += std::norm(s.amplitudes()[i]);
    return p;
}

/// Exact Born probabilities of each register value.
inline std::vector<double> register_probabilities(const PureState& s) {
    std::vector<double> p(s.register_dim(), 0.0);
    for (Index i = 0; i < s.size(); ++i) p[i >> 1] += std::norm(s.amplitudes()[i]);
    return p;
}

/// Projects onto flag = k and renormalizes.
inline PureState project_flag(const PureState& s, int k) {
    std::vector<Complex> out(s.size());
    for (Index i = static_cast<Index>(k); i < s.size(); i += 2) out[i] = s.amplitudes()[i];
    return StateBuilder::make_normalized(s.n(), std::move(out));
}

inline PureState project_register(const PureState& s, Index y) {
    std::vector<Complex> out(s.size());
    out[2 * y] = s.amplitudes()[2 * y];
    out[2 * y + 1] = s.amplitudes()[2 * y + 1];
    return StateBuilder::make_normalized(s.n(), std::move(out));
}

namespace detail {

inline Index sample_index(std::span<const double> probs, Rng& rng) {
    const double u = uniform01(rng);
    double acc = 0.0;
    Index last_nonzero = 0;
    for (Index i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        last_nonzero = i;
        acc += probs[i];
        if (u < acc) return i;
    }
    return last_nonzero;
}

}  // namespace detail

inline MeasurementOutcome measure_flag(const PureState& s, Rng& rng) {
    const auto p = flag_probabilities(s);
    const Index k = detail::sample_index(p, rng);
    return {k, project_flag(s, static_cast<int>(k)), p[k]};
}

inline MeasurementOutcome measure_flag(const PureState& s, std::uint64_t seed) {
    Rng rng(seed);
    return measure_flag(s, rng);
}

inline MeasurementOutcome measure_register(const PureState& s, Rng& rng) {
    const auto p = register_probabilities(s);
    const Index y = detail::sample_index(p, rng);
    return {y, project_register(s, y), p[y]};
}

inline MeasurementOutcome measure_register(const PureState& s, std::uint64_t seed) {
    Rng rng(seed);
    return measure_register(s, rng);
}

/// Returns b when every amplitude with flag 1-b has magnitude <= tol.
inline std::optional<int> flag_disentangled(const PureState& s, double tol = kNormTol) {
    bool zero_on_0 = true, zero_on_1 = true;
    for (Index i = 0; i < s.size(); ++i) {
        if (std::abs(s.amplitudes()[i]) > tol) {
            if (i & 1U)
                zero_on_1 = false;
            else
                zero_on_0 = false;
        }
    }
    if (zero_on_0) return 1;
    if (zero_on_1) return 0;
    return std::nullopt;
}

//-----------------------------------------------------------------------------
// Comparison
//-----------------------------------------------------------------------------

inline double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// Rotates the vector so its first entry with |v| > tol is real positive.
inline std::vector<Complex> strip_global_phase(std::span<const Complex> v, double tol = kNormTol) {
    std::vector<Complex> out(v.begin(), v.end());
    for (const auto& a : v) {
        if (std::abs(a) > tol) {
            const Complex ph = std::conj(a) / std::abs(a);
            for (auto& x : out) x *= ph;
            break;
        }
    }
    return out;
}

/// Max elementwise distance after removing global phase from both sides.
inline double distance_up_to_phase(std::span<const Complex> a, std::span<const Complex> b) {
    const auto pa = strip_global_phase(a);
    const auto pb = strip_global_phase(b);
    return max_abs_diff(pa, pb);
}

inline double distance_up_to_phase(const PureState& a, const PureState& b) {
    if (a.n() != b.n()) return std::numeric_limits<double>::infinity();
    return distance_up_to_phase(a.amplitudes(), b.amplitudes());
}

/// Renders a support listing such as "0000|0 0001|0 0010|1".
inline std::string format_support(const PureState& s, double tol = kNormTol) {
    std::string out;
    for (const auto& [y, k] : support(s, tol)) {
        if (!out.empty()) out += ' ';
        out += to_binary(y, s.n());
        out += '|';
        out += static_cast<char>('0' + k);
    }
    return out;
}

}  // namespace qamem
