#pragma once

// Pattern storage and the flag-conditional maps of the retrieval circuit.
//
// The storage operator only has to honor its contract
//     storage |z> = (1/sqrt(p)) sum_{patterns} |pattern>,
// so it is realized as the Householder reflection exchanging |z> and the
// pattern superposition. It is Hermitian, unitary and an involution, and is
// applied in O(2^n) without materializing the matrix. The same construction
// gives S: S = I - |d><d| with d = |z> - |x>.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qamem/core.hpp"
#include "qamem/gate_matrix.hpp"
#include "qamem/qstate.hpp"

namespace qamem {

/// Dense operators over the register are materialized only up to this width.
inline constexpr int kMaxDenseQubits = 12;

/// Normalized register-space amplitude vector (the sought state |x>).
class TargetState {
public:
    static TargetState from_amplitudes(int n, std::vector<Complex> amps) {
        PureState::check_width(n);
        if (amps.size() != pow2(n)) throw ValidationError("TargetState: expected 2^n amplitudes");
        double nrm2 = 0.0;
        for (const auto& a : amps) nrm2 += std::norm(a);
        if (std::abs(nrm2 - 1.0) > kNormTol) throw ValidationError("TargetState: amplitudes not normalized");
        return TargetState(n, std::move(amps));
    }

    /// Uniform superposition of the given distinct register values.
    static TargetState uniform_over(int n, const std::vector<Index>& values) {
        PureState::check_width(n);
        if (values.empty()) throw ValidationError("TargetState: empty value list");
        std::vector<Complex> amps(pow2(n));
        const double a = 1.0 / std::sqrt(static_cast<double>(values.size()));
        for (Index v : values) {
            if (v >= pow2(n)) throw ValidationError("TargetState: value out of range");
            if (amps[v] != Complex{}) throw ValidationError("TargetState: repeated value");
            amps[v] = a;
        }
        return TargetState(n, std::move(amps));
    }

    int n() const { return n_; }
    const std::vector<Complex>& amplitudes() const { return amps_; }

private:
    TargetState(int n, std::vector<Complex> amps) : n_(n), amps_(std::move(amps)) {}
    int n_;
    std::vector<Complex> amps_;
};

/// I - 2 |u><u| / <u|u>, or the identity when u = 0.
class Reflection {
public:
    Reflection() = default;
    explicit Reflection(std::vector<Complex> u) : u_(std::move(u)) {
        for (const auto& a : u_) uu_ += std::norm(a);
    }

    bool is_identity() const { return uu_ == 0.0; }

    void apply_inplace(std::span<Complex> v) const {
        if (is_identity()) return;
        Complex dot{};
        for (std::size_t i = 0; i < v.size(); ++i) dot += std::conj(u_[i]) * v[i];
        const Complex coef = 2.0 * dot / uu_;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= coef * u_[i];
    }

    Matrix matrix(Index dim) const {
        Matrix m = Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        if (is_identity()) return m;
        Eigen::VectorXcd u(static_cast<Eigen::Index>(dim));
        for (Index i = 0; i < dim; ++i) u(static_cast<Eigen::Index>(i)) = u_[i];
        m -= (2.0 / uu_) * u * u.adjoint();
        return m;
    }

private:
    std::vector<Complex> u_;
    double uu_ = 0.0;
};

/// Stored patterns and the storage unitary preparing their superposition from |z>.
class PatternStore {
public:
    int n() const { return n_; }
    Index z() const { return z_; }
    std::size_t p() const { return patterns_.size(); }
    const std::vector<Index>& patterns() const { return patterns_; }
    bool stores(Index y) const { return std::binary_search(patterns_.begin(), patterns_.end(), y); }

    /// (1/sqrt(p)) sum |pattern>
    std::vector<Complex> superposition() const {
        std::vector<Complex> t(pow2(n_));
        const double a = 1.0 / std::sqrt(static_cast<double>(patterns_.size()));
        for (Index v : patterns_) t[v] = a;
        return t;
    }

    /// Applies the storage unitary to a register vector. The reflection is
    /// self-adjoint, so this is also its inverse.
    void apply_inplace(std::span<Complex> reg) const { reflection_.apply_inplace(reg); }

    /// Dense storage unitary; only for n <= kMaxDenseQubits.
    Matrix storage_unitary() const {
        if (n_ > kMaxDenseQubits) throw CapacityError("storage_unitary: register too wide to materialize");
        return reflection_.matrix(pow2(n_));
    }

private:
    friend PatternStore build_storage(std::vector<Index>, int, Index);
    int n_ = 0;
    Index z_ = 0;
    std::vector<Index> patterns_;
    Reflection reflection_;
};

inline PatternStore build_storage(std::vector<Index> patterns, int n, Index z = 0) {
    PureState::check_width(n);
    if (patterns.empty()) throw ValidationError("build_storage: no patterns");
    std::sort(patterns.begin(), patterns.end());
    if (std::adjacent_find(patterns.begin(), patterns.end()) != patterns.end()) {
        throw ValidationError("build_storage: repeated pattern");
    }
    if (patterns.back() >= pow2(n)) throw ValidationError("build_storage: pattern out of range");
    if (z >= pow2(n)) throw ValidationError("build_storage: z out of range");

    PatternStore s;
    s.n_ = n;
    s.z_ = z;
    s.patterns_ = std::move(patterns);
    auto u = s.superposition();
    for (auto& a : u) a = -a;
    u[z] += 1.0;
    // u == 0 when the only pattern is z itself.
    double uu = 0.0;
    for (const auto& a : u) uu += std::norm(a);
    if (uu > 1e-30) s.reflection_ = Reflection(std::move(u));
    return s;
}

inline std::vector<Index> all_patterns(int n) {
    std::vector<Index> v(pow2(n));
    for (Index i = 0; i < v.size(); ++i) v[i] = i;
    return v;
}

namespace detail {

template <typename F>
PureState map_branch(const PureState& s, int k, F&& f) {
    std::vector<Complex> amps(s.amplitudes().begin(), s.amplitudes().end());
    auto branch = s.flag_branch(k);
    f(std::span<Complex>(branch));
    for (Index y = 0; y < s.register_dim(); ++y) amps[2 * y + static_cast<Index>(k)] = branch[y];
    return StateBuilder::make(s.n(), std::move(amps));
}

inline void check_width(const PureState& s, int n, const char* what) {
    if (s.n() != n) {
        throw ValidationError(std::string(what) + ": register width " + std::to_string(s.n()) + " != " +
                              std::to_string(n));
    }
}

}  // namespace detail

/// Storage unitary on the register, both flag branches.
inline PureState apply_storage(const PureState& s, const PatternStore& store) {
    detail::check_width(s, store.n(), "apply_storage");
    auto out = detail::map_branch(s, 0, [&](std::span<Complex> r) { store.apply_inplace(r); });
    return detail::map_branch(out, 1, [&](std::span<Complex> r) { store.apply_inplace(r); });
}

/// C(storage)^dagger: inverse storage on the flag-1 branch only.
inline PureState apply_storage_inverse_conditional(const PureState& s, const PatternStore& store) {
    detail::check_width(s, store.n(), "apply_storage_inverse_conditional");
    return detail::map_branch(s, 1, [&](std::span<Complex> r) { store.apply_inplace(r); });
}

//-----------------------------------------------------------------------------
// S and CS
//-----------------------------------------------------------------------------

/// S = sum_{y != z}|y><y| + |x><z| + |z><x| - |x><x|, held as I - |d><d|
/// with d = |z> - |x>.
class SwapReflection {
public:
    SwapReflection(Index z, const TargetState& x) : n_(x.n()), z_(z) {
        if (z >= pow2(n_)) throw ValidationError("S: z out of range");
        const Complex overlap = x.amplitudes()[z];
        if (std::abs(overlap) > kNormTol) {
            std::ostringstream os;
            os << "S: sought state overlaps |z> (<z|x> = " << overlap << "); |z> must be orthogonal to |x>";
            throw ValidationError(os.str());
        }
        auto d = x.amplitudes();
        for (auto& a : d) a = -a;
        d[z] += 1.0;
        reflection_ = Reflection(std::move(d));
    }

    int n() const { return n_; }
    Index z() const { return z_; }
    void apply_inplace(std::span<Complex> reg) const { reflection_.apply_inplace(reg); }

    Matrix matrix() const {
        if (n_ > kMaxDenseQubits) throw CapacityError("S: register too wide to materialize");
        return reflection_.matrix(pow2(n_));
    }

private:
    int n_;
    Index z_;
    Reflection reflection_;
};

/// Dense S for inspection and tests.
inline Matrix build_s(Index z, const TargetState& x, int n) {
    if (x.n() != n) throw ValidationError("build_s: width mismatch");
    return SwapReflection(z, x).matrix();
}

/// CS = I (x) |0><0| + S (x) |1><1|.
inline PureState cs_apply(const PureState& s, Index z, const TargetState& x) {
    detail::check_width(s, x.n(), "cs_apply");
    const SwapReflection sw(z, x);
    return detail::map_branch(s, 1, [&](std::span<Complex> r) { sw.apply_inplace(r); });
}

//-----------------------------------------------------------------------------
// Plain-text matrix dump: one row per line, entries "re,im" separated by a
// single space, row-major.
//-----------------------------------------------------------------------------

inline void write_matrix(std::ostream& os, const Matrix& m) {
    std::ostringstream line;
    line << std::setprecision(17);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        line.str({});
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) line << ' ';
            line << m(r, c).real() << ',' << m(r, c).imag();
        }
        os << line.str() << '\n';
    }
}

inline Matrix read_matrix(std::istream& is) {
    std::vector<std::vector<Complex>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<Complex> row;
        std::string tok;
        while (ls >> tok) {
            const auto comma = tok.find(',');
            if (comma == std::string::npos) throw ValidationError("read_matrix: entry without comma: " + tok);
            row.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
        }
        if (!rows.empty() && row.size() != rows.front().size()) throw ValidationError("read_matrix: ragged rows");
        rows.push_back(std::move(row));
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
}

}  // namespace qamem
