#pragma once

// Single-qubit Kraus channels inserted after the Hadamard of each NLE step,
// the closed-form overlap factors tau, and the fidelities F0 and F1.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qamem/core.hpp"
#include "qamem/gate_matrix.hpp"
#include "qamem/memory.hpp"
#include "qamem/retrieval.hpp"

namespace qamem {

using Mat2 = Eigen::Matrix2cd;

enum class ChannelKind { BitFlip, PhaseFlip, BitPhaseFlip, AmplitudeDamping, PhaseDamping, Depolarizing };

inline constexpr std::array<ChannelKind, 6> kAllChannels = {
    ChannelKind::BitFlip,          ChannelKind::PhaseFlip,    ChannelKind::BitPhaseFlip,
    ChannelKind::AmplitudeDamping, ChannelKind::PhaseDamping, ChannelKind::Depolarizing};

inline const char* to_string(ChannelKind k) {
    switch (k) {
        case ChannelKind::BitFlip: return "bit_flip";
        case ChannelKind::PhaseFlip: return "phase_flip";
        case ChannelKind::BitPhaseFlip: return "bit_phase_flip";
        case ChannelKind::AmplitudeDamping: return "amplitude_damping";
        case ChannelKind::PhaseDamping: return "phase_damping";
        case ChannelKind::Depolarizing: return "depolarizing";
    }
    return "?";
}

inline ChannelKind parse_channel(const std::string& s) {
    for (auto k : kAllChannels) {
        if (s == to_string(k)) return k;
    }
    throw ValidationError("unknown channel '" + s +
                          "' (expected bit_flip, phase_flip, bit_phase_flip, amplitude_damping, phase_damping or "
                          "depolarizing)");
}

/// Tolerances for density checks.
inline constexpr double kDensityTol = 1e-12;

namespace pauli {
inline Mat2 I() { return Mat2::Identity(); }
inline Mat2 X() { Mat2 m; m << 0, 1, 1, 0; return m; }
inline Mat2 Y() { Mat2 m; m << 0, Complex(0, -1), Complex(0, 1), 0; return m; }
inline Mat2 Z() { Mat2 m; m << 1, 0, 0, -1; return m; }
}  // namespace pauli

struct KrausChannel {
    ChannelKind kind = ChannelKind::BitFlip;
    double eta = 0.0;
    std::vector<Mat2> operators;

    /// sum E^dagger E - I, max-abs.
    double completeness_defect() const {
        Mat2 s = Mat2::Zero();
        for (const auto& e : operators) s += e.adjoint() * e;
        return (s - Mat2::Identity()).cwiseAbs().maxCoeff();
    }
};

inline void check_eta(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("eta must lie in [0, 1], got " + std::to_string(eta));
}

/// Kraus sets exactly as listed in the channel table, amplitude damping included.
inline KrausChannel printed_kraus(ChannelKind kind, double eta) {
    check_eta(eta);
    const double a = std::sqrt(1.0 - eta);
    const double b = std::sqrt(eta);
    KrausChannel ch{kind, eta, {}};
    auto damp0 = [&] {
        Mat2 m;
        m << 1, 0, 0, a;
        return m;
    };
    switch (kind) {
        case ChannelKind::BitFlip: ch.operators = {a * pauli::I(), b * pauli::X()}; break;
        case ChannelKind::PhaseFlip: ch.operators = {a * pauli::I(), b * pauli::Z()}; break;
        case ChannelKind::BitPhaseFlip: ch.operators = {a * pauli::I(), b * pauli::Y()}; break;
        case ChannelKind::AmplitudeDamping: {
            Mat2 e1;
            e1 << 0, 0, b, 0;  // sqrt(eta) |1><0|
            ch.operators = {damp0(), e1};
            break;
        }
        case ChannelKind::PhaseDamping: {
            Mat2 e1;
            e1 << 0, 0, 0, b;
            ch.operators = {damp0(), e1};
            break;
        }
        case ChannelKind::Depolarizing: {
            const double c = std::sqrt(eta / 3.0);
            ch.operators = {a * pauli::I(), c * pauli::X(), c * pauli::Y(), c * pauli::Z()};
            break;
        }
    }
    return ch;
}

/// Channel used by the simulator. Identical to printed_kraus except for
/// amplitude damping, whose decay operator is sqrt(eta) |0><1|: the listed
/// sqrt(eta) |1><0| is not trace preserving and does not produce the
/// tabulated output density or tau.
inline KrausChannel make_channel(ChannelKind kind, double eta) {
    auto ch = printed_kraus(kind, eta);
    if (kind == ChannelKind::AmplitudeDamping) {
        Mat2 e1;
        e1 << 0, std::sqrt(eta), 0, 0;
        ch.operators[1] = e1;
    }
    return ch;
}

//-----------------------------------------------------------------------------
// Densities
//-----------------------------------------------------------------------------

/// Validated single-qubit density matrix.
class QubitDensity {
public:
    explicit QubitDensity(const Mat2& rho) : rho_(rho) { validate(rho_); }

    static void validate(const Mat2& rho) {
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kDensityTol) throw ValidationError("density: not Hermitian");
        if (std::abs(rho.trace() - 1.0) > kDensityTol) throw ValidationError("density: trace != 1");
        Eigen::SelfAdjointEigenSolver<Mat2> es(rho);
        if (es.eigenvalues().minCoeff() < -kDensityTol) throw ValidationError("density: negative eigenvalue");
    }

    const Mat2& matrix() const { return rho_; }
    Complex operator()(int r, int c) const { return rho_(r, c); }

private:
    Mat2 rho_;
};

using ProductDensity = std::vector<QubitDensity>;

/// W|0><0|W^dagger = |+><+|.
inline QubitDensity rho_in() {
    Mat2 m;
    m << 0.5, 0.5, 0.5, 0.5;
    return QubitDensity(m);
}

inline QubitDensity apply_channel(const QubitDensity& rho, const KrausChannel& ch) {
    Mat2 out = Mat2::Zero();
    for (const auto& e : ch.operators) out += e * rho.matrix() * e.adjoint();
    // Remove rounding asymmetry before validation.
    out = 0.5 * (out + out.adjoint()).eval();
    return QubitDensity(out);
}

/// Output density column of the noise-effect table, for input rho_in.
inline Mat2 tabulated_output(ChannelKind kind, double eta) {
    check_eta(eta);
    const double s = std::sqrt(1.0 - eta);
    Mat2 m;
    switch (kind) {
        case ChannelKind::BitFlip: m << 1, 1, 1, 1; break;
        case ChannelKind::PhaseFlip:
        case ChannelKind::BitPhaseFlip: m << 1, 1 - 2 * eta, 1 - 2 * eta, 1; break;
        case ChannelKind::AmplitudeDamping: m << 1 + eta, s, s, 1 - eta; break;
        case ChannelKind::PhaseDamping: m << 1, s, s, 1; break;
        case ChannelKind::Depolarizing: m << 1, 1 - 4 * eta / 3, 1 - 4 * eta / 3, 1; break;
    }
    return 0.5 * m;
}

//-----------------------------------------------------------------------------
// tau and F0
//-----------------------------------------------------------------------------

inline void check_factor(Complex alpha, Complex beta) {
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > kNormTol) {
        throw ValidationError("|alpha|^2 + |beta|^2 must equal 1");
    }
}

/// <phi| K(rho_in) |phi> in closed form, phi = alpha|0> + beta|1>.
inline double tau(ChannelKind kind, Complex alpha, Complex beta, double eta) {
    check_eta(eta);
    check_factor(alpha, beta);
    // |s| <= 2|alpha||beta| <= 1; rounding in alpha, beta can push it past 1.
    const double s = std::clamp(2.0 * (std::conj(alpha) * beta).real(), -1.0, 1.0);
    double t = 0.0;
    switch (kind) {
        case ChannelKind::BitFlip: t = 0.5 * (1.0 + s); break;
        case ChannelKind::PhaseFlip:
        case ChannelKind::BitPhaseFlip: t = 0.5 * (1.0 + s * (1.0 - 2.0 * eta)); break;
        case ChannelKind::AmplitudeDamping:
            t = 0.5 * (1.0 + (std::norm(alpha) - std::norm(beta)) * eta + s * std::sqrt(1.0 - eta));
            break;
        case ChannelKind::PhaseDamping: t = 0.5 * (1.0 + s * std::sqrt(1.0 - eta)); break;
        case ChannelKind::Depolarizing: t = 0.5 * (1.0 + s * (1.0 - 4.0 * eta / 3.0)); break;
    }
    return std::clamp(t, 0.0, 1.0);
}

/// <phi| rho |phi>
inline double expectation(const Mat2& rho, Complex alpha, Complex beta) {
    Eigen::Vector2cd phi(alpha, beta);
    return (phi.adjoint() * rho * phi)(0, 0).real();
}

/// tau^(n/2).
inline double fidelity_f0(ChannelKind kind, double eta, int n, Complex alpha = kInvSqrt2, Complex beta = kInvSqrt2) {
    if (n < 1) throw ValidationError("fidelity_f0: n must be >= 1");
    return std::pow(tau(kind, alpha, beta, eta), 0.5 * n);
}

struct QubitNoise {
    ChannelKind kind = ChannelKind::BitFlip;
    double eta = 0.0;
    Complex alpha = kInvSqrt2;
    Complex beta = kInvSqrt2;
};

/// (prod_j tau_j)^(1/2) for per-qubit channels and factors.
inline double fidelity_f0(std::span<const QubitNoise> qubits) {
    if (qubits.empty()) throw ValidationError("fidelity_f0: no qubits");
    double log_sum = 0.0;
    for (const auto& q : qubits) {
        const double t = tau(q.kind, q.alpha, q.beta, q.eta);
        if (t <= 0.0) return 0.0;
        log_sum += std::log(t);
    }
    return std::exp(0.5 * log_sum);
}

struct CurvePoint {
    double eta;
    double fidelity;
};

/// F0 over the uniform grid eta_i = i / (steps - 1).
inline std::vector<CurvePoint> fidelity_curve(ChannelKind kind, int n, int steps, Complex alpha = kInvSqrt2,
                                              Complex beta = kInvSqrt2) {
    if (steps < 2) throw ValidationError("fidelity_curve: need at least 2 grid points");
    std::vector<CurvePoint> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        const double eta = i == steps - 1 ? 1.0 : static_cast<double>(i) / (steps - 1);
        out.push_back({eta, fidelity_f0(kind, eta, n, alpha, beta)});
    }
    return out;
}

//-----------------------------------------------------------------------------
// Pure-state and general fidelity
//-----------------------------------------------------------------------------

inline void validate_density(const Matrix& rho) {
    if (rho.rows() != rho.cols() || rho.rows() == 0) throw ValidationError("density: not a square matrix");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw ValidationError("density: not Hermitian");
    if (std::abs(rho.trace() - 1.0) > 1e-10) throw ValidationError("density: trace != 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw ValidationError("density: negative eigenvalue");
}

/// sqrt(<psi| rho |psi>).
inline double fidelity_pure(std::span<const Complex> psi, const Matrix& rho) {
    if (static_cast<Eigen::Index>(psi.size()) != rho.rows() || rho.rows() != rho.cols()) {
        throw ValidationError("fidelity_pure: dimension mismatch");
    }
    Eigen::Map<const Eigen::VectorXcd> v(psi.data(), static_cast<Eigen::Index>(psi.size()));
    if (std::abs(v.squaredNorm() - 1.0) > kNormTol) throw ValidationError("fidelity_pure: psi not normalized");
    const double e = (v.adjoint() * rho * v)(0, 0).real();
    return std::sqrt(std::clamp(e, 0.0, 1.0));
}

/// Product form: psi = (x)_j (alpha_j|0> + beta_j|1>) against (x)_j rho_j.
inline double fidelity_pure(std::span<const std::array<Complex, 2>> factors, const ProductDensity& rho) {
    if (factors.size() != rho.size()) throw ValidationError("fidelity_pure: factor count mismatch");
    double prod = 1.0;
    for (std::size_t j = 0; j < rho.size(); ++j) {
        check_factor(factors[j][0], factors[j][1]);
        prod *= expectation(rho[j].matrix(), factors[j][0], factors[j][1]);
    }
    return std::sqrt(std::clamp(prod, 0.0, 1.0));
}

namespace detail {

/// Eigenvalues within rounding of zero are treated as exact zeros; their
/// square roots would otherwise leak O(1e-8) into the result.
inline Matrix psd_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    const double cut = 1e-13 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    const Eigen::VectorXd d = es.eigenvalues().unaryExpr([cut](double l) { return l <= cut ? 0.0 : std::sqrt(l); });
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// F1(sigma, gamma) = tr sqrt(sqrt(sigma) gamma sqrt(sigma)), evaluated as the
/// trace norm of sqrt(gamma) sqrt(sigma) so that no eigenvalue near zero is
/// square-rooted a second time.
inline double fidelity_general(const Matrix& sigma, const Matrix& gamma) {
    if (sigma.rows() != gamma.rows() || sigma.cols() != gamma.cols()) {
        throw ValidationError("fidelity_general: dimension mismatch");
    }
    if (sigma.rows() > 1024) throw CapacityError("fidelity_general: dimension above 1024");
    validate_density(sigma);
    validate_density(gamma);
    const Matrix a = detail::psd_sqrt(gamma) * detail::psd_sqrt(sigma);
    Eigen::BDCSVD<Matrix> svd(a);
    return std::clamp(svd.singularValues().sum(), 0.0, 1.0);
}

//-----------------------------------------------------------------------------
// Register densities for the noisy pipeline
//-----------------------------------------------------------------------------

/// Factor j (register qubit j) = K_j(rho_in).
inline ProductDensity noisy_nle_density(int n, std::span<const KrausChannel> channels) {
    if (n < 1) throw ValidationError("noisy_nle_density: n must be >= 1");
    if (channels.size() != static_cast<std::size_t>(n)) {
        throw ValidationError("noisy_nle_density: expected one channel per register qubit");
    }
    ProductDensity out;
    out.reserve(channels.size());
    for (const auto& ch : channels) out.push_back(apply_channel(rho_in(), ch));
    return out;
}

inline ProductDensity noisy_nle_density(int n, const KrausChannel& channel) {
    std::vector<KrausChannel> chs(static_cast<std::size_t>(std::max(n, 0)), channel);
    return noisy_nle_density(n, chs);
}

inline constexpr int kMaxNoisyQubits = 8;

/// Full 2^n density; factor j acts on register bit j - 1.
inline Matrix expand(const ProductDensity& rho) {
    const int n = static_cast<int>(rho.size());
    if (n > kMaxNoisyQubits) throw CapacityError("expand: more than 8 qubits");
    const auto dim = static_cast<Eigen::Index>(pow2(n));
    Matrix out(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            Complex v = 1.0;
            for (int j = 0; j < n; ++j) v *= rho[static_cast<std::size_t>(j)]((r >> j) & 1, (c >> j) & 1);
            out(r, c) = v;
        }
    }
    return out;
}

struct NoisyRetrievalFidelity {
    double before_retrieval;  // F1(ideal NLE density, noisy NLE density)
    double after_retrieval;   // F1(sigma, Gamma), both conjugated by S (BDD)^dagger
};

/// Compares the noiseless and noisy register densities after NLE, then after
/// Gamma = S (BDD)^dagger rho_out (BDD) S^dagger.
inline NoisyRetrievalFidelity noisy_retrieval_fidelity(const RetrievalConfig& cfg, const KrausChannel& channel) {
    if (cfg.n > kMaxNoisyQubits) throw CapacityError("noisy_retrieval_fidelity: n above 8");
    PureState::check_width(cfg.n);
    const KnownQubits known(cfg.n, cfg.known_qubits);
    const auto store = build_storage(cfg.patterns.empty() ? all_patterns(cfg.n) : cfg.patterns, cfg.n, cfg.z);
    std::vector<Index> sought;
    for (Index y : expand_marked(cfg.marked, known)) {
        if (store.stores(y)) sought.push_back(y);
    }
    const TargetState x = cfg.x_override ? *cfg.x_override : TargetState::uniform_over(cfg.n, sought);
    const Matrix u = SwapReflection(cfg.z, x).matrix() * store.storage_unitary().adjoint();

    const Matrix ideal = expand(noisy_nle_density(cfg.n, make_channel(channel.kind, 0.0)));
    const Matrix noisy = expand(noisy_nle_density(cfg.n, channel));
    const Matrix sigma = u * ideal * u.adjoint();
    const Matrix gamma = u * noisy * u.adjoint();
    return {fidelity_general(ideal, noisy), fidelity_general(sigma, gamma)};
}

//-----------------------------------------------------------------------------
// Cross-check of the channel table
//-----------------------------------------------------------------------------

struct ChannelTableCheck {
    ChannelKind kind;
    bool printed_complete;        // listed Kraus set is trace preserving
    bool printed_matches_output;  // listed Kraus set yields the tabulated output density
    bool output_matches_tau;      // tabulated output density yields the tau formula
    bool channel_matches_tau;     // simulator channel yields the tau formula

    bool printed_consistent() const { return printed_complete && printed_matches_output && output_matches_tau; }
};

inline ChannelTableCheck check_channel_table(ChannelKind kind, int grid = 11, int random_pairs = 64,
                                             std::uint64_t seed = 7) {
    constexpr double tol = 1e-12;
    ChannelTableCheck res{kind, true, true, true, true};
    Rng rng(seed);
    std::vector<std::array<Complex, 2>> phis = {{kInvSqrt2, kInvSqrt2}, {1.0, 0.0}, {0.0, 1.0}};
    for (int i = 0; i < random_pairs; ++i) {
        const double th = std::acos(1.0 - 2.0 * uniform01(rng)) / 2.0;
        const double ph = 2.0 * std::numbers::pi * uniform01(rng);
        phis.push_back({std::cos(th), std::polar(std::sin(th), ph)});
    }
    for (int g = 0; g < grid; ++g) {
        const double eta = static_cast<double>(g) / (grid - 1);
        const auto printed = printed_kraus(kind, eta);
        const auto used = make_channel(kind, eta);
        if (printed.completeness_defect() > tol) res.printed_complete = false;

        Mat2 printed_out = Mat2::Zero();
        for (const auto& e : printed.operators) printed_out += e * rho_in().matrix() * e.adjoint();
        const Mat2 table_out = tabulated_output(kind, eta);
        const Mat2 used_out = apply_channel(rho_in(), used).matrix();
        if ((printed_out - table_out).cwiseAbs().maxCoeff() > tol) res.printed_matches_output = false;

        for (const auto& [a, b] : phis) {
            const double t = tau(kind, a, b, eta);
            if (std::abs(expectation(table_out, a, b) - t) > tol) res.output_matches_tau = false;
            if (std::abs(expectation(used_out, a, b) - t) > tol) res.channel_matches_tau = false;
        }
    }
    return res;
}

}  // namespace qamem
