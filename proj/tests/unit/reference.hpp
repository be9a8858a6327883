#pragma once

// Brute-force reference implementations used as oracles by the unit tests.
// They deliberately avoid the library's fast paths.

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "qamem/core.hpp"

namespace ref {

using qamem::Complex;
using qamem::Index;
using Mat = Eigen::MatrixXcd;

/// Full operator of a 2x2 gate acting on bit position `bit` of an
/// `nbits`-bit index, built from an explicit Kronecker product with the
/// most significant factor first.
inline Mat embed_1q(const Mat& g, int bit, int nbits) {
    Mat full = Mat::Identity(1, 1);
    for (int pos = nbits - 1; pos >= 0; --pos) {
        const Mat f = pos == bit ? g : Mat::Identity(2, 2);
        Mat k(full.rows() * 2, full.cols() * 2);
        for (Eigen::Index r = 0; r < full.rows(); ++r)
            for (Eigen::Index c = 0; c < full.cols(); ++c) k.block(2 * r, 2 * c, 2, 2) = full(r, c) * f;
        full = k;
    }
    return full;
}

/// Full operator of a 4x4 gate on bits (a, b), gate basis |a b>, built
/// entry by entry from its definition.
inline Mat embed_2q(const Mat& g, int a, int b, int nbits) {
    const Index dim = Index{1} << nbits;
    Mat full = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (Index r = 0; r < dim; ++r) {
        for (Index c = 0; c < dim; ++c) {
            const Index rest_mask = ~((Index{1} << a) | (Index{1} << b));
            if ((r & rest_mask) != (c & rest_mask)) continue;
            const int gr = static_cast<int>(2 * ((r >> a) & 1) + ((r >> b) & 1));
            const int gc = static_cast<int>(2 * ((c >> a) & 1) + ((c >> b) & 1));
            full(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = g(gr, gc);
        }
    }
    return full;
}

inline Eigen::VectorXcd to_vec(std::span<const Complex> v) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

inline std::vector<Complex> random_vector(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> nd;
    std::vector<Complex> v(n);
    double s = 0.0;
    for (auto& a : v) {
        a = {nd(rng), nd(rng)};
        s += std::norm(a);
    }
    for (auto& a : v) a /= std::sqrt(s);
    return v;
}

/// Random density of rank `rank` from a Ginibre-style construction.
inline Mat random_density(std::mt19937_64& rng, int dim, int rank) {
    std::normal_distribution<double> nd;
    Mat g(dim, rank);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < rank; ++c) g(r, c) = Complex(nd(rng), nd(rng));
    Mat rho = g * g.adjoint();
    rho /= rho.trace();
    return 0.5 * (rho + rho.adjoint());
}

inline Mat random_unitary(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> nd;
    Mat g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) g(r, c) = Complex(nd(rng), nd(rng));
    Eigen::HouseholderQR<Mat> qr(g);
    return qr.householderQ();
}

/// Classical OR-spreading over the given register qubits (1-based), applied
/// to a flag table over [0, 2^n).
inline std::vector<int> or_spread(std::vector<int> flags, int j) {
    const Index bit = Index{1} << (j - 1);
    std::vector<int> out(flags.size());
    for (Index y = 0; y < flags.size(); ++y) out[y] = flags[y] | flags[y ^ bit];
    return out;
}

/// Same, but only register values in `support` take part.
inline std::vector<int> or_spread_on(const std::vector<int>& flags, const std::set<Index>& support, int j) {
    const Index bit = Index{1} << (j - 1);
    std::vector<int> out = flags;
    for (Index y : support) {
        if (support.count(y ^ bit)) out[y] = flags[y] | flags[y ^ bit];
    }
    return out;
}

}  // namespace ref
