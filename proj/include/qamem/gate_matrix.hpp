#pragma once

#include <Eigen/Dense>

#include <array>
#include <initializer_list>
#include <span>

#include "qamem/core.hpp"

namespace qamem {

using Matrix = Eigen::MatrixXcd;

/// Max-norm of (G^dagger G - I).
inline double unitarity_defect(const Matrix& g) {
    const Matrix d = g.adjoint() * g - Matrix::Identity(g.rows(), g.cols());
    return d.cwiseAbs().maxCoeff();
}

inline bool is_unitary(const Matrix& g, double tol = kUnitaryTol) {
    return g.rows() == g.cols() && unitarity_defect(g) <= tol;
}

/// Dense 2x2 or 4x4 gate, row-major in the basis |0>,|1> (or |ab> with a the
/// more significant qubit).
class GateMatrix {
public:
    GateMatrix() : m_(Matrix::Identity(2, 2)) {}

    explicit GateMatrix(Matrix m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || (m_.rows() != 2 && m_.rows() != 4)) {
            throw ValidationError("GateMatrix: dimension must be 2 or 4");
        }
    }

    /// Builds from row-major entries; the entry count fixes the dimension.
    GateMatrix(std::initializer_list<Complex> row_major) {
        const auto count = row_major.size();
        if (count != 4 && count != 16) {
            throw ValidationError("GateMatrix: expected 4 or 16 entries");
        }
        const int d = count == 4 ? 2 : 4;
        m_.resize(d, d);
        auto it = row_major.begin();
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) m_(r, c) = *it++;
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    Complex operator()(int r, int c) const { return m_(r, c); }
    const Matrix& matrix() const { return m_; }

    bool is_unitary(double tol = kUnitaryTol) const { return qamem::is_unitary(m_, tol); }
    double unitarity_defect() const { return qamem::unitarity_defect(m_); }

    GateMatrix adjoint() const { return GateMatrix(Matrix(m_.adjoint())); }

    friend GateMatrix operator*(const GateMatrix& a, const GateMatrix& b) {
        if (a.dim() != b.dim()) throw ValidationError("GateMatrix: dimension mismatch in product");
        return GateMatrix(Matrix(a.m_ * b.m_));
    }

    /// Applies the gate to a raw amplitude block of matching size. No
    /// normalization is assumed or enforced.
    template <std::size_t N>
    std::array<Complex, N> apply(const std::array<Complex, N>& v) const {
        if (static_cast<int>(N) != dim()) throw ValidationError("GateMatrix: vector size mismatch");
        std::array<Complex, N> out{};
        for (std::size_t r = 0; r < N; ++r) {
            Complex acc{};
            for (std::size_t c = 0; c < N; ++c) acc += m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * v[c];
            out[r] = acc;
        }
        return out;
    }

private:
    Matrix m_;
};

/// Kronecker product of two 2x2 gates: result acts on |ab> with `a` on the
/// more significant position.
inline GateMatrix kron(const GateMatrix& a, const GateMatrix& b) {
    if (a.dim() != 2 || b.dim() != 2) throw ValidationError("kron: expects two 2x2 gates");
    Matrix k(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            k.block(2 * i, 2 * j, 2, 2) = a(i, j) * b.matrix();
    return GateMatrix(std::move(k));
}

}  // namespace qamem
