#pragma once

#include <Eigen/Dense>

#include <complex>

namespace cvd {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;

inline constexpr cplx kI{0.0, 1.0};

namespace pauli {

inline Matrix2 identity() { return Matrix2::Identity(); }

inline Matrix2 x() {
    Matrix2 m;
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}

inline Matrix2 y() {
    Matrix2 m;
    m << 0.0, -kI,
         kI, 0.0;
    return m;
}

inline Matrix2 z() {
    Matrix2 m;
    m << 1.0, 0.0,
         0.0, -1.0;
    return m;
}

/// 0 -> I, 1 -> X, 2 -> Y, 3 -> Z
inline Matrix2 by_index(int k) {
    switch (k) {
        case 1: return x();
        case 2: return y();
        case 3: return z();
        default: return identity();
    }
}

}  // namespace pauli

/// Kronecker product of two 2x2 blocks; `left` acts on the more significant qubit.
inline Matrix4 kron(const Matrix2& left, const Matrix2& right) {
    Matrix4 out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            out.block<2, 2>(2 * a, 2 * b) = left(a, b) * right;
    return out;
}

/// Thin singular value decomposition a = u * diag(s) * v^dagger, s descending.
struct Svd {
    Matrix u;
    RealVector s;
    Matrix v;
};

/// Falls back to Jacobi when the divide-and-conquer result fails a residual check.
Svd svd(const Matrix& a);

/// Singular values only, descending.
RealVector singular_values(const Matrix& a);

}  // namespace cvd
