#pragma once
// Dense reference constructions, written independently of the library internals.

#include "cvd/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using cvd::cplx;
using cvd::Index;
using cvd::Matrix;
using cvd::Matrix2;
using cvd::RealVector;
using cvd::Vector;

inline Vector random_state(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vector v(Index{1} << n);
    for (Index i = 0; i < v.size(); ++i) v(i) = cplx(g(rng), g(rng));
    return v / v.norm();
}

inline Vector random_real_state(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vector v(Index{1} << n);
    for (Index i = 0; i < v.size(); ++i) v(i) = g(rng);
    return v / v.norm();
}

/// Full 2^n operator of `op` on consecutive qubits starting at `site` (site 0 = MSB).
inline Matrix embed(const Matrix& op, int n, int site) {
    const int k = static_cast<int>(std::lround(std::log2(static_cast<double>(op.rows()))));
    const Index left = Index{1} << site, right = Index{1} << (n - site - k);
    return Eigen::kroneckerProduct(Eigen::kroneckerProduct(Matrix::Identity(left, left), op).eval(),
                                   Matrix::Identity(right, right));
}

/// Schmidt values across the cut after `left_sites` qubits.
inline RealVector schmidt(const Vector& psi, int n, int left_sites) {
    const Index rows = Index{1} << left_sites, cols = Index{1} << (n - left_sites);
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) m(r, c) = psi(r * cols + c);
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues();
}

inline double renyi(const RealVector& lam, double alpha) {
    const RealVector p = lam.array().square() / lam.squaredNorm();
    if (alpha == 1.0) {
        double s = 0.0;
        for (Index i = 0; i < p.size(); ++i)
            if (p(i) > 1e-300) s -= p(i) * std::log(p(i));
        return s;
    }
    return std::log(p.array().pow(alpha).sum()) / (1.0 - alpha);
}

inline Matrix2 pauli(char c) {
    Matrix2 m;
    switch (c) {
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: m.setIdentity();
    }
    return m;
}

/// Operator of a Pauli string (char k on qubit k).
inline Matrix pauli_string(const std::string& s) {
    Matrix m = Matrix::Ones(1, 1);
    for (char c : s) m = Eigen::kroneckerProduct(m, pauli(c)).eval();
    return m;
}

/// exp(-i h) for Hermitian h via its eigendecomposition.
inline Matrix expm_hermitian(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Vector phases = (-cplx(0, 1) * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Phase-insensitive distance min_phi || a - e^{i phi} b ||.
inline double phase_distance(const Vector& a, const Vector& b) {
    const cplx ov = b.dot(a);
    const cplx ph = std::abs(ov) > 0 ? ov / std::abs(ov) : cplx(1.0);
    return (a - ph * b).norm();
}

}  // namespace oracle
