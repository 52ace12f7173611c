#include "cvd/linalg.hpp"

#include <Eigen/SVD>

namespace cvd {

namespace {

// Eigen 3.4's divide-and-conquer SVD occasionally returns a wrong factorization
// for tall matrices with degenerate singular values (seen on stabilizer states).
// Results are checked and recomputed with one-sided Jacobi when inconsistent.
constexpr double kSvdTolerance = 1e-10;

bool weight_consistent(const Matrix& a, const RealVector& s) {
    const double fro = a.squaredNorm();
    return std::abs(s.squaredNorm() - fro) <= kSvdTolerance * std::max(fro, 1e-300);
}

}  // namespace

Svd svd(const Matrix& a) {
    {
        Eigen::BDCSVD<Matrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Svd out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
        const double scale = std::max(a.norm(), 1e-300);
        if ((out.u * out.s.asDiagonal() * out.v.adjoint() - a).norm() <= kSvdTolerance * scale) return out;
    }
    Eigen::JacobiSVD<Matrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

RealVector singular_values(const Matrix& a) {
    Eigen::BDCSVD<Matrix> solver(a);
    if (weight_consistent(a, solver.singularValues())) return solver.singularValues();
    return Eigen::JacobiSVD<Matrix>(a).singularValues();
}

}  // namespace cvd
