#include "cvd/gates.hpp"

#include <cmath>
#include <stdexcept>

namespace cvd {

GateParams GateParams::negated() const {
    GateParams out;
    for (std::size_t j = 0; j < theta.size(); ++j) out.theta[j] = -theta[j];
    return out;
}

bool GateParams::is_identity() const {
    for (double t : theta)
        if (t != 0.0) return false;
    return true;
}

Matrix4 coupling_exp(double a, double b, double c) {
    // XX, YY and ZZ commute, so the exponential factorizes.
    const Matrix4 id = Matrix4::Identity();
    const auto term = [&](double angle, const Matrix2& p) -> Matrix4 {
        return std::cos(angle) * id - kI * std::sin(angle) * kron(p, p);
    };
    return term(a, pauli::x()) * term(b, pauli::y()) * term(c, pauli::z());
}

Matrix2 local_exp(double x, double y, double z) {
    const double r = std::sqrt(x * x + y * y + z * z);
    if (r == 0.0) return Matrix2::Identity();
    const Matrix2 n = (x * pauli::x() + y * pauli::y() + z * pauli::z()) / r;
    return std::cos(r) * Matrix2::Identity() - kI * std::sin(r) * n;
}

Matrix4 gate_matrix(const GateParams& p) {
    const auto& t = p.theta;
    return coupling_exp(t[0], t[1], t[2]) * kron(local_exp(t[6], t[7], t[8]), local_exp(t[3], t[4], t[5]));
}

namespace {

// d/dv_k exp(-i v.sigma) = -s v_k I - i (q v_k (v.sigma) + s sigma_k)
// with s = sin r / r and q = (r cos r - sin r) / r^3.
std::array<Matrix2, 3> local_exp_derivatives(double x, double y, double z) {
    const double r2 = x * x + y * y + z * z;
    const double r = std::sqrt(r2);
    double s = 0.0, q = 0.0;
    if (r < 1e-4) {
        s = 1.0 - r2 / 6.0;
        q = -1.0 / 3.0 + r2 / 30.0;
    } else {
        s = std::sin(r) / r;
        q = (r * std::cos(r) - std::sin(r)) / (r2 * r);
    }
    const double v[3] = {x, y, z};
    const Matrix2 vs = x * pauli::x() + y * pauli::y() + z * pauli::z();
    std::array<Matrix2, 3> d;
    for (int k = 0; k < 3; ++k)
        d[static_cast<std::size_t>(k)] =
            -s * v[k] * Matrix2::Identity() - kI * (q * v[k] * vs + s * pauli::by_index(k + 1));
    return d;
}

}  // namespace

std::array<Matrix4, 9> gate_matrix_derivatives(const GateParams& p) {
    const auto& t = p.theta;
    const Matrix4 c = coupling_exp(t[0], t[1], t[2]);
    const Matrix2 left = local_exp(t[6], t[7], t[8]);
    const Matrix2 right = local_exp(t[3], t[4], t[5]);
    const Matrix4 locals = kron(left, right);
    const auto dl = local_exp_derivatives(t[6], t[7], t[8]);
    const auto dr = local_exp_derivatives(t[3], t[4], t[5]);
    std::array<Matrix4, 9> d;
    for (std::size_t k = 0; k < 3; ++k) {
        const Matrix2 s = pauli::by_index(static_cast<int>(k) + 1);
        // the three couplings commute with each other
        d[k] = -kI * kron(s, s) * c * locals;
        d[3 + k] = c * kron(left, dr[k]);
        d[6 + k] = c * kron(dl[k], right);
    }
    return d;
}

Matrix4 gate_dagger_matrix(const GateParams& p) {
    const auto& t = p.negated().theta;
    return kron(local_exp(t[6], t[7], t[8]), local_exp(t[3], t[4], t[5])) * coupling_exp(t[0], t[1], t[2]);
}

GateResult apply_two_site(const Mps& mps, int site, const Matrix4& gate, const Truncation& t) {
    const int n = mps.size();
    if (site < 0 || site + 1 >= n) throw std::out_of_range("apply_gate: site out of range");
    if (mps.phys_dim() != 2) throw std::invalid_argument("apply_gate: qubit sites required");

    const SiteTensor a = mps.right_tensor(site);      // Gamma_i Lambda_i
    const SiteTensor b = mps.right_tensor(site + 1);  // Gamma_{i+1} Lambda_{i+1}
    const Index dl = a.left_dim(), dr = b.right_dim();

    Matrix pair[2][2];
    for (int t1 = 0; t1 < 2; ++t1)
        for (int t2 = 0; t2 < 2; ++t2) pair[t1][t2] = a[t1] * b[t2];

    // x holds G applied to the bare two-site block, rows l*2+s1 and columns s2*dr+r.
    Matrix x = Matrix::Zero(dl * 2, 2 * dr);
    for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2) {
            Matrix blk = Matrix::Zero(dl, dr);
            for (int t1 = 0; t1 < 2; ++t1)
                for (int t2 = 0; t2 < 2; ++t2) {
                    const cplx g = gate(2 * s1 + s2, 2 * t1 + t2);
                    if (g != cplx(0.0)) blk.noalias() += g * pair[t1][t2];
                }
            for (Index l = 0; l < dl; ++l) x.row(l * 2 + s1).segment(s2 * dr, dr) = blk.row(l);
        }

    Matrix theta = x;
    if (site > 0) {
        const RealVector& left = mps.lambda(site - 1).values();
        for (Index l = 0; l < dl; ++l) theta.middleRows(l * 2, 2) *= left(l);
    }

    const Svd s = svd(theta);
    const double total = s.s.squaredNorm();
    const Index nonzero = retained_rank(s.s, Truncation::none());
    const Index keep = retained_rank(s.s, t);
    const RealVector kept = s.s.head(keep);
    const Matrix v = s.v.leftCols(keep);

    GateResult out;
    out.discarded = keep < nonzero ? s.s.segment(keep, nonzero - keep).squaredNorm() / total : 0.0;

    SiteTensor left = SiteTensor::from_left_matrix(x * v * kept.cwiseInverse().asDiagonal(), 2);
    SiteTensor right = SiteTensor::from_right_matrix(v.adjoint(), 2);
    if (site + 2 < n) {
        const RealVector inv = mps.lambda(site + 1).values().cwiseInverse();
        right.scale_bonds(nullptr, &inv);
    }
    out.spectrum = Spectrum(kept / kept.norm());
    out.mps = mps;
    out.mps.replace_pair(site, std::move(left), out.spectrum, std::move(right));

    if (out.discarded > 0.0) {
        out.mps = canonicalize(right_tensors(out.mps));
        out.spectrum = out.mps.lambda(site);
    }
    return out;
}

GateResult apply_gate(const Mps& mps, int site, const GateParams& p, const Truncation& t) {
    return apply_two_site(mps, site, gate_matrix(p), t);
}

void apply_one_site(Mps& mps, int site, const Matrix2& u) {
    const SiteTensor& g = mps.gamma(site);
    if (g.phys_dim() != 2) throw std::invalid_argument("apply_one_site: qubit site required");
    SiteTensor out(g.left_dim(), 2, g.right_dim());
    for (int b = 0; b < 2; ++b) out[b] = u(b, 0) * g[0] + u(b, 1) * g[1];
    mps.set_gamma(site, std::move(out));
}

Vector apply_two_site_dense(const Vector& psi, int n, int site, const Matrix4& gate) {
    if (site < 0 || site + 1 >= n) throw std::out_of_range("apply_two_site_dense: site out of range");
    if (psi.size() != (Index{1} << n)) throw std::invalid_argument("apply_two_site_dense: length mismatch");
    const Index hi = Index{1} << (n - 1 - site);
    const Index lo = Index{1} << (n - 2 - site);
    Vector out = psi;
    for (Index base = 0; base < psi.size(); ++base) {
        if ((base & hi) || (base & lo)) continue;
        const Index idx[4] = {base, base | lo, base | hi, base | hi | lo};
        Eigen::Vector4cd amp;
        for (int j = 0; j < 4; ++j) amp(j) = psi(idx[j]);
        const Eigen::Vector4cd res = gate * amp;
        for (int j = 0; j < 4; ++j) out(idx[j]) = res(j);
    }
    return out;
}

Vector apply_one_site_dense(const Vector& psi, int n, int site, const Matrix2& u) {
    if (site < 0 || site >= n) throw std::out_of_range("apply_one_site_dense: site out of range");
    if (psi.size() != (Index{1} << n)) throw std::invalid_argument("apply_one_site_dense: length mismatch");
    const Index bit = Index{1} << (n - 1 - site);
    Vector out = psi;
    for (Index base = 0; base < psi.size(); ++base) {
        if (base & bit) continue;
        const cplx a0 = psi(base), a1 = psi(base | bit);
        out(base) = u(0, 0) * a0 + u(0, 1) * a1;
        out(base | bit) = u(1, 0) * a0 + u(1, 1) * a1;
    }
    return out;
}

}  // namespace cvd
