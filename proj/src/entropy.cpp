#include "cvd/entropy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cvd {

RenyiIndex RenyiIndex::of(double alpha) {
    if (!(alpha > 0.0) || std::isnan(alpha)) throw std::invalid_argument("Renyi index must be positive");
    if (std::isinf(alpha)) return infinity();
    if (alpha == 1.0) return one();
    return {Kind::finite, alpha};
}

RenyiIndex RenyiIndex::parse(const std::string& s) {
    if (s == "inf" || s == "infinity") return infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse Renyi index '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("cannot parse Renyi index '" + s + "'");
    return of(v);
}

std::string RenyiIndex::to_string() const {
    switch (kind_) {
        case Kind::one: return "1";
        case Kind::infinity: return "inf";
        default: {
            std::string s = std::to_string(value_);
            s.erase(s.find_last_not_of('0') + 1);
            if (!s.empty() && s.back() == '.') s.pop_back();
            return s;
        }
    }
}

namespace {

// Normalized weights split into the leading one (given through its complement)
// and the rest, so that entropies near zero keep full relative precision.
struct Weights {
    double tail = 0.0;
    std::vector<double> rest;
};

Weights split_weights(const RealVector& s) {
    Weights w;
    const double norm2 = s.squaredNorm();
    if (!(norm2 > 0.0)) throw std::invalid_argument("entropy: empty or zero spectrum");
    const double norm = std::sqrt(norm2);
    Index top = 0;
    for (Index j = 1; j < s.size(); ++j)
        if (s(j) > s(top)) top = j;
    for (Index j = 0; j < s.size(); ++j) {
        if (j == top) continue;
        const double l = s(j) / norm;
        if (l < kSchmidtFloor) continue;
        w.rest.push_back(l * l);
        w.tail += l * l;
    }
    return w;
}

}  // namespace

double tail_probability(const RealVector& schmidt_values) { return split_weights(schmidt_values).tail; }

double renyi_entropy(const RealVector& schmidt_values, const RenyiIndex& a) {
    const Weights w = split_weights(schmidt_values);
    if (w.rest.empty()) return 0.0;
    const double log_top = std::log1p(-w.tail);
    switch (a.kind()) {
        case RenyiIndex::Kind::infinity: return -log_top;
        case RenyiIndex::Kind::one: {
            double s = -(1.0 - w.tail) * log_top;
            for (double p : w.rest) s -= p * std::log(p);
            return s;
        }
        default: {
            const double alpha = a.value();
            double x = std::expm1(alpha * log_top);
            for (double p : w.rest) x += std::pow(p, alpha);
            return std::log1p(x) / (1.0 - alpha);
        }
    }
}

double renyi_entropy(const Spectrum& s, const RenyiIndex& a) { return renyi_entropy(s.values(), a); }

double tail_weight(const RealVector& schmidt_values) {
    return -std::log1p(-tail_probability(schmidt_values));
}

double tail_weight(const Spectrum& s) { return tail_weight(s.values()); }

TwoSiteBlock::TwoSiteBlock(const Mps& mps, int site) {
    if (site < 0 || site + 1 >= mps.size()) throw std::out_of_range("TwoSiteBlock: site out of range");
    if (mps.phys_dim() != 2) throw std::invalid_argument("TwoSiteBlock: qubit sites required");
    const SiteTensor a = mps.left_tensor(site);
    const SiteTensor b = mps.right_tensor(site + 1);
    const RealVector& center = mps.lambda(site).values();
    dl_ = a.left_dim();
    dr_ = b.right_dim();
    for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2) theta_[s1][s2] = a[s1] * center.asDiagonal() * b[s2];
}

TwoSiteBlock::TwoSiteBlock(const Matrix& theta) {
    if (theta.rows() % 2 != 0 || theta.cols() % 2 != 0 || theta.size() == 0)
        throw std::invalid_argument("TwoSiteBlock: block dimensions must be even");
    dl_ = theta.rows() / 2;
    dr_ = theta.cols() / 2;
    for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2) {
            theta_[s1][s2].resize(dl_, dr_);
            for (Index l = 0; l < dl_; ++l) theta_[s1][s2].row(l) = theta.row(l * 2 + s1).segment(s2 * dr_, dr_);
        }
}

Matrix TwoSiteBlock::applied(const Matrix4& gate) const {
    Matrix out(dl_ * 2, 2 * dr_);
    for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2) {
            Matrix blk = Matrix::Zero(dl_, dr_);
            for (int t1 = 0; t1 < 2; ++t1)
                for (int t2 = 0; t2 < 2; ++t2) {
                    const cplx g = gate(2 * s1 + s2, 2 * t1 + t2);
                    if (g != cplx(0.0)) blk.noalias() += g * theta_[t1][t2];
                }
            for (Index l = 0; l < dl_; ++l) out.row(l * 2 + s1).segment(s2 * dr_, dr_) = blk.row(l);
        }
    return out;
}

RealVector TwoSiteBlock::spectrum(const GateParams& p) const { return singular_values(applied(gate_matrix(p))); }

Matrix4 TwoSiteBlock::block_overlaps(const Matrix& w) const {
    if (w.rows() != 2 * dl_ || w.cols() != 2 * dr_) throw std::invalid_argument("block_overlaps: shape mismatch");
    Matrix4 k;
    for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2) {
            Matrix ws(dl_, dr_);
            for (Index l = 0; l < dl_; ++l) ws.row(l) = w.row(l * 2 + s1).segment(s2 * dr_, dr_);
            for (int t1 = 0; t1 < 2; ++t1)
                for (int t2 = 0; t2 < 2; ++t2)
                    k(2 * s1 + s2, 2 * t1 + t2) = ws.conjugate().cwiseProduct(theta_[t1][t2]).sum();
        }
    return k;
}

double local_cost(const TwoSiteBlock& block, const GateParams& p, const RenyiIndex& a) {
    return renyi_entropy(block.spectrum(p), a);
}

double local_cost(const Mps& mps, int site, const GateParams& p, const RenyiIndex& a) {
    return local_cost(TwoSiteBlock(mps, site), p, a);
}

Gradient fd_gradient(const TwoSiteBlock& block, const GateParams& p, const RenyiIndex& a, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
    Gradient g{};
    for (std::size_t j = 0; j < 9; ++j) {
        GateParams plus = p, minus = p;
        plus.theta[j] += h;
        minus.theta[j] -= h;
        g[j] = (local_cost(block, plus, a) - local_cost(block, minus, a)) / (2 * h);
    }
    return g;
}

Gradient fd_gradient(const Mps& mps, int site, const GateParams& p, const RenyiIndex& a, double h) {
    return fd_gradient(TwoSiteBlock(mps, site), p, a, h);
}

namespace {

// dS/d(lambda_j) for raw singular values s (descending), zero for values under the floor.
RealVector entropy_derivative(const RealVector& s, const RenyiIndex& a) {
    RealVector f = RealVector::Zero(s.size());
    const double norm2 = s.squaredNorm();
    const double norm = std::sqrt(norm2);
    Index kept = 0;
    while (kept < s.size() && s(kept) / norm >= kSchmidtFloor) ++kept;
    if (kept <= 1) return f;
    const auto p = [&](Index j) { return s(j) * s(j) / norm2; };
    switch (a.kind()) {
        case RenyiIndex::Kind::infinity: f(0) = -1.0 / p(0); break;
        case RenyiIndex::Kind::one:
            for (Index j = 0; j < kept; ++j) f(j) = -(std::log(p(j)) + 1.0);
            break;
        default: {
            const double alpha = a.value();
            double z = 0.0;
            for (Index j = 0; j < kept; ++j) z += std::pow(p(j), alpha);
            for (Index j = 0; j < kept; ++j) f(j) = alpha * std::pow(p(j), alpha - 1.0) / ((1.0 - alpha) * z);
        }
    }
    // chain rule through p_j = s_j^2 / |s|^2 at fixed norm
    for (Index j = 0; j < kept; ++j) f(j) *= 2.0 * s(j) / norm2;
    return f;
}

}  // namespace

Gradient exact_gradient(const TwoSiteBlock& block, const GateParams& p, const RenyiIndex& a, double* cost) {
    const Svd d = svd(block.applied(gate_matrix(p)));
    if (cost) *cost = renyi_entropy(d.s, a);
    const RealVector f = entropy_derivative(d.s, a);
    Gradient g{};
    if (f.isZero(0.0)) return g;
    const Matrix w = d.u * f.cast<cplx>().asDiagonal() * d.v.adjoint();
    const Matrix4 k = block.block_overlaps(w);
    const auto dg = gate_matrix_derivatives(p);
    for (std::size_t j = 0; j < 9; ++j) g[j] = dg[j].cwiseProduct(k).sum().real();
    return g;
}

Gradient exact_gradient(const Mps& mps, int site, const GateParams& p, const RenyiIndex& a) {
    return exact_gradient(TwoSiteBlock(mps, site), p, a);
}

std::array<Matrix4, 9> gate_generators() {
    std::array<Matrix4, 9> g;
    const Matrix2 id = pauli::identity();
    for (int k = 0; k < 3; ++k) {
        const Matrix2 s = pauli::by_index(k + 1);
        g[static_cast<std::size_t>(k)] = kron(s, s);
        g[static_cast<std::size_t>(3 + k)] = kron(id, s);
        g[static_cast<std::size_t>(6 + k)] = kron(s, id);
    }
    return g;
}

namespace {

Gradient purity_derivative(const TwoSiteBlock& block) {
    const Matrix theta = block.applied(Matrix4::Identity());
    const Matrix rho = theta * theta.adjoint();
    const Matrix rho_theta = rho * theta;
    const auto gens = gate_generators();
    Gradient out{};
    for (std::size_t j = 0; j < 9; ++j) {
        const Matrix tp = block.applied(gens[j]);
        // Tr(rho Theta_P Theta^+) = Tr((rho Theta)^+ Theta_P)
        const cplx x = rho_theta.adjoint().cwiseProduct(tp.transpose()).sum();
        out[j] = 2.0 * x.imag();
    }
    return out;
}

}  // namespace

Gradient purity_derivative_theta0(const Mps& mps, int site) { return purity_derivative(TwoSiteBlock(mps, site)); }

Gradient analytic_gradient_theta0(const TwoSiteBlock& block) {
    const RealVector s = block.spectrum(GateParams::identity());
    const double purity = s.array().pow(4).sum() / std::pow(s.squaredNorm(), 2);
    Gradient g = purity_derivative(block);
    for (double& v : g) v *= -2.0 / purity;
    return g;
}

Gradient analytic_gradient_theta0(const Mps& mps, int site) { return analytic_gradient_theta0(TwoSiteBlock(mps, site)); }

}  // namespace cvd
