#pragma once

#include "cvd/gates.hpp"

#include <array>
#include <string>

namespace cvd {

/// Renyi index alpha > 0, with the von Neumann (alpha = 1) and min-entropy
/// (alpha = infinity) limits as distinct kinds.
class RenyiIndex {
public:
    enum class Kind { finite, one, infinity };

    RenyiIndex() : RenyiIndex(Kind::one, 1.0) {}
    static RenyiIndex one() { return {Kind::one, 1.0}; }
    static RenyiIndex infinity() { return {Kind::infinity, 0.0}; }
    /// Throws std::invalid_argument unless alpha > 0. alpha == 1 maps to one().
    static RenyiIndex of(double alpha);
    /// "1", "inf", or a positive number.
    static RenyiIndex parse(const std::string& s);

    Kind kind() const { return kind_; }
    double value() const { return value_; }
    std::string to_string() const;
    bool operator==(const RenyiIndex&) const = default;

private:
    RenyiIndex(Kind k, double v) : kind_(k), value_(v) {}
    Kind kind_;
    double value_;
};

/// Renyi entropy in nats of a vector of (not necessarily normalized) Schmidt
/// values; entries below 1e-14 after normalization are excluded.
double renyi_entropy(const RealVector& schmidt_values, const RenyiIndex& a);
double renyi_entropy(const Spectrum& s, const RenyiIndex& a);

/// Squared weight outside the largest Schmidt value, computed without cancellation.
double tail_probability(const RealVector& schmidt_values);

/// -log(lambda_1^2).
double tail_weight(const RealVector& schmidt_values);
double tail_weight(const Spectrum& s);

/// The two-site block Lambda_{i-1} Gamma_i Lambda_i Gamma_{i+1} Lambda_{i+1} of a
/// canonical MPS, cached so that trial gates only cost one small SVD.
class TwoSiteBlock {
public:
    TwoSiteBlock(const Mps& mps, int site);
    /// From an explicit (2 Dl) x (2 Dr) block, rows l*2+s1 and columns s2*Dr+r.
    explicit TwoSiteBlock(const Matrix& theta);

    Index left_dim() const { return dl_; }
    Index right_dim() const { return dr_; }

    /// gate applied on the physical pair, as a (2 Dl) x (2 Dr) matrix with rows
    /// l*2+s1 and columns s2*Dr+r.
    Matrix applied(const Matrix4& gate) const;
    /// Singular values of applied(gate_matrix(p)).
    RealVector spectrum(const GateParams& p) const;
    /// K(s, t) = <W_s, theta_t> over the physical blocks of w, laid out like applied(),
    /// so that Re <w, applied(m)> = Re sum_st m(s, t) K(s, t).
    Matrix4 block_overlaps(const Matrix& w) const;

private:
    Index dl_ = 1, dr_ = 1;
    Matrix theta_[2][2];
};

using Gradient = std::array<double, 9>;

/// Entropy of the bond-i spectrum after the trial gate; the MPS is not modified.
double local_cost(const Mps& mps, int site, const GateParams& p, const RenyiIndex& a);
double local_cost(const TwoSiteBlock& block, const GateParams& p, const RenyiIndex& a);

/// Central finite differences of local_cost in each angle.
Gradient fd_gradient(const TwoSiteBlock& block, const GateParams& p, const RenyiIndex& a, double h = 1e-5);
Gradient fd_gradient(const Mps& mps, int site, const GateParams& p, const RenyiIndex& a, double h = 1e-5);

/// Exact gradient of local_cost at any angles from a single SVD, differentiating the
/// spectral function over the retained (above-floor) Schmidt values. Writes the cost
/// at p to `cost` when given.
Gradient exact_gradient(const TwoSiteBlock& block, const GateParams& p, const RenyiIndex& a,
                        double* cost = nullptr);
Gradient exact_gradient(const Mps& mps, int site, const GateParams& p, const RenyiIndex& a);

/// Generators of the nine angles at theta = 0 as 4x4 Hermitian matrices:
/// XX, YY, ZZ, then 1 x (X, Y, Z), then (X, Y, Z) x 1.
std::array<Matrix4, 9> gate_generators();

/// Tr(rho d_j rho) at theta = 0 for each generator, i.e. 2 Im Tr(Theta Theta^+ Theta_P Theta^+).
Gradient purity_derivative_theta0(const Mps& mps, int site);

/// Gradient of the 2-Renyi entropy at theta = 0: -(2 / sum lambda^4) Tr(rho d_j rho).
Gradient analytic_gradient_theta0(const Mps& mps, int site);
Gradient analytic_gradient_theta0(const TwoSiteBlock& block);

}  // namespace cvd
