#pragma once

#include "cvd/mps.hpp"

#include <array>

namespace cvd {

/// Nine angles of the two-qubit disentangler: couplings (XX, YY, ZZ), then
/// (X, Y, Z) on the right qubit, then (X, Y, Z) on the left qubit.
struct GateParams {
    std::array<double, 9> theta{};

    static GateParams identity() { return {}; }
    /// Every angle negated. Together with reversed factor order this is the dagger.
    GateParams negated() const;
    bool is_identity() const;
};

/// exp(-i(a XX + b YY + c ZZ)).
Matrix4 coupling_exp(double a, double b, double c);
/// exp(-i(x X + y Y + z Z)).
Matrix2 local_exp(double x, double y, double z);

/// Coupling exponential times (left local exp) x (right local exp); the local
/// part acts first. Basis index 2*s_left + s_right.
Matrix4 gate_matrix(const GateParams& p);

/// Reversed-order product of negated-angle exponentials, equal to gate_matrix(p)^dagger.
Matrix4 gate_dagger_matrix(const GateParams& p);

/// Partial derivatives of gate_matrix(p) with respect to theta_0 .. theta_8.
std::array<Matrix4, 9> gate_matrix_derivatives(const GateParams& p);

struct GateResult {
    Mps mps;
    Spectrum spectrum;
    /// Squared Schmidt weight discarded at the gate's bond.
    double discarded = 0.0;
};

/// Apply a 4x4 unitary to sites (site, site+1) and restore Gamma-Lambda form.
/// Without discarded weight only Gamma_site, Lambda_site and Gamma_{site+1}
/// change; when weight is cut the whole chain is re-canonicalized.
GateResult apply_two_site(const Mps& mps, int site, const Matrix4& gate,
                          const Truncation& t = Truncation::none());

GateResult apply_gate(const Mps& mps, int site, const GateParams& p,
                      const Truncation& t = Truncation::none());

/// Single-qubit unitary on one site; canonical form is preserved exactly.
void apply_one_site(Mps& mps, int site, const Matrix2& u);

/// Dense G acting on qubits (site, site+1) of a big-endian statevector.
Vector apply_two_site_dense(const Vector& psi, int n, int site, const Matrix4& gate);
Vector apply_one_site_dense(const Vector& psi, int n, int site, const Matrix2& u);

}  // namespace cvd
