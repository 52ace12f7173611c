#pragma once

#include "cvd/linalg.hpp"

#include <limits>
#include <utility>
#include <vector>

namespace cvd {

/// Schmidt values below this magnitude are treated as rank reduction and dropped.
inline constexpr double kSchmidtFloor = 1e-14;

/// Largest qubit count for which dense statevectors are formed.
inline constexpr int kMaxDenseSites = 20;

inline constexpr Index kUnboundedBond = std::numeric_limits<Index>::max();

/// Schmidt values at one bond, sorted descending (normalization is up to the caller).
class Spectrum {
public:
    Spectrum() : values_(RealVector::Ones(1)) {}

    /// Sorts descending (stable). Throws std::invalid_argument on empty,
    /// non-finite or non-positive input.
    explicit Spectrum(RealVector values);

    const RealVector& values() const { return values_; }
    RealVector weights() const { return values_.array().square(); }
    Index rank() const { return values_.size(); }
    double largest() const { return values_(0); }
    double weight_sum() const { return values_.squaredNorm(); }

private:
    RealVector values_;
};

/// Rank-3 site tensor with shape (left bond, physical, right bond), stored as
/// one left x right matrix per physical index.
class SiteTensor {
public:
    SiteTensor() = default;
    SiteTensor(Index left, Index phys, Index right);

    Index left_dim() const { return slices_.empty() ? 0 : slices_.front().rows(); }
    Index right_dim() const { return slices_.empty() ? 0 : slices_.front().cols(); }
    Index phys_dim() const { return static_cast<Index>(slices_.size()); }

    Matrix& operator[](Index b) { return slices_[static_cast<std::size_t>(b)]; }
    const Matrix& operator[](Index b) const { return slices_[static_cast<std::size_t>(b)]; }

    /// (left*phys) x right, row index l*phys + b.
    Matrix as_left_matrix() const;
    /// left x (phys*right), column index b*right + r.
    Matrix as_right_matrix() const;

    static SiteTensor from_left_matrix(const Matrix& m, Index phys);
    static SiteTensor from_right_matrix(const Matrix& m, Index phys);

    /// Multiply each slice: slice -> left * slice * right.
    SiteTensor& scale_bonds(const RealVector* left, const RealVector* right);
    SiteTensor& left_multiply(const Matrix& m);
    SiteTensor& right_multiply(const Matrix& m);

private:
    std::vector<Matrix> slices_;
};

/// Truncation controls: keep at most `max_bond` Schmidt values, then drop trailing
/// values whose cumulative squared weight does not exceed `cutoff`.
struct Truncation {
    Index max_bond = kUnboundedBond;
    double cutoff = 0.0;

    static Truncation none() { return {}; }
    bool active() const { return max_bond != kUnboundedBond || cutoff > 0.0; }
};

/// Number of Schmidt values retained under `t` for a descending spectrum `s`
/// (entries below the floor are never retained; at least one value is kept).
Index retained_rank(const RealVector& s, const Truncation& t);

/// An open-boundary MPS in Vidal Gamma-Lambda form. Sites are indexed 0..n-1 and
/// bond k (0..n-2) sits between sites k and k+1.
class Mps {
public:
    Mps() = default;
    /// Checks shapes only; see canonical_deviation() for the numerical invariants.
    Mps(std::vector<SiteTensor> gammas, std::vector<Spectrum> lambdas);

    int size() const { return static_cast<int>(gammas_.size()); }
    Index phys_dim() const { return gammas_.front().phys_dim(); }

    const SiteTensor& gamma(int site) const { return gammas_.at(static_cast<std::size_t>(site)); }
    const Spectrum& lambda(int bond) const { return lambdas_.at(static_cast<std::size_t>(bond)); }
    const std::vector<SiteTensor>& gammas() const { return gammas_; }
    const std::vector<Spectrum>& lambdas() const { return lambdas_; }

    Index bond_dim(int bond) const { return lambda(bond).rank(); }
    Index max_bond_dim() const;
    std::vector<Index> bond_dims() const;

    /// Lambda_{k-1} Gamma_k (left-isometric).
    SiteTensor left_tensor(int site) const;
    /// Gamma_k Lambda_k (right-isometric).
    SiteTensor right_tensor(int site) const;

    /// Replace Gamma_site, Lambda_site, Gamma_{site+1}. Shapes must chain.
    void replace_pair(int site, SiteTensor left, Spectrum center, SiteTensor right);
    /// Replace one Gamma with a tensor of identical shape.
    void set_gamma(int site, SiteTensor g);

private:
    std::vector<SiteTensor> gammas_;
    std::vector<Spectrum> lambdas_;
};

/// Exact Gamma-Lambda form of a normalized dense statevector (site 0 is the most
/// significant digit). Throws std::invalid_argument if the norm deviates from 1 by
/// more than 1e-10 or the length is not d^n with 2 <= n <= 20.
Mps canonicalize(const Vector& psi, Index phys = 2);

/// Gamma-Lambda form of the state described by arbitrary site tensors; the state
/// is normalized. Optional truncation is applied during the sweep.
Mps canonicalize(std::vector<SiteTensor> tensors, const Truncation& t = Truncation::none());

Mps product_state(const std::vector<Vector>& local_states);
/// |0...0>
Mps zero_state(int n, Index phys = 2);

Vector to_statevector(const Mps& mps);

struct TruncationResult {
    Mps mps;
    /// Discarded squared Schmidt weight per bond (relative to the state at the time
    /// of the cut, before renormalization).
    std::vector<double> discarded;
    double total_discarded() const;
    double max_discarded() const;
};

/// Project to bond dimension `t.max_bond` with cutoff `t.cutoff`; the result is
/// renormalized and canonical. Repeats until no further values fall under the rule,
/// so applying it twice discards nothing more.
TruncationResult truncate(const Mps& mps, const Truncation& t);

/// <a|b> by transfer-matrix contraction.
cplx overlap(const Mps& a, const Mps& b);

/// Site tensors of a + c b for two chains of equal length (bond dims add).
std::vector<SiteTensor> tensor_sum(const std::vector<SiteTensor>& a, const std::vector<SiteTensor>& b, cplx c);

/// Right-isometric tensors Gamma_k Lambda_k of every site.
std::vector<SiteTensor> right_tensors(const Mps& mps);

/// Norm of the state described by arbitrary site tensors, by a QR sweep. Accurate
/// to machine precision in absolute terms even when the norm is tiny.
double norm(const std::vector<SiteTensor>& tensors);

/// min over phi of || a - e^{i phi} b ||, evaluated on the difference state so that
/// distances far below sqrt(machine epsilon) are resolved.
double distance(const Mps& a, const Mps& b);

/// A single-site operator placed on a site.
using SiteOperator = std::pair<int, Matrix>;

/// <psi| prod_k O_k |psi> for operators on distinct sites.
cplx expectation(const Mps& mps, const std::vector<SiteOperator>& ops);

Spectrum schmidt_spectrum(const Mps& mps, int bond);

/// Largest violation among: left/right isometry of every site, unit weight of every
/// Lambda, positivity and ordering of the Schmidt values, and the global norm.
double canonical_deviation(const Mps& mps);

}  // namespace cvd
