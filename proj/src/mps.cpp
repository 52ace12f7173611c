#include "cvd/mps.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cvd {

// ---------------------------------------------------------------------------
// Spectrum

Spectrum::Spectrum(RealVector values) {
    if (values.size() == 0) throw std::invalid_argument("Spectrum: empty");
    for (Index j = 0; j < values.size(); ++j) {
        if (!std::isfinite(values(j)) || values(j) <= 0.0)
            throw std::invalid_argument("Spectrum: Schmidt values must be finite and positive");
    }
    std::vector<double> v(values.data(), values.data() + values.size());
    std::stable_sort(v.begin(), v.end(), std::greater<>());
    values_ = Eigen::Map<RealVector>(v.data(), static_cast<Index>(v.size()));
}

// ---------------------------------------------------------------------------
// SiteTensor

SiteTensor::SiteTensor(Index left, Index phys, Index right)
    : slices_(static_cast<std::size_t>(phys), Matrix::Zero(left, right)) {}

Matrix SiteTensor::as_left_matrix() const {
    const Index dl = left_dim(), d = phys_dim(), dr = right_dim();
    Matrix out(dl * d, dr);
    for (Index b = 0; b < d; ++b)
        for (Index l = 0; l < dl; ++l) out.row(l * d + b) = (*this)[b].row(l);
    return out;
}

Matrix SiteTensor::as_right_matrix() const {
    const Index dl = left_dim(), d = phys_dim(), dr = right_dim();
    Matrix out(dl, d * dr);
    for (Index b = 0; b < d; ++b) out.middleCols(b * dr, dr) = (*this)[b];
    return out;
}

SiteTensor SiteTensor::from_left_matrix(const Matrix& m, Index phys) {
    if (m.rows() % phys != 0) throw std::invalid_argument("SiteTensor: row count not divisible by phys");
    const Index dl = m.rows() / phys;
    SiteTensor t(dl, phys, m.cols());
    for (Index b = 0; b < phys; ++b)
        for (Index l = 0; l < dl; ++l) t[b].row(l) = m.row(l * phys + b);
    return t;
}

SiteTensor SiteTensor::from_right_matrix(const Matrix& m, Index phys) {
    if (m.cols() % phys != 0) throw std::invalid_argument("SiteTensor: column count not divisible by phys");
    const Index dr = m.cols() / phys;
    SiteTensor t(m.rows(), phys, dr);
    for (Index b = 0; b < phys; ++b) t[b] = m.middleCols(b * dr, dr);
    return t;
}

SiteTensor& SiteTensor::scale_bonds(const RealVector* left, const RealVector* right) {
    for (auto& s : slices_) {
        if (left) s = left->asDiagonal() * s;
        if (right) s = s * right->asDiagonal();
    }
    return *this;
}

SiteTensor& SiteTensor::left_multiply(const Matrix& m) {
    for (auto& s : slices_) s = m * s;
    return *this;
}

SiteTensor& SiteTensor::right_multiply(const Matrix& m) {
    for (auto& s : slices_) s = s * m;
    return *this;
}

// ---------------------------------------------------------------------------
// Truncation rule

namespace {

struct CutDecision {
    Index keep = 1;
    Index nonzero = 1;
};

CutDecision decide_cut(const RealVector& s, const Truncation& t) {
    CutDecision c;
    const double total = s.squaredNorm();
    if (total <= 0.0 || s.size() == 0) return c;
    const double floor = kSchmidtFloor * std::sqrt(total);
    Index nonzero = 0;
    while (nonzero < s.size() && s(nonzero) > floor) ++nonzero;
    c.nonzero = std::max<Index>(nonzero, 1);
    Index keep = std::min(c.nonzero, std::max<Index>(t.max_bond, 1));
    if (t.cutoff > 0.0) {
        double cumulative = 0.0;
        while (keep > 1) {
            const double w = s(keep - 1) * s(keep - 1) / total;
            if (cumulative + w > t.cutoff) break;
            cumulative += w;
            --keep;
        }
    }
    c.keep = keep;
    return c;
}

}  // namespace

Index retained_rank(const RealVector& s, const Truncation& t) { return decide_cut(s, t).keep; }

// ---------------------------------------------------------------------------
// Mps

Mps::Mps(std::vector<SiteTensor> gammas, std::vector<Spectrum> lambdas)
    : gammas_(std::move(gammas)), lambdas_(std::move(lambdas)) {
    const auto n = gammas_.size();
    if (n < 2) throw std::invalid_argument("Mps: need at least two sites");
    if (lambdas_.size() != n - 1) throw std::invalid_argument("Mps: expected n-1 bond spectra");
    const Index d = gammas_.front().phys_dim();
    if (d < 2) throw std::invalid_argument("Mps: physical dimension must be >= 2");
    if (gammas_.front().left_dim() != 1 || gammas_.back().right_dim() != 1)
        throw std::invalid_argument("Mps: open boundary bonds must have dimension 1");
    for (std::size_t k = 0; k < n; ++k) {
        if (gammas_[k].phys_dim() != d) throw std::invalid_argument("Mps: inconsistent physical dimension");
        if (k + 1 < n) {
            const Index D = lambdas_[k].rank();
            if (gammas_[k].right_dim() != D || gammas_[k + 1].left_dim() != D)
                throw std::invalid_argument("Mps: bond " + std::to_string(k) + " shape mismatch");
        }
    }
}

Index Mps::max_bond_dim() const {
    Index m = 1;
    for (const auto& l : lambdas_) m = std::max(m, l.rank());
    return m;
}

std::vector<Index> Mps::bond_dims() const {
    std::vector<Index> out;
    out.reserve(lambdas_.size());
    for (const auto& l : lambdas_) out.push_back(l.rank());
    return out;
}

SiteTensor Mps::left_tensor(int site) const {
    SiteTensor t = gamma(site);
    if (site > 0) t.scale_bonds(&lambda(site - 1).values(), nullptr);
    return t;
}

SiteTensor Mps::right_tensor(int site) const {
    SiteTensor t = gamma(site);
    if (site + 1 < size()) t.scale_bonds(nullptr, &lambda(site).values());
    return t;
}

void Mps::replace_pair(int site, SiteTensor left, Spectrum center, SiteTensor right) {
    if (site < 0 || site + 1 >= size()) throw std::out_of_range("Mps::replace_pair: site out of range");
    const auto k = static_cast<std::size_t>(site);
    if (left.left_dim() != gammas_[k].left_dim() || right.right_dim() != gammas_[k + 1].right_dim() ||
        left.right_dim() != center.rank() || right.left_dim() != center.rank())
        throw std::invalid_argument("Mps::replace_pair: shape mismatch");
    gammas_[k] = std::move(left);
    gammas_[k + 1] = std::move(right);
    lambdas_[k] = std::move(center);
}

void Mps::set_gamma(int site, SiteTensor g) {
    if (site < 0 || site >= size()) throw std::out_of_range("Mps::set_gamma: site out of range");
    const auto& old = gammas_[static_cast<std::size_t>(site)];
    if (g.left_dim() != old.left_dim() || g.right_dim() != old.right_dim() || g.phys_dim() != old.phys_dim())
        throw std::invalid_argument("Mps::set_gamma: shape mismatch");
    gammas_[static_cast<std::size_t>(site)] = std::move(g);
}

// ---------------------------------------------------------------------------
// Canonicalization

namespace {

struct SweepResult {
    Mps mps;
    std::vector<double> discarded;
    bool truncated = false;
};

// Left QR sweep followed by a right SVD sweep. After the QR sweep every tensor left
// of the cut is a left isometry, so the singular values found in the SVD sweep are
// the exact Schmidt values of the (partially truncated) state.
SweepResult sweep(std::vector<SiteTensor> m, const Truncation& t) {
    const int n = static_cast<int>(m.size());
    if (n < 2) throw std::invalid_argument("canonicalize: need at least two sites");
    const Index d = m.front().phys_dim();

    for (int k = 0; k + 1 < n; ++k) {
        const Matrix a = m[k].as_left_matrix();
        const Index r = std::min(a.rows(), a.cols());
        Eigen::HouseholderQR<Matrix> qr(a);
        const Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), r);
        const Matrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
        m[k] = SiteTensor::from_left_matrix(q, d);
        m[k + 1].left_multiply(rr);
    }
    double norm2 = 0.0;
    for (Index b = 0; b < d; ++b) norm2 += m.back()[b].squaredNorm();
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw std::invalid_argument("canonicalize: zero or non-finite state");
    m.back().right_multiply(Matrix::Identity(1, 1) * cplx(1.0 / std::sqrt(norm2)));

    SweepResult out;
    out.discarded.assign(static_cast<std::size_t>(n - 1), 0.0);
    std::vector<Spectrum> lambdas(static_cast<std::size_t>(n - 1));
    std::vector<SiteTensor> b(static_cast<std::size_t>(n));
    for (int k = n - 1; k >= 1; --k) {
        const Svd s = svd(m[k].as_right_matrix());
        const CutDecision cut = decide_cut(s.s, t);
        const double total = s.s.squaredNorm();
        const double kept = s.s.head(cut.keep).squaredNorm();
        if (cut.keep < cut.nonzero) {
            out.truncated = true;
            out.discarded[static_cast<std::size_t>(k - 1)] = s.s.segment(cut.keep, cut.nonzero - cut.keep).squaredNorm() / total;
        }
        const RealVector values = s.s.head(cut.keep) / std::sqrt(kept);
        b[k] = SiteTensor::from_right_matrix(s.v.leftCols(cut.keep).adjoint(), d);
        lambdas[static_cast<std::size_t>(k - 1)] = Spectrum(values);
        m[k - 1].right_multiply(s.u.leftCols(cut.keep) * values.asDiagonal());
    }
    b[0] = std::move(m[0]);
    for (int k = 0; k + 1 < n; ++k) {
        const RealVector inv = lambdas[static_cast<std::size_t>(k)].values().cwiseInverse();
        b[k].scale_bonds(nullptr, &inv);
    }
    out.mps = Mps(std::move(b), std::move(lambdas));
    return out;
}

// rest(l, b*R + c) -> out(l*d + b, c)
Matrix split_physical(const Matrix& rest, Index d) {
    const Index dl = rest.rows();
    const Index r = rest.cols() / d;
    Matrix out(dl * d, r);
    for (Index l = 0; l < dl; ++l)
        for (Index b = 0; b < d; ++b) out.row(l * d + b) = rest.row(l).segment(b * r, r);
    return out;
}

int site_count(Index length, Index d) {
    int n = 0;
    Index v = 1;
    while (v < length && n <= 64) {
        v *= d;
        ++n;
    }
    return v == length ? n : -1;
}

}  // namespace

std::vector<SiteTensor> right_tensors(const Mps& mps) {
    std::vector<SiteTensor> out;
    out.reserve(static_cast<std::size_t>(mps.size()));
    for (int k = 0; k < mps.size(); ++k) out.push_back(mps.right_tensor(k));
    return out;
}

Mps canonicalize(std::vector<SiteTensor> tensors, const Truncation& t) {
    return sweep(std::move(tensors), t).mps;
}

Mps canonicalize(const Vector& psi, Index phys) {
    const int n = site_count(psi.size(), phys);
    if (n < 2 || n > kMaxDenseSites)
        throw std::invalid_argument("canonicalize: statevector length must be d^n with 2 <= n <= 20");
    if (std::abs(psi.norm() - 1.0) > 1e-10) throw std::invalid_argument("canonicalize: statevector is not normalized");

    std::vector<SiteTensor> tensors;
    tensors.reserve(static_cast<std::size_t>(n));
    Matrix rest = psi.transpose();
    for (int k = 0; k + 1 < n; ++k) {
        const Matrix a = split_physical(rest, phys);
        const Svd s = svd(a);
        const Index keep = retained_rank(s.s, Truncation::none());
        tensors.push_back(SiteTensor::from_left_matrix(s.u.leftCols(keep), phys));
        rest = s.s.head(keep).asDiagonal() * s.v.leftCols(keep).adjoint();
    }
    tensors.push_back(SiteTensor::from_left_matrix(split_physical(rest, phys), phys));
    return canonicalize(std::move(tensors));
}

Mps product_state(const std::vector<Vector>& local_states) {
    if (local_states.size() < 2) throw std::invalid_argument("product_state: need at least two sites");
    std::vector<SiteTensor> gammas;
    const Index d = local_states.front().size();
    for (const auto& v : local_states) {
        if (v.size() != d) throw std::invalid_argument("product_state: inconsistent local dimension");
        const double nrm = v.norm();
        if (!(nrm > 0.0)) throw std::invalid_argument("product_state: zero local state");
        SiteTensor g(1, d, 1);
        for (Index b = 0; b < d; ++b) g[b](0, 0) = v(b) / nrm;
        gammas.push_back(std::move(g));
    }
    std::vector<Spectrum> lambdas(local_states.size() - 1);
    return Mps(std::move(gammas), std::move(lambdas));
}

Mps zero_state(int n, Index phys) {
    Vector e0 = Vector::Zero(phys);
    e0(0) = 1.0;
    return product_state(std::vector<Vector>(static_cast<std::size_t>(n), e0));
}

Vector to_statevector(const Mps& mps) {
    if (mps.size() > kMaxDenseSites) throw std::invalid_argument("to_statevector: too many sites for a dense vector");
    const Index d = mps.phys_dim();
    Matrix cur = Matrix::Ones(1, 1);
    for (int k = 0; k < mps.size(); ++k) {
        const SiteTensor b = mps.right_tensor(k);
        Matrix next(cur.rows() * d, b.right_dim());
        for (Index c = 0; c < cur.rows(); ++c)
            for (Index s = 0; s < d; ++s) next.row(c * d + s) = cur.row(c) * b[s];
        cur = std::move(next);
    }
    return cur.col(0);
}

double TruncationResult::total_discarded() const {
    return std::accumulate(discarded.begin(), discarded.end(), 0.0);
}

double TruncationResult::max_discarded() const {
    return discarded.empty() ? 0.0 : *std::max_element(discarded.begin(), discarded.end());
}

TruncationResult truncate(const Mps& mps, const Truncation& t) {
    TruncationResult out;
    out.discarded.assign(static_cast<std::size_t>(mps.size() - 1), 0.0);
    Mps cur = mps;
    // Every pass that cuts something lowers a rank, so this terminates.
    for (int pass = 0; pass < 1000; ++pass) {
        SweepResult r = sweep(right_tensors(cur), t);
        for (std::size_t k = 0; k < r.discarded.size(); ++k) out.discarded[k] += r.discarded[k];
        cur = std::move(r.mps);
        if (!r.truncated) break;
    }
    out.mps = std::move(cur);
    return out;
}

namespace {

cplx transfer_contract(const Mps& a, const Mps& b, const std::vector<SiteOperator>& ops) {
    if (a.size() != b.size()) throw std::invalid_argument("overlap: site count mismatch");
    if (a.phys_dim() != b.phys_dim()) throw std::invalid_argument("overlap: physical dimension mismatch");
    const Index d = a.phys_dim();
    std::vector<const Matrix*> op_at(static_cast<std::size_t>(a.size()), nullptr);
    for (const auto& [site, op] : ops) {
        if (site < 0 || site >= a.size()) throw std::out_of_range("expectation: operator site out of range");
        if (op.rows() != d || op.cols() != d) throw std::invalid_argument("expectation: operator shape mismatch");
        if (op_at[static_cast<std::size_t>(site)]) throw std::invalid_argument("expectation: repeated site");
        op_at[static_cast<std::size_t>(site)] = &op;
    }
    Matrix env = Matrix::Ones(1, 1);
    for (int k = 0; k < a.size(); ++k) {
        const SiteTensor ta = a.right_tensor(k);
        const SiteTensor tb = b.right_tensor(k);
        Matrix next = Matrix::Zero(ta.right_dim(), tb.right_dim());
        const Matrix* op = op_at[static_cast<std::size_t>(k)];
        for (Index s = 0; s < d; ++s) {
            const Matrix left = ta[s].adjoint() * env;
            if (!op) {
                next.noalias() += left * tb[s];
                continue;
            }
            for (Index s2 = 0; s2 < d; ++s2) {
                const cplx w = (*op)(s, s2);
                if (w != cplx(0.0)) next.noalias() += w * (left * tb[s2]);
            }
        }
        env = std::move(next);
    }
    return env(0, 0);
}

}  // namespace

cplx overlap(const Mps& a, const Mps& b) { return transfer_contract(a, b, {}); }

cplx expectation(const Mps& mps, const std::vector<SiteOperator>& ops) {
    return transfer_contract(mps, mps, ops);
}

double norm(const std::vector<SiteTensor>& tensors) {
    if (tensors.empty()) throw std::invalid_argument("norm: no sites");
    Matrix carry = Matrix::Ones(1, 1);
    for (const auto& t : tensors) {
        SiteTensor cur = t;
        cur.left_multiply(carry);
        const Matrix a = cur.as_left_matrix();
        Eigen::HouseholderQR<Matrix> qr(a);
        const Index r = std::min(a.rows(), a.cols());
        carry = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    }
    return carry.norm();
}

std::vector<SiteTensor> tensor_sum(const std::vector<SiteTensor>& a, const std::vector<SiteTensor>& b, cplx c) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("tensor_sum: chain length mismatch");
    const int n = static_cast<int>(a.size());
    const Index d = a.front().phys_dim();
    std::vector<SiteTensor> sum;
    for (int k = 0; k < n; ++k) {
        const SiteTensor& ta = a[static_cast<std::size_t>(k)];
        const SiteTensor& tb = b[static_cast<std::size_t>(k)];
        if (ta.phys_dim() != d || tb.phys_dim() != d) throw std::invalid_argument("tensor_sum: physical dimension mismatch");
        const bool first = k == 0, last = k + 1 == n;
        if ((first && (ta.left_dim() != 1 || tb.left_dim() != 1)) || (last && (ta.right_dim() != 1 || tb.right_dim() != 1)))
            throw std::invalid_argument("tensor_sum: open boundary dims must be 1");
        SiteTensor s(first ? 1 : ta.left_dim() + tb.left_dim(), d, last ? 1 : ta.right_dim() + tb.right_dim());
        for (Index p = 0; p < d; ++p) {
            const Matrix mb = first ? Matrix(c * tb[p]) : tb[p];
            if (first && last) {
                s[p] = ta[p] + mb;
            } else if (first || last) {
                s[p] << ta[p], mb;
            } else {
                s[p].topLeftCorner(ta.left_dim(), ta.right_dim()) = ta[p];
                s[p].bottomRightCorner(tb.left_dim(), tb.right_dim()) = mb;
            }
        }
        sum.push_back(std::move(s));
    }
    return sum;
}

double distance(const Mps& a, const Mps& b) {
    if (a.size() != b.size() || a.phys_dim() != b.phys_dim()) throw std::invalid_argument("distance: shape mismatch");
    const cplx ov = overlap(b, a);
    const cplx phase = std::abs(ov) > 0.0 ? ov / std::abs(ov) : cplx(1.0);
    return norm(tensor_sum(right_tensors(a), right_tensors(b), -phase));
}

Spectrum schmidt_spectrum(const Mps& mps, int bond) {
    if (bond < 0 || bond + 1 >= mps.size()) throw std::out_of_range("schmidt_spectrum: bond out of range");
    return mps.lambda(bond);
}

double canonical_deviation(const Mps& mps) {
    double dev = 0.0;
    const Index d = mps.phys_dim();
    for (int k = 0; k < mps.size(); ++k) {
        const SiteTensor a = mps.left_tensor(k);
        Matrix left = Matrix::Zero(a.right_dim(), a.right_dim());
        for (Index s = 0; s < d; ++s) left.noalias() += a[s].adjoint() * a[s];
        dev = std::max(dev, (left - Matrix::Identity(left.rows(), left.cols())).cwiseAbs().maxCoeff());

        const SiteTensor b = mps.right_tensor(k);
        Matrix right = Matrix::Zero(b.left_dim(), b.left_dim());
        for (Index s = 0; s < d; ++s) right.noalias() += b[s] * b[s].adjoint();
        dev = std::max(dev, (right - Matrix::Identity(right.rows(), right.cols())).cwiseAbs().maxCoeff());
    }
    for (const auto& l : mps.lambdas()) {
        dev = std::max(dev, std::abs(l.weight_sum() - 1.0));
        for (Index j = 0; j + 1 < l.rank(); ++j) dev = std::max(dev, l.values()(j + 1) - l.values()(j));
    }
    dev = std::max(dev, std::abs(overlap(mps, mps) - 1.0));
    return dev;
}

}  // namespace cvd
