#include "cvd/hamiltonian.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace cvd {

Family parse_family(const std::string& s) {
    if (s == "ising") return Family::ising;
    if (s == "xy") return Family::xy;
    if (s == "xxz" || s == "heisenberg") return Family::xxz;
    if (s == "fermi-hubbard" || s == "fermi_hubbard" || s == "hubbard") return Family::fermi_hubbard;
    throw std::invalid_argument("unknown Hamiltonian family '" + s + "'");
}

std::string to_string(Family f) {
    switch (f) {
        case Family::ising: return "ising";
        case Family::xy: return "xy";
        case Family::xxz: return "xxz";
        default: return "fermi-hubbard";
    }
}

void HamiltonianSpec::validate() const {
    const int q = qubits();
    if (n_sites < 2) throw std::invalid_argument("Hamiltonian needs at least two sites");
    if (q > 14) throw std::invalid_argument("Hamiltonian exceeds the exact-diagonalization budget of 14 qubits");
    if (family == Family::fermi_hubbard) {
        if (n_up < 0 || n_down < 0 || n_up > n_sites || n_down > n_sites)
            throw std::invalid_argument("empty Fermi-Hubbard particle sector");
    }
}

namespace {

int bit(Index idx, int q, int n) { return static_cast<int>((idx >> (n - 1 - q)) & 1); }
Index mask(int q, int n) { return Index{1} << (n - 1 - q); }

bool in_sector(const HamiltonianSpec& spec, Index idx) {
    if (spec.family != Family::fermi_hubbard) return true;
    const int n = spec.qubits();
    int up = 0, down = 0;
    for (int i = 0; i < spec.n_sites; ++i) {
        up += bit(idx, 2 * i, n);
        down += bit(idx, 2 * i + 1, n);
    }
    return up == spec.n_up && down == spec.n_down;
}

}  // namespace

SparseMatrix build_hamiltonian(const HamiltonianSpec& spec) {
    spec.validate();
    const int n = spec.qubits();
    const Index dim = Index{1} << n;
    std::vector<Eigen::Triplet<double>> entries;
    for (Index idx = 0; idx < dim; ++idx) {
        double diag = 0.0;
        const auto z = [&](int q) { return bit(idx, q, n) ? -1.0 : 1.0; };
        const auto flip_pair = [&](int q, double coeff) {
            // (XX + YY) connects |01> and |10> with amplitude 2
            if (bit(idx, q, n) != bit(idx, q + 1, n)) entries.emplace_back(idx ^ (mask(q, n) | mask(q + 1, n)), idx, 2.0 * coeff);
        };
        switch (spec.family) {
            case Family::ising:
                for (int q = 0; q + 1 < n; ++q) diag += -0.5 * z(q) * z(q + 1);
                for (int q = 0; q < n; ++q) {
                    diag += spec.hz * z(q);
                    if (spec.hx != 0.0) entries.emplace_back(idx ^ mask(q, n), idx, spec.hx);
                }
                break;
            case Family::xy:
                for (int q = 0; q + 1 < n; ++q) flip_pair(q, -0.5);
                for (int q = 0; q < n; ++q)
                    if (spec.hx != 0.0) entries.emplace_back(idx ^ mask(q, n), idx, spec.hx);
                break;
            case Family::xxz:
                for (int q = 0; q + 1 < n; ++q) {
                    flip_pair(q, -0.5);
                    diag += -0.5 * spec.jz * z(q) * z(q + 1);
                }
                for (int q = 0; q < n; ++q) {
                    diag += -spec.hz * z(q);
                    if (spec.hx != 0.0) entries.emplace_back(idx ^ mask(q, n), idx, -spec.hx);
                }
                break;
            case Family::fermi_hubbard:
                for (int i = 0; i < spec.n_sites; ++i) diag += spec.u * bit(idx, 2 * i, n) * bit(idx, 2 * i + 1, n);
                for (int i = 0; i + 1 < spec.n_sites; ++i)
                    for (int sigma = 0; sigma < 2; ++sigma) {
                        const int a = 2 * i + sigma, b = a + 2;
                        if (bit(idx, a, n) == bit(idx, b, n)) continue;
                        // Jordan-Wigner string: the single qubit strictly between a and b.
                        const double sign = bit(idx, a + 1, n) ? -1.0 : 1.0;
                        entries.emplace_back(idx ^ (mask(a, n) | mask(b, n)), idx, -spec.t * sign);
                    }
                break;
        }
        if (diag != 0.0) entries.emplace_back(idx, idx, diag);
    }
    SparseMatrix h(dim, dim);
    h.setFromTriplets(entries.begin(), entries.end());
    return h;
}

std::vector<Index> sector_basis(const HamiltonianSpec& spec) {
    spec.validate();
    std::vector<Index> out;
    const Index dim = Index{1} << spec.qubits();
    for (Index idx = 0; idx < dim; ++idx)
        if (in_sector(spec, idx)) out.push_back(idx);
    if (out.empty()) throw std::invalid_argument("empty particle sector");
    return out;
}

namespace {

using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

struct Eigenpair {
    double value = 0.0;
    RVec vector;
};

void project_out(RVec& w, const std::vector<RVec>& basis) {
    for (const auto& b : basis) w -= b.dot(w) * b;
}

// Lowest eigenpair of h on the orthogonal complement of `deflate`, by restarted
// Lanczos with full reorthogonalization.
Eigenpair lanczos_lowest(const SparseMatrix& h, const std::vector<RVec>& deflate, std::uint64_t seed) {
    const Index dim = h.rows();
    const Index room = dim - static_cast<Index>(deflate.size());
    if (room <= 0) throw std::invalid_argument("lanczos: no room left after deflation");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    RVec start(dim);
    for (Index i = 0; i < dim; ++i) start(i) = normal(rng);
    project_out(start, deflate);
    start.normalize();

    const Index krylov = std::min<Index>(room, 160);
    Eigenpair best;
    for (int restart = 0; restart < 200; ++restart) {
        std::vector<RVec> q{start};
        std::vector<double> alpha, beta;
        bool invariant = false;
        for (Index j = 0; j < krylov; ++j) {
            RVec w = h * q.back();
            project_out(w, deflate);
            alpha.push_back(q.back().dot(w));
            for (int pass = 0; pass < 2; ++pass) {
                project_out(w, q);
                project_out(w, deflate);
            }
            const double b = w.norm();
            if (b < 1e-12 || j + 1 == krylov) {
                invariant = b < 1e-12;
                beta.push_back(b);
                break;
            }
            beta.push_back(b);
            q.push_back(w / b);
        }
        const Index m = static_cast<Index>(alpha.size());
        RMat t = RMat::Zero(m, m);
        for (Index j = 0; j < m; ++j) {
            t(j, j) = alpha[static_cast<std::size_t>(j)];
            if (j + 1 < m) t(j, j + 1) = t(j + 1, j) = beta[static_cast<std::size_t>(j)];
        }
        Eigen::SelfAdjointEigenSolver<RMat> es(t);
        const RVec y = es.eigenvectors().col(0);
        RVec v = RVec::Zero(dim);
        for (Index j = 0; j < m; ++j) v += y(j) * q[static_cast<std::size_t>(j)];
        v.normalize();
        best = {es.eigenvalues()(0), v};
        const double residual = std::abs(beta.back() * y(m - 1));
        if (invariant || residual < 1e-11 * std::max(1.0, std::abs(best.value))) break;
        start = v;
    }
    return best;
}

void fix_sign(RVec& v) {
    for (Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > 1e-8) {
            if (v(i) < 0) v = -v;
            return;
        }
}

}  // namespace

GroundState ed_ground_state(const HamiltonianSpec& spec) {
    const std::vector<Index> basis = sector_basis(spec);
    const SparseMatrix full = build_hamiltonian(spec);
    const Index dim = static_cast<Index>(basis.size());
    SparseMatrix h(dim, dim);
    if (dim == full.rows()) {
        h = full;
    } else {
        std::unordered_map<Index, Index> pos;
        for (Index k = 0; k < dim; ++k) pos[basis[static_cast<std::size_t>(k)]] = k;
        std::vector<Eigen::Triplet<double>> entries;
        for (Index k = 0; k < dim; ++k)
            for (SparseMatrix::InnerIterator it(full, basis[static_cast<std::size_t>(k)]); it; ++it) {
                const auto found = pos.find(it.row());
                if (found != pos.end()) entries.emplace_back(found->second, k, it.value());
            }
        h.setFromTriplets(entries.begin(), entries.end());
    }

    constexpr double kDegeneracyTol = 1e-8;
    std::vector<RVec> ground;
    double energy = 0.0;
    if (dim <= 1024) {
        Eigen::SelfAdjointEigenSolver<RMat> es{RMat(h)};
        energy = es.eigenvalues()(0);
        for (Index k = 0; k < dim && es.eigenvalues()(k) - energy < kDegeneracyTol; ++k)
            ground.push_back(es.eigenvectors().col(k));
    } else {
        Eigenpair e0 = lanczos_lowest(h, {}, 0x5eed);
        energy = e0.value;
        ground.push_back(e0.vector);
        while (static_cast<Index>(ground.size()) < std::min<Index>(dim, 16)) {
            const Eigenpair next = lanczos_lowest(h, ground, 0x5eed + ground.size());
            if (next.value - energy >= kDegeneracyTol) break;
            ground.push_back(next.vector);
        }
    }

    RVec v;
    if (ground.size() == 1) {
        v = ground.front();
    } else {
        for (Index k = 0; k < dim; ++k) {
            RVec w = RVec::Zero(dim);
            for (const auto& g : ground) w += g(k) * g;
            if (w.norm() > 1e-6) {
                v = w / w.norm();
                break;
            }
        }
    }
    fix_sign(v);

    GroundState gs;
    gs.degeneracy = static_cast<int>(ground.size());
    gs.psi = Vector::Zero(full.rows());
    for (Index k = 0; k < dim; ++k) gs.psi(basis[static_cast<std::size_t>(k)]) = v(k);
    gs.psi.normalize();
    const RVec vr = gs.psi.real();
    gs.energy = vr.dot(full * vr);
    gs.mps = canonicalize(gs.psi);
    return gs;
}

}  // namespace cvd
