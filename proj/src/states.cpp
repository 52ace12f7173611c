#include "cvd/states.hpp"

#include "cvd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace cvd {

namespace {

SiteTensor basis_row(Index right, int b_offset) {
    // left dim 1, slice b has a single 1 at column b + b_offset
    SiteTensor t(1, 2, right);
    for (int b = 0; b < 2; ++b) t[b](0, b + b_offset) = 1.0;
    return t;
}

SiteTensor local(const Vector& v) {
    SiteTensor t(1, 2, 1);
    t[0](0, 0) = v(0);
    t[1](0, 0) = v(1);
    return t;
}

Matrix4 singlet_projector() {
    Eigen::Vector4cd s(0.0, 1.0, -1.0, 0.0);
    s /= std::sqrt(2.0);
    return s * s.adjoint();
}

}  // namespace

Mps ghz(int n) {
    if (n < 2 || n > 64) throw std::invalid_argument("ghz: n must lie in [2, 64]");
    std::vector<SiteTensor> t;
    t.push_back(basis_row(2, 0));
    for (int k = 1; k + 1 < n; ++k) {
        SiteTensor m(2, 2, 2);
        m[0](0, 0) = 1.0;
        m[1](1, 1) = 1.0;
        t.push_back(std::move(m));
    }
    SiteTensor last(2, 2, 1);
    last[0](0, 0) = 1.0;
    last[1](1, 0) = 1.0;
    t.push_back(std::move(last));
    return canonicalize(std::move(t));
}

void apply_two_site_raw(std::vector<SiteTensor>& tensors, int site, const Matrix4& op) {
    const int n = static_cast<int>(tensors.size());
    if (site < 0 || site + 1 >= n) throw std::out_of_range("apply_two_site_raw: site out of range");
    SiteTensor& a = tensors[static_cast<std::size_t>(site)];
    SiteTensor& b = tensors[static_cast<std::size_t>(site + 1)];
    if (a.phys_dim() != 2 || b.phys_dim() != 2) throw std::invalid_argument("apply_two_site_raw: qubit sites required");
    const Index dl = a.left_dim(), dr = b.right_dim();
    Matrix theta = Matrix::Zero(dl * 2, 2 * dr);
    for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2) {
            Matrix blk = Matrix::Zero(dl, dr);
            for (int t1 = 0; t1 < 2; ++t1)
                for (int t2 = 0; t2 < 2; ++t2) {
                    const cplx g = op(2 * s1 + s2, 2 * t1 + t2);
                    if (g != cplx(0.0)) blk.noalias() += g * (a[t1] * b[t2]);
                }
            for (Index l = 0; l < dl; ++l) theta.row(l * 2 + s1).segment(s2 * dr, dr) = blk.row(l);
        }
    const Svd s = svd(theta);
    const Index keep = retained_rank(s.s, Truncation::none());
    a = SiteTensor::from_left_matrix(s.u.leftCols(keep) * s.s.head(keep).asDiagonal(), 2);
    b = SiteTensor::from_right_matrix(s.v.leftCols(keep).adjoint(), 2);
}

Mps random_mps(int n, Index bond, std::uint64_t seed) {
    if (n < 2 || n > 64) throw std::invalid_argument("random_mps: n must lie in [2, 64]");
    if (bond < 1) throw std::invalid_argument("random_mps: bond must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<SiteTensor> t;
    for (int k = 0; k < n; ++k) {
        // keep the exact dimension reachable from each end
        const auto cap = [&](int cut) {
            const int edge = std::min(cut, n - cut);
            return edge >= 20 ? bond : std::min<Index>(bond, Index{1} << edge);
        };
        SiteTensor s(cap(k), 2, cap(k + 1));
        for (int b = 0; b < 2; ++b)
            for (Index c = 0; c < s.right_dim(); ++c)
                for (Index r = 0; r < s.left_dim(); ++r) s[b](r, c) = cplx(normal(rng), normal(rng));
        t.push_back(std::move(s));
    }
    return canonicalize(std::move(t));
}

Mps cluster(int n) {
    if (n < 3 || n > 64) throw std::invalid_argument("cluster: n must lie in [3, 64]");
    Vector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    std::vector<SiteTensor> t(static_cast<std::size_t>(n), local(plus));
    const Matrix4 cz = Eigen::Vector4cd(1.0, 1.0, 1.0, -1.0).asDiagonal();
    for (int k = 0; k + 1 < n; ++k) apply_two_site_raw(t, k, cz);
    return canonicalize(std::move(t));
}

Mps aklt(int n_spin1) {
    if (n_spin1 < 2 || n_spin1 > 16) throw std::invalid_argument("aklt: n_spin1 must lie in [2, 16]");
    const int n = 2 * n_spin1;
    Vector zero(2);
    zero << 1.0, 0.0;
    std::vector<SiteTensor> t;
    t.push_back(local(zero));
    for (int k = 1; k + 1 < n; k += 2) {
        // (|01> - |10>)/sqrt(2) on qubits (k, k+1)
        t.push_back(basis_row(2, 0));
        SiteTensor right(2, 2, 1);
        right[0](1, 0) = -1.0 / std::sqrt(2.0);
        right[1](0, 0) = 1.0 / std::sqrt(2.0);
        t.push_back(std::move(right));
    }
    t.push_back(local(zero));
    const Matrix4 triplet = Matrix4::Identity() - singlet_projector();
    for (int k = 0; k + 1 < n; k += 2) apply_two_site_raw(t, k, triplet);
    return canonicalize(std::move(t));
}

CodeName parse_code(const std::string& s) {
    if (s == "5_1_3" || s == "code_5_1_3" || s == "[5,1,3]") return CodeName::code_5_1_3;
    if (s == "11_1_5" || s == "code_11_1_5" || s == "[11,1,5]") return CodeName::code_11_1_5;
    throw std::invalid_argument("unknown code '" + s + "'");
}

std::string to_string(CodeName c) { return c == CodeName::code_5_1_3 ? "5_1_3" : "11_1_5"; }

BellLayout parse_layout(const std::string& s) {
    if (s == "separated") return BellLayout::separated;
    if (s == "interlaced") return BellLayout::interlaced;
    throw std::invalid_argument("unknown layout '" + s + "'");
}

std::string to_string(BellLayout l) { return l == BellLayout::separated ? "separated" : "interlaced"; }

StabilizerCode StabilizerCode::get(CodeName name) {
    StabilizerCode c{name, 0, {}, PauliString(""), PauliString("")};
    std::vector<std::string> rows;
    if (name == CodeName::code_5_1_3) {
        c.n = 5;
        rows = {"IXZZX", "XZZXI", "ZZXIX", "ZXIXZ"};
    } else {
        c.n = 11;
        rows = {"ZZZZZZIIIII", "XXXXXXIIIII", "IIIZXYYYYXZ", "IIIXYZZZZYX", "ZYXIIIZYXII",
                "XZYIIIXZYII", "IIIZYXXYZII", "IIIXZYZXYII", "ZXYIIIZZZXY", "YZXIIIYYYZX"};
    }
    for (const auto& r : rows) c.stabilizers.emplace_back(r);
    c.logical_x = PauliString(std::string(static_cast<std::size_t>(c.n), 'X'));
    c.logical_z = PauliString(std::string(static_cast<std::size_t>(c.n), 'Z'));
    return c;
}

std::pair<Vector, Vector> StabilizerCode::codewords() const {
    Vector v = Vector::Zero(Index{1} << n);
    v(0) = 1.0;
    for (const auto& s : stabilizers) v = 0.5 * (v + s.apply(v));
    v = 0.5 * (v + logical_z.apply(v));
    const double nrm = v.norm();
    if (nrm < 1e-8) throw InvariantError("codewords: stabilizer projection of |0...0> vanishes");
    v /= nrm;
    return {v, logical_x.apply(v)};
}

std::pair<std::vector<int>, std::vector<int>> bell_sites(int n, BellLayout layout) {
    std::vector<int> a, b;
    for (int k = 0; k < n; ++k) {
        if (layout == BellLayout::separated) {
            a.push_back(k);
            b.push_back(n + k);
        } else {
            a.push_back(2 * k);
            b.push_back(2 * k + 1);
        }
    }
    return {a, b};
}

Vector logical_bell_dense(const StabilizerCode& code, BellLayout layout) {
    const int total = 2 * code.n;
    if (total > kMaxDenseSites) throw std::invalid_argument("logical_bell_dense: too many qubits for a dense vector");
    const auto [c0, c1] = code.codewords();
    const auto [sa, sb] = bell_sites(code.n, layout);
    Vector psi(Index{1} << total);
    for (Index idx = 0; idx < psi.size(); ++idx) {
        Index a = 0, b = 0;
        for (int k = 0; k < code.n; ++k) {
            a = (a << 1) | ((idx >> (total - 1 - sa[static_cast<std::size_t>(k)])) & 1);
            b = (b << 1) | ((idx >> (total - 1 - sb[static_cast<std::size_t>(k)])) & 1);
        }
        psi(idx) = (c0(a) * c1(b) - c1(a) * c0(b)) / std::sqrt(2.0);
    }
    return psi;
}

Mps logical_bell(const StabilizerCode& code, BellLayout layout) {
    if (2 * code.n <= kMaxDenseSites) return canonicalize(logical_bell_dense(code, layout));
    if (layout != BellLayout::separated)
        throw std::invalid_argument("logical_bell: interlaced layout is only available up to 20 qubits");
    const auto [c0, c1] = code.codewords();
    const auto t0 = right_tensors(canonicalize(c0));
    const auto t1 = right_tensors(canonicalize(c1));
    std::vector<SiteTensor> first(t0), second(t1);
    first.insert(first.end(), t1.begin(), t1.end());
    second.insert(second.end(), t0.begin(), t0.end());
    return canonicalize(tensor_sum(first, second, -1.0));
}

std::vector<PauliString> bell_stabilizers(const StabilizerCode& code, BellLayout layout) {
    const auto [sa, sb] = bell_sites(code.n, layout);
    std::vector<PauliString> out;
    for (const auto& s : code.stabilizers) out.push_back(s.embedded(2 * code.n, sa));
    for (const auto& s : code.stabilizers) out.push_back(s.embedded(2 * code.n, sb));
    return out;
}

}  // namespace cvd
