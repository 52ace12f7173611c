#include "cvd/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cvd {

std::string to_string(Parity p) { return p == Parity::odd ? "odd" : "even"; }

std::string to_string(Direction d) { return d == Direction::disentangle ? "disentangle" : "prepare"; }

Parity parse_parity(const std::string& s) {
    if (s == "odd") return Parity::odd;
    if (s == "even") return Parity::even;
    throw std::invalid_argument("unknown parity '" + s + "'");
}

Direction parse_direction(const std::string& s) {
    if (s == "disentangle") return Direction::disentangle;
    if (s == "prepare") return Direction::prepare;
    throw std::invalid_argument("unknown direction '" + s + "'");
}

std::vector<int> parity_sites(Parity p, int n) {
    std::vector<int> out;
    for (int i = p == Parity::odd ? 0 : 1; i + 1 < n; i += 2) out.push_back(i);
    return out;
}

Matrix2 rx(double a) {
    Matrix2 m;
    m << std::cos(a / 2), -kI * std::sin(a / 2),
         -kI * std::sin(a / 2), std::cos(a / 2);
    return m;
}

Matrix2 ry(double a) {
    Matrix2 m;
    m << std::cos(a / 2), -std::sin(a / 2),
         std::sin(a / 2), std::cos(a / 2);
    return m;
}

Matrix2 rz(double a) {
    Matrix2 m;
    m << std::exp(-kI * (a / 2)), 0.0,
         0.0, std::exp(kI * (a / 2));
    return m;
}

Matrix2 readoff_unitary(const Readoff& r) {
    return rz(r.phi_z + std::numbers::pi / 2) * rx(2 * r.phi_x);
}

std::size_t Circuit::gate_count() const {
    std::size_t c = 0;
    for (const auto& l : layers) c += l.gates.size();
    return c;
}

void Circuit::validate() const {
    if (n < 2) throw std::invalid_argument("circuit: n must be >= 2");
    for (std::size_t li = 0; li < layers.size(); ++li) {
        std::vector<bool> used(static_cast<std::size_t>(n), false);
        for (const auto& g : layers[li].gates) {
            if (g.site < 0 || g.site + 1 >= n)
                throw std::invalid_argument("circuit: gate site out of range in layer " + std::to_string(li));
            for (int q : {g.site, g.site + 1}) {
                if (used[static_cast<std::size_t>(q)])
                    throw std::invalid_argument("circuit: overlapping gates in layer " + std::to_string(li));
                used[static_cast<std::size_t>(q)] = true;
            }
            for (double t : g.params.theta)
                if (!std::isfinite(t)) throw std::invalid_argument("circuit: non-finite angle");
        }
    }
    if (!readoff.empty() && static_cast<int>(readoff.size()) != n)
        throw std::invalid_argument("circuit: readoff must have one entry per site");
}

Circuit Circuit::reversed() const {
    Circuit out = *this;
    out.direction = direction == Direction::disentangle ? Direction::prepare : Direction::disentangle;
    std::reverse(out.layers.begin(), out.layers.end());
    return out;
}

std::vector<Readoff> readoff_single_qubit(const Mps& mps) {
    if (mps.max_bond_dim() != 1) throw std::invalid_argument("readoff: input is not a product state");
    if (mps.phys_dim() != 2) throw std::invalid_argument("readoff: qubit sites required");
    std::vector<Readoff> out;
    for (int k = 0; k < mps.size(); ++k) {
        const cplx g0 = mps.gamma(k)[0](0, 0);
        const cplx g1 = mps.gamma(k)[1](0, 0);
        Readoff r;
        r.phi_x = std::atan2(std::abs(g1), std::abs(g0));
        r.phi_z = (std::abs(g0) > 0.0 && std::abs(g1) > 0.0) ? std::arg(g1) - std::arg(g0) : 0.0;
        out.push_back(r);
    }
    return out;
}

double CircuitRun::max_discarded() const {
    double m = 0.0;
    for (const auto& row : discarded)
        for (double p : row) m = std::max(m, p);
    return m;
}

double CircuitRun::total_discarded() const {
    double s = 0.0;
    for (const auto& row : discarded)
        for (double p : row) s += p;
    return s;
}

namespace {

// The disentangler in execution order: layers forward with G, then readoff^dagger.
// Its inverse: readoff first, then layers backwards with G^dagger.
struct Schedule {
    std::vector<const Layer*> layers;
    bool dagger = false;
    bool readoff_first = false;
};

Schedule schedule(const Circuit& c, bool reverse) {
    Schedule s;
    const bool undo = (c.direction == Direction::prepare) != reverse;
    const bool stored_backwards = c.direction == Direction::prepare;
    for (const auto& l : c.layers) s.layers.push_back(&l);
    if (undo != stored_backwards) std::reverse(s.layers.begin(), s.layers.end());
    s.dagger = undo;
    s.readoff_first = undo;
    return s;
}

Matrix2 readoff_op(const Readoff& r, bool undo) {
    const Matrix2 w = readoff_unitary(r);
    return undo ? w : Matrix2(w.adjoint());
}

Matrix4 gate_op(const GateParams& p, bool dagger) { return dagger ? gate_dagger_matrix(p) : gate_matrix(p); }

}  // namespace

CircuitRun apply_circuit(const Mps& mps, const Circuit& c, const Truncation& t, bool reverse) {
    if (c.n != mps.size()) throw std::invalid_argument("apply_circuit: site count mismatch");
    c.validate();
    const Schedule s = schedule(c, reverse);
    CircuitRun run{mps, {}};
    const auto readoff = [&](bool undo) {
        for (std::size_t k = 0; k < c.readoff.size(); ++k)
            apply_one_site(run.mps, static_cast<int>(k), readoff_op(c.readoff[k], undo));
    };
    if (s.readoff_first) readoff(true);
    for (const Layer* layer : s.layers) {
        for (const auto& g : layer->gates) run.mps = apply_two_site(run.mps, g.site, gate_op(g.params, s.dagger)).mps;
        if (t.active()) {
            TruncationResult tr = truncate(run.mps, t);
            run.mps = std::move(tr.mps);
            run.discarded.push_back(std::move(tr.discarded));
        } else {
            run.discarded.emplace_back(static_cast<std::size_t>(c.n - 1), 0.0);
        }
    }
    if (!s.readoff_first) readoff(false);
    return run;
}

Vector apply_circuit_dense(const Vector& psi, const Circuit& c, bool reverse) {
    c.validate();
    if (psi.size() != (Index{1} << c.n)) throw std::invalid_argument("apply_circuit_dense: length mismatch");
    const Schedule s = schedule(c, reverse);
    Vector out = psi;
    const auto readoff = [&](bool undo) {
        for (std::size_t k = 0; k < c.readoff.size(); ++k)
            out = apply_one_site_dense(out, c.n, static_cast<int>(k), readoff_op(c.readoff[k], undo));
    };
    if (s.readoff_first) readoff(true);
    for (const Layer* layer : s.layers)
        for (const auto& g : layer->gates) out = apply_two_site_dense(out, c.n, g.site, gate_op(g.params, s.dagger));
    if (!s.readoff_first) readoff(false);
    return out;
}

ZyzAngles zyz_decompose(const Matrix2& u) {
    ZyzAngles z;
    const cplx det = u.determinant();
    z.global_phase = std::arg(det) / 2;
    const Matrix2 v = u * std::exp(-kI * z.global_phase);
    // v = [[e^{-i(a+c)/2} cos(b/2), -e^{-i(a-c)/2} sin(b/2)],
    //      [e^{ i(a-c)/2} sin(b/2),  e^{ i(a+c)/2} cos(b/2)]]
    z.b = 2 * std::atan2(std::abs(v(1, 0)), std::abs(v(0, 0)));
    const double sum = std::abs(v(1, 1)) > 1e-12 ? 2 * std::arg(v(1, 1)) : 0.0;
    const double diff = std::abs(v(1, 0)) > 1e-12 ? 2 * std::arg(v(1, 0)) : 0.0;
    z.a = (sum + diff) / 2;
    z.c = (sum - diff) / 2;
    return z;
}

namespace {

void emit_local(std::ostringstream& os, int q, const Matrix2& u) {
    const ZyzAngles z = zyz_decompose(u);
    os << "Rz " << q << ' ' << z.c << '\n';
    os << "Ry " << q << ' ' << z.b << '\n';
    os << "Rz " << q << ' ' << z.a << '\n';
}

void emit_coupling(std::ostringstream& os, int q, const GateParams& p, double sign) {
    const char* names[3] = {"Rxx", "Ryy", "Rzz"};
    for (int j = 0; j < 3; ++j) os << names[j] << ' ' << q << ' ' << q + 1 << ' ' << sign * 2 * p.theta[j] << '\n';
}

}  // namespace

std::string export_gate_list(const Circuit& c) {
    c.validate();
    std::ostringstream os;
    os << std::setprecision(17);
    os << "# n " << c.n << '\n';
    os << "# direction " << to_string(c.direction) << '\n';
    const Schedule s = schedule(c, false);
    const auto readoff = [&](bool undo) {
        for (std::size_t k = 0; k < c.readoff.size(); ++k) {
            const Readoff& r = c.readoff[k];
            const int q = static_cast<int>(k);
            if (undo) {
                os << "Rx " << q << ' ' << 2 * r.phi_x << '\n';
                os << "Rz " << q << ' ' << r.phi_z + std::numbers::pi / 2 << '\n';
            } else {
                os << "Rz " << q << ' ' << -(r.phi_z + std::numbers::pi / 2) << '\n';
                os << "Rx " << q << ' ' << -2 * r.phi_x << '\n';
            }
        }
    };
    if (s.readoff_first) readoff(true);
    for (std::size_t li = 0; li < s.layers.size(); ++li) {
        os << "# layer " << li << ' ' << to_string(s.layers[li]->parity) << '\n';
        for (const auto& g : s.layers[li]->gates) {
            const auto& t = g.params.theta;
            const Matrix2 left = local_exp(t[6], t[7], t[8]);
            const Matrix2 right = local_exp(t[3], t[4], t[5]);
            if (!s.dagger) {
                emit_local(os, g.site, left);
                emit_local(os, g.site + 1, right);
                emit_coupling(os, g.site, g.params, 1.0);
            } else {
                emit_coupling(os, g.site, g.params, -1.0);
                emit_local(os, g.site, left.adjoint());
                emit_local(os, g.site + 1, right.adjoint());
            }
        }
    }
    if (!s.readoff_first) readoff(false);
    return os.str();
}

}  // namespace cvd
