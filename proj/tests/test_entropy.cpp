#include "cvd/entropy.hpp"
#include "cvd/states.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace cvd;

namespace {

RealVector vec(std::initializer_list<double> v) {
    RealVector r(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) r(i++) = x;
    return r;
}

// alpha|00> + beta e^{i phi}|11> as a two-site MPS
Mps two_qubit(double p0, double phi) {
    Vector psi = Vector::Zero(4);
    psi(0) = std::sqrt(p0);
    psi(3) = std::sqrt(1.0 - p0) * std::exp(cplx(0, phi));
    return canonicalize(psi);
}

double purity_after(const TwoSiteBlock& b, const GateParams& p) {
    const RealVector s = b.spectrum(p);
    return s.array().pow(4).sum() / std::pow(s.squaredNorm(), 2);
}

}  // namespace

TEST_CASE("Renyi entropies of known spectra") {
    const RealVector flat = RealVector::Constant(4, 0.5);
    for (double a : {0.5, 2.0, 3.0}) CHECK(renyi_entropy(flat, RenyiIndex::of(a)) == doctest::Approx(std::log(4.0)));
    CHECK(renyi_entropy(flat, RenyiIndex::one()) == doctest::Approx(std::log(4.0)));
    CHECK(renyi_entropy(flat, RenyiIndex::infinity()) == doctest::Approx(std::log(4.0)));

    const RealVector s = vec({std::sqrt(0.8), std::sqrt(0.2)});
    CHECK(renyi_entropy(s, RenyiIndex::one()) == doctest::Approx(-(0.8 * std::log(0.8) + 0.2 * std::log(0.2))));
    CHECK(renyi_entropy(s, RenyiIndex::of(2.0)) == doctest::Approx(-std::log(0.68)));
    CHECK(renyi_entropy(s, RenyiIndex::of(0.5)) == doctest::Approx(2.0 * std::log(std::sqrt(0.8) + std::sqrt(0.2))));
    CHECK(renyi_entropy(s, RenyiIndex::infinity()) == doctest::Approx(-std::log(0.8)));
    CHECK(renyi_entropy(vec({1.0}), RenyiIndex::one()) == 0.0);
}

TEST_CASE("entropies agree with the dense oracle on random spectra") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int t = 0; t < 50; ++t) {
        RealVector s(1 + t % 10);
        for (Index i = 0; i < s.size(); ++i) s(i) = u(rng);
        for (double a : {0.3, 0.5, 1.0, 2.0, 5.0}) {
            const RenyiIndex idx = a == 1.0 ? RenyiIndex::one() : RenyiIndex::of(a);
            CHECK(renyi_entropy(s, idx) == doctest::Approx(oracle::renyi(s, a)).epsilon(1e-10));
        }
    }
}

TEST_CASE("entropy is monotone non-increasing in alpha") {
    const RealVector s = vec({0.8, 0.5, 0.3, 0.1});
    double prev = renyi_entropy(s, RenyiIndex::of(0.2));
    for (double a : {0.5, 0.9, 1.0, 1.5, 2.0, 4.0}) {
        const double cur = renyi_entropy(s, a == 1.0 ? RenyiIndex::one() : RenyiIndex::of(a));
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
    CHECK(renyi_entropy(s, RenyiIndex::infinity()) <= prev + 1e-12);
}

TEST_CASE("tail probability keeps precision near product states") {
    const double eps = 1e-20;
    const RealVector s = vec({std::sqrt(1.0 - eps), std::sqrt(eps)});
    CHECK(tail_probability(s) == doctest::Approx(eps).epsilon(1e-6));
    CHECK(tail_weight(s) == doctest::Approx(eps).epsilon(1e-6));
    CHECK(renyi_entropy(s, RenyiIndex::of(2.0)) == doctest::Approx(2 * eps).epsilon(1e-6));
}

TEST_CASE("RenyiIndex parsing and validation") {
    CHECK(RenyiIndex::parse("inf").kind() == RenyiIndex::Kind::infinity);
    CHECK(RenyiIndex::parse("1").kind() == RenyiIndex::Kind::one);
    CHECK(RenyiIndex::parse("0.5").value() == 0.5);
    CHECK(RenyiIndex::of(1.0) == RenyiIndex::one());
    CHECK_THROWS_AS(RenyiIndex::of(0.0), std::invalid_argument);
    CHECK_THROWS_AS(RenyiIndex::of(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(RenyiIndex::parse("abc"), std::invalid_argument);
    CHECK(RenyiIndex::parse("2").to_string() == "2");
}

TEST_CASE("local cost equals the entropy of the dense state after the gate") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g;
    for (int t = 0; t < 20; ++t) {
        const int n = 4;
        const Vector psi = oracle::random_state(n, rng);
        const Mps m = canonicalize(psi);
        GateParams p;
        for (double& x : p.theta) x = g(rng);
        const int site = t % 3;
        const Vector after = oracle::embed(gate_matrix(p), n, site) * psi;
        const RealVector ref = oracle::schmidt(after, n, site + 1);
        CHECK(local_cost(m, site, p, RenyiIndex::one()) == doctest::Approx(oracle::renyi(ref, 1.0)).epsilon(1e-9));
        CHECK(local_cost(m, site, p, RenyiIndex::of(2.0)) == doctest::Approx(oracle::renyi(ref, 2.0)).epsilon(1e-9));
    }
}

TEST_CASE("two-qubit example: XX entry of Tr(rho drho) is 2 sin(phi)(beta alpha^3 - alpha beta^3)") {
    const Mps m = two_qubit(0.8, M_PI / 2);
    const Gradient d = purity_derivative_theta0(m, 0);
    CHECK(std::abs(d[0]) == doctest::Approx(0.48).epsilon(1e-12));
    CHECK(std::abs(d[1]) == doctest::Approx(0.48).epsilon(1e-12));
    CHECK(std::abs(d[2]) < 1e-14);
    // Tr(rho drho) is half the derivative of the purity; sign checked by finite differences
    const TwoSiteBlock b(m, 0);
    for (std::size_t j = 0; j < 3; ++j) {
        GateParams plus, minus;
        plus.theta[j] = 1e-5;
        minus.theta[j] = -1e-5;
        const double fd = (purity_after(b, plus) - purity_after(b, minus)) / 2e-5;
        CHECK(d[j] == doctest::Approx(fd / 2).epsilon(1e-6));
    }
    const Gradient g = analytic_gradient_theta0(m, 0);
    const Gradient fd = fd_gradient(m, 0, GateParams::identity(), RenyiIndex::of(2.0));
    for (std::size_t j = 0; j < 9; ++j) CHECK(g[j] == doctest::Approx(fd[j]).epsilon(1e-5));
}

TEST_CASE("gradient vanishes at the fixed points") {
    // product, maximally entangled and real-amplitude states
    for (const auto& [p0, phi] : {std::pair{1.0, 0.3}, std::pair{0.5, 0.7}, std::pair{0.8, 0.0}}) {
        const Gradient g = analytic_gradient_theta0(p0 == 1.0 ? zero_state(2) : two_qubit(p0, phi), 0);
        for (double v : g) CHECK(std::abs(v) < 1e-12);
    }
}

TEST_CASE("analytic gradient matches finite differences on random MPS") {
    for (int t = 0; t < 15; ++t) {
        const Mps m = random_mps(6, 4, 300 + t);
        const int site = t % 5;
        const Gradient g = analytic_gradient_theta0(m, site);
        const Gradient fd = fd_gradient(m, site, GateParams::identity(), RenyiIndex::of(2.0));
        for (std::size_t j = 0; j < 9; ++j) {
            const double tol = std::max(1e-8, 1e-4 * std::abs(fd[j]));
            CHECK(std::abs(g[j] - fd[j]) < tol);
        }
    }
}

TEST_CASE("local generators never change the entanglement") {
    const Mps m = random_mps(5, 4, 77);
    const Gradient fd = fd_gradient(m, 1, GateParams::identity(), RenyiIndex::one());
    for (std::size_t j = 3; j < 9; ++j) CHECK(std::abs(fd[j]) < 1e-8);
}

TEST_CASE("TwoSiteBlock from an explicit matrix matches the MPS block") {
    const Mps m = random_mps(5, 3, 5);
    const TwoSiteBlock a(m, 2);
    const TwoSiteBlock b(a.applied(Matrix4::Identity()));
    GateParams p;
    p.theta = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    CHECK((a.spectrum(p) - b.spectrum(p)).norm() < 1e-14);
    CHECK_THROWS_AS(TwoSiteBlock(Matrix::Zero(3, 4)), std::invalid_argument);
}

TEST_CASE("gate matrix derivatives match finite differences") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        GateParams p;
        for (double& x : p.theta) x = (t == 0 ? 1e-6 : 1.0) * normal(rng);
        const auto d = gate_matrix_derivatives(p);
        for (std::size_t j = 0; j < 9; ++j) {
            GateParams plus = p, minus = p;
            plus.theta[j] += 1e-6;
            minus.theta[j] -= 1e-6;
            const Matrix4 fd = (gate_matrix(plus) - gate_matrix(minus)) / 2e-6;
            CHECK((fd - d[j]).norm() < 1e-8);
        }
    }
}

TEST_CASE("exact gradient matches finite differences at generic angles") {
    std::mt19937_64 rng(22);
    std::normal_distribution<double> normal(0.0, 0.7);
    for (int t = 0; t < 40; ++t) {
        const Mps m = random_mps(4 + t % 4, 2 + t % 5, 300 + static_cast<std::uint64_t>(t));
        const int site = t % (m.size() - 1);
        GateParams p;
        for (double& x : p.theta) x = normal(rng);
        for (const RenyiIndex& a : {RenyiIndex::of(0.5), RenyiIndex::one(), RenyiIndex::of(2.0), RenyiIndex::of(3.5),
                                    RenyiIndex::infinity()}) {
            double cost = -1.0;
            const Gradient g = exact_gradient(TwoSiteBlock(m, site), p, a, &cost);
            const Gradient fd = fd_gradient(m, site, p, a, 1e-5);
            CHECK(cost == doctest::Approx(local_cost(m, site, p, a)).epsilon(1e-12));
            for (std::size_t j = 0; j < 9; ++j) {
                INFO("alpha " << a.to_string() << " angle " << j);
                CHECK(std::abs(g[j] - fd[j]) < 1e-6 * std::max(1.0, std::abs(fd[j])));
            }
        }
    }
}

TEST_CASE("exact gradient at theta = 0 agrees with the alpha = 2 closed form") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Mps m = random_mps(6, 4, 400 + seed);
        const Gradient a = analytic_gradient_theta0(m, 2);
        const Gradient e = exact_gradient(m, 2, GateParams::identity(), RenyiIndex::of(2.0));
        for (std::size_t j = 0; j < 9; ++j) CHECK(std::abs(e[j] - a[j]) < 1e-10 * std::max(1.0, std::abs(a[j])));
    }
    // product states have no gradient
    const Gradient z = exact_gradient(zero_state(4), 1, GateParams::identity(), RenyiIndex::one());
    for (double v : z) CHECK(v == 0.0);
}
