#include "cvd/gates.hpp"
#include "cvd/states.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace cvd;

namespace {

GateParams random_params(std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    GateParams p;
    for (double& t : p.theta) t = g(rng);
    return p;
}

// Generator sum written out from Pauli strings; local parts act before the coupling.
Matrix4 reference_gate(const GateParams& p) {
    const auto& t = p.theta;
    const Matrix coupling = oracle::expm_hermitian(t[0] * oracle::pauli_string("XX") + t[1] * oracle::pauli_string("YY") +
                                                   t[2] * oracle::pauli_string("ZZ"));
    const Matrix right = oracle::expm_hermitian(t[3] * oracle::pauli('X') + t[4] * oracle::pauli('Y') + t[5] * oracle::pauli('Z'));
    const Matrix left = oracle::expm_hermitian(t[6] * oracle::pauli('X') + t[7] * oracle::pauli('Y') + t[8] * oracle::pauli('Z'));
    return coupling * Eigen::kroneckerProduct(left, right);
}

}  // namespace

TEST_CASE("gate_matrix matches the exponential of its generators") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const GateParams p = random_params(rng);
        const Matrix4 g = gate_matrix(p);
        CHECK((g - reference_gate(p)).norm() < 1e-12);
        CHECK((g * g.adjoint() - Matrix4::Identity()).norm() < 1e-12);
        CHECK((gate_dagger_matrix(p) - g.adjoint()).norm() < 1e-12);
    }
    CHECK((gate_matrix(GateParams::identity()) - Matrix4::Identity()).norm() == 0.0);
}

TEST_CASE("coupling and local exponentials on known angles") {
    // exp(-i pi/4 XX) maps |00> to (|00> - i|11>)/sqrt(2)
    const Matrix4 c = coupling_exp(M_PI / 4, 0.0, 0.0);
    CHECK(std::abs(c(0, 0) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(c(3, 0) - cplx(0, -1.0 / std::sqrt(2.0))) < 1e-15);
    // exp(-i pi/2 X) = -i X
    const Matrix2 x = local_exp(M_PI / 2, 0.0, 0.0);
    CHECK((x - cplx(0, -1) * oracle::pauli('X')).norm() < 1e-15);
}

TEST_CASE("kron puts the left factor on the more significant qubit") {
    const Matrix4 k = kron(oracle::pauli('X'), Matrix2::Identity());
    // |00> (index 0) -> |10> (index 2)
    CHECK(k(2, 0) == cplx(1.0));
}

TEST_CASE("negated parameters with reversed order give the inverse") {
    std::mt19937_64 rng(4);
    const GateParams p = random_params(rng);
    CHECK(p.negated().theta[3] == -p.theta[3]);
    CHECK(!p.is_identity());
    CHECK(GateParams::identity().is_identity());
}

TEST_CASE("apply_gate equals the dense two-qubit product") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 6;
        const Vector psi = oracle::random_state(n, rng);
        const Mps m = canonicalize(psi);
        const int site = static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1));
        const GateParams p = random_params(rng);
        const GateResult r = apply_gate(m, site, p);
        const Vector ref = oracle::embed(reference_gate(p), n, site) * psi;
        CHECK((to_statevector(r.mps) - ref).norm() < 1e-11);
        CHECK(canonical_deviation(r.mps) < 1e-11);
        CHECK(r.discarded == 0.0);
        CHECK((apply_two_site_dense(psi, n, site, gate_matrix(p)) - ref).norm() < 1e-12);
    }
}

TEST_CASE("an untruncated gate leaves other sites bit-identical") {
    const Mps m = random_mps(7, 4, 3);
    std::mt19937_64 rng(9);
    const GateResult r = apply_gate(m, 3, random_params(rng));
    for (int k : {0, 1, 2, 5, 6}) {
        for (int s = 0; s < 2; ++s) CHECK(r.mps.gamma(k)[s] == m.gamma(k)[s]);
    }
    for (int b : {0, 1, 2, 4, 5}) CHECK(r.mps.lambda(b).values() == m.lambda(b).values());
}

TEST_CASE("a truncating gate respects the cap and restores canonical form") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        const Mps m = random_mps(6, 4, 100 + trial);
        const GateResult r = apply_gate(m, 2, random_params(rng), Truncation{2, 0.0});
        CHECK(r.mps.bond_dim(2) <= 2);
        CHECK(canonical_deviation(r.mps) < 1e-10);
        CHECK(r.discarded >= 0.0);
    }
}

TEST_CASE("apply_one_site matches dense and keeps canonical form") {
    std::mt19937_64 rng(12);
    const int n = 5;
    const Vector psi = oracle::random_state(n, rng);
    Mps m = canonicalize(psi);
    const Matrix2 u = local_exp(0.3, -1.2, 0.7);
    apply_one_site(m, 2, u);
    CHECK((to_statevector(m) - oracle::embed(u, n, 2) * psi).norm() < 1e-12);
    CHECK(canonical_deviation(m) < 1e-12);
    CHECK((apply_one_site_dense(psi, n, 2, u) - oracle::embed(u, n, 2) * psi).norm() < 1e-12);
}

TEST_CASE("gate application rejects invalid sites") {
    const Mps m = ghz(4);
    CHECK_THROWS_AS(apply_gate(m, 3, GateParams::identity()), std::out_of_range);
    CHECK_THROWS_AS(apply_gate(m, -1, GateParams::identity()), std::out_of_range);
    Mps mm = m;
    CHECK_THROWS_AS(apply_one_site(mm, 4, Matrix2::Identity()), std::out_of_range);
}
