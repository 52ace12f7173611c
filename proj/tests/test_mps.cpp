#include "cvd/mps.hpp"
#include "cvd/states.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace cvd;

namespace {

bool same_state(const Vector& a, const Vector& b, double tol) { return oracle::phase_distance(a, b) < tol; }

}  // namespace

TEST_CASE("canonicalize reproduces the dense state and its Schmidt values") {
    std::mt19937_64 rng(11);
    for (int n = 2; n <= 8; ++n) {
        const Vector psi = oracle::random_state(n, rng);
        const Mps m = canonicalize(psi);
        CHECK(m.size() == n);
        CHECK(canonical_deviation(m) < 1e-12);
        CHECK((to_statevector(m) - psi).norm() < 1e-12);
        for (int k = 0; k + 1 < n; ++k) {
            const RealVector ref = oracle::schmidt(psi, n, k + 1);
            const RealVector got = m.lambda(k).values();
            const Index r = got.size();
            CHECK(r <= ref.size());
            CHECK((got - ref.head(r)).norm() < 1e-12);
            CHECK(ref.tail(ref.size() - r).norm() < 1e-12);
        }
    }
}

TEST_CASE("bond dimension of an exact state equals its Schmidt rank") {
    const Mps g = ghz(6);
    for (int k = 0; k < 5; ++k) CHECK(g.bond_dim(k) == 2);
    const Mps z = zero_state(5);
    CHECK(z.max_bond_dim() == 1);
    Vector v = Vector::Zero(32);
    v(0) = 1.0;
    CHECK((to_statevector(z) - v).norm() == doctest::Approx(0.0));
}

TEST_CASE("product_state builds the Kronecker product") {
    std::vector<Vector> locals;
    Vector a(2), b(2), c(2);
    a << 0.6, 0.8;
    b << cplx(0, 1) / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    c << 1.0, 0.0;
    const Mps m = product_state({a, b, c});
    Vector ref = Eigen::kroneckerProduct(Eigen::kroneckerProduct(a, b).eval(), c);
    CHECK((to_statevector(m) - ref).norm() < 1e-14);
    CHECK(m.max_bond_dim() == 1);
}

TEST_CASE("canonicalize rejects malformed inputs") {
    CHECK_THROWS_AS(canonicalize(Vector::Ones(8)), std::invalid_argument);  // norm sqrt(8)
    Vector v = Vector::Zero(6);
    v(0) = 1.0;
    CHECK_THROWS_AS(canonicalize(v), std::invalid_argument);
    Vector one = Vector::Ones(1);
    CHECK_THROWS_AS(canonicalize(one), std::invalid_argument);
}

TEST_CASE("Spectrum validates its values") {
    CHECK_THROWS_AS(Spectrum{RealVector()}, std::invalid_argument);
    RealVector neg(2);
    neg << 1.0, -0.1;
    CHECK_THROWS_AS(Spectrum{neg}, std::invalid_argument);
    RealVector unsorted(3);
    unsorted << 0.1, 0.9, 0.3;
    const Spectrum s(unsorted);
    CHECK(s.largest() == doctest::Approx(0.9));
    CHECK(s.values()(2) == doctest::Approx(0.1));
}

TEST_CASE("retained_rank applies the cap, the cutoff and the floor") {
    RealVector s(4);
    s << std::sqrt(0.9), std::sqrt(0.09), std::sqrt(0.009), std::sqrt(0.001);
    CHECK(retained_rank(s, Truncation::none()) == 4);
    CHECK(retained_rank(s, Truncation{2, 0.0}) == 2);
    CHECK(retained_rank(s, Truncation{kUnboundedBond, 0.001}) == 3);  // cumulative tail <= cutoff
    CHECK(retained_rank(s, Truncation{kUnboundedBond, 0.0105}) == 2);
    RealVector tiny(3);
    tiny << 1.0, 1e-16, 0.0;
    CHECK(retained_rank(tiny, Truncation::none()) == 1);
}

TEST_CASE("truncate reaches the cap, stays canonical and is idempotent") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 4 + trial % 5;
        const Vector psi = oracle::random_state(n, rng);
        const Mps m = canonicalize(psi);
        const Index cap = 1 + trial % 3;
        const TruncationResult tr = truncate(m, Truncation{cap, 0.0});
        CHECK(tr.mps.max_bond_dim() <= cap);
        CHECK(canonical_deviation(tr.mps) < 1e-10);
        const TruncationResult again = truncate(tr.mps, Truncation{cap, 0.0});
        CHECK(again.total_discarded() < 1e-12);
        // Truncation error inequality || psi - T psi ||^2 <= 2 sum_k p_k
        const double err = oracle::phase_distance(psi, to_statevector(tr.mps));
        CHECK(err * err <= 2.0 * tr.total_discarded() + 1e-12);
    }
}

TEST_CASE("single-cut truncation discards exactly the dense tail weight") {
    std::mt19937_64 rng(8);
    const Vector psi = oracle::random_state(2 + 2, rng);  // 4 qubits, center cut rank 4
    const Mps m = canonicalize(psi);
    const RealVector s = oracle::schmidt(psi, 4, 2);
    const TruncationResult tr = truncate(m, Truncation{2, 0.0});
    // the first bond already has rank 2, so only cut 1 loses weight
    CHECK(tr.discarded[1] == doctest::Approx(s.tail(2).squaredNorm()).epsilon(1e-10));
}

TEST_CASE("overlap, distance and tensor_sum agree with dense vectors") {
    std::mt19937_64 rng(21);
    for (int n : {2, 3, 6}) {
        const Vector a = oracle::random_state(n, rng), b = oracle::random_state(n, rng);
        const Mps ma = canonicalize(a), mb = canonicalize(b);
        const cplx ov = overlap(ma, mb);
        CHECK(std::abs(ov - a.dot(b)) < 1e-12);
        CHECK(distance(ma, mb) == doctest::Approx(oracle::phase_distance(a, b)).epsilon(1e-10));
        const cplx c(0.3, -0.7);
        const auto sum = tensor_sum(right_tensors(ma), right_tensors(mb), c);
        const Vector ref = a + c * b;
        CHECK(norm(sum) == doctest::Approx(ref.norm()).epsilon(1e-12));
        CHECK((to_statevector(canonicalize(sum)) - ref / ref.norm()).norm() < 1e-10);
        CHECK(distance(ma, ma) < 1e-13);
    }
}

TEST_CASE("distance resolves tiny differences") {
    std::mt19937_64 rng(3);
    const Vector a = oracle::random_state(6, rng);
    const Vector d = oracle::random_state(6, rng);
    Vector b = a + 1e-11 * d;
    b /= b.norm();
    const double ref = oracle::phase_distance(a, b);
    CHECK(distance(canonicalize(a), canonicalize(b)) == doctest::Approx(ref).epsilon(1e-3));
}

TEST_CASE("expectation of local operators matches the dense oracle") {
    std::mt19937_64 rng(99);
    const int n = 5;
    const Vector psi = oracle::random_state(n, rng);
    const Mps m = canonicalize(psi);
    const std::vector<SiteOperator> ops{{1, oracle::pauli('X')}, {3, oracle::pauli('Y')}};
    const Matrix full = oracle::pauli_string("IXIYI");
    CHECK(std::abs(expectation(m, ops) - psi.dot(full * psi)) < 1e-12);
}

TEST_CASE("Mps constructor rejects inconsistent shapes") {
    std::vector<SiteTensor> g{SiteTensor(1, 2, 2), SiteTensor(3, 2, 1)};
    RealVector l(2);
    l << std::sqrt(0.5), std::sqrt(0.5);
    CHECK_THROWS_AS(Mps(g, {Spectrum(l)}), std::invalid_argument);
    std::vector<SiteTensor> g2{SiteTensor(1, 2, 2), SiteTensor(2, 2, 1)};
    CHECK_THROWS_AS(Mps(g2, {}), std::invalid_argument);
}

TEST_CASE("random canonicalize/truncate sequences keep the invariants") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 8);
        const Mps m = random_mps(n, 1 + static_cast<Index>(rng() % 8), rng());
        CHECK(canonical_deviation(m) < 1e-9);
        const TruncationResult tr = truncate(m, Truncation{1 + static_cast<Index>(rng() % 4), 1e-6});
        CHECK(canonical_deviation(tr.mps) < 1e-9);
        CHECK(std::abs(overlap(tr.mps, tr.mps) - 1.0) < 1e-9);
    }
}
