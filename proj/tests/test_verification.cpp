#include "cvd/states.hpp"
#include "cvd/verification.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace cvd;

namespace {

RealVector sqrt_probs(std::initializer_list<double> p) {
    RealVector r(static_cast<Index>(p.size()));
    Index i = 0;
    for (double x : p) r(i++) = std::sqrt(x);
    return r;
}

}  // namespace

TEST_CASE("rank bound reference values") {
    CHECK(lemma1_bound(std::log(2.0), 0.5, 1e-4) == doctest::Approx(5000.0).epsilon(1e-12));
    // (1/2)(1/2)^1 / 0.25 = 1
    CHECK(lemma1_bound(0.0, 0.5, 0.25) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(lemma1_bound(0.1, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(lemma1_bound(0.1, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(lemma1_bound(-0.1, 0.5, 0.1), std::invalid_argument);
}

TEST_CASE("rank bound holds on random spectra") {
    const Lemma1Sweep s = lemma1_property(300, 64, 3);
    CHECK(s.spectra == 300);
    CHECK(s.checks > 1000);
    CHECK(s.violations == 0);
    CHECK(s.max_ratio <= 1.0 + 1e-12);
    CHECK(s.max_ratio > 0.0);
}

TEST_CASE("random spectra are probability vectors, sorted") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        const RealVector s = random_spectrum(1 + t % 20, rng);
        CHECK(s.sum() == doctest::Approx(1.0).epsilon(1e-12));
        for (Index i = 1; i < s.size(); ++i) CHECK(s(i) <= s(i - 1));
        CHECK(s.minCoeff() > 0.0);
    }
}

TEST_CASE("error accumulation bound reference values") {
    CHECK(lemma2_bound(1e-3, 10, 11, 1e-8) == doctest::Approx(5.472e-3).epsilon(1e-3));
    CHECK(lemma2_bound(1e-3, 10, 11, 0.0) == 1e-3);
}

TEST_CASE("error accumulation bound holds for a truncated run") {
    const Mps target = random_mps(8, 8, 4);
    CvdConfig c;
    c.max_layers = 4;
    c.bond_cap = 2;
    c.cutoff = 1e-3;
    const CvdResult r = disentangle(target, c);
    const Lemma2Check chk = lemma2_check(target, r);
    CHECK(chk.layers == static_cast<int>(r.circuit.layers.size()));
    CHECK(chk.eps == r.report.eps);
    CHECK(chk.holds());
    // the dense distance of an untruncated evaluation agrees with eps
    CHECK(chk.actual >= 0.0);
}

TEST_CASE("Haar isometries are orthonormal") {
    std::mt19937_64 rng(2);
    const Matrix u = haar_isometry(2, 2, rng);
    CHECK((u.adjoint() * u - Matrix::Identity(2, 2)).norm() < 1e-12);
    CHECK((u * u.adjoint() - Matrix::Identity(2, 2)).norm() < 1e-12);
    const Matrix v = haar_isometry(8, 3, 5);
    CHECK((v.adjoint() * v - Matrix::Identity(3, 3)).norm() < 1e-12);
    CHECK((haar_isometry(8, 3, 5) - v).norm() == 0.0);
    CHECK_THROWS_AS(haar_isometry(2, 3, 1), std::invalid_argument);
}

TEST_CASE("Haar samples are left invariant in distribution") {
    // |(V U)_00|^2 has the same law as |U_00|^2; compare means and second moments.
    const Matrix v = haar_isometry(2, 2, 77);
    std::mt19937_64 rng(3);
    const int samples = 20000;
    double m1 = 0, m2 = 0, w1 = 0, w2 = 0;
    for (int i = 0; i < samples; ++i) {
        const Matrix u = haar_isometry(2, 2, rng);
        const double a = std::norm(u(0, 0)), b = std::norm((v * u)(0, 0));
        m1 += a;
        m2 += a * a;
        w1 += b;
        w2 += b * b;
    }
    m1 /= samples, m2 /= samples, w1 /= samples, w2 /= samples;
    // |U_00|^2 is uniform on [0,1] for N = 2: variance 1/12
    const double se = std::sqrt(1.0 / 12.0 / samples);
    CHECK(std::abs(m1 - 0.5) < 5 * se);
    CHECK(std::abs(w1 - 0.5) < 5 * se);
    CHECK(std::abs(m2 - 1.0 / 3.0) < 0.01);
    CHECK(std::abs(w2 - 1.0 / 3.0) < 0.01);
}

TEST_CASE("Weingarten moments of Haar unitaries") {
    for (Index n : {2, 4}) {
        const auto checks = haar_moment_checks(n, 20000, 11);
        CHECK(checks.size() == 7);
        for (const auto& c : checks) {
            INFO(c.name);
            CHECK(c.within(4.0));
        }
    }
}

TEST_CASE("gradient statistics for a rank-one center vanish") {
    RealVector center = RealVector::Zero(2);
    center(0) = 1.0;
    const Lemma3Stats s = lemma3_stats(2, center, 2000, 1);
    for (const auto& g : s.generators) {
        CHECK(std::abs(g.mean) < 1e-12);
        CHECK(g.variance < 1e-20);
    }
    CHECK(s.closed_form == doctest::Approx(0.0));
    CHECK(s.status() == "pass");
}

TEST_CASE("gradient statistics for a flat center") {
    const Lemma3Stats s = lemma3_stats(2, sqrt_probs({0.5, 0.5}), 20000, 2);
    CHECK(s.closed_form == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(s.mean_ok());
    for (const auto& g : s.generators) CHECK(std::abs(g.variance) < 10 * g.stderr_variance + 1e-20);
}

TEST_CASE("gradient statistics for a skewed center are flagged") {
    const Lemma3Stats s = lemma3_stats(2, sqrt_probs({0.8, 0.2}), 20000, 3);
    CHECK(s.closed_form < 0.0);
    CHECK(s.mean_ok());
    for (const auto& g : s.generators) CHECK(g.variance > 0.0);
    CHECK(s.status() == "flagged");
    const Lemma3Stats w = lemma3_stats(2, sqrt_probs({0.8, 0.2}), 2000, 3, CenterConvention::bond_2d);
    CHECK(w.convention == CenterConvention::bond_2d);
    CHECK(w.mean_ok());
}

TEST_CASE("gradient statistics reject invalid centers") {
    CHECK_THROWS_AS(lemma3_stats(2, sqrt_probs({0.3, 0.3}), 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(lemma3_stats(1, sqrt_probs({0.5, 0.3, 0.2}), 100, 1), std::invalid_argument);
}

TEST_CASE("eps_site example") { CHECK(eps_site(1e-2, 10) == doctest::Approx(1.0045e-3).epsilon(1e-4)); }
