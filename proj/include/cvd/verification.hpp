#pragma once

#include "cvd/cvd.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace cvd {

/// (1-a) a^{a/(1-a)} / p^{a/(1-a)} e^S. Throws std::invalid_argument unless
/// 0 < a < 1, 0 < p < 1 and S >= 0.
double lemma1_bound(double entropy, double alpha, double p);

/// eps + L sqrt(2 (n-1) p_max).
double lemma2_bound(double eps, int layers, int n, double p_max);

struct Lemma1Sweep {
    int spectra = 0;
    long long checks = 0;
    long long violations = 0;
    /// Largest D / bound seen; at most 1 when no violation occurred.
    double max_ratio = 0.0;
};

/// Random spectra of rank at most `max_rank`; for every cut D < rank with its exact
/// tail weight p and several alpha in (0,1), checks D <= bound (relative slack 1e-12).
Lemma1Sweep lemma1_property(int spectra, int max_rank, std::uint64_t seed);

/// Random probabilities (Schmidt values squared, summing to 1, descending) from a
/// mix of flat, geometric, power-law, uniform-random and nearly-product profiles.
RealVector random_spectrum(int rank, std::mt19937_64& rng);

struct Lemma2Check {
    double actual = 0.0;  // dense || psi - U^dagger |0> ||
    double eps = 0.0;
    double p_max = 0.0;
    int layers = 0;
    double bound = 0.0;
    bool holds() const { return actual <= bound + 1e-12; }
};

/// Dense check of the error bound for a finished run (n <= 20).
Lemma2Check lemma2_check(const Mps& target, const CvdResult& run);

/// Column-orthonormal rows x cols matrix: QR of a complex Gaussian matrix with the
/// diagonal of R made real positive.
Matrix haar_isometry(Index rows, Index cols, std::mt19937_64& rng);
Matrix haar_isometry(Index rows, Index cols, std::uint64_t seed);

struct MomentCheck {
    std::string name;
    cplx estimate;
    cplx expected;
    /// Standard errors of the real and imaginary parts of the estimate.
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    bool within(double sigmas) const;
};

/// Second- and fourth-moment Weingarten checks for Haar unitaries of size n.
std::vector<MomentCheck> haar_moment_checks(Index n, int samples, std::uint64_t seed);

/// Whether Lambda_0 has dimension D (outer legs D) or 2D.
enum class CenterConvention { bond_d, bond_2d };

struct GeneratorStats {
    std::string name;
    double mean = 0.0;
    double variance = 0.0;
    double stderr_mean = 0.0;
    double stderr_variance = 0.0;
    bool mean_consistent_with_zero() const { return std::abs(mean) <= 5.0 * stderr_mean + 1e-15; }
};

struct Lemma3Stats {
    Index D = 1;
    CenterConvention convention = CenterConvention::bond_d;
    RealVector spectrum;
    int samples = 0;
    std::vector<GeneratorStats> generators;  // XX, YY, ZZ
    /// 8/(2D+1)^2 (1 - e^{2(S2 - S3)}), evaluated verbatim.
    double closed_form = 0.0;
    bool mean_ok() const;
    /// Every empirical variance agrees with the closed form within 5 standard errors.
    bool closed_form_matches() const;
    /// "pass", or "flagged" when the closed form disagrees with the sampled variance.
    std::string status() const;
};

/// Monte-Carlo statistics of the theta = 0 gradient of the 2-Renyi entropy for
/// two-site blocks A Lambda_0 B with Haar isometries A and B.
Lemma3Stats lemma3_stats(Index D, const RealVector& center, int samples, std::uint64_t seed,
                         CenterConvention convention = CenterConvention::bond_d);

}  // namespace cvd
