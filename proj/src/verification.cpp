#include "cvd/verification.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cvd {

double lemma1_bound(double entropy, double alpha, double p) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("lemma1_bound: alpha must lie in (0, 1)");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("lemma1_bound: p must lie in (0, 1)");
    if (!(entropy >= 0.0) || !std::isfinite(entropy)) throw std::invalid_argument("lemma1_bound: entropy must be >= 0");
    const double k = alpha / (1.0 - alpha);
    return (1.0 - alpha) * std::pow(alpha, k) * std::pow(p, -k) * std::exp(entropy);
}

double lemma2_bound(double eps, int layers, int n, double p_max) {
    if (eps < 0.0 || layers < 0 || n < 1 || p_max < 0.0)
        throw std::invalid_argument("lemma2_bound: arguments must be nonnegative");
    return eps + layers * std::sqrt(2.0 * (n - 1) * p_max);
}

RealVector random_spectrum(int rank, std::mt19937_64& rng) {
    if (rank < 1) throw std::invalid_argument("random_spectrum: rank must be positive");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RealVector w(rank);
    const int profile = static_cast<int>(rng() % 5);
    const double param = u(rng);
    for (int i = 0; i < rank; ++i) {
        switch (profile) {
            case 0: w(i) = 1.0; break;                                    // flat
            case 1: w(i) = std::exp(-8.0 * param * i); break;             // geometric
            case 2: w(i) = std::pow(i + 1.0, -(0.5 + 3.0 * param)); break;  // power law
            case 3: w(i) = u(rng); break;
            default: w(i) = (i == 0 ? 1.0 : param * 1e-3 * u(rng)); break;  // nearly product
        }
        w(i) = std::max(w(i), 1e-300);
    }
    std::sort(w.begin(), w.end(), std::greater<>());
    return w / w.sum();
}

Lemma1Sweep lemma1_property(int spectra, int max_rank, std::uint64_t seed) {
    if (spectra < 1 || max_rank < 2) throw std::invalid_argument("lemma1_property: empty sweep");
    static constexpr double kAlphas[] = {0.05, 0.2, 1.0 / 3.0, 0.5, 0.7, 0.9, 0.97};
    std::mt19937_64 rng(seed);
    Lemma1Sweep out;
    out.spectra = spectra;
    for (int t = 0; t < spectra; ++t) {
        const int rank = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_rank - 1));
        const RealVector w = random_spectrum(rank, rng);
        const RealVector schmidt = w.cwiseSqrt();
        for (double alpha : kAlphas) {
            const double s = renyi_entropy(schmidt, RenyiIndex::of(alpha));
            // suffix sums give the exact cut-off weight for every D
            double tail = 0.0;
            for (int d = rank - 1; d >= 1; --d) {
                tail += w(d);
                if (!(tail > 0.0 && tail < 1.0)) continue;
                const double bound = lemma1_bound(std::max(s, 0.0), alpha, tail);
                const double ratio = d / bound;
                ++out.checks;
                out.max_ratio = std::max(out.max_ratio, ratio);
                if (ratio > 1.0 + 1e-12) ++out.violations;
            }
        }
    }
    return out;
}

Lemma2Check lemma2_check(const Mps& target, const CvdResult& run) {
    const int n = target.size();
    if (n > kMaxDenseSites) throw std::invalid_argument("lemma2_check: too many sites for the dense oracle");
    const Vector psi = to_statevector(target);
    const Vector prepared = apply_circuit_dense(to_statevector(zero_state(n)), run.circuit, true);
    const cplx ov = prepared.dot(psi);
    const cplx phase = std::abs(ov) > 0.0 ? ov / std::abs(ov) : cplx(1.0);
    Lemma2Check c;
    c.actual = (psi - phase * prepared).norm();
    c.eps = run.report.eps;
    c.p_max = run.report.p_max_reverse;
    c.layers = static_cast<int>(run.circuit.layers.size());
    c.bound = lemma2_bound(c.eps, c.layers, n, c.p_max);
    return c;
}

Matrix haar_isometry(Index rows, Index cols, std::mt19937_64& rng) {
    if (rows < 1 || cols < 1 || rows < cols) throw std::invalid_argument("haar_isometry: need rows >= cols >= 1");
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    Matrix g(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) g(i, j) = cplx(normal(rng), normal(rng));
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    const Matrix& r = qr.matrixQR();
    for (Index j = 0; j < cols; ++j) {
        const double a = std::abs(r(j, j));
        if (a > 0.0) q.col(j) *= r(j, j) / a;
    }
    return q;
}

Matrix haar_isometry(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return haar_isometry(rows, cols, rng);
}

bool MomentCheck::within(double sigmas) const {
    const cplx d = estimate - expected;
    return std::abs(d.real()) <= sigmas * stderr_re + 1e-15 && std::abs(d.imag()) <= sigmas * stderr_im + 1e-15;
}

namespace {

struct Accumulator {
    cplx sum{0.0};
    double sq_re = 0.0, sq_im = 0.0;
    void add(cplx v) {
        sum += v;
        sq_re += v.real() * v.real();
        sq_im += v.imag() * v.imag();
    }
    MomentCheck finish(std::string name, cplx expected, int samples) const {
        const double m = samples;
        const cplx mean = sum / m;
        const double var_re = std::max(0.0, sq_re / m - mean.real() * mean.real());
        const double var_im = std::max(0.0, sq_im / m - mean.imag() * mean.imag());
        return {std::move(name), mean, expected, std::sqrt(var_re / m), std::sqrt(var_im / m)};
    }
};

}  // namespace

std::vector<MomentCheck> haar_moment_checks(Index n, int samples, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("haar_moment_checks: need n >= 2");
    if (samples < 2) throw std::invalid_argument("haar_moment_checks: need at least two samples");
    const double N = static_cast<double>(n);
    std::mt19937_64 rng(seed);
    enum { diag, off_row, off_both, abs4, abs2abs2_diag, abs2abs2_row, cross, count };
    std::array<Accumulator, count> acc;
    for (int t = 0; t < samples; ++t) {
        const Matrix u = haar_isometry(n, n, rng);
        const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
        acc[diag].add(u00 * std::conj(u00));
        acc[off_row].add(u00 * std::conj(u01));
        acc[off_both].add(u00 * std::conj(u11));
        acc[abs4].add(std::norm(u00) * std::norm(u00));
        acc[abs2abs2_diag].add(std::norm(u00) * std::norm(u11));
        acc[abs2abs2_row].add(std::norm(u00) * std::norm(u01));
        acc[cross].add(u00 * u11 * std::conj(u01) * std::conj(u10));
    }
    // Wg(id) = 1/(N^2-1), Wg(swap) = -1/(N(N^2-1))
    const double wg1 = 1.0 / (N * N - 1.0), wg2 = -1.0 / (N * (N * N - 1.0));
    return {
        acc[diag].finish("E[U00 conj U00] = 1/N", 1.0 / N, samples),
        acc[off_row].finish("E[U00 conj U01] = 0", 0.0, samples),
        acc[off_both].finish("E[U00 conj U11] = 0", 0.0, samples),
        acc[abs4].finish("E|U00|^4 = 2/(N(N+1))", 2.0 * (wg1 + wg2), samples),
        acc[abs2abs2_diag].finish("E|U00|^2|U11|^2 = 1/(N^2-1)", wg1, samples),
        acc[abs2abs2_row].finish("E|U00|^2|U01|^2 = 1/(N(N+1))", wg1 + wg2, samples),
        acc[cross].finish("E[U00 U11 conj U01 conj U10] = -1/(N(N^2-1))", wg2, samples),
    };
}

bool Lemma3Stats::mean_ok() const {
    return std::all_of(generators.begin(), generators.end(), [](const GeneratorStats& g) { return g.mean_consistent_with_zero(); });
}

bool Lemma3Stats::closed_form_matches() const {
    return std::all_of(generators.begin(), generators.end(), [&](const GeneratorStats& g) {
        return std::abs(g.variance - closed_form) <= 5.0 * g.stderr_variance + 1e-15;
    });
}

std::string Lemma3Stats::status() const {
    if (!mean_ok()) return "fail";
    return closed_form_matches() ? "pass" : "flagged";
}

Lemma3Stats lemma3_stats(Index D, const RealVector& center, int samples, std::uint64_t seed,
                         CenterConvention convention) {
    if (samples < 1) throw std::invalid_argument("lemma3_stats: sampling budget must be positive");
    if (D < 1) throw std::invalid_argument("lemma3_stats: D must be positive");
    const Index dc = convention == CenterConvention::bond_d ? D : 2 * D;
    if (center.size() < 1 || center.size() > dc)
        throw std::invalid_argument("lemma3_stats: center spectrum does not fit the bond dimension");
    if ((center.array() < 0.0).any()) throw std::invalid_argument("lemma3_stats: negative center weight");
    if (std::abs(center.squaredNorm() - 1.0) > 1e-10)
        throw std::invalid_argument("lemma3_stats: center Schmidt values must be normalized");

    RealVector lam = RealVector::Zero(dc);
    lam.head(center.size()) = center;

    Lemma3Stats out;
    out.D = D;
    out.convention = convention;
    out.spectrum = center;
    out.samples = samples;
    const double s2 = renyi_entropy(center, RenyiIndex::of(2.0));
    const double s3 = renyi_entropy(center, RenyiIndex::of(3.0));
    out.closed_form = 8.0 / std::pow(2.0 * D + 1.0, 2) * (1.0 - std::exp(2.0 * (s2 - s3)));

    // per-chunk streams keep the estimate a pure function of (seed, samples)
    constexpr int kChunk = 4096;
    std::array<double, 3> sum{}, sum2{}, sum3{}, sum4{};
    for (int start = 0; start < samples; start += kChunk) {
        std::mt19937_64 rng(gate_seed(seed, start / kChunk, 0));
        const int stop = std::min(samples, start + kChunk);
        for (int t = start; t < stop; ++t) {
            const Matrix a = haar_isometry(2 * D, dc, rng);
            const Matrix b = haar_isometry(2 * D, dc, rng).adjoint();
            const Gradient g = analytic_gradient_theta0(TwoSiteBlock(a * lam.asDiagonal() * b));
            for (int j = 0; j < 3; ++j) {
                const double v = g[static_cast<std::size_t>(j)];
                sum[j] += v;
                sum2[j] += v * v;
                sum3[j] += v * v * v;
                sum4[j] += v * v * v * v;
            }
        }
    }
    static const char* names[3] = {"XX", "YY", "ZZ"};
    const double m = samples;
    for (int j = 0; j < 3; ++j) {
        GeneratorStats g;
        g.name = names[j];
        g.mean = sum[j] / m;
        const double e2 = sum2[j] / m;
        g.variance = std::max(0.0, e2 - g.mean * g.mean);
        g.stderr_mean = std::sqrt(g.variance / m);
        // fourth central moment for the standard error of the variance estimate
        const double mu = g.mean;
        const double c4 = sum4[j] / m - 4 * mu * sum3[j] / m + 6 * mu * mu * e2 - 3 * std::pow(mu, 4);
        g.stderr_variance = std::sqrt(std::max(0.0, c4 - g.variance * g.variance) / m);
        out.generators.push_back(g);
    }
    return out;
}

}  // namespace cvd
