#include "cvd/cvd.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <thread>

namespace cvd {

namespace {

using Theta = Eigen::Matrix<double, 9, 1>;

GateParams to_params(const Theta& x) {
    GateParams p;
    for (int j = 0; j < 9; ++j) p.theta[static_cast<std::size_t>(j)] = x(j);
    return p;
}

Theta to_vector(const Gradient& g) {
    Theta v;
    for (int j = 0; j < 9; ++j) v(j) = g[static_cast<std::size_t>(j)];
    return v;
}

// Cost surface over the nine angles with its gradient.
class Objective {
public:
    using Value = std::function<double(const Theta&)>;
    using Slope = std::function<Theta(const Theta&)>;

    Objective(Value f, Slope g) : f_(std::move(f)), g_(std::move(g)) {}

    double operator()(const Theta& x) const { return f_(x); }
    Theta gradient(const Theta& x) const { return g_(x); }

private:
    Value f_;
    Slope g_;
};

Objective::Slope central_differences(Objective::Value f, double h) {
    return [f = std::move(f), h](const Theta& x) {
        Theta g;
        for (int j = 0; j < 9; ++j) {
            Theta plus = x, minus = x;
            plus(j) += h;
            minus(j) -= h;
            g(j) = (f(plus) - f(minus)) / (2 * h);
        }
        return g;
    };
}

struct Descent {
    Theta x;
    double f = 0.0;
    int iterations = 0;
};

bool negligible_change(double before, double after) {
    return before - after <= 1e-14 * std::max(std::abs(before), 1e-300);
}

// Steepest descent with Barzilai-Borwein trial steps and Armijo backtracking.
Descent gradient_descent(const Objective& f, Theta x, double fx, const OptimizerOptions& o,
                         const Theta* first_gradient) {
    Descent d{x, fx, 0};
    Theta g = first_gradient ? *first_gradient : f.gradient(x);
    double step = -1.0;
    Theta prev_x = x, prev_g = g;
    for (int it = 0; it < o.max_iterations; ++it) {
        const double gn2 = g.squaredNorm();
        if (!(gn2 > 1e-28) || !std::isfinite(gn2)) break;
        if (step <= 0.0) step = o.initial_step / std::sqrt(gn2);
        bool accepted = false;
        Theta trial;
        double ft = 0.0;
        for (int b = 0; b < o.max_backtracks; ++b) {
            trial = d.x - step * g;
            ft = f(trial);
            if (ft <= d.f - o.armijo * step * gn2) {
                accepted = true;
                break;
            }
            step *= o.shrink;
        }
        if (!accepted) break;
        ++d.iterations;
        const bool stalled = negligible_change(d.f, ft);
        prev_x = d.x;
        prev_g = g;
        d.x = trial;
        d.f = ft;
        if (stalled || d.f <= 0.0) break;
        g = f.gradient(d.x);
        const Theta s = d.x - prev_x, y = g - prev_g;
        const double sy = s.dot(y);
        step = sy > 0.0 ? s.squaredNorm() / sy : step * 2.0;
    }
    return d;
}

// Quasi-Newton refinement used for the smooth tail-probability surrogate.
Descent bfgs(const Objective& f, Theta x, double fx, const OptimizerOptions& o) {
    Descent d{x, fx, 0};
    Theta g = f.gradient(x);
    Eigen::Matrix<double, 9, 9> h = Eigen::Matrix<double, 9, 9>::Identity();
    bool scaled = false;
    for (int it = 0; it < o.polish_iterations; ++it) {
        if (!(g.squaredNorm() > 1e-40) || !std::isfinite(g.squaredNorm())) break;
        Theta p = -h * g;
        double slope = g.dot(p);
        if (!(slope < 0.0)) {
            h.setIdentity();
            p = -g;
            slope = -g.squaredNorm();
        }
        double step = 1.0;
        bool accepted = false;
        Theta trial;
        double ft = 0.0;
        for (int b = 0; b < o.max_backtracks; ++b) {
            trial = d.x + step * p;
            ft = f(trial);
            if (ft <= d.f + o.armijo * step * slope) {
                accepted = true;
                break;
            }
            step *= o.shrink;
        }
        if (!accepted) break;
        ++d.iterations;
        const bool stalled = negligible_change(d.f, ft);
        const Theta s = trial - d.x;
        d.x = trial;
        d.f = ft;
        if (stalled || d.f <= 0.0) break;
        const Theta gn = f.gradient(d.x);
        const Theta y = gn - g;
        g = gn;
        const double sy = s.dot(y);
        if (sy > 1e-300) {
            if (!scaled) {
                h *= sy / y.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Eigen::Matrix<double, 9, 9> id = Eigen::Matrix<double, 9, 9>::Identity();
            h = (id - rho * s * y.transpose()) * h * (id - rho * y * s.transpose()) + rho * s * s.transpose();
        }
    }
    return d;
}

// Built from cost values: for alpha < 1 the gradient is singular where new Schmidt values appear.
Eigen::Matrix<double, 9, 9> hessian(const Objective& f, const Theta& x, double fx) {
    constexpr double h = 1e-3;
    Eigen::Matrix<double, 9, 9> hm;
    for (int i = 0; i < 9; ++i) {
        Theta p = x, m = x;
        p(i) += h;
        m(i) -= h;
        hm(i, i) = (f(p) - 2 * fx + f(m)) / (h * h);
        for (int j = 0; j < i; ++j) {
            Theta pp = p, pm = p, mp = m, mm = m;
            pp(j) += h;
            pm(j) -= h;
            mp(j) += h;
            mm(j) -= h;
            hm(i, j) = hm(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
        }
    }
    return hm;
}

bool is_two(const RenyiIndex& a) { return a.kind() == RenyiIndex::Kind::finite && a.value() == 2.0; }

}  // namespace

std::uint64_t gate_seed(std::uint64_t seed, int layer, int site) {
    // splitmix64 finalizer over a combined key
    std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(layer) + 1)) ^
                      (0xC2B2AE3D27D4EB4FULL * (static_cast<std::uint64_t>(site) + 1));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

GateOptimization optimize_gate(const Mps& mps, int site, const RenyiIndex& a, const OptimizerOptions& opts,
                               std::uint64_t seed) {
    const TwoSiteBlock block(mps, site);
    const Objective::Value value = [&](const Theta& x) { return local_cost(block, to_params(x), a); };
    const Objective cost(value, opts.exact_gradient ? Objective::Slope([&](const Theta& x) {
                                    return to_vector(exact_gradient(block, to_params(x), a));
                                })
                                                    : central_differences(value, opts.fd_step));

    GateOptimization out;
    const Theta zero = Theta::Zero();
    out.initial_cost = cost(zero);
    out.final_cost = out.initial_cost;
    if (out.initial_cost <= 0.0) return out;

    Theta first;
    const Theta* first_ptr = nullptr;
    if (!opts.exact_gradient && is_two(a)) {
        first = to_vector(analytic_gradient_theta0(block));
        first_ptr = &first;
    }
    Descent best = gradient_descent(cost, zero, out.initial_cost, opts, first_ptr);
    out.iterations = best.iterations;

    const double improvement = (out.initial_cost - best.f) / out.initial_cost;
    if (improvement < opts.stall_tolerance) {
        // Real-valued blocks sit on a saddle at theta = 0: leave along negative curvature.
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> es(hessian(cost, zero, out.initial_cost));
        for (int k = 0; k < 2; ++k) {
            if (!(es.eigenvalues()(k) < 0.0)) break;
            for (double sign : {1.0, -1.0}) {
                const Theta x0 = sign * opts.restart_scale * es.eigenvectors().col(k);
                const Descent d = gradient_descent(cost, x0, cost(x0), opts, nullptr);
                out.iterations += d.iterations;
                if (d.f < best.f) best = d;
            }
        }
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, opts.restart_scale);
        for (int r = 0; r < opts.restarts; ++r) {
            Theta x0;
            for (int j = 0; j < 9; ++j) x0(j) = normal(rng);
            const Descent d = gradient_descent(cost, x0, cost(x0), opts, nullptr);
            out.iterations += d.iterations;
            ++out.restarts_used;
            if (d.f < best.f) best = d;
        }
    }

    if (opts.polish && tail_probability(block.spectrum(to_params(best.x))) < opts.polish_threshold) {
        const Objective::Value tail_value = [&](const Theta& x) {
            return tail_probability(block.spectrum(to_params(x)));
        };
        const Objective tail(tail_value, opts.exact_gradient ? Objective::Slope([&](const Theta& x) {
            // the tail is 1 - p_1 and S_inf = -log p_1
            double s_inf = 0.0;
            const Theta g = to_vector(exact_gradient(block, to_params(x), RenyiIndex::infinity(), &s_inf));
            return Theta(std::exp(-s_inf) * g);
        })
                                                             : central_differences(tail_value, opts.fd_step));
        const Descent p = bfgs(tail, best.x, tail(best.x), opts);
        const double pc = cost(p.x);
        out.iterations += p.iterations;
        if (pc <= best.f) {
            best.x = p.x;
            best.f = pc;
            out.polished = true;
        }
    }

    // Keep theta = 0 unless the optimizer found a real improvement.
    if (best.f < out.initial_cost * (1.0 - 1e-10)) {
        out.params = to_params(best.x);
        out.final_cost = best.f;
    } else {
        out.polished = false;
    }
    return out;
}

RenyiIndex AlphaSchedule::at(int layer) const {
    return period > 0 && layer % period == 0 ? special : base;
}

void CvdConfig::validate() const {
    if (max_layers < 0) throw std::invalid_argument("max_layers must be >= 0");
    if (bond_cap < 1) throw std::invalid_argument("bond cap must be >= 1");
    if (!(cutoff >= 0.0 && cutoff < 1.0)) throw std::invalid_argument("cutoff must lie in [0, 1)");
    if (!(target_tail >= 0.0)) throw std::invalid_argument("target_tail must be >= 0");
    if (!(target_eps_site >= 0.0)) throw std::invalid_argument("target_eps_site must be >= 0");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (alpha.period < 0) throw std::invalid_argument("alpha period must be >= 0");
    if (optimizer.max_iterations < 0 || optimizer.restarts < 0 || !(optimizer.fd_step > 0.0))
        throw std::invalid_argument("invalid optimizer options");
}

Index CvdReport::max_bond_dim() const {
    Index m = 1;
    for (const auto& row : bond_dims)
        for (Index d : row) m = std::max(m, d);
    return m;
}

namespace {

std::vector<double> tail_row(const Mps& m) {
    std::vector<double> row;
    for (const auto& l : m.lambdas()) row.push_back(tail_weight(l));
    return row;
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

bool all_below(const std::vector<double>& v, double target) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x < target; });
}

std::vector<GateOptimization> optimize_sublayer(const Mps& mps, const std::vector<int>& sites, const RenyiIndex& a,
                                                const CvdConfig& cfg, int layer) {
    std::vector<GateOptimization> out(sites.size());
    const auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t j = begin; j < sites.size(); j += stride)
            out[j] = optimize_gate(mps, sites[j], a, cfg.optimizer, gate_seed(cfg.seed, layer, sites[j]));
    };
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), sites.size());
    if (workers <= 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    }
    return out;
}

Circuit assemble(int n, const std::vector<Layer>& layers, const Mps& state) {
    Circuit c;
    c.n = n;
    c.direction = Direction::disentangle;
    c.layers = layers;
    c.readoff = readoff_single_qubit(truncate(state, Truncation{1, 0.0}).mps);
    return c;
}

}  // namespace

CvdResult disentangle(const Mps& mps, const CvdConfig& cfg) {
    cfg.validate();
    if (mps.phys_dim() != 2) throw std::invalid_argument("disentangle: qubit sites required");
    const int n = mps.size();
    const Truncation trunc = cfg.truncation();

    CvdResult res;
    CvdReport& rep = res.report;
    rep.n = n;
    Mps state = mps;
    rep.tail_matrix.push_back(tail_row(state));
    rep.bond_dims.push_back(state.bond_dims());
    std::vector<Layer> layers;

    if (all_below(rep.tail_matrix.back(), cfg.target_tail)) rep.converged_layer = 0;

    for (int mu = 1; mu <= cfg.max_layers && !rep.converged_layer; ++mu) {
        const auto t0 = std::chrono::steady_clock::now();
        LayerInfo info;
        info.parity = mu % 2 == 1 ? Parity::odd : Parity::even;
        info.alpha = cfg.alpha.at(mu);
        const std::vector<int> sites = parity_sites(info.parity, n);

        const auto opt = optimize_sublayer(state, sites, info.alpha, cfg, mu);
        Layer layer{info.parity, {}};
        for (std::size_t j = 0; j < sites.size(); ++j) {
            info.cost_before += opt[j].initial_cost;
            info.cost_after += opt[j].final_cost;
            if (opt[j].params.is_identity()) continue;
            state = apply_gate(state, sites[j], opt[j].params).mps;
            layer.gates.push_back({sites[j], opt[j].params});
        }
        TruncationResult tr = truncate(state, trunc);
        state = std::move(tr.mps);
        info.max_discarded = tr.max_discarded();
        rep.p_max_forward = std::max(rep.p_max_forward, info.max_discarded);
        layers.push_back(std::move(layer));

        const double prev_max = max_of(rep.tail_matrix.back());
        rep.tail_matrix.push_back(tail_row(state));
        rep.bond_dims.push_back(state.bond_dims());
        info.tail_increased = max_of(rep.tail_matrix.back()) > prev_max;
        if (all_below(rep.tail_matrix.back(), cfg.target_tail)) rep.converged_layer = mu;

        if (!rep.converged_layer && cfg.target_eps_site > 0.0) {
            const double e = overlap_error(mps, assemble(n, layers, state), trunc);
            if (eps_site(e, n) <= cfg.target_eps_site) rep.converged_layer = mu;
        }
        info.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.layers.push_back(info);
    }

    res.final_mps = state;
    res.circuit = assemble(n, layers, state);
    const OverlapError oe = overlap_error_detail(mps, res.circuit, trunc);
    rep.eps = oe.eps;
    rep.p_max_reverse = oe.p_max;
    rep.eps_site = eps_site(rep.eps, n);
    return res;
}

OverlapError overlap_error_detail(const Mps& mps, const Circuit& c, const Truncation& t) {
    if (c.n != mps.size()) throw std::invalid_argument("overlap_error: site count mismatch");
    const bool reverse = c.direction == Direction::disentangle;
    const CircuitRun run = apply_circuit(zero_state(c.n), c, t, reverse);
    return {distance(mps, run.mps), run.max_discarded()};
}

double overlap_error(const Mps& mps, const Circuit& c, const Truncation& t) {
    return overlap_error_detail(mps, c, t).eps;
}

double eps_site(double eps, int n) {
    if (n < 1) throw std::invalid_argument("eps_site: n must be positive");
    if (eps >= 1.0) return 1.0;
    return -std::expm1(std::log1p(-eps) / n);
}

}  // namespace cvd
