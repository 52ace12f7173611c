#pragma once

#include "cvd/circuit.hpp"
#include "cvd/entropy.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace cvd {

struct OptimizerOptions {
    int max_iterations = 200;
    /// Use the single-SVD spectral gradient; otherwise central finite differences.
    bool exact_gradient = true;
    /// Central finite-difference step.
    double fd_step = 1e-5;
    /// Length of the first trial step along the normalized descent direction.
    double initial_step = 0.25;
    double armijo = 1e-4;
    double shrink = 0.5;
    int max_backtracks = 50;
    /// Relative improvement below which the descent counts as stalled.
    double stall_tolerance = 1e-3;
    int restarts = 3;
    double restart_scale = 0.3;
    /// Second stage driving the tail weight 1 - lambda_1^2 to zero once it is small.
    bool polish = true;
    double polish_threshold = 1e-2;
    int polish_iterations = 100;
};

struct GateOptimization {
    GateParams params;
    double initial_cost = 0.0;
    double final_cost = 0.0;
    int iterations = 0;
    int restarts_used = 0;
    bool polished = false;
};

/// Minimize the bond-`site` entropy over the nine angles starting from theta = 0.
/// The returned cost never exceeds the cost at theta = 0.
GateOptimization optimize_gate(const Mps& mps, int site, const RenyiIndex& a, const OptimizerOptions& opts,
                               std::uint64_t seed);

/// Seed of the per-gate random stream, a pure function of (run seed, layer, site).
std::uint64_t gate_seed(std::uint64_t seed, int layer, int site);

/// alpha for layer mu (1-based): `special` when period > 0 and mu is a multiple of
/// period, `base` otherwise.
struct AlphaSchedule {
    RenyiIndex base = RenyiIndex::one();
    RenyiIndex special = RenyiIndex::of(0.5);
    int period = 3;

    RenyiIndex at(int layer) const;
    static AlphaSchedule constant(const RenyiIndex& a) { return {a, a, 0}; }
};

struct CvdConfig {
    int max_layers = 16;
    Index bond_cap = 64;
    double cutoff = 1e-7;
    AlphaSchedule alpha;
    OptimizerOptions optimizer;
    double target_tail = 1e-10;
    /// Stop once eps_site falls to this value; 0 disables the check.
    double target_eps_site = 0.0;
    std::uint64_t seed = 0;
    /// Worker threads for gates of one sublayer; results do not depend on it.
    int threads = 1;

    Truncation truncation() const { return {bond_cap, cutoff}; }
    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

struct LayerInfo {
    Parity parity = Parity::odd;
    RenyiIndex alpha;
    /// Sum of committed local costs before and after the layer's gates.
    double cost_before = 0.0;
    double cost_after = 0.0;
    double max_discarded = 0.0;
    /// The layer raised the maximal tail weight.
    bool tail_increased = false;
    double wall_time = 0.0;
};

struct CvdReport {
    int n = 0;
    /// Row 0 is the input state; row mu follows layer mu. Entries per bond.
    std::vector<std::vector<double>> tail_matrix;
    std::vector<std::vector<Index>> bond_dims;
    std::vector<LayerInfo> layers;
    std::optional<int> converged_layer;
    double eps = 0.0;
    double eps_site = 0.0;
    /// Largest per-bond discarded weight over the layer truncations of the run.
    double p_max_forward = 0.0;
    /// Largest per-bond discarded weight while evaluating eps.
    double p_max_reverse = 0.0;
    double p_max() const { return std::max(p_max_forward, p_max_reverse); }
    Index max_bond_dim() const;
};

struct CvdResult {
    Circuit circuit;
    CvdReport report;
    /// State after the last layer, before the final projection to a product state.
    Mps final_mps;
};

CvdResult disentangle(const Mps& mps, const CvdConfig& config);

struct OverlapError {
    double eps = 0.0;
    double p_max = 0.0;
};

/// || psi - (inverse circuit with truncation after each layer) |0...0> ||, phase aligned.
OverlapError overlap_error_detail(const Mps& mps, const Circuit& c, const Truncation& t);
double overlap_error(const Mps& mps, const Circuit& c, const Truncation& t);

/// 1 - (1 - eps)^{1/n}.
double eps_site(double eps, int n);

}  // namespace cvd
