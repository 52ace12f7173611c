#pragma once

#include "cvd/gates.hpp"

#include <string>
#include <vector>

namespace cvd {

/// "odd" pairs are (0,1), (2,3), ...; "even" pairs are (1,2), (3,4), ...
/// (names follow 1-based site counting).
enum class Parity { odd, even };

enum class Direction { disentangle, prepare };

std::string to_string(Parity p);
std::string to_string(Direction d);
Parity parse_parity(const std::string& s);
Direction parse_direction(const std::string& s);

/// Left sites of every pair of the given parity on an n-site chain.
std::vector<int> parity_sites(Parity p, int n);

struct PlacedGate {
    int site = 0;  // acts on (site, site+1)
    GateParams params;
};

struct Layer {
    Parity parity = Parity::odd;
    std::vector<PlacedGate> gates;
};

/// One product-state site cos(phi_x)|0> + e^{i phi_z} sin(phi_x)|1>.
struct Readoff {
    double phi_x = 0.0;
    double phi_z = 0.0;
};

/// Rz(phi_z + pi/2) Rx(2 phi_x): maps |0> to the readoff state up to a global phase.
Matrix2 readoff_unitary(const Readoff& r);

/// Rx(a) = exp(-i a X/2), and likewise for Y and Z.
Matrix2 rx(double a);
Matrix2 ry(double a);
Matrix2 rz(double a);

/// In disentangling direction the gates of `layers` are applied in stored order and
/// the readoff rotations (inverted) come last, mapping the target to |0...0>. A
/// preparation circuit stores the layers in reverse order, applies the readoff
/// rotations first and every gate daggered.
struct Circuit {
    int n = 0;
    Direction direction = Direction::disentangle;
    std::vector<Layer> layers;
    std::vector<Readoff> readoff;

    std::size_t gate_count() const;
    /// Throws std::invalid_argument on out-of-range sites, overlapping pairs or a
    /// readoff list of the wrong length.
    void validate() const;
    /// Same operator, opposite direction flag.
    Circuit reversed() const;
};

/// Angles of a product state; throws std::invalid_argument if any bond dim exceeds 1.
std::vector<Readoff> readoff_single_qubit(const Mps& mps);

struct CircuitRun {
    Mps mps;
    /// Discarded weight per bond for every truncation, one row per layer.
    std::vector<std::vector<double>> discarded;
    double max_discarded() const;
    double total_discarded() const;
};

/// Apply the circuit (reverse = apply its inverse). Gates in a layer are applied
/// exactly and the state is truncated to `t` after each layer.
CircuitRun apply_circuit(const Mps& mps, const Circuit& c, const Truncation& t, bool reverse);

/// Dense statevector simulation of the same operator without truncation.
Vector apply_circuit_dense(const Vector& psi, const Circuit& c, bool reverse);

/// u = e^{i g} Rz(a) Ry(b) Rz(c).
struct ZyzAngles {
    double global_phase = 0.0;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};
ZyzAngles zyz_decompose(const Matrix2& u);

/// Text gate list over {Rxx, Ryy, Rzz, Rx, Ry, Rz}, in execution order.
std::string export_gate_list(const Circuit& c);

}  // namespace cvd
