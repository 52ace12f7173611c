#pragma once

#include "cvd/mps.hpp"

#include <Eigen/Sparse>

#include <string>

namespace cvd {

enum class Family { ising, xy, xxz, fermi_hubbard };

Family parse_family(const std::string& s);
std::string to_string(Family f);

/// Open-chain model. Spin families act on n_sites qubits; Fermi-Hubbard on
/// n_sites electronic sites encoded as 2 n_sites qubits (up on 2i, down on 2i+1).
///   ising: -1/2 sum ZZ + hx sum X + hz sum Z
///   xy:    -1/2 sum (XX + YY) + hx sum X
///   xxz:   -1/2 sum (XX + YY) - jz/2 sum ZZ - hx sum X - hz sum Z
///   fermi_hubbard: -t sum (c+_i c_{i+1} + h.c.) + u sum n_up n_down
struct HamiltonianSpec {
    Family family = Family::ising;
    int n_sites = 2;
    double hx = 0.0;
    double hz = 0.0;
    double jz = 0.0;
    double t = 1.0;
    double u = 0.0;
    int n_up = 0;
    int n_down = 0;

    int qubits() const { return family == Family::fermi_hubbard ? 2 * n_sites : n_sites; }
    /// Throws std::invalid_argument outside the dense budget (at most 14 qubits) or
    /// for an empty particle sector.
    void validate() const;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Hamiltonian on the full 2^qubits space (big-endian basis, bit 1 = occupied/down spin).
SparseMatrix build_hamiltonian(const HamiltonianSpec& spec);

/// Basis indices of the requested Fermi-Hubbard particle sector, ascending.
std::vector<Index> sector_basis(const HamiltonianSpec& spec);

struct GroundState {
    Vector psi;
    Mps mps;
    double energy = 0.0;
    /// Number of eigenvalues within 1e-8 of the lowest one.
    int degeneracy = 1;
};

/// Lowest eigenvector (restricted to the particle sector for Fermi-Hubbard). A
/// degenerate ground space is resolved by projecting the lowest-index basis state
/// with nonzero weight onto it.
GroundState ed_ground_state(const HamiltonianSpec& spec);

}  // namespace cvd
