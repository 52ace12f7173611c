#pragma once

#include "cvd/pauli.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cvd {

/// (|0...0> + |1...1>)/sqrt(2), built directly with bond dimension 2.
Mps ghz(int n);

/// CZ on all neighbouring pairs of |+>^n.
Mps cluster(int n);

/// Qubit-encoded AKLT chain of n_spin1 spin-1 sites (2 n_spin1 qubits): singlets on
/// qubit pairs (1,2), (3,4), ... (0-based), triplet projectors on (0,1), (2,3), ...
/// The two unpaired edge qubits start in |0>.
Mps aklt(int n_spin1);

/// Complex Gaussian site tensors with bond dimension at most `bond`, canonicalized.
Mps random_mps(int n, Index bond, std::uint64_t seed);

/// Apply a (not necessarily unitary) 4x4 operator to sites (site, site+1) of a raw
/// tensor chain, splitting back with an exact SVD. No canonical form is assumed.
void apply_two_site_raw(std::vector<SiteTensor>& tensors, int site, const Matrix4& op);

enum class CodeName { code_5_1_3, code_11_1_5 };
enum class BellLayout { separated, interlaced };

CodeName parse_code(const std::string& s);
std::string to_string(CodeName c);
BellLayout parse_layout(const std::string& s);
std::string to_string(BellLayout l);

struct StabilizerCode {
    CodeName name;
    int n = 0;
    std::vector<PauliString> stabilizers;
    PauliString logical_x{""};
    PauliString logical_z{""};

    static StabilizerCode get(CodeName name);
    /// |0>_L from the stabilizer and Z_L projectors applied to |0...0>, and
    /// |1>_L = X_L |0>_L. Throws InvariantError if a projection vanishes.
    std::pair<Vector, Vector> codewords() const;
};

/// Qubit positions of blocks A and B for a layout over 2n qubits.
std::pair<std::vector<int>, std::vector<int>> bell_sites(int n, BellLayout layout);

/// (|01>_L - |10>_L)/sqrt(2) across two code blocks. Layouts with at most 20
/// qubits are built densely; the separated [11,1,5] pair (22 qubits) is assembled
/// as an MPS sum of block products.
Mps logical_bell(const StabilizerCode& code, BellLayout layout);
Vector logical_bell_dense(const StabilizerCode& code, BellLayout layout);

/// All 2k block stabilizers of the logical Bell pair, embedded on 2n qubits.
std::vector<PauliString> bell_stabilizers(const StabilizerCode& code, BellLayout layout);

}  // namespace cvd
