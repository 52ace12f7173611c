#pragma once

#include "cvd/mps.hpp"

#include <string>

namespace cvd {

/// A tensor product of single-qubit Paulis written as a string over {I, X, Y, Z};
/// character k acts on site k.
class PauliString {
public:
    /// Throws std::invalid_argument on characters outside IXYZ.
    explicit PauliString(std::string ops);

    const std::string& str() const { return ops_; }
    int size() const { return static_cast<int>(ops_.size()); }

    bool commutes_with(const PauliString& other) const;
    /// Sites with a non-identity factor, with their 2x2 matrices.
    std::vector<SiteOperator> site_operators(int offset = 0) const;
    /// Place this string on sites `sites[k]` of an n-site register.
    PauliString embedded(int n, const std::vector<int>& sites) const;

    Vector apply(const Vector& psi) const;

private:
    std::string ops_;
};

/// <psi| P |psi> on an MPS.
cplx expectation(const Mps& mps, const PauliString& p);

}  // namespace cvd
