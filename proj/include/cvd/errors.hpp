#pragma once

#include <stdexcept>
#include <string>

namespace cvd {

/// Unreadable or malformed input/output files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A state or circuit violates a structural invariant (canonical form, norm, unitarity).
class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cvd
