// types.hpp: Scalar and fixed-size linear algebra types shared by the engine modules

#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qhe {

// The dominant eigenvalue sits ~1e-4 below zero while the Liouvillian norm is
// ~1e4, and second λ-derivatives divide by h² ~ 1e-6. Extended precision keeps
// the noise floor of the noise cumulants well below their magnitude.
using Real = long double;

inline constexpr int kDim = 5;

using Vec5 = Eigen::Matrix<Real, kDim, 1>;
using Mat5 = Eigen::Matrix<Real, kDim, kDim>;

// ⟨1̆| = (1,1,1,1,0): sums populations, ignores the coherence component.
inline Vec5 trace_vector()
{
    Vec5 w;
    w << 1, 1, 1, 1, 0;
    return w;
}

// Error hierarchy. Every failure the library reports is a qhe::Error so that
// sweep drivers can record it per point and keep going.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParameterError : Error {
    using Error::Error;
};

struct SpectralError : Error {
    using Error::Error;
};

struct ConvergenceError : Error {
    using Error::Error;
};

struct OpenLoopError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace qhe
