#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace specset {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Region construction failed (bad geometry, empty intersection, ...).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// A numerical kernel failed (singular solve, non-convergence, overflow, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

inline void require_square(const CMatrix& m, const char* where) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw Error(std::string(where) + ": matrix must be square and non-empty");
    if (!m.allFinite())
        throw Error(std::string(where) + ": matrix has non-finite entries");
}

/// H(B) = (B + B*)/2.
inline CMatrix hermitian_part(const CMatrix& b) {
    return 0.5 * (b + b.adjoint());
}

inline Complex unit_phase(Complex z) {
    double m = std::abs(z);
    if (m == 0.0) throw Error("unit_phase: zero vector has no direction");
    return z / m;
}

}  // namespace specset
