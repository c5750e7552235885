#pragma once

#include <vector>

#include "specset/types.hpp"

namespace specset {

/// Test builds turn this on to verify the resolvent residual bound on every
/// call; release runs keep a cheap matvec probe instead.
void set_strict_checks(bool on);
bool strict_checks();

struct HermitianExtremes {
    double lambda_min = 0;
    double lambda_max = 0;
    CVector v_min;
    CVector v_max;
};

/// Extreme eigenvalues/eigenvectors of H(B) = (B + B*)/2.
HermitianExtremes hermitian_part_extremes(const CMatrix& b);

/// (zeta I - A)^{-1} by LU solve against the identity.
/// Throws NumericalError (carrying an estimate of sigma_min(zeta I - A))
/// when the shift is singular or numerically singular.
CMatrix resolvent(const CMatrix& a, Complex zeta);

/// Largest singular value (2-norm).
double operator_norm(const CMatrix& b);

/// Smallest singular value.
double sigma_min(const CMatrix& b);

/// Fast 2-norm: power iteration on B*B with a dense eigensolver fallback
/// when convergence stalls. Absolute error <= rtol * result.
double spectral_norm_estimate(const CMatrix& b, double rtol = 1e-10);

/// Numerical radius w(B) = max_theta lambda_max(H(e^{i theta} B)),
/// 256-point grid plus golden-section refinement around the best maxima.
double numerical_radius(const CMatrix& b);

/// e^{tA} (scaling and squaring with Pade approximation).
CMatrix matrix_exponential(const CMatrix& a, double t);

struct Spectrum {
    CVector eigenvalues;
    CMatrix right;  ///< unit right eigenvectors (columns)
    CMatrix left;   ///< unit left eigenvectors (columns), y_i^* A = lambda_i y_i^*
    std::vector<double> condition_numbers;  ///< 1/|y*x|; NaN where not simple
    std::vector<bool> simple;               ///< false for clustered/defective eigenvalues
};

/// Eigenvalues plus, for simple eigenvalues, right/left eigenvectors and
/// condition numbers. "Simple" means separation >= 1e-8 * ||A||.
Spectrum eigen_decomposition(const CMatrix& a);

}  // namespace specset
