#pragma once

#include <cstdint>
#include <vector>

#include "specset/boundary.hpp"
#include "specset/regions.hpp"
#include "specset/types.hpp"

namespace specset {

/// Boundary representation of a conformal map phi: Omega -> unit disk with
/// phi(center) = 0 and phi'(center) > 0. boundary_values[k] = phi at the k-th
/// path node (flatten order), unit modulus by construction.
struct ConformalMap {
    BoundaryPath path;  ///< corner-smoothed single loop actually integrated over
    std::vector<Complex> boundary_values;
    Complex center;
};

/// Replaces corner twins by tangent circular arcs of the given radius.
BoundaryPath smooth_corners(const BoundaryPath& path, double fillet_radius);

/// Builds the map by a boundary-correspondence (polar/conjugate-function)
/// iteration; the domain must be star-shaped about `a`. Validation contract:
/// the Cauchy integral of phi reproduces phi(a) = 0 to 1e-6 with positive
/// real derivative, and the correspondence is monotone.
ConformalMap build_conformal_map(const BoundaryPath& path, Complex a);

/// Interior evaluation of phi by the Cauchy integral.
Complex map_point(const ConformalMap& map, Complex z);

/// phi(A) by the Cauchy integral, with the spectral consistency check
/// eig(phi(A)) = phi(eig(A)) to 1e-6.
CMatrix map_matrix(const ConformalMap& map, const CMatrix& a);

struct BlaschkeProduct {
    std::vector<Complex> roots;  ///< |root| <= 1
};

Complex blaschke_eval(const BlaschkeProduct& b, Complex z);

/// prod_j (M - alpha_j I)(I - conj(alpha_j) M)^{-1} in index order.
CMatrix blaschke_matrix(const BlaschkeProduct& b, const CMatrix& m);

struct StartTrace {
    int start_index = 0;
    int iterations = 0;
    double best_value = 0;
};

struct OptimizeResult {
    double K_lower = 0;
    std::vector<Complex> roots;
    std::vector<StartTrace> starts;
};

/// Multi-start Nelder-Mead maximization of ||B(phi(A))|| over Blaschke roots
/// alpha_j = tanh(rho_j) e^{i psi_j}. The best value found is a valid lower
/// bound on the optimal K for the region whether or not the optimizer
/// converged. Omega must be simply connected.
OptimizeResult optimize_lower_bound(const CMatrix& a, const RegionSpec& spec, int degree,
                                    int starts, std::uint64_t seed = 20240901,
                                    const RegionOptions& opt = {});

}  // namespace specset
