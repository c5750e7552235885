#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "specset/boundary.hpp"
#include "specset/regions.hpp"
#include "specset/types.hpp"

namespace specset {

struct TraceSample {
    double s = 0;  ///< cumulative arclength position
    KernelSample sample;
    PieceKind kind = PieceKind::Base;
};

struct BoundReport {
    double c1 = 0;
    double c2 = 0;
    double K_main = 0;
    double K_cauchy = 0;
    std::optional<double> K_closedform;
    std::optional<double> K_pseudo;
    std::optional<double> K_lower;
    double gamma_integral = 0;       ///< = c2 - 1
    Complex argmax_zeta0;            ///< c1 scan winner
    double quadrature_certificate = 0;
    int components = 1;
    int refine_level = 0;
    std::size_t nodes = 0;
    std::size_t trace_stride = 1;
    double applied_margin = 0;
    std::vector<TraceSample> traces;
};

/// Max over boundary nodes of total_argument_variation, with one local
/// refinement round around the winner. Returns (c1, winner position).
std::pair<double, Complex> c1_upper(const BoundaryPath& path);

/// c2 <= 1 + integral of gamma, gamma(s) = max(0, -lambda_min(mu)).
/// Returns (c2, gamma_integral). The path must already carry a passing
/// quadrature certificate.
std::pair<double, double> c2_upper(const CMatrix& a, const BoundaryPath& path);

/// K = c2 + sqrt(c2^2 + c1).
double k_from_c(double c1, double c2);

/// (1/2pi) * integral of the resolvent norm over the path.
double k_cauchy(const CMatrix& a, const BoundaryPath& path);

/// K = perimeter / (2 pi eps) for an eps-level-set path.
double k_pseudo_closedform(const BoundaryPath& path, double eps);

/// Closed form for removing m rule-radius disks: p_j = 1 for norm-rule,
/// p_j = 2 for numrad-rule; K = (1+sum p) + sqrt((1+sum p)^2 + 2m+1).
double k_multidisk_closedform(int m, const std::vector<int>& p);

/// Builds the region with certificate-driven refinement, then computes every
/// applicable bound on the certified path.
BoundReport full_report(const CMatrix& a, const RegionSpec& spec, const RegionOptions& opt = {});

/// full_report on an already-constructed builder (reuses resolved disks).
BoundReport full_report(const RegionBuilder& builder);

}  // namespace specset
