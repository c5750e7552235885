#pragma once

#include <vector>

#include "specset/types.hpp"

namespace specset {

struct RankOneReduction {
    Eigen::Matrix2cd two_by_two;  ///< leading block of Q* (x y*) Q
    double E_norm = 0;            ///< deviation from [[(y*x)/2, 1], [0, (y*x)/2]]
    CMatrix Q;                    ///< unitary, first two columns span {x, y}
};

/// Unitary reduction of the rank-one matrix x y* to a 2x2 block plus zeros,
/// built from the Gram-Schmidt recipe q1 = x - (y*x)y/2, q2 from y.
/// Requires |y*x| < 1 (non-parallel unit vectors).
RankOneReduction rank_one_reduction(const CVector& x, const CVector& y);

struct MapWindow {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
};

struct RankOneDiagnostics {
    MapWindow window;
    int resolution = 0;
    Eigen::MatrixXd ratio_map;    ///< sigma2/sigma1 of the resolvent, row = y index
    Eigen::MatrixXd overlap_map;  ///< |u1* v1| of the top resolvent singular pair
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;  ///< true = masked point
    int masked_count = 0;
    CVector eigenvalues;
};

/// Per-grid-point SVD of zeta I - A filling both maps; points numerically at
/// an eigenvalue are masked rather than fatal.
RankOneDiagnostics rank_one_maps(const CMatrix& a, const MapWindow& window, int resolution);

struct StewartBounds {
    double gamma = 0;           ///< <= sqrt(2) |zeta - lambda|
    double delta = 0;           ///< sigma_{n-1} based gap estimate
    bool ratio_ok = false;      ///< gamma/delta < 1/2
    double pq_norm_bound = 0;   ///< 2 gamma/delta (inf when delta <= 0)
    double overlap_bound = 0;   ///< singular-vector overlap bound at zeta
    double xy_overlap = 0;      ///< |x* y| of the eigenvector pair at lambda
};

/// The singular-subspace perturbation bound for the smallest singular pair of
/// zeta I - A near a simple eigenvalue lambda.
StewartBounds stewart_singular_subspace_bound(const CMatrix& a, Complex lambda, Complex zeta);

struct DriftRow {
    double rho = 0;
    double max_residual = 0;  ///< max over directions of |sigma_min - rho |y*x||
};

struct DriftTable {
    std::vector<DriftRow> rows;
    double loglog_slope = 0;  ///< NaN when residuals vanish (normal case)
    double y_x_overlap = 0;
};

/// For each radius rho, the worst deviation of sigma_min(zeta I - A) from
/// rho |y*x| over 16 directions at |zeta - lambda| = rho, plus the log-log
/// slope of the residual (expected ~2).
DriftTable smallest_singular_value_drift(const CMatrix& a, Complex lambda,
                                         const std::vector<double>& radii);

}  // namespace specset
