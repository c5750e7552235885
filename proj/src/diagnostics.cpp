#include "specset/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "specset/matops.hpp"
#include "specset/parallel.hpp"

namespace specset {

namespace {

constexpr double kPi = std::numbers::pi;

// Finds the spectrum entry nearest lambda; must be simple.
struct EigPair {
    Complex lambda;
    CVector x, y;  // unit right/left eigenvectors
};

EigPair locate_simple_eigenvalue(const CMatrix& a, Complex lambda, const char* where) {
    Spectrum s = eigen_decomposition(a);
    int best = 0;
    for (int i = 1; i < s.eigenvalues.size(); ++i)
        if (std::abs(s.eigenvalues(i) - lambda) < std::abs(s.eigenvalues(best) - lambda)) best = i;
    if (std::abs(s.eigenvalues(best) - lambda) > 1e-6 * std::max(1.0, operator_norm(a)))
        throw Error(std::string(where) + ": lambda is not an eigenvalue of A");
    if (!s.simple[best])
        throw Error(std::string(where) + ": eigenvalue is defective or clustered");
    return {s.eigenvalues(best), s.right.col(best), s.left.col(best)};
}

}  // namespace

RankOneReduction rank_one_reduction(const CVector& x, const CVector& y) {
    const int n = static_cast<int>(x.size());
    if (y.size() != n || n < 2) throw Error("rank_one_reduction: need unit vectors of equal size >= 2");
    if (std::abs(x.norm() - 1.0) > 1e-12 || std::abs(y.norm() - 1.0) > 1e-12)
        throw Error("rank_one_reduction: x and y must be unit vectors");
    Complex yx = y.dot(x);  // y* x
    if (std::abs(yx) >= 1.0 - 1e-12)
        throw Error("rank_one_reduction: x and y are (numerically) parallel");

    CVector q1 = x - 0.5 * yx * y;
    q1.normalize();
    CVector q2t = y - 0.5 * std::conj(yx) * x;  // (x* y) = conj(y* x)
    q2t.normalize();
    CVector q2 = q2t - q1.dot(q2t) * q1;
    q2.normalize();

    CMatrix q(n, n);
    q.col(0) = q1;
    q.col(1) = q2;
    int filled = 2;
    for (int e = 0; e < n && filled < n; ++e) {
        CVector cand = CVector::Zero(n);
        cand(e) = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < filled; ++j) cand -= q.col(j).dot(cand) * q.col(j);
        double nn = cand.norm();
        if (nn < 1e-8) continue;
        q.col(filled++) = cand / nn;
    }
    if (filled != n) throw NumericalError("rank_one_reduction: basis completion failed");

    CMatrix reduced = q.adjoint() * (x * y.adjoint()) * q;
    double trailing = reduced.bottomRightCorner(n - 2, n - 2).norm() +
                      reduced.topRightCorner(2, n - 2).norm() +
                      reduced.bottomLeftCorner(n - 2, 2).norm();
    if (trailing > 1e-12 * n)
        throw NumericalError("rank_one_reduction: trailing block did not vanish");

    RankOneReduction out;
    out.two_by_two = reduced.topLeftCorner(2, 2);
    Eigen::Matrix2cd model;
    model << 0.5 * yx, 1.0, 0.0, 0.5 * yx;
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(out.two_by_two - model);
    out.E_norm = svd.singularValues()(0);
    out.Q = std::move(q);
    return out;
}

RankOneDiagnostics rank_one_maps(const CMatrix& a, const MapWindow& w, int resolution) {
    require_square(a, "rank_one_maps");
    if (resolution < 2) throw Error("rank_one_maps: resolution >= 2 required");
    if (!(w.x1 > w.x0) || !(w.y1 > w.y0)) throw Error("rank_one_maps: bad window");
    const int n = static_cast<int>(a.rows());

    RankOneDiagnostics out;
    out.window = w;
    out.resolution = resolution;
    out.ratio_map.setZero(resolution, resolution);
    out.overlap_map.setZero(resolution, resolution);
    out.mask.setConstant(resolution, resolution, false);
    {
        Eigen::ComplexEigenSolver<CMatrix> es(a, false);
        if (es.info() != Eigen::Success) throw NumericalError("rank_one_maps: eigensolver failed");
        out.eigenvalues = es.eigenvalues();
    }

    const double dx = (w.x1 - w.x0) / (resolution - 1);
    const double dy = (w.y1 - w.y0) / (resolution - 1);
    const double mask_tol = 1e-11 * std::max(1.0, operator_norm(a));

    std::vector<int> masked(static_cast<std::size_t>(resolution) * resolution, 0);
    parallel_for(static_cast<std::size_t>(resolution) * resolution, [&](std::size_t idx) {
        int ix = static_cast<int>(idx % resolution), iy = static_cast<int>(idx / resolution);
        Complex z(w.x0 + ix * dx, w.y0 + iy * dy);
        CMatrix m = -a;
        m.diagonal().array() += z;
        Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        double s_small = sv(n - 1), s_second = sv(n - 2);
        if (s_small <= mask_tol) {
            masked[idx] = 1;
            return;
        }
        // top singular pair of the resolvent = smallest pair of zeta I - A
        out.ratio_map(iy, ix) = s_small / s_second;
        Complex ov = svd.matrixU().col(n - 1).dot(svd.matrixV().col(n - 1));
        out.overlap_map(iy, ix) = std::abs(ov);
    });
    for (int iy = 0; iy < resolution; ++iy)
        for (int ix = 0; ix < resolution; ++ix)
            if (masked[static_cast<std::size_t>(iy) * resolution + ix]) {
                out.mask(iy, ix) = true;
                ++out.masked_count;
            }
    return out;
}

StewartBounds stewart_singular_subspace_bound(const CMatrix& a, Complex lambda, Complex zeta) {
    require_square(a, "stewart_singular_subspace_bound");
    const int n = static_cast<int>(a.rows());
    EigPair e = locate_simple_eigenvalue(a, lambda, "stewart_singular_subspace_bound");
    lambda = e.lambda;

    CMatrix m = -a;
    m.diagonal().array() += lambda;  // lambda I - A, singular with null pair (x, y)
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    CMatrix x2 = svd.matrixV().leftCols(n - 1);  // complement of the null right vector
    CMatrix y2 = svd.matrixU().leftCols(n - 1);
    double sigma_second = sv(n - 2);

    StewartBounds out;
    double dz = std::abs(zeta - lambda);
    double gy = (y2.adjoint() * e.x).norm();
    double gx = (x2.adjoint() * e.y).norm();
    out.gamma = dz * std::sqrt(gy * gy + gx * gx);
    out.xy_overlap = std::abs(e.x.dot(e.y));
    double cross = operator_norm(y2.adjoint() * x2);
    out.delta = sigma_second - dz * (out.xy_overlap + cross);
    out.ratio_ok = out.delta > 0 && out.gamma / out.delta < 0.5;
    out.pq_norm_bound = out.delta > 0 ? 2.0 * out.gamma / out.delta
                                      : std::numeric_limits<double>::infinity();
    double b = out.pq_norm_bound;
    if (b < 1.0) {
        out.overlap_bound = (out.xy_overlap + 2.0 * b + b * b) / ((1.0 - b * b));
    } else {
        out.overlap_bound = std::numeric_limits<double>::infinity();
    }
    return out;
}

DriftTable smallest_singular_value_drift(const CMatrix& a, Complex lambda,
                                         const std::vector<double>& radii) {
    require_square(a, "smallest_singular_value_drift");
    EigPair e = locate_simple_eigenvalue(a, lambda, "smallest_singular_value_drift");
    lambda = e.lambda;
    double overlap = std::abs(e.y.dot(e.x));

    DriftTable out;
    out.y_x_overlap = overlap;
    for (double rho : radii) {
        if (rho <= 0) throw Error("smallest_singular_value_drift: radii must be positive");
        double worst = 0;
        for (int d = 0; d < 16; ++d) {
            Complex z = lambda + rho * std::polar(1.0, 2.0 * kPi * d / 16.0);
            CMatrix m = -a;
            m.diagonal().array() += z;
            worst = std::max(worst, std::abs(sigma_min(m) - rho * overlap));
        }
        out.rows.push_back({rho, worst});
    }

    double floor = 0;
    for (const auto& r : out.rows) floor = std::max(floor, 1e-14 * r.rho);
    bool degenerate = false;
    for (const auto& r : out.rows)
        if (r.max_residual <= floor) degenerate = true;
    if (degenerate || out.rows.size() < 2) {
        out.loglog_slope = std::numeric_limits<double>::quiet_NaN();
    } else {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& r : out.rows) {
            double lx = std::log(r.rho), ly = std::log(r.max_residual);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        double m = static_cast<double>(out.rows.size());
        out.loglog_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    return out;
}

}  // namespace specset
