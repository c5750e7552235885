#include "specset/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "specset/matops.hpp"
#include "specset/parallel.hpp"

namespace specset {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

double path_diameter(const BoundaryPath& path) {
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const auto& loop : path.loops)
        for (const auto& n : loop.nodes) {
            lo_x = std::min(lo_x, n.zeta.real());
            hi_x = std::max(hi_x, n.zeta.real());
            lo_y = std::min(lo_y, n.zeta.imag());
            hi_y = std::max(hi_y, n.zeta.imag());
        }
    double d = std::hypot(hi_x - lo_x, hi_y - lo_y);
    return d > 0 ? d : 1.0;
}

namespace {

double path_scale(const BoundaryPath& path) { return path_diameter(path); }

// Exact argument variation along a straight chord seen from z0. Splitting
// keeps the spacing rule (chord <= 0.5 * distance) so every principal-value
// difference is an exact swept angle.
double chord_variation(Complex a, Complex b, Complex z0, int depth) {
    double chord = std::abs(b - a);
    if (chord == 0.0) return 0.0;
    double da = std::abs(a - z0), db = std::abs(b - z0);
    if (da == 0.0 || db == 0.0)
        throw Error("total_argument_variation: zeta0 lies on a chord endpoint");
    if (depth < 48 && chord > 0.5 * std::min(da, db)) {
        Complex m = 0.5 * (a + b);
        if (std::abs(m - z0) < 1e-300)
            throw GeometryError("total_argument_variation: zeta0 lies on the path");
        return chord_variation(a, m, z0, depth + 1) + chord_variation(m, b, z0, depth + 1);
    }
    return std::abs(std::remainder(std::arg(b - z0) - std::arg(a - z0), 2.0 * kPi));
}

std::vector<const PathNode*> flatten(const BoundaryPath& path) {
    std::vector<const PathNode*> nodes;
    nodes.reserve(path.node_count());
    for (const auto& loop : path.loops)
        for (const auto& n : loop.nodes) nodes.push_back(&n);
    return nodes;
}

void check_spectrum_inside(const CMatrix& a, const BoundaryPath& path, const char* where) {
    Eigen::ComplexEigenSolver<CMatrix> es(a, false);
    if (es.info() != Eigen::Success)
        throw NumericalError(std::string(where) + ": eigensolver failed");
    double scale = path_scale(path);
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        Complex lam = es.eigenvalues()(i);
        if (distance_to_path(path, lam) <= 1e-13 * scale || !region_contains(path, lam))
            throw GeometryError(std::string(where) + ": eigenvalue (" +
                                std::to_string(lam.real()) + "," + std::to_string(lam.imag()) +
                                ") is not strictly inside the region");
    }
}

}  // namespace

std::size_t BoundaryPath::node_count() const {
    std::size_t n = 0;
    for (const auto& loop : loops) n += loop.nodes.size();
    return n;
}

double BoundaryPath::perimeter() const {
    double s = 0;
    for (const auto& loop : loops)
        for (const auto& n : loop.nodes) s += n.ds;
    return s;
}

namespace {

double interval_length(const PathNode& a, const PathNode& b,
                       const std::vector<CircleRef>& circles) {
    if (a.circle >= 0 && a.circle == b.circle &&
        a.circle < static_cast<std::int32_t>(circles.size())) {
        double dphi = std::abs(std::remainder(b.arc_angle - a.arc_angle, 2.0 * kPi));
        return circles[a.circle].radius * dphi;
    }
    return std::abs(b.zeta - a.zeta);
}

}  // namespace

void assign_weights(Loop& loop, const std::vector<CircleRef>& circles) {
    const std::size_t m = loop.nodes.size();
    if (m < 2) return;
    for (std::size_t k = 0; k < m; ++k) {
        const PathNode& prev = loop.nodes[(k + m - 1) % m];
        const PathNode& next = loop.nodes[(k + 1) % m];
        loop.nodes[k].ds = 0.5 * (interval_length(prev, loop.nodes[k], circles) +
                                  interval_length(loop.nodes[k], next, circles));
    }
}

BoundaryPath circle_path(Complex center, double radius, int n, bool hole) {
    if (radius <= 0 || n < 8) throw Error("circle_path: need radius > 0 and n >= 8");
    BoundaryPath out;
    out.circles.push_back({center, radius, hole});
    Loop l;
    l.hole = hole;
    l.nodes.resize(n);
    for (int j = 0; j < n; ++j) {
        double phi = (hole ? -1.0 : 1.0) * 2.0 * kPi * j / n;
        PathNode& nd = l.nodes[j];
        nd.zeta = center + radius * std::polar(1.0, phi);
        nd.tangent = (hole ? Complex(0, -1) : Complex(0, 1)) * std::polar(1.0, phi);
        nd.kind = hole ? PieceKind::Hole : PieceKind::Base;
        nd.circle = 0;
        nd.arc_angle = phi;
    }
    assign_weights(l, out.circles);
    out.loops.push_back(std::move(l));
    return out;
}

BoundaryPath BoundaryPath::refined() const {
    BoundaryPath out;
    out.circles = circles;
    out.degenerate = degenerate;
    out.loops.reserve(loops.size());
    for (const auto& loop : loops) {
        Loop nl;
        nl.hole = loop.hole;
        const std::size_t m = loop.nodes.size();
        nl.nodes.reserve(2 * m);
        for (std::size_t k = 0; k < m; ++k) {
            const PathNode& a = loop.nodes[k];
            const PathNode& b = loop.nodes[(k + 1) % m];
            nl.nodes.push_back(a);
            if (std::abs(b.zeta - a.zeta) == 0.0) continue;  // corner twins
            // pure chord splitting: the polygon geometry is unchanged, so
            // total_argument_variation is exactly invariant under refinement
            PathNode mid;
            mid.kind = a.kind;
            mid.corner = false;
            mid.zeta = 0.5 * (a.zeta + b.zeta);
            mid.tangent = unit_phase(b.zeta - a.zeta);
            nl.nodes.push_back(mid);
        }
        assign_weights(nl, out.circles);
        out.loops.push_back(std::move(nl));
    }
    return out;
}

int winding_number(const Loop& loop, Complex z) {
    double total = 0;
    const std::size_t m = loop.nodes.size();
    for (std::size_t k = 0; k < m; ++k) {
        Complex a = loop.nodes[k].zeta - z;
        Complex b = loop.nodes[(k + 1) % m].zeta - z;
        if (std::abs(a) == 0.0 || std::abs(b) == 0.0) return 0;  // on the loop
        if (a == b) continue;
        total += std::remainder(std::arg(b) - std::arg(a), 2.0 * kPi);
    }
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

bool region_contains(const BoundaryPath& path, Complex z) {
    int w = 0;
    for (const auto& loop : path.loops) w += winding_number(loop, z);
    return w == 1;
}

double distance_to_path(const BoundaryPath& path, Complex z) {
    double best = 1e300;
    for (const auto& loop : path.loops) {
        const std::size_t m = loop.nodes.size();
        for (std::size_t k = 0; k < m; ++k) {
            Complex a = loop.nodes[k].zeta;
            Complex b = loop.nodes[(k + 1) % m].zeta;
            Complex d = b - a;
            double len2 = std::norm(d);
            double t = len2 > 0 ? std::clamp(((z - a) * std::conj(d)).real() / len2, 0.0, 1.0)
                                : 0.0;
            best = std::min(best, std::abs(z - (a + t * d)));
        }
    }
    return best;
}

CMatrix mu_matrix(const CMatrix& a, Complex zeta, Complex tangent) {
    if (std::abs(std::abs(tangent) - 1.0) > 1e-12)
        throw Error("mu_matrix: tangent must have modulus 1");
    CMatrix r = resolvent(a, zeta);
    return hermitian_part(Complex(0, -1) * tangent * r) / kPi;
}

double mu_min(const CMatrix& a, Complex zeta, Complex tangent) {
    if (std::abs(std::abs(tangent) - 1.0) > 1e-12)
        throw Error("mu_min: tangent must have modulus 1");
    CMatrix r = resolvent(a, zeta);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(Complex(0, -1) * tangent * r),
                                              Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("mu_min: eigensolver failed");
    return es.eigenvalues().minCoeff() / kPi;
}

double total_argument_variation(const BoundaryPath& path, Complex zeta0) {
    double scale = path_scale(path);
    double tol = 1e-13 * scale;
    double total = 0;
    for (const auto& loop : path.loops) {
        if (loop.nodes.size() < 3)
            throw Error("total_argument_variation: loop with fewer than 3 nodes");
        const std::size_t m = loop.nodes.size();
        for (std::size_t k = 0; k < m; ++k) {
            Complex a = loop.nodes[k].zeta;
            Complex b = loop.nodes[(k + 1) % m].zeta;
            if (std::abs(b - a) == 0.0) continue;
            // one-sided limits: increments touching zeta0 are skipped
            if (std::abs(a - zeta0) <= tol || std::abs(b - zeta0) <= tol) continue;
            total += chord_variation(a, b, zeta0, 0);
        }
    }
    return total / kPi;
}

CMatrix integrate_resolvent(const CMatrix& a, const BoundaryPath& path,
                            const std::function<Complex(std::size_t, const PathNode&)>& weight) {
    require_square(a, "integrate_resolvent");
    const int n = static_cast<int>(a.rows());
    auto nodes = flatten(path);
    const std::size_t chunk = 512;
    const std::size_t nchunks = (nodes.size() + chunk - 1) / chunk;
    std::vector<CMatrix> partial(nchunks, CMatrix::Zero(n, n));
    parallel_for(nchunks, [&](std::size_t c) {
        CMatrix local = CMatrix::Zero(n, n);
        CMatrix shifted(n, n);
        std::size_t end = std::min(nodes.size(), (c + 1) * chunk);
        for (std::size_t k = c * chunk; k < end; ++k) {
            const PathNode& nd = *nodes[k];
            shifted = -a;
            shifted.diagonal().array() += nd.zeta;
            Eigen::PartialPivLU<CMatrix> lu(shifted);
            CMatrix r = lu.solve(CMatrix::Identity(n, n));
            if (!r.allFinite())
                throw NumericalError("boundary quadrature: singular resolvent at node (" +
                                     std::to_string(nd.zeta.real()) + "," +
                                     std::to_string(nd.zeta.imag()) + ")");
            local.noalias() += weight(k, nd) * r;
        }
        partial[c] = std::move(local);
    });
    CMatrix total = CMatrix::Zero(n, n);
    for (const auto& p : partial) total += p;
    return total;
}

CMatrix quadrature_S1(const CMatrix& a, const BoundaryPath& path) {
    require_square(a, "quadrature_S1");
    check_spectrum_inside(a, path, "quadrature_S1");
    const Complex scale = Complex(0, 1) * (2.0 * kPi);  // 1/(2 pi i) weights
    CMatrix t = integrate_resolvent(
        a, path, [&](std::size_t, const PathNode& nd) { return nd.tangent * nd.ds / scale; });
    return t + t.adjoint();
}

double quadrature_certificate(const CMatrix& a, const BoundaryPath& path) {
    const int n = static_cast<int>(a.rows());
    CMatrix s1 = quadrature_S1(a, path);
    return operator_norm(s1 - 2.0 * CMatrix::Identity(n, n));
}

Complex cauchy_transform_conjugate(const std::function<Complex(Complex)>& f,
                                   const BoundaryPath& path, Complex z) {
    for (const auto& loop : path.loops)
        for (const auto& nd : loop.nodes)
            if (std::abs(nd.zeta - z) < nd.ds)
                throw Error("cauchy_transform_conjugate: z within one node spacing of the path");
    Complex sum = 0;
    for (const auto& loop : path.loops)
        for (const auto& nd : loop.nodes)
            sum += std::conj(f(nd.zeta)) / (nd.zeta - z) * nd.tangent * nd.ds;
    return sum / (Complex(0, 1) * 2.0 * kPi);
}

CMatrix assemble_S(const std::function<Complex(Complex)>& f, const CMatrix& a,
                   const BoundaryPath& path) {
    require_square(a, "assemble_S");
    check_spectrum_inside(a, path, "assemble_S");
    for (const auto& loop : path.loops)
        for (const auto& nd : loop.nodes)
            if (std::abs(f(nd.zeta)) > 1.0 + 1e-12)
                throw Error("assemble_S: sampled |f| exceeds 1");
    // S(f,A) = T + G* with T = (1/2 pi i) sum f R zeta' ds and
    // G = (1/2 pi i) sum conj(f) R zeta' ds.
    const Complex scale = Complex(0, 1) * (2.0 * kPi);
    CMatrix t = integrate_resolvent(a, path, [&](std::size_t, const PathNode& nd) {
        return f(nd.zeta) * nd.tangent * nd.ds / scale;
    });
    CMatrix g = integrate_resolvent(a, path, [&](std::size_t, const PathNode& nd) {
        return std::conj(f(nd.zeta)) * nd.tangent * nd.ds / scale;
    });
    return t + g.adjoint();
}

KernelSample kernel_sample(const CMatrix& a, Complex zeta, Complex tangent) {
    KernelSample s;
    s.zeta = zeta;
    s.tangent = tangent;
    CMatrix r = resolvent(a, zeta);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(Complex(0, -1) * tangent * r),
                                              Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("kernel_sample: eigensolver failed");
    s.mu_lambda_min = es.eigenvalues().minCoeff() / kPi;
    s.resolvent_norm = operator_norm(r);
    s.numerical_radius_resolvent = numerical_radius(r);
    return s;
}

void export_path_csv(const BoundaryPath& path, std::ostream& os) {
    os << "s,re_zeta,im_zeta,re_tangent,im_tangent,ds,corner\n";
    char buf[256];
    double s = 0;
    for (const auto& loop : path.loops) {
        const std::size_t m = loop.nodes.size();
        for (std::size_t k = 0; k < m; ++k) {
            const PathNode& nd = loop.nodes[k];
            if (k > 0) s += std::abs(nd.zeta - loop.nodes[k - 1].zeta);
            std::snprintf(buf, sizeof(buf),
                          "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", s, nd.zeta.real(),
                          nd.zeta.imag(), nd.tangent.real(), nd.tangent.imag(), nd.ds,
                          nd.corner ? 1 : 0);
            os << buf;
        }
    }
}

}  // namespace specset
