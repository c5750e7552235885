#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "specset/types.hpp"

namespace specset {

/// Which piece of a composite boundary a node belongs to. Base arcs are the
/// retained outer geometry (Gamma_0); Hole arcs come from removed disks;
/// Clip arcs are new segments/arcs introduced by an intersection (Gamma_1).
enum class PieceKind : std::uint8_t { Base = 0, Hole = 1, Clip = 2 };

/// Circle a node sits on, when known exactly. clockwise tells traversal
/// direction: hole arcs run clockwise, clip-disk arcs counter-clockwise.
struct CircleRef {
    Complex center;
    double radius = 0;
    bool clockwise = false;
};

struct PathNode {
    Complex zeta;          ///< position
    Complex tangent;       ///< unit tangent of the segment this weight belongs to
    double ds = 0;         ///< arclength weight (half-sum of adjacent chords)
    PieceKind kind = PieceKind::Base;
    bool corner = false;   ///< one-sided tangent marker; corners appear as co-located twins
    std::int32_t circle = -1;  ///< index into BoundaryPath::circles, -1 if none
    double arc_angle = 0;      ///< angle on that circle (valid when circle >= 0)
};

struct Loop {
    std::vector<PathNode> nodes;
    bool hole = false;  ///< clockwise hole loop
};

/// Discretized oriented boundary: outer loops counter-clockwise, hole loops
/// clockwise, so the region always lies to the left of travel.
struct BoundaryPath {
    std::vector<Loop> loops;
    std::vector<CircleRef> circles;
    bool degenerate = false;  ///< zero-area ribbon (collinear numerical range)

    std::size_t node_count() const;
    double perimeter() const;  ///< sum of ds = polyline perimeter

    /// Node-doubling by chord midpoint insertion. The polygon geometry is
    /// unchanged, so argument-variation scans are exactly invariant.
    BoundaryPath refined() const;
};

/// Recomputes ds as the half-sum of adjacent interval lengths (cyclic).
/// Intervals between nodes sharing circle provenance use the exact arc
/// length; all others use the chord.
void assign_weights(Loop& loop, const std::vector<CircleRef>& circles);

/// Exact circle discretization with analytic tangents and arc weights.
/// Hole circles run clockwise.
BoundaryPath circle_path(Complex center, double radius, int n, bool hole = false);

/// Winding number of the loop about z (z off the loop).
int winding_number(const Loop& loop, Complex z);

/// Total winding over all loops equals +1 exactly for points in the region.
bool region_contains(const BoundaryPath& path, Complex z);

/// Exact distance from z to the polyline segments of the path.
double distance_to_path(const BoundaryPath& path, Complex z);

/// Bounding-box diagonal (1.0 for empty paths); the length scale used by
/// coincidence tolerances.
double path_diameter(const BoundaryPath& path);

/// mu(zeta, A) as a matrix: H(-i * tangent * (zeta I - A)^{-1}) / pi.
CMatrix mu_matrix(const CMatrix& a, Complex zeta, Complex tangent);

/// lambda_min(mu(zeta, zeta', A)); tangent must have modulus 1.
double mu_min(const CMatrix& a, Complex zeta, Complex tangent);

/// (1/pi) * total variation of arg(zeta(s) - zeta0) over the whole path.
/// If zeta0 coincides with a node, the adjacent increments are skipped.
double total_argument_variation(const BoundaryPath& path, Complex zeta0);

/// sum over nodes of weight(k, node) * (zeta_k I - A)^{-1}, evaluated in
/// fixed chunk order (bit-reproducible for any worker count). The node index
/// k follows loop order then node order.
CMatrix integrate_resolvent(const CMatrix& a, const BoundaryPath& path,
                            const std::function<Complex(std::size_t, const PathNode&)>& weight);

/// Trapezoid quadrature of the S(1,A) identity; the caller refines the path
/// until ||result - 2I|| meets its tolerance. Spectrum must lie strictly
/// inside the region; violations name the offending eigenvalue.
CMatrix quadrature_S1(const CMatrix& a, const BoundaryPath& path);

/// ||quadrature_S1 - 2I||: the quadrature-resolution certificate.
double quadrature_certificate(const CMatrix& a, const BoundaryPath& path);

/// Cauchy transform of the conjugate of f at z (z off the path by at least
/// one local node spacing).
Complex cauchy_transform_conjugate(const std::function<Complex(Complex)>& f,
                                   const BoundaryPath& path, Complex z);

/// S(f,A) = integral of f(zeta(s)) mu(zeta(s), A) ds.
CMatrix assemble_S(const std::function<Complex(Complex)>& f, const CMatrix& a,
                   const BoundaryPath& path);

struct KernelSample {
    Complex zeta;
    Complex tangent;
    double mu_lambda_min = 0;
    double resolvent_norm = 0;
    double numerical_radius_resolvent = 0;
};

KernelSample kernel_sample(const CMatrix& a, Complex zeta, Complex tangent);

/// CSV export: s, Re zeta, Im zeta, Re zeta', Im zeta', ds, corner.
void export_path_csv(const BoundaryPath& path, std::ostream& os);

}  // namespace specset
