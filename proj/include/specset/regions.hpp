#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "specset/boundary.hpp"
#include "specset/types.hpp"

namespace specset {

enum class DiskRule { Norm, NumRad, Explicit };

/// A spectrum-free disk to remove. Rule radii: Norm -> 1/||(A - xi I)^{-1}||,
/// NumRad -> 1/w((A - xi I)^{-1}). Neither can contain an eigenvalue.
struct Disk {
    Complex center;
    double radius = 0;
    DiskRule rule = DiskRule::Explicit;
};

struct DiskSpec {
    Complex center;
    DiskRule rule = DiskRule::NumRad;
    double radius = 0;  ///< used when rule == Explicit
};

struct HalfPlaneClip {
    Complex point;           ///< a point on the boundary line
    Complex outward_normal;  ///< unit; kept side is Re((z - point) * conj(normal)) <= 0
};

struct DiskClip {
    Complex center;
    double radius = 0;
};

using Clip = std::variant<HalfPlaneClip, DiskClip>;

struct RegionSpec {
    enum class Base { NumericalRange, Pseudospectrum, Polygon };
    Base base = Base::NumericalRange;
    double margin = 0;    ///< outward offset of the numerical-range hull
    double eps = 1e-3;    ///< pseudospectrum level
    std::vector<Complex> polygon;
    std::vector<DiskSpec> holes;
    std::vector<Clip> clips;
};

struct RegionOptions {
    int base_angles = 512;
    int contour_grid = 300;
    double quad_tol = 1e-6;
    int max_levels = 14;
    std::size_t max_nodes = 40'000'000;
    int trace_samples = 256;
};

struct GridWindow {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
};

/// Convex CCW support-function boundary of W(A), offset outward by margin.
/// Collinear-spectrum degenerate cases come back as a zero-area ribbon with
/// the degenerate flag set.
BoundaryPath numerical_range_boundary(const CMatrix& a, int n_angles = 512, double margin = 0);

/// Largest eigenvalue-free disk radius about xi under the given rule.
double disk_radius(const CMatrix& a, Complex xi, DiskRule rule);

/// Subtracts the disks from the region; produces hole loops, clipped outer
/// loops with corner flags, or several outer loops on disconnection.
BoundaryPath remove_disks(const BoundaryPath& base, const std::vector<Disk>& disks);

/// Intersects the region with a half-plane or disk. Retained base arcs keep
/// PieceKind::Base; new segments/arcs are PieceKind::Clip.
BoundaryPath clip_region(const BoundaryPath& base, const Clip& clip);

/// Marching-squares contour of sigma_min(zI - A) = eps over the window
/// (auto-sized from W(A) when not given). One loop per component.
BoundaryPath pseudospectrum_contour(const CMatrix& a, double eps, int grid);
BoundaryPath pseudospectrum_contour(const CMatrix& a, double eps, int grid,
                                    const GridWindow& window);

/// Number of connected components (outer loops), cross-validated by a
/// 400x400 scanline flood fill of the region indicator.
int connectivity_components(const BoundaryPath& path);

/// Level-refinable region construction: analytic bases are rebuilt with
/// doubled sampling per level, pseudospectrum contours keep their grid
/// polygon and split chords.
class RegionBuilder {
public:
    RegionBuilder(CMatrix a, RegionSpec spec, RegionOptions opt = {});

    BoundaryPath build(int level) const;

    const CMatrix& matrix() const { return a_; }
    const std::vector<Disk>& disks() const { return disks_; }
    double applied_margin() const { return margin_; }
    const CVector& eigenvalues() const { return eigs_; }
    const RegionSpec& spec() const { return spec_; }
    const RegionOptions& options() const { return opt_; }

private:
    CMatrix a_;
    RegionSpec spec_;
    RegionOptions opt_;
    CVector eigs_;
    std::vector<Disk> disks_;
    double margin_ = 0;
    mutable std::optional<BoundaryPath> contour_cache_;
};

}  // namespace specset
