#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "specset/boundary.hpp"
#include "specset/gallery.hpp"
#include "specset/matops.hpp"
#include "specset/regions.hpp"

using namespace specset;
using doctest::Approx;

namespace {
const bool strict = [] { set_strict_checks(true); return true; }();
constexpr double kPi = std::numbers::pi;

CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
    CMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}
}  // namespace

TEST_CASE("numerical range of the nilpotent block is the radius-1/2 circle") {
    CMatrix j2 = mat2(0, 1, 0, 0);
    BoundaryPath p = numerical_range_boundary(j2, 256);
    REQUIRE(p.loops.size() == 1);
    CHECK_FALSE(p.degenerate);
    for (const auto& nd : p.loops[0].nodes) CHECK(std::abs(std::abs(nd.zeta) - 0.5) < 1e-6);
}

TEST_CASE("numerical range of a Hermitian matrix degenerates to a ribbon") {
    CMatrix a = mat2(0, 0, 0, 1);
    BoundaryPath p = numerical_range_boundary(a, 128);
    CHECK(p.degenerate);
    double lo = 1e300, hi = -1e300;
    for (const auto& nd : p.loops[0].nodes) {
        CHECK(std::abs(nd.zeta.imag()) < 1e-10);
        lo = std::min(lo, nd.zeta.real());
        hi = std::max(hi, nd.zeta.real());
    }
    CHECK(lo == Approx(0.0).epsilon(1e-9));
    CHECK(hi == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("numerical range of a normal matrix is the hull of its spectrum") {
    CMatrix a = gallery::normal_diag({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
    BoundaryPath p = numerical_range_boundary(a, 512);
    // square with vertices at +-1, +-i
    for (const auto& nd : p.loops[0].nodes) {
        double l1 = std::abs(nd.zeta.real()) + std::abs(nd.zeta.imag());
        CHECK(l1 <= 1.0 + 1e-9);
        CHECK(l1 >= 1.0 - 1e-9);
    }
    for (Complex v : {Complex(1, 0), Complex(0, 1), Complex(-1, 0), Complex(0, -1)})
        CHECK(distance_to_path(p, v) < 1e-9);
}

TEST_CASE("numerical range hull contains random Rayleigh quotients") {
    CMatrix a = gallery::grcar(10);
    BoundaryPath p = numerical_range_boundary(a, 512);
    std::mt19937_64 eng(7);
    auto uni = [&]() { return (static_cast<double>(eng() >> 11)) * 0x1p-53 - 0.5; };
    for (int k = 0; k < 100; ++k) {
        CVector q(10);
        for (int i = 0; i < 10; ++i) q(i) = Complex(uni(), uni());
        q.normalize();
        Complex z = (q.adjoint() * (a * q))(0);
        CHECK((region_contains(p, z) || distance_to_path(p, z) < 1e-8));
    }
}

TEST_CASE("disk_radius examples") {
    CMatrix a = mat2(-2, 0, 0, 2);
    CHECK(disk_radius(a, {0, 0}, DiskRule::Norm) == Approx(2.0).epsilon(1e-10));

    CMatrix u = mat2(1, 1, 0, 1);
    double expected_norm = 1.0 / std::sqrt((3.0 + std::sqrt(5.0)) / 2.0);
    CHECK(disk_radius(u, {0, 0}, DiskRule::Norm) == Approx(expected_norm).epsilon(1e-10));
    CHECK(disk_radius(u, {0, 0}, DiskRule::NumRad) == Approx(2.0 / 3.0).epsilon(1e-8));

    CHECK_THROWS_AS((void)disk_radius(a, Complex(2, 0), DiskRule::Norm), Error);
}

TEST_CASE("remove_disks: interior disk makes an annulus") {
    BoundaryPath base = circle_path({0, 0}, 3.0, 512);
    BoundaryPath annulus = remove_disks(base, {{{0, 0}, 1.0, DiskRule::Explicit}});
    REQUIRE(annulus.loops.size() == 2);
    double p_outer = 0, p_hole = 0;
    for (const auto& loop : annulus.loops) {
        double per = 0;
        for (const auto& nd : loop.nodes) per += nd.ds;
        if (loop.hole) p_hole = per;
        else p_outer = per;
    }
    CHECK(p_outer == Approx(6.0 * kPi).epsilon(1e-10));
    CHECK(p_hole == Approx(2.0 * kPi).epsilon(1e-10));
    CHECK(connectivity_components(annulus) == 1);
}

TEST_CASE("remove_disks: partial bite produces corners matching circle geometry") {
    BoundaryPath base = circle_path({0, 0}, 1.0, 1024);
    double r = 0.5;
    Complex xi(1.0, 0.0);
    BoundaryPath bitten = remove_disks(base, {{xi, r, DiskRule::Explicit}});
    REQUIRE(bitten.loops.size() == 1);
    int corners = 0;
    for (const auto& nd : bitten.loops[0].nodes)
        if (nd.corner) ++corners;
    CHECK(corners == 4);  // two geometric corners, each a twin pair

    // corner points satisfy both circle equations
    for (const auto& nd : bitten.loops[0].nodes)
        if (nd.corner) {
            CHECK(std::abs(std::abs(nd.zeta) - 1.0) < 1e-9);
            CHECK(std::abs(std::abs(nd.zeta - xi) - r) < 1e-9);
        }

    // removed-cap arc length from closed-form circle-circle geometry:
    // intersection angle on the bite circle
    double d = std::abs(xi);
    double cos_half = (d * d + r * r - 1.0) / (2.0 * d * r);
    double half = std::acos(std::clamp(cos_half, -1.0, 1.0));
    double expected_arc = 2.0 * (kPi - half) * r;
    double arc = 0;
    for (const auto& nd : bitten.loops[0].nodes)
        if (nd.kind == PieceKind::Hole) arc += nd.ds;
    CHECK(arc == Approx(expected_arc).epsilon(1e-6));
}

TEST_CASE("remove_disks rejects disks that cover or miss the region") {
    BoundaryPath base = circle_path({0, 0}, 1.0, 256);
    CHECK_THROWS_AS((void)remove_disks(base, {{{0, 0}, 3.0, DiskRule::Explicit}}), GeometryError);
    CHECK_THROWS_AS((void)remove_disks(base, {{{5, 0}, 0.5, DiskRule::Explicit}}), GeometryError);
}

TEST_CASE("fig4 analogue splits into two components") {
    CMatrix a = gallery::block_random(gallery::preset_fig4(), 11);
    RegionSpec spec;
    spec.holes.push_back({Complex(3.5, 0), DiskRule::NumRad, 0});
    RegionBuilder rb(a, spec);
    BoundaryPath path = rb.build(0);
    int outer = 0;
    for (const auto& l : path.loops)
        if (!l.hole) ++outer;
    CHECK(outer == 2);
    CHECK(connectivity_components(path) == 2);
}

TEST_CASE("clip_region: left half-disk") {
    BoundaryPath base = circle_path({0, 0}, 1.0, 1024);
    HalfPlaneClip hp{{0, 0}, {1, 0}};
    BoundaryPath half = clip_region(base, hp);
    REQUIRE(half.loops.size() == 1);
    double gamma1 = 0;
    for (const auto& nd : half.loops[0].nodes) {
        CHECK(nd.zeta.real() <= 1e-9);
        if (nd.kind == PieceKind::Clip) gamma1 += nd.ds;
    }
    CHECK(gamma1 == Approx(2.0).epsilon(1e-6));
    // the straight edge runs through +-i
    CHECK(distance_to_path(half, {0, 1}) < 1e-9);
    CHECK(distance_to_path(half, {0, -1}) < 1e-9);
}

TEST_CASE("clip_region: lens corners satisfy both circle equations") {
    BoundaryPath base = circle_path({1, 0}, 2.0, 1024);
    DiskClip dc{{0, 0}, 1.0};
    BoundaryPath lens = clip_region(base, dc);
    REQUIRE(lens.loops.size() == 1);
    int corners = 0;
    for (const auto& nd : lens.loops[0].nodes)
        if (nd.corner) {
            ++corners;
            CHECK(std::abs(std::abs(nd.zeta) - 1.0) < 1e-10);
            CHECK(std::abs(std::abs(nd.zeta - Complex(1, 0)) - 2.0) < 1e-10);
        }
    CHECK(corners == 4);
}

TEST_CASE("clip_region leaves an enclosed base unchanged") {
    BoundaryPath base = circle_path({0, 0}, 1.0, 128);
    HalfPlaneClip hp{{5, 0}, {1, 0}};
    BoundaryPath same = clip_region(base, hp);
    REQUIRE(same.loops.size() == 1);
    CHECK(same.loops[0].nodes.size() == base.loops[0].nodes.size());
    for (std::size_t k = 0; k < base.loops[0].nodes.size(); ++k)
        CHECK(std::abs(same.loops[0].nodes[k].zeta - base.loops[0].nodes[k].zeta) == 0.0);

    HalfPlaneClip empty{{-5, 0}, {1, 0}};
    CHECK_THROWS_AS((void)clip_region(base, empty), GeometryError);
}

TEST_CASE("pseudospectrum contour of a scalar is a circle") {
    CMatrix a(1, 1);
    a(0, 0) = 0.0;
    BoundaryPath p = pseudospectrum_contour(a, 0.1, 200, GridWindow{-0.5, 0.5, -0.5, 0.5});
    REQUIRE(p.loops.size() == 1);
    CHECK_FALSE(p.loops[0].hole);
    CHECK(p.perimeter() == Approx(2.0 * kPi * 0.1).epsilon(0.01));
    for (const auto& nd : p.loops[0].nodes) CHECK(std::abs(std::abs(nd.zeta) - 0.1) < 0.01 * 0.1 + 5e-4);
}

TEST_CASE("pseudospectrum contour separates well-isolated eigenvalues") {
    CMatrix a = gallery::normal_diag({{0, 0}, {10, 0}});
    BoundaryPath p = pseudospectrum_contour(a, 0.5, 300);
    int outer = 0;
    for (const auto& l : p.loops)
        if (!l.hole) ++outer;
    CHECK(outer == 2);
    for (const auto& l : p.loops) {
        double per = 0;
        for (const auto& nd : l.nodes) per += nd.ds;
        CHECK(per == Approx(2.0 * kPi * 0.5).epsilon(0.02));
    }
}

TEST_CASE("pseudospectrum contour length stabilizes under grid doubling") {
    CMatrix a = gallery::grcar(12);
    double l1 = pseudospectrum_contour(a, 1e-2, 300).perimeter();
    double l2 = pseudospectrum_contour(a, 1e-2, 600).perimeter();
    CHECK(std::abs(l2 - l1) / l2 < 0.02);
}

TEST_CASE("pseudospectrum window guarantee is enforced") {
    CMatrix a(1, 1);
    a(0, 0) = 0.0;
    // the 0.55-level set does not fit in the unit box
    CHECK_THROWS_AS((void)pseudospectrum_contour(a, 0.55, 64, GridWindow{-0.5, 0.5, -0.5, 0.5}),
                    GeometryError);
}

TEST_CASE("RegionBuilder keeps eigenvalues strictly inside every accepted region") {
    for (int seed : {3, 4}) {
        CMatrix a = gallery::random_complex(8, seed);
        RegionBuilder rb(a, RegionSpec{});
        BoundaryPath p = rb.build(0);
        Eigen::ComplexEigenSolver<CMatrix> es(a, false);
        for (int i = 0; i < 8; ++i) {
            CHECK(region_contains(p, es.eigenvalues()(i)));
            CHECK(distance_to_path(p, es.eigenvalues()(i)) > 0);
        }
    }
}

TEST_CASE("RegionBuilder applies an automatic margin for boundary spectra") {
    CMatrix a = gallery::normal_diag({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
    RegionBuilder rb(a, RegionSpec{});
    CHECK(rb.applied_margin() > 0);
    BoundaryPath p = rb.build(0);
    for (Complex v : {Complex(1, 0), Complex(0, 1), Complex(-1, 0), Complex(0, -1)}) {
        CHECK(region_contains(p, v));
        CHECK(distance_to_path(p, v) > 1e-4);
    }
}

TEST_CASE("rule-generated removal disks never contain an eigenvalue") {
    CMatrix a = gallery::block_random(gallery::preset_fig4(), 5);
    Eigen::ComplexEigenSolver<CMatrix> es(a, false);
    for (DiskRule rule : {DiskRule::Norm, DiskRule::NumRad}) {
        double r = disk_radius(a, {3.5, 0}, rule);
        for (int i = 0; i < es.eigenvalues().size(); ++i)
            CHECK(std::abs(es.eigenvalues()(i) - Complex(3.5, 0)) >= r * (1.0 - 1e-10));
    }
}
