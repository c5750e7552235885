#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <random>

#include "specset/boundary.hpp"
#include "specset/bounds.hpp"
#include "specset/gallery.hpp"
#include "specset/matops.hpp"
#include "specset/regions.hpp"

using namespace specset;
using doctest::Approx;

namespace {
const bool strict = [] { set_strict_checks(true); return true; }();
constexpr double kPi = std::numbers::pi;
}  // namespace

TEST_CASE("k_from_c reproduces the closed-form ladder") {
    CHECK(k_from_c(1, 1) == Approx(1.0 + std::sqrt(2.0)).epsilon(1e-15));
    CHECK(k_from_c(3, 3) == Approx(3.0 + 2.0 * std::sqrt(3.0)).epsilon(1e-15));
    CHECK(k_from_c(2, 7.0 / 4.0) == Approx(4.0).epsilon(1e-15));
    CHECK(k_from_c(2, 2.5) == Approx(2.5 + std::sqrt(8.25)).epsilon(1e-15));
    CHECK(k_from_c(3, 2) == Approx(2.0 + std::sqrt(7.0)).epsilon(1e-15));
}

TEST_CASE("k_from_c is monotone in both arguments") {
    std::mt19937_64 eng(3);
    auto uni = [&]() { return (static_cast<double>(eng() >> 11)) * 0x1p-53 * 5.0; };
    for (int k = 0; k < 200; ++k) {
        double c1 = uni(), c2 = uni(), d1 = uni() * 0.2, d2 = uni() * 0.2;
        CHECK(k_from_c(c1 + d1, c2) >= k_from_c(c1, c2) - 1e-12);
        CHECK(k_from_c(c1, c2 + d2) >= k_from_c(c1, c2) - 1e-12);
    }
}

TEST_CASE("k_multidisk_closedform reproduces the published values") {
    CHECK(k_multidisk_closedform(1, {2}) == Approx(3.0 + 2.0 * std::sqrt(3.0)).epsilon(1e-15));
    CHECK(k_multidisk_closedform(2, {1, 1}) == Approx(3.0 + std::sqrt(14.0)).epsilon(1e-15));
    CHECK(k_multidisk_closedform(1, {1}) == Approx(2.0 + std::sqrt(7.0)).epsilon(1e-15));
    CHECK_THROWS_AS((void)k_multidisk_closedform(2, {1}), Error);
    CHECK_THROWS_AS((void)k_multidisk_closedform(1, {3}), Error);
}

TEST_CASE("c1_upper on convex loops is 1") {
    auto [c1, argmax] = c1_upper(circle_path({0.5, -1}, 2.0, 512));
    CHECK(c1 == Approx(1.0).epsilon(0.02));
    CHECK(std::abs(std::abs(argmax - Complex(0.5, -1)) - 2.0) < 0.05);
}

TEST_CASE("c1_upper with a hole approaches 3 in the pinhole limit") {
    BoundaryPath base = circle_path({0, 0}, 2.0, 512);
    BoundaryPath withhole = remove_disks(base, {{{0.3, 0.2}, 0.35, DiskRule::Explicit}});
    auto [c1, argmax] = c1_upper(withhole);
    CHECK(c1 <= 3.0 + 1e-9);
    CHECK(c1 > 1.0);

    BoundaryPath pin = remove_disks(base, {{{0.3, 0.2}, 1e-3, DiskRule::Explicit}});
    auto [c1p, argp] = c1_upper(pin);
    CHECK(c1p == Approx(3.0).epsilon(0.01));
    CHECK(std::abs(argp - Complex(0.3, 0.2)) < 0.01);
}

TEST_CASE("c1_upper with at most a half-disk bite stays below 2") {
    BoundaryPath base = circle_path({0, 0}, 1.0, 1024);
    // bite centered on the boundary: exactly half the disk intersects
    BoundaryPath bitten = remove_disks(base, {{{1.0, 0.0}, 0.3, DiskRule::Explicit}});
    auto [c1, argmax] = c1_upper(bitten);
    CHECK(c1 <= 2.0 + 1e-9);
    CHECK(c1 > 1.0);
}

TEST_CASE("c2_upper is 1 on convex regions containing W(A)") {
    CMatrix a = gallery::random_complex(6, 9);
    double w = numerical_radius(a);
    BoundaryPath p = circle_path({0, 0}, 1.5 * w, 512);
    auto [c2, gamma] = c2_upper(a, p);
    CHECK(gamma <= 1e-6 * p.perimeter());
    CHECK(c2 == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("c2_upper obeys the hole and bite ceilings") {
    CMatrix a = gallery::block_random(gallery::preset_fig4(), 21);
    RegionSpec spec;
    spec.holes.push_back({Complex(3.5, 0), DiskRule::NumRad, 0});
    RegionBuilder rb(a, spec);
    BoundaryPath path = rb.build(2);
    auto [c2, gamma] = c2_upper(a, path);
    CHECK(c2 <= 3.0 + 1e-3);

    // half-disk bite with norm-rule radius: c2 <= 7/4
    CMatrix j = gallery::grcar(6);
    BoundaryPath base = numerical_range_boundary(j, 1024);
    // pick a boundary-centered bite point: rightmost support point
    Complex xi = base.loops[0].nodes[0].zeta;
    double r1 = disk_radius(j, xi, DiskRule::Norm);
    BoundaryPath bitten = remove_disks(base, {{xi, r1, DiskRule::Norm}});
    auto [c2b, gammab] = c2_upper(j, bitten);
    CHECK(c2b <= 7.0 / 4.0 + 1e-3);
}

TEST_CASE("k_cauchy on a scalar matrix over any circle is 1") {
    CMatrix a(1, 1);
    a(0, 0) = Complex(0.7, -0.3);
    for (double r : {0.5, 2.0}) {
        BoundaryPath p = circle_path(a(0, 0), r, 512);
        CHECK(k_cauchy(a, p) == Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("k_cauchy matches the distance-quadrature oracle on a normal matrix") {
    CMatrix a = gallery::normal_diag({{-1, 0}, {1, 0}});
    BoundaryPath p = circle_path({0, 0}, 2.0, 4096);
    // oracle: (1/2pi) integral ds / dist(zeta, {-1, 1}) on the same nodes
    double oracle = 0;
    for (const auto& nd : p.loops[0].nodes) {
        double dist = std::min(std::abs(nd.zeta - Complex(-1, 0)), std::abs(nd.zeta - Complex(1, 0)));
        oracle += nd.ds / dist;
    }
    oracle /= 2.0 * kPi;
    CHECK(k_cauchy(a, p) == Approx(oracle).epsilon(1e-6));
}

TEST_CASE("k_pseudo_closedform basics") {
    CMatrix a(1, 1);
    a(0, 0) = 0.0;
    for (double eps : {0.1, 0.2}) {
        BoundaryPath p = pseudospectrum_contour(a, eps, 200, GridWindow{-1, 1, -1, 1});
        CHECK(k_pseudo_closedform(p, eps) == Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("full_report on a normal matrix over its numerical range") {
    CMatrix a = gallery::normal_diag({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
    BoundReport rep = full_report(a, RegionSpec{});
    CHECK(rep.c1 == Approx(1.0).epsilon(0.02));
    CHECK(rep.c2 == Approx(1.0).epsilon(1e-4));
    CHECK(rep.K_main == Approx(1.0 + std::sqrt(2.0)).epsilon(1e-3));
    CHECK(rep.K_cauchy > 1.0 - 1e-6);
    CHECK(std::isfinite(rep.K_cauchy));
    CHECK(rep.quadrature_certificate <= 1e-6);
    // report self-consistency
    CHECK(rep.K_main == Approx(k_from_c(rep.c1, rep.c2)).epsilon(1e-15));
    CHECK(rep.gamma_integral == Approx(rep.c2 - 1.0).epsilon(1e-12));
}

TEST_CASE("full_report on the fig4 split region") {
    CMatrix a = gallery::block_random(gallery::preset_fig4(), 11);
    RegionSpec spec;
    spec.holes.push_back({Complex(3.5, 0), DiskRule::NumRad, 0});
    BoundReport rep = full_report(a, spec);
    CHECK(rep.components == 2);
    CHECK(rep.K_main <= 3.0 + 2.0 * std::sqrt(3.0) + 1e-3);
    REQUIRE(rep.K_closedform.has_value());
    CHECK(*rep.K_closedform == Approx(3.0 + 2.0 * std::sqrt(3.0)).epsilon(1e-15));
    CHECK(rep.K_main <= *rep.K_closedform + 1e-3);
    CHECK(rep.quadrature_certificate <= 1e-6);
}

TEST_CASE("assemble_S spot-check against 2 c2 for random Blaschke-type functions") {
    CMatrix a = gallery::random_complex(5, 33);
    double w = numerical_radius(a);
    BoundaryPath p = circle_path({0, 0}, 1.4 * w, 1024);
    auto [c2, gamma] = c2_upper(a, p);

    std::mt19937_64 eng(17);
    auto uni = [&]() { return (static_cast<double>(eng() >> 11)) * 0x1p-53; };
    for (int trial = 0; trial < 10; ++trial) {
        // rational function with poles outside the region, normalized on the path
        Complex zero1(2.0 * uni() - 1.0, 2.0 * uni() - 1.0);
        Complex pole1 = std::polar(3.0 * w + uni(), 2.0 * kPi * uni());
        Complex pole2 = std::polar(4.0 * w + uni(), 2.0 * kPi * uni());
        auto raw = [&](Complex z) { return (z - zero1) / ((z - pole1) * (z - pole2)); };
        double sup = 0;
        for (const auto& nd : p.loops[0].nodes) sup = std::max(sup, std::abs(raw(nd.zeta)));
        auto f = [&](Complex z) { return raw(z) / sup; };
        CHECK(operator_norm(assemble_S(f, a, p)) <= 2.0 * c2 + 1e-3);
    }
}

TEST_CASE("BoundReport floor: K >= 1 + sqrt(2) when c1, c2 >= 1") {
    std::mt19937_64 eng(5);
    auto uni = [&]() { return (static_cast<double>(eng() >> 11)) * 0x1p-53; };
    for (int k = 0; k < 100; ++k) {
        double c1 = 1.0 + 3.0 * uni(), c2 = 1.0 + 3.0 * uni();
        CHECK(k_from_c(c1, c2) >= 1.0 + std::sqrt(2.0) - 1e-12);
    }
}
