#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "specset/gallery.hpp"
#include "specset/matops.hpp"

using namespace specset;
using doctest::Approx;

namespace {

CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
    CMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

// Independent 2x2 SVD oracle: singular values from the closed-form
// eigenvalues of M*M (trace/determinant formula).
double svd2_sigma_max(const CMatrix& m) {
    double t = m.squaredNorm();
    double d = std::abs(m.determinant());
    double disc = std::sqrt(std::max(0.0, t * t - 4.0 * d * d));
    return std::sqrt((t + disc) / 2.0);
}

}  // namespace

TEST_CASE("hermitian_part_extremes on the nilpotent Jordan block") {
    auto ext = hermitian_part_extremes(mat2(0, 1, 0, 0));
    CHECK(ext.lambda_min == Approx(-0.5).epsilon(1e-12));
    CHECK(ext.lambda_max == Approx(0.5).epsilon(1e-12));
    // eigenvector consistency: v* H v reproduces the eigenvalue
    CMatrix h = hermitian_part(mat2(0, 1, 0, 0));
    Complex q = ext.v_max.adjoint() * (h * ext.v_max);
    CHECK(q.real() == Approx(0.5).epsilon(1e-10));
    CHECK(std::abs(q.imag()) < 1e-12);
}

TEST_CASE("hermitian_part_extremes on the identity") {
    for (int n : {1, 3, 7}) {
        auto ext = hermitian_part_extremes(CMatrix::Identity(n, n));
        CHECK(ext.lambda_min == Approx(1.0));
        CHECK(ext.lambda_max == Approx(1.0));
    }
}

TEST_CASE("hermitian_part_extremes closed-form 2x2") {
    // H([[1,-1],[0,1]]) = [[1,-1/2],[-1/2,1]] has eigenvalues 1 +- 1/2
    auto ext = hermitian_part_extremes(mat2(1, -1, 0, 1));
    CHECK(ext.lambda_max == Approx(1.5).epsilon(1e-12));
    CHECK(ext.lambda_min == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("resolvent of a diagonal matrix") {
    CMatrix a = mat2(-2, 0, 0, 2);
    Complex zeta(0, 2);
    CMatrix r = resolvent(a, zeta);
    CHECK(std::abs(r(0, 0) - 1.0 / (zeta + 2.0)) < 1e-14);
    CHECK(std::abs(r(1, 1) - 1.0 / (zeta - 2.0)) < 1e-14);
    CHECK(std::abs(r(0, 1)) < 1e-14);
}

TEST_CASE("resolvent of a nilpotent matrix via the Neumann series") {
    CMatrix r = resolvent(mat2(0, 1, 0, 0), 1.0);
    CHECK(std::abs(r(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(r(0, 1) - 1.0) < 1e-14);
    CHECK(std::abs(r(1, 0)) < 1e-14);
    CHECK(std::abs(r(1, 1) - 1.0) < 1e-14);
}

TEST_CASE("resolvent of grcar(32) at 0 against the SVD oracle") {
    CMatrix a = gallery::grcar(32);
    CMatrix r = resolvent(a, 0.0);
    double smin = sigma_min(a);  // independent SVD route
    double prod = operator_norm(r) * smin;
    CHECK(prod >= 1.0 - 1e-8);
    CHECK(prod <= 1.0 + 1e-8);
}

TEST_CASE("resolvent rejects an eigenvalue shift") {
    CMatrix a = mat2(-2, 0, 0, 2);
    CHECK_THROWS_AS((void)resolvent(a, Complex(2, 0)), NumericalError);
}

TEST_CASE("operator_norm examples") {
    CHECK(operator_norm(mat2(0, 1, 0, 0)) == Approx(1.0).epsilon(1e-12));

    CMatrix d = mat2(Complex(0, 3), 0, 0, Complex(-4, 0));
    CHECK(operator_norm(d) == Approx(4.0).epsilon(1e-12));

    CMatrix m = mat2(1, -1, 0, 1);
    double expected = std::sqrt((3.0 + std::sqrt(5.0)) / 2.0);
    CHECK(operator_norm(m) == Approx(expected).epsilon(1e-10));
    CHECK(operator_norm(m) == Approx(svd2_sigma_max(m)).epsilon(1e-12));
}

TEST_CASE("spectral_norm_estimate agrees with the SVD") {
    for (int seed : {1, 2, 3, 4}) {
        CMatrix b = gallery::random_complex(9, seed);
        CHECK(spectral_norm_estimate(b) == Approx(operator_norm(b)).epsilon(1e-8));
    }
}

TEST_CASE("numerical_radius examples") {
    CHECK(numerical_radius(mat2(0, 1, 0, 0)) == Approx(0.5).epsilon(1e-8));

    // Hermitian: w(B) = ||B||
    CMatrix h = mat2(2, Complex(0, 1), Complex(0, -1), -1);
    CHECK(numerical_radius(h) == Approx(operator_norm(h)).epsilon(1e-8));

    // W([[1,-1],[0,1]]) is the disk of radius 1/2 about 1
    CHECK(numerical_radius(mat2(1, -1, 0, 1)) == Approx(1.5).epsilon(1e-8));
}

TEST_CASE("numerical_radius sandwich over random matrices") {
    for (int k = 0; k < 100; ++k) {
        int n = 2 + (k % 19);
        CMatrix b = gallery::random_complex(n, 1000 + k);
        double w = numerical_radius(b);
        double nrm = operator_norm(b);
        CHECK(w >= nrm / 2.0 - 1e-8 * nrm);
        CHECK(w <= nrm + 1e-8 * nrm);
    }
}

TEST_CASE("numerical_radius of a Hermitian part equals its norm") {
    for (int k = 0; k < 10; ++k) {
        CMatrix h = hermitian_part(gallery::random_complex(6, 50 + k));
        CHECK(numerical_radius(h) == Approx(operator_norm(h)).epsilon(1e-8));
    }
}

TEST_CASE("matrix_exponential basics") {
    CMatrix a(1, 1);
    a(0, 0) = -1.0;
    CHECK(std::abs(matrix_exponential(a, 1.0)(0, 0) - std::exp(-1.0)) < 1e-14);

    CMatrix j = mat2(0, 1, 0, 0);
    for (double t : {0.3, 2.0, 10.0}) {
        CMatrix e = matrix_exponential(j, t);
        CHECK(std::abs(e(0, 0) - 1.0) < 1e-12);
        CHECK(std::abs(e(0, 1) - t) < 1e-12 * t);
        // closed-form 2x2 SVD: ||e^{tJ}|| = (t + sqrt(t^2+4))/2
        double expected = (t + std::sqrt(t * t + 4.0)) / 2.0;
        CHECK(operator_norm(e) == Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("matrix_exponential semigroup property") {
    for (int k = 0; k < 6; ++k) {
        int n = 2 + k;
        CMatrix a = gallery::random_complex(n, 300 + k);
        double s = 0.4, t = 0.9;
        CMatrix lhs = matrix_exponential(a, s + t);
        CMatrix rhs = matrix_exponential(a, s) * matrix_exponential(a, t);
        CHECK((lhs - rhs).norm() <= 1e-8 * operator_norm(lhs) * n);
    }
}

TEST_CASE("eigen_decomposition of a normal matrix") {
    CMatrix a = gallery::normal_diag({{1, 0}, {2, 0}, {3, 0}});
    auto s = eigen_decomposition(a);
    for (int i = 0; i < 3; ++i) {
        CHECK(s.simple[i]);
        CHECK(s.condition_numbers[i] == Approx(1.0).epsilon(1e-10));
        CHECK(s.condition_numbers[i] >= 1.0 - 1e-10);
    }
}

TEST_CASE("eigen_decomposition of grcar(32) is conjugate-symmetric") {
    auto s = eigen_decomposition(gallery::grcar(32));
    // real matrix: every eigenvalue's conjugate is also an eigenvalue
    for (int i = 0; i < 32; ++i) {
        Complex want = std::conj(s.eigenvalues(i));
        double best = 1e300;
        for (int j = 0; j < 32; ++j) best = std::min(best, std::abs(s.eigenvalues(j) - want));
        CHECK(best < 1e-8);
    }
}

TEST_CASE("eigen_decomposition condition number closed form") {
    double m = 1e3;
    CMatrix a = mat2(1, m, 0, 2);
    auto s = eigen_decomposition(a);
    double expected = std::sqrt(1.0 + m * m);
    for (int i = 0; i < 2; ++i) {
        REQUIRE(s.simple[i]);
        CHECK(s.condition_numbers[i] == Approx(expected).epsilon(1e-8));
        // left/right residuals
        Complex lam = s.eigenvalues(i);
        CHECK((a * s.right.col(i) - lam * s.right.col(i)).norm() < 1e-10 * operator_norm(a));
        CHECK((s.left.col(i).adjoint() * a - lam * s.left.col(i).adjoint()).norm() <
              1e-10 * operator_norm(a));
    }
}

TEST_CASE("eigen_decomposition flags defective eigenvalues") {
    auto s = eigen_decomposition(gallery::jordan_block(3, 0.5));
    for (int i = 0; i < 3; ++i) CHECK_FALSE(s.simple[i]);
}
