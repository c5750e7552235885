#include "specset/matops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace specset {

namespace {

Eigen::SelfAdjointEigenSolver<CMatrix> hermitian_eigs(const CMatrix& h, bool vectors,
                                                      const char* where) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es;
    es.compute(h, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError(std::string(where) + ": Hermitian eigensolver failed (n=" +
                             std::to_string(h.rows()) + ", ||B||_F=" +
                             std::to_string(h.norm()) + ")");
    return es;
}

double lambda_max_rotated(const CMatrix& b, double theta) {
    CMatrix h = hermitian_part(std::polar(1.0, theta) * b);
    auto es = hermitian_eigs(h, false, "numerical_radius");
    return es.eigenvalues().maxCoeff();
}

template <typename F>
double golden_max(const F& f, double lo, double hi, int iters) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int k = 0; k < iters; ++k) {
        if (fc > fd) {
            hi = d; d = c; fd = fc;
            c = hi - gr * (hi - lo);
            fc = f(c);
        } else {
            lo = c; c = d; fc = fd;
            d = lo + gr * (hi - lo);
            fd = f(d);
        }
    }
    return std::max(fc, fd);
}

bool g_strict_checks = false;

}  // namespace

void set_strict_checks(bool on) { g_strict_checks = on; }
bool strict_checks() { return g_strict_checks; }

HermitianExtremes hermitian_part_extremes(const CMatrix& b) {
    require_square(b, "hermitian_part_extremes");
    auto es = hermitian_eigs(hermitian_part(b), true, "hermitian_part_extremes");
    const auto& ev = es.eigenvalues();
    int n = static_cast<int>(ev.size());
    HermitianExtremes out;
    out.lambda_min = ev(0);
    out.lambda_max = ev(n - 1);
    out.v_min = es.eigenvectors().col(0);
    out.v_max = es.eigenvectors().col(n - 1);
    return out;
}

CMatrix resolvent(const CMatrix& a, Complex zeta) {
    require_square(a, "resolvent");
    const int n = static_cast<int>(a.rows());
    CMatrix m = -a;
    m.diagonal().array() += zeta;
    Eigen::PartialPivLU<CMatrix> lu(m);
    CMatrix r = lu.solve(CMatrix::Identity(n, n));

    auto fail = [&]() {
        double smin = m.allFinite() ? sigma_min(m) : 0.0;
        throw NumericalError("resolvent: shift zeta=(" + std::to_string(zeta.real()) + "," +
                             std::to_string(zeta.imag()) +
                             ") is numerically singular, sigma_min(zeta I - A)=" +
                             std::to_string(smin));
    };
    if (!r.allFinite()) fail();

    if (g_strict_checks) {
        // ||MR - I||_F <= tol * ||R||_F * ||M||_F / n implies the 2-norm residual bound.
        double res = (m * r - CMatrix::Identity(n, n)).norm();
        if (res > 1e-10 * r.norm() * m.norm() / static_cast<double>(n)) fail();
    } else {
        CVector probe = CVector::Constant(n, Complex(1.0 / std::sqrt(double(n)), 0.0));
        double res = (m * (r * probe) - probe).norm();
        if (res > 1e-8 * (1.0 + r.norm() / std::sqrt(double(n)))) fail();
    }
    return r;
}

double operator_norm(const CMatrix& b) {
    require_square(b, "operator_norm");
    if (b.rows() <= 48) {
        Eigen::JacobiSVD<CMatrix> svd(b);
        return svd.singularValues()(0);
    }
    Eigen::BDCSVD<CMatrix> svd(b);
    return svd.singularValues()(0);
}

double sigma_min(const CMatrix& b) {
    require_square(b, "sigma_min");
    if (b.rows() <= 48) {
        Eigen::JacobiSVD<CMatrix> svd(b);
        return svd.singularValues()(b.cols() - 1);
    }
    Eigen::BDCSVD<CMatrix> svd(b);
    return svd.singularValues()(b.cols() - 1);
}

double spectral_norm_estimate(const CMatrix& b, double rtol) {
    require_square(b, "spectral_norm_estimate");
    const int n = static_cast<int>(b.rows());
    if (n == 1) return std::abs(b(0, 0));
    CVector v = CVector::Constant(n, Complex(1.0, 0.0));
    v += 1e-3 * CVector::LinSpaced(n, 0.0, 1.0).cast<Complex>();
    v.normalize();
    double sigma = 0.0;
    int stable = 0;
    for (int it = 0; it < 100; ++it) {
        CVector w = b * v;
        double s = w.norm();
        if (s == 0.0) return 0.0;
        v = b.adjoint() * w;
        double nv = v.norm();
        if (nv == 0.0) return s;
        v /= nv;
        double estimate = std::sqrt(nv);
        if (std::abs(estimate - sigma) <= rtol * estimate) {
            if (++stable >= 2) return estimate;
        } else {
            stable = 0;
        }
        sigma = estimate;
    }
    // Slow gap: fall back to an exact Hermitian eigensolve of B*B.
    auto es = hermitian_eigs(b.adjoint() * b, false, "spectral_norm_estimate");
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double numerical_radius(const CMatrix& b) {
    require_square(b, "numerical_radius");
    const int n = static_cast<int>(b.rows());
    if (n == 1) return std::abs(b(0, 0));

    constexpr int grid = 256;
    const double h = 2.0 * std::numbers::pi / grid;
    std::vector<double> g(grid);
    for (int i = 0; i < grid; ++i) g[i] = lambda_max_rotated(b, i * h);

    std::vector<int> maxima;
    for (int i = 0; i < grid; ++i) {
        double prev = g[(i + grid - 1) % grid], next = g[(i + 1) % grid];
        if (g[i] >= prev && g[i] >= next) maxima.push_back(i);
    }
    std::sort(maxima.begin(), maxima.end(), [&](int a_, int b_) { return g[a_] > g[b_]; });
    if (maxima.size() > 3) maxima.resize(3);

    double best = *std::max_element(g.begin(), g.end());
    for (int i : maxima) {
        double theta = i * h;
        best = std::max(best, golden_max([&](double t) { return lambda_max_rotated(b, t); },
                                         theta - h, theta + h, 60));
    }
    return best;
}

CMatrix matrix_exponential(const CMatrix& a, double t) {
    require_square(a, "matrix_exponential");
    CMatrix m = t * a;
    if (!m.allFinite()) throw NumericalError("matrix_exponential: t*A has non-finite entries");
    CMatrix e = m.exp();
    if (!e.allFinite()) throw NumericalError("matrix_exponential: overflow in e^{tA}");
    return e;
}

Spectrum eigen_decomposition(const CMatrix& a) {
    require_square(a, "eigen_decomposition");
    const int n = static_cast<int>(a.rows());
    Eigen::ComplexEigenSolver<CMatrix> es(a, true);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigen_decomposition: eigensolver failed (n=" + std::to_string(n) + ")");

    Spectrum s;
    s.eigenvalues = es.eigenvalues();
    s.right = es.eigenvectors();
    for (int i = 0; i < n; ++i) s.right.col(i).normalize();
    s.left = CMatrix::Zero(n, n);
    s.condition_numbers.assign(n, std::numeric_limits<double>::quiet_NaN());
    s.simple.assign(n, true);

    double scale = operator_norm(a);
    double thr = 1e-8 * scale;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(s.eigenvalues(i) - s.eigenvalues(j)) < thr)
                s.simple[i] = s.simple[j] = false;

    Eigen::PartialPivLU<CMatrix> lu(s.right);
    CMatrix w = lu.solve(CMatrix::Identity(n, n));  // rows are unnormalized left eigenvectors
    bool invertible = w.allFinite() && (s.right * w - CMatrix::Identity(n, n)).norm() < 1e-6 * n;
    for (int i = 0; i < n; ++i) {
        if (!s.simple[i] || !invertible) continue;
        double wn = w.row(i).norm();
        s.left.col(i) = w.row(i).adjoint() / wn;
        s.condition_numbers[i] = wn;  // = 1/|y*x| with unit x, y
    }
    if (!invertible) std::fill(s.simple.begin(), s.simple.end(), false);
    return s;
}

}  // namespace specset
