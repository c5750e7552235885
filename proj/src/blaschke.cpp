#include "specset/blaschke.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/FFT>

#include "specset/matops.hpp"
#include "specset/parallel.hpp"

namespace specset {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<const PathNode*> flatten(const BoundaryPath& path) {
    std::vector<const PathNode*> nodes;
    nodes.reserve(path.node_count());
    for (const auto& loop : path.loops)
        for (const auto& n : loop.nodes) nodes.push_back(&n);
    return nodes;
}

// Conjugate periodic function via FFT: v = K[u], zero mean convention.
std::vector<double> conjugate_function(const std::vector<double>& u) {
    const int n = static_cast<int>(u.size());
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> in(u.begin(), u.end()), freq;
    fft.fwd(freq, in);
    for (int k = 0; k < n; ++k) {
        if (k == 0 || 2 * k == n) {
            freq[k] = 0;
        } else if (k < n - k) {
            freq[k] *= Complex(0, -1);
        } else {
            freq[k] *= Complex(0, 1);
        }
    }
    std::vector<std::complex<double>> out;
    fft.inv(out, freq);
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = out[k].real();
    return v;
}

// Piecewise-linear periodic interpolation of a table on a uniform grid.
double interp_periodic(const std::vector<double>& table, double x) {
    const int n = static_cast<int>(table.size());
    double pos = x / (2.0 * kPi) * n;
    pos -= std::floor(pos / n) * n;
    int i0 = static_cast<int>(std::floor(pos)) % n;
    double t = pos - std::floor(pos);
    return table[i0] * (1.0 - t) + table[(i0 + 1) % n] * t;
}

}  // namespace

BoundaryPath smooth_corners(const BoundaryPath& path, double fillet_radius) {
    BoundaryPath out;
    out.circles = path.circles;
    out.degenerate = path.degenerate;
    const double diam = path_diameter(path);
    for (const auto& src_loop : path.loops) {
        // rotate so the scan never starts inside a corner twin pair
        Loop loop = src_loop;
        for (std::size_t j = 0; j < loop.nodes.size(); ++j) {
            if (!src_loop.nodes[j].corner) {
                std::rotate(loop.nodes.begin(), loop.nodes.begin() + j, loop.nodes.end());
                break;
            }
        }
        const std::size_t m = loop.nodes.size();
        Loop nl;
        nl.hole = loop.hole;
        for (std::size_t k = 0; k < m; ++k) {
            const PathNode& cur = loop.nodes[k];
            const PathNode& nxt = loop.nodes[(k + 1) % m];
            bool twin = cur.corner && nxt.corner && std::abs(nxt.zeta - cur.zeta) <= 1e-13 * diam;
            if (!twin) {
                nl.nodes.push_back(cur);
                continue;
            }
            double beta = std::arg(nxt.tangent / cur.tangent);
            if (std::abs(beta) < 1e-9) {
                ++k;  // collinear twins collapse into one node
                PathNode nd = cur;
                nd.corner = false;
                nl.nodes.push_back(nd);
                continue;
            }
            Complex prev_pos = loop.nodes[(k + m - 1) % m].zeta;
            Complex next_pos = loop.nodes[(k + 2) % m].zeta;
            double r = fillet_radius;
            double d = r * std::abs(std::tan(0.5 * beta));
            double limit = 0.4 * std::min(std::abs(cur.zeta - prev_pos), std::abs(next_pos - nxt.zeta));
            if (d > limit && d > 0) {
                r *= limit / d;
                d = limit;
            }
            Complex c = cur.zeta;
            Complex p_in = c - d * cur.tangent;
            Complex o = p_in + Complex(0, 1) * cur.tangent * (beta > 0 ? r : -r);
            double phi1 = std::arg(p_in - o);
            int segs = std::max(4, static_cast<int>(std::ceil(std::abs(beta) * r /
                                                              std::max(1e-14, d / 4))));
            int circle_idx = static_cast<int>(out.circles.size());
            out.circles.push_back({o, r, beta < 0});
            for (int s = 0; s <= segs; ++s) {
                double phi = phi1 + beta * s / segs;
                PathNode nd;
                nd.zeta = o + r * std::polar(1.0, phi);
                nd.tangent = (beta > 0 ? Complex(0, 1) : Complex(0, -1)) * std::polar(1.0, phi);
                nd.kind = cur.kind;
                nd.circle = circle_idx;
                nd.arc_angle = phi;
                nl.nodes.push_back(nd);
            }
            ++k;  // consume the twin
        }
        assign_weights(nl, out.circles);
        out.loops.push_back(std::move(nl));
    }
    return out;
}

ConformalMap build_conformal_map(const BoundaryPath& path, Complex a) {
    if (path.loops.size() != 1 || path.loops.front().hole || path.degenerate)
        throw GeometryError("build_conformal_map: a single simply connected loop is required");
    const Loop& loop = path.loops.front();
    if (loop.nodes.size() < 16) throw Error("build_conformal_map: path too coarse");
    if (!region_contains(path, a))
        throw GeometryError("build_conformal_map: center is not inside the region");

    // polar radius table about a by exact ray/polyline intersection
    const int m_table = 4096;
    std::vector<double> rho_table(m_table);
    const std::size_t m = loop.nodes.size();
    parallel_for(static_cast<std::size_t>(m_table), [&](std::size_t j) {
        Complex dir = std::polar(1.0, 2.0 * kPi * static_cast<double>(j) / m_table);
        int hits = 0;
        double tau_hit = 0;
        for (std::size_t k = 0; k < m; ++k) {
            Complex p = loop.nodes[k].zeta, q = loop.nodes[(k + 1) % m].zeta;
            Complex dpq = q - p;
            if (std::abs(dpq) == 0.0) continue;
            double den = (dpq * std::conj(dir)).imag();
            if (std::abs(den) < 1e-300) continue;
            double s = -((p - a) * std::conj(dir)).imag() / den;
            if (s < 0.0 || s >= 1.0) continue;
            double tau = ((p - a + s * dpq) * std::conj(dir)).real();
            if (tau <= 0) continue;
            ++hits;
            tau_hit = tau;
        }
        if (hits != 1) tau_hit = -1;  // flagged below
        rho_table[j] = tau_hit;
    });
    for (double r : rho_table)
        if (r <= 0)
            throw GeometryError("build_conformal_map: region is not star-shaped about the center");

    std::vector<double> log_rho(m_table);
    for (int j = 0; j < m_table; ++j) log_rho[j] = std::log(rho_table[j]);

    // boundary-correspondence fixed point: psi(t) = t + K[log rho(psi(.))](t)
    const int n_t = 4096;
    std::vector<double> psi(n_t), u(n_t);
    for (int j = 0; j < n_t; ++j) psi[j] = 2.0 * kPi * j / n_t;
    double omega = 0.8;
    bool converged = false;
    double prev_delta = 1e300;
    int growth = 0;
    for (int it = 0; it < 2000; ++it) {
        for (int j = 0; j < n_t; ++j) u[j] = interp_periodic(log_rho, psi[j]);
        std::vector<double> v = conjugate_function(u);
        double delta = 0;
        for (int j = 0; j < n_t; ++j) {
            double target = 2.0 * kPi * j / n_t + v[j];
            double next = psi[j] + omega * (target - psi[j]);
            delta = std::max(delta, std::abs(next - psi[j]));
            psi[j] = next;
        }
        if (delta < 1e-13) {
            converged = true;
            break;
        }
        // far-from-circular regions need a smaller relaxation factor
        if (delta > prev_delta) {
            if (++growth >= 3 && omega > 0.05) {
                omega *= 0.5;
                growth = 0;
            }
        } else {
            growth = 0;
        }
        prev_delta = delta;
    }
    if (!converged)
        throw NumericalError("build_conformal_map: boundary correspondence iteration stalled");
    for (int j = 0; j + 1 < n_t; ++j)
        if (psi[j + 1] <= psi[j])
            throw NumericalError("build_conformal_map: correspondence is not monotone");

    // invert psi(t) at the node polar angles -> boundary values e^{i t}
    auto nodes = flatten(path);
    ConformalMap map;
    map.path = path;
    map.center = a;
    map.boundary_values.resize(nodes.size());
    double psi0 = psi[0];
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        double ang = std::arg(nodes[k]->zeta - a);
        double shifted = ang - psi0;
        shifted -= std::floor(shifted / (2.0 * kPi)) * (2.0 * kPi);
        double target = psi0 + shifted;
        // binary search on the monotone table (psi[j] covers [psi0, psi0 + 2pi))
        int lo = 0, hi = n_t;  // virtual psi[n_t] = psi0 + 2pi
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            double pm = mid < n_t ? psi[mid] : psi0 + 2.0 * kPi;
            (pm <= target ? lo : hi) = mid;
        }
        double p_lo = psi[lo];
        double p_hi = lo + 1 < n_t ? psi[lo + 1] : psi0 + 2.0 * kPi;
        double t_lo = 2.0 * kPi * lo / n_t;
        double frac = p_hi > p_lo ? (target - p_lo) / (p_hi - p_lo) : 0.0;
        map.boundary_values[k] = std::polar(1.0, t_lo + frac * (2.0 * kPi / n_t));
    }

    // validation contract: Cauchy integral reproduces phi(a) = 0 and a
    // positive real derivative at a
    Complex val = map_point(map, a);
    if (std::abs(val) > 1e-6)
        throw NumericalError("build_conformal_map: Cauchy validation failed, |phi(a)| = " +
                             std::to_string(std::abs(val)));
    Complex deriv = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        Complex dz = nodes[k]->zeta - a;
        deriv += map.boundary_values[k] / (dz * dz) * nodes[k]->tangent * nodes[k]->ds;
    }
    deriv /= Complex(0, 1) * 2.0 * kPi;
    if (!(deriv.real() > 0) || std::abs(deriv.imag()) > 1e-4 * std::abs(deriv))
        throw NumericalError("build_conformal_map: derivative normalization check failed");
    return map;
}

Complex map_point(const ConformalMap& map, Complex z) {
    auto nodes = flatten(map.path);
    Complex sum = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k)
        sum += map.boundary_values[k] / (nodes[k]->zeta - z) * nodes[k]->tangent * nodes[k]->ds;
    return sum / (Complex(0, 1) * 2.0 * kPi);
}

CMatrix map_matrix(const ConformalMap& map, const CMatrix& a) {
    require_square(a, "map_matrix");
    const Complex scale = Complex(0, 1) * 2.0 * kPi;
    CMatrix phi_a = integrate_resolvent(a, map.path, [&](std::size_t k, const PathNode& nd) {
        return map.boundary_values[k] * nd.tangent * nd.ds / scale;
    });
    // spectral consistency: eig(phi(A)) must match phi at eig(A)
    Eigen::ComplexEigenSolver<CMatrix> ea(a, false), ep(phi_a, false);
    if (ea.info() != Eigen::Success || ep.info() != Eigen::Success)
        throw NumericalError("map_matrix: eigensolver failed");
    for (int i = 0; i < ea.eigenvalues().size(); ++i) {
        Complex want = map_point(map, ea.eigenvalues()(i));
        double best = 1e300;
        for (int j = 0; j < ep.eigenvalues().size(); ++j)
            best = std::min(best, std::abs(ep.eigenvalues()(j) - want));
        if (best > 1e-6)
            throw NumericalError("map_matrix: spectral mapping check failed (deviation " +
                                 std::to_string(best) + ")");
    }
    return phi_a;
}

Complex blaschke_eval(const BlaschkeProduct& b, Complex z) {
    Complex out = 1.0;
    for (Complex alpha : b.roots) out *= (z - alpha) / (1.0 - std::conj(alpha) * z);
    return out;
}

namespace {

void validate_blaschke(const BlaschkeProduct& b) {
    for (Complex alpha : b.roots)
        if (std::abs(alpha) > 1.0)
            throw Error("blaschke: root outside the closed unit disk");
    for (int j = 0; j < 64; ++j) {
        Complex z = std::polar(1.0, 2.0 * kPi * j / 64.0);
        if (std::abs(std::abs(blaschke_eval(b, z)) - 1.0) > 1e-10)
            throw NumericalError("blaschke: |B| != 1 on the unit circle");
    }
}

}  // namespace

CMatrix blaschke_matrix(const BlaschkeProduct& b, const CMatrix& m) {
    require_square(m, "blaschke_matrix");
    validate_blaschke(b);
    const int n = static_cast<int>(m.rows());
    CMatrix out = CMatrix::Identity(n, n);
    for (std::size_t j = 0; j < b.roots.size(); ++j) {
        Complex alpha = b.roots[j];
        CMatrix denom = CMatrix::Identity(n, n) - std::conj(alpha) * m;
        Eigen::PartialPivLU<CMatrix> lu(denom);
        CMatrix factor = lu.solve(CMatrix::Identity(n, n));
        if (!factor.allFinite())
            throw NumericalError("blaschke_matrix: singular factor at root " + std::to_string(j));
        out = out * ((m - alpha * CMatrix::Identity(n, n)) * factor);
    }
    return out;
}

namespace {

// Standard Nelder-Mead maximization; returns (best_value, best_x, iterations).
struct NelderMeadResult {
    double value = 0;
    std::vector<double> x;
    int iterations = 0;
};

NelderMeadResult nelder_mead_max(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x0, double step, int max_iter) {
    const std::size_t dim = x0.size();
    std::vector<std::vector<double>> xs(dim + 1, x0);
    for (std::size_t i = 0; i < dim; ++i) xs[i + 1][i] += step;
    std::vector<double> fs(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) fs[i] = f(xs[i]);

    int it = 0;
    for (; it < max_iter; ++it) {
        std::vector<std::size_t> ord(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](std::size_t u, std::size_t v) { return fs[u] > fs[v]; });
        if (fs[ord.front()] - fs[ord.back()] < 1e-11 * (1.0 + std::abs(fs[ord.front()]))) break;

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += xs[ord[i]][j] / dim;
        std::size_t worst = ord.back();

        auto affine = [&](double c) {
            std::vector<double> x(dim);
            for (std::size_t j = 0; j < dim; ++j)
                x[j] = centroid[j] + c * (xs[worst][j] - centroid[j]);
            return x;
        };
        std::vector<double> xr = affine(-1.0);
        double fr = f(xr);
        if (fr > fs[ord.front()]) {
            std::vector<double> xe = affine(-2.0);
            double fe = f(xe);
            if (fe > fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
        } else if (fr > fs[ord[dim - 1]]) {
            xs[worst] = xr;
            fs[worst] = fr;
        } else {
            std::vector<double> xc = affine(0.5);
            double fc = f(xc);
            if (fc > fs[worst]) {
                xs[worst] = xc;
                fs[worst] = fc;
            } else {
                for (std::size_t i = 1; i <= dim; ++i) {
                    for (std::size_t j = 0; j < dim; ++j)
                        xs[ord[i]][j] = 0.5 * (xs[ord[i]][j] + xs[ord[0]][j]);
                    fs[ord[i]] = f(xs[ord[i]]);
                }
            }
        }
    }
    NelderMeadResult out;
    std::size_t best = 0;
    for (std::size_t i = 1; i <= dim; ++i)
        if (fs[i] > fs[best]) best = i;
    out.value = fs[best];
    out.x = xs[best];
    out.iterations = it;
    return out;
}

std::vector<Complex> roots_from_params(const std::vector<double>& p) {
    std::vector<Complex> roots(p.size() / 2);
    for (std::size_t j = 0; j < roots.size(); ++j)
        roots[j] = std::tanh(p[2 * j]) * std::polar(1.0, p[2 * j + 1]);
    return roots;
}

std::vector<double> params_from_roots(const std::vector<Complex>& roots) {
    std::vector<double> p(roots.size() * 2);
    for (std::size_t j = 0; j < roots.size(); ++j) {
        double mag = std::min(std::abs(roots[j]), 1.0 - 1e-12);
        p[2 * j] = std::atanh(mag);
        p[2 * j + 1] = std::abs(roots[j]) > 0 ? std::arg(roots[j]) : 0.0;
    }
    return p;
}

}  // namespace

OptimizeResult optimize_lower_bound(const CMatrix& a, const RegionSpec& spec, int degree,
                                    int starts, std::uint64_t seed, const RegionOptions& opt) {
    require_square(a, "optimize_lower_bound");
    if (degree < 1 || degree > static_cast<int>(a.rows()) - 1)
        degree = std::max(1, std::min<int>(static_cast<int>(a.rows()) - 1, 8));
    if (starts < 1) starts = 20;

    RegionBuilder builder(a, spec, opt);
    {
        BoundaryPath probe = builder.build(0);
        int outer = 0;
        for (const auto& l : probe.loops)
            if (!l.hole) ++outer;
        if (probe.degenerate || outer != 1 || probe.loops.size() != 1)
            throw GeometryError("optimize_lower_bound: region must be simply connected");
    }
    Complex center = 0;
    for (int i = 0; i < builder.eigenvalues().size(); ++i) center += builder.eigenvalues()(i);
    center /= static_cast<double>(builder.eigenvalues().size());

    ConformalMap map;
    bool have_map = false;
    std::string last_err;
    for (int level = 0; level <= opt.max_levels && !have_map; ++level) {
        BoundaryPath path = builder.build(level);
        BoundaryPath smooth = smooth_corners(path, 1e-3 * path_diameter(path));
        if (quadrature_certificate(a, smooth) > opt.quad_tol) continue;
        try {
            map = build_conformal_map(smooth, center);
            have_map = true;
        } catch (const NumericalError& e) {
            last_err = e.what();
        }
    }
    if (!have_map)
        throw NumericalError("optimize_lower_bound: conformal map construction failed (" +
                             last_err + ")");

    CMatrix phi_a = map_matrix(map, a);

    std::vector<Complex> eig_images;
    for (int i = 0; i < builder.eigenvalues().size(); ++i)
        eig_images.push_back(map_point(map, builder.eigenvalues()(i)));

    auto objective = [&](const std::vector<double>& p) {
        BlaschkeProduct b{roots_from_params(p)};
        CMatrix bm;
        try {
            bm = blaschke_matrix(b, phi_a);
        } catch (const Error&) {
            return -1.0;
        }
        return spectral_norm_estimate(bm, 1e-10);
    };

    // deterministic start list (prefix-stable in `starts`)
    std::mt19937_64 eng(seed);
    auto uniform = [&]() { return (static_cast<double>(eng() >> 11)) * 0x1p-53; };
    std::vector<std::vector<double>> start_points;
    {
        std::vector<Complex> r0(degree);
        for (int j = 0; j < degree; ++j)
            r0[j] = eig_images.empty() ? Complex(0, 0)
                                       : eig_images[j % eig_images.size()] * 0.98;
        start_points.push_back(params_from_roots(r0));
    }
    start_points.push_back(std::vector<double>(2 * degree, 0.0));
    while (static_cast<int>(start_points.size()) < starts) {
        std::vector<double> p(2 * degree);
        for (int j = 0; j < degree; ++j) {
            p[2 * j] = 3.0 * uniform();
            p[2 * j + 1] = 2.0 * kPi * uniform();
        }
        start_points.push_back(std::move(p));
    }
    start_points.resize(starts);

    OptimizeResult out;
    out.starts.resize(starts);
    std::vector<NelderMeadResult> results(starts);
    parallel_for(static_cast<std::size_t>(starts), [&](std::size_t s) {
        results[s] = nelder_mead_max(objective, start_points[s], 0.35, 500);
    });
    out.K_lower = -1;
    for (int s = 0; s < starts; ++s) {
        out.starts[s] = {s, results[s].iterations, results[s].value};
        if (results[s].value > out.K_lower) {
            out.K_lower = results[s].value;
            out.roots = roots_from_params(results[s].x);
        }
    }
    return out;
}

}  // namespace specset
