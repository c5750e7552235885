#include "specset/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "specset/matops.hpp"
#include "specset/parallel.hpp"

namespace specset {

namespace {

constexpr double kPi = std::numbers::pi;

struct FlatNode {
    const PathNode* node;
    double s;  // cumulative arclength position
};

std::vector<FlatNode> flatten_with_arclength(const BoundaryPath& path) {
    std::vector<FlatNode> out;
    out.reserve(path.node_count());
    double s = 0;
    for (const auto& loop : path.loops) {
        for (std::size_t k = 0; k < loop.nodes.size(); ++k) {
            if (k > 0) s += std::abs(loop.nodes[k].zeta - loop.nodes[k - 1].zeta);
            out.push_back({&loop.nodes[k], s});
        }
        if (!loop.nodes.empty()) s += std::abs(loop.nodes.front().zeta - loop.nodes.back().zeta);
    }
    return out;
}

struct BulkIntegrals {
    double gamma_integral = 0;
    double cauchy_integral = 0;  // integral of ||R|| ds
    std::vector<TraceSample> traces;
};

// One fused pass: resolvent once per node, then lambda_min(mu), ||R||, and the
// subsampled kernel traces. Fixed-size chunks with an ordered reduction keep
// results identical for any worker count.
BulkIntegrals bulk_integrals(const CMatrix& a, const BoundaryPath& path,
                             std::size_t trace_samples) {
    const int n = static_cast<int>(a.rows());
    auto nodes = flatten_with_arclength(path);
    const std::size_t total = nodes.size();
    const std::size_t stride =
        trace_samples == 0 ? total + 1 : std::max<std::size_t>(1, total / trace_samples);

    const std::size_t chunk = 512;
    const std::size_t nchunks = (total + chunk - 1) / chunk;
    std::vector<double> gamma_part(nchunks, 0.0), cauchy_part(nchunks, 0.0);
    std::vector<std::vector<TraceSample>> trace_part(nchunks);

    parallel_for(nchunks, [&](std::size_t c) {
        double gsum = 0, csum = 0;
        CMatrix shifted(n, n);
        std::size_t end = std::min(total, (c + 1) * chunk);
        for (std::size_t k = c * chunk; k < end; ++k) {
            const PathNode& nd = *nodes[k].node;
            shifted = -a;
            shifted.diagonal().array() += nd.zeta;
            Eigen::PartialPivLU<CMatrix> lu(shifted);
            CMatrix r = lu.solve(CMatrix::Identity(n, n));
            if (!r.allFinite())
                throw NumericalError("bounds: singular resolvent at node (" +
                                     std::to_string(nd.zeta.real()) + "," +
                                     std::to_string(nd.zeta.imag()) + ")");
            Eigen::SelfAdjointEigenSolver<CMatrix> es(
                hermitian_part(Complex(0, -1) * nd.tangent * r), Eigen::EigenvaluesOnly);
            if (es.info() != Eigen::Success)
                throw NumericalError("bounds: eigensolver failed during integration");
            double mu_lambda_min = es.eigenvalues().minCoeff() / kPi;
            double rnorm = spectral_norm_estimate(r, 1e-10);
            gsum += std::max(0.0, -mu_lambda_min) * nd.ds;
            csum += rnorm * nd.ds;
            if (k % stride == 0) {
                TraceSample t;
                t.s = nodes[k].s;
                t.kind = nd.kind;
                t.sample.zeta = nd.zeta;
                t.sample.tangent = nd.tangent;
                t.sample.mu_lambda_min = mu_lambda_min;
                t.sample.resolvent_norm = rnorm;
                t.sample.numerical_radius_resolvent = numerical_radius(r);
                trace_part[c].push_back(t);
            }
        }
        gamma_part[c] = gsum;
        cauchy_part[c] = csum;
    });

    BulkIntegrals out;
    for (std::size_t c = 0; c < nchunks; ++c) {
        out.gamma_integral += gamma_part[c];
        out.cauchy_integral += cauchy_part[c];
        for (auto& t : trace_part[c]) out.traces.push_back(std::move(t));
    }
    return out;
}

}  // namespace

std::pair<double, Complex> c1_upper(const BoundaryPath& path) {
    // candidate base points: distinct node positions (corner twins collapse)
    std::vector<Complex> candidates;
    double tol = 1e-13 * path_diameter(path);
    for (const auto& loop : path.loops)
        for (const auto& nd : loop.nodes) {
            if (!candidates.empty() && std::abs(nd.zeta - candidates.back()) <= tol) continue;
            candidates.push_back(nd.zeta);
        }
    if (candidates.empty()) throw Error("c1_upper: empty path");

    std::vector<double> values(candidates.size());
    parallel_for(candidates.size(),
                 [&](std::size_t i) { values[i] = total_argument_variation(path, candidates[i]); });
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    double c1 = values[best];
    Complex argmax = candidates[best];

    // one local refinement round: midpoints of the chords adjacent to the winner
    const Loop* win_loop = nullptr;
    std::size_t win_idx = 0;
    double win_dist = 1e300;
    for (const auto& loop : path.loops)
        for (std::size_t k = 0; k < loop.nodes.size(); ++k) {
            double d = std::abs(loop.nodes[k].zeta - argmax);
            if (d < win_dist) {
                win_dist = d;
                win_loop = &loop;
                win_idx = k;
            }
        }
    if (win_loop) {
        const std::size_t m = win_loop->nodes.size();
        for (int off = -2; off <= 1; ++off) {
            std::size_t k = (win_idx + m + static_cast<std::size_t>(off + 2) - 2) % m;
            const PathNode& p1 = win_loop->nodes[k];
            const PathNode& p2 = win_loop->nodes[(k + 1) % m];
            if (std::abs(p2.zeta - p1.zeta) <= tol) continue;
            Complex mid;
            if (p1.circle >= 0 && p1.circle == p2.circle) {
                const CircleRef& c = path.circles[p1.circle];
                double dphi = std::remainder(p2.arc_angle - p1.arc_angle, 2.0 * kPi);
                mid = c.center + c.radius * std::polar(1.0, p1.arc_angle + 0.5 * dphi);
            } else {
                mid = 0.5 * (p1.zeta + p2.zeta);
            }
            double v = total_argument_variation(path, mid);
            if (v > c1) {
                c1 = v;
                argmax = mid;
            }
        }
    }
    return {c1, argmax};
}

std::pair<double, double> c2_upper(const CMatrix& a, const BoundaryPath& path) {
    auto bulk = bulk_integrals(a, path, 0);
    return {1.0 + bulk.gamma_integral, bulk.gamma_integral};
}

double k_from_c(double c1, double c2) {
    if (c1 < 0 || c2 < 0) throw Error("k_from_c: c1 and c2 must be nonnegative");
    return c2 + std::sqrt(c2 * c2 + c1);
}

double k_cauchy(const CMatrix& a, const BoundaryPath& path) {
    auto bulk = bulk_integrals(a, path, 0);
    return bulk.cauchy_integral / (2.0 * kPi);
}

double k_pseudo_closedform(const BoundaryPath& path, double eps) {
    if (eps <= 0) throw Error("k_pseudo_closedform: eps must be positive");
    return path.perimeter() / (2.0 * kPi * eps);
}

double k_multidisk_closedform(int m, const std::vector<int>& p) {
    if (m < 1) throw Error("k_multidisk_closedform: m >= 1 required");
    if (static_cast<int>(p.size()) != m)
        throw Error("k_multidisk_closedform: p must have m entries");
    int sum = 0;
    for (int pj : p) {
        if (pj != 1 && pj != 2) throw Error("k_multidisk_closedform: p_j must be 1 or 2");
        sum += pj;
    }
    double base = 1.0 + sum;
    return base + std::sqrt(base * base + 2.0 * m + 1.0);
}

BoundReport full_report(const CMatrix& a, const RegionSpec& spec, const RegionOptions& opt) {
    return full_report(RegionBuilder(a, spec, opt));
}

BoundReport full_report(const RegionBuilder& builder) {
    const RegionOptions& opt = builder.options();
    const RegionSpec& spec = builder.spec();
    const CMatrix& a = builder.matrix();

    BoundaryPath level0 = builder.build(0);
    if (level0.degenerate)
        throw GeometryError("full_report: region is degenerate (zero area); bounds undefined");

    BoundaryPath path = level0;
    double cert = quadrature_certificate(a, path);
    int level = 0;
    while (cert > opt.quad_tol) {
        ++level;
        if (level > opt.max_levels)
            throw NumericalError("full_report: quadrature certificate did not reach tol " +
                                 std::to_string(opt.quad_tol) + " (last " +
                                 std::to_string(cert) + ")");
        path = builder.build(level);
        cert = quadrature_certificate(a, path);
    }

    BoundReport rep;
    rep.refine_level = level;
    rep.nodes = path.node_count();
    rep.quadrature_certificate = cert;
    rep.applied_margin = builder.applied_margin();
    rep.components = connectivity_components(level0);

    auto [c1, argmax] = c1_upper(level0);
    rep.c1 = c1;
    rep.argmax_zeta0 = argmax;

    auto bulk = bulk_integrals(a, path, static_cast<std::size_t>(opt.trace_samples));
    rep.gamma_integral = bulk.gamma_integral;
    rep.c2 = 1.0 + bulk.gamma_integral;
    rep.K_cauchy = bulk.cauchy_integral / (2.0 * kPi);
    rep.K_main = k_from_c(rep.c1, rep.c2);
    rep.traces = std::move(bulk.traces);
    rep.trace_stride = opt.trace_samples == 0
                           ? rep.nodes + 1
                           : std::max<std::size_t>(1, rep.nodes / opt.trace_samples);

    if (spec.base == RegionSpec::Base::Pseudospectrum)
        rep.K_pseudo = k_pseudo_closedform(path, spec.eps);

    if (spec.base == RegionSpec::Base::NumericalRange && !builder.disks().empty() &&
        spec.clips.empty()) {
        bool all_rule = true;
        std::vector<int> p;
        for (const auto& d : builder.disks()) {
            if (d.rule == DiskRule::Explicit) {
                all_rule = false;
                break;
            }
            p.push_back(d.rule == DiskRule::Norm ? 1 : 2);
        }
        if (all_rule)
            rep.K_closedform = k_multidisk_closedform(static_cast<int>(p.size()), p);
    }
    return rep;
}

}  // namespace specset
