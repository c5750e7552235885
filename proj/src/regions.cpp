#include "specset/regions.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <unordered_map>

#include "specset/matops.hpp"
#include "specset/parallel.hpp"

namespace specset {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_positive(double a) {
    double w = std::fmod(a, 2.0 * kPi);
    if (w <= 0) w += 2.0 * kPi;
    return w;
}

double signed_area(const Loop& loop) {
    double s = 0;
    const std::size_t m = loop.nodes.size();
    for (std::size_t k = 0; k < m; ++k) {
        Complex a = loop.nodes[k].zeta, b = loop.nodes[(k + 1) % m].zeta;
        s += a.real() * b.imag() - b.real() * a.imag();
    }
    return 0.5 * s;
}

double median_spacing(const BoundaryPath& path) {
    std::vector<double> ds;
    for (const auto& loop : path.loops)
        for (const auto& n : loop.nodes)
            if (n.ds > 0) ds.push_back(n.ds);
    if (ds.empty()) return 1e-2;
    std::nth_element(ds.begin(), ds.begin() + ds.size() / 2, ds.end());
    return std::max(ds[ds.size() / 2], 1e-14);
}

// ---------------------------------------------------------------------------
// Generic cut-and-stitch: subtract or intersect one circle/line constraint.
// The kept side has f > 0; the cut curve is traversed so the region stays on
// the left (removal circles clockwise, clip circles counter-clockwise, lines
// along i * outward_normal).
// ---------------------------------------------------------------------------

struct CutShape {
    bool is_circle = true;
    Complex center;
    double radius = 0;
    bool keep_inside = false;  // circle only
    Complex point;             // line only
    Complex normal;            // line only, unit outward normal of the kept side
    PieceKind kind = PieceKind::Hole;

    double f(Complex z) const {
        if (is_circle) {
            double d = std::abs(z - center);
            return keep_inside ? radius - d : d - radius;
        }
        return -((z - point) * std::conj(normal)).real();
    }

    Complex line_dir() const { return Complex(0, 1) * normal; }

    double param(Complex z) const {
        if (is_circle) return std::arg(z - center);
        return ((z - point) * std::conj(line_dir())).real();
    }

    Complex point_at(double p) const {
        if (is_circle) return center + radius * std::polar(1.0, p);
        return point + p * line_dir();
    }

    Complex tangent_at(double p) const {
        if (is_circle)
            return (keep_inside ? Complex(0, 1) : Complex(0, -1)) * std::polar(1.0, p);
        return line_dir();
    }

    bool clockwise() const { return is_circle && !keep_inside; }

    // positive sweep from p1 to p2 in traversal direction (circles)
    double sweep(double p1, double p2) const {
        return clockwise() ? wrap_positive(p1 - p2) : wrap_positive(p2 - p1);
    }

    void chord_roots(Complex a, Complex b, std::vector<double>& out) const {
        out.clear();
        Complex d = b - a;
        double len2 = std::norm(d);
        if (len2 == 0) return;
        if (is_circle) {
            Complex v = a - center;
            double bb = 2.0 * (std::conj(d) * v).real();
            double cc = std::norm(v) - radius * radius;
            double disc = bb * bb - 4.0 * len2 * cc;
            if (disc <= 0) return;
            double sq = std::sqrt(disc);
            double t1 = (-bb - sq) / (2.0 * len2);
            double t2 = (-bb + sq) / (2.0 * len2);
            for (double t : {t1, t2})
                if (t > 1e-12 && t < 1.0 - 1e-12) out.push_back(t);
            std::sort(out.begin(), out.end());
        } else {
            double fa = f(a), fb = f(b);
            if ((fa > 0) == (fb > 0)) return;
            double t = fa / (fa - fb);
            if (t > 1e-12 && t < 1.0 - 1e-12) out.push_back(t);
        }
    }
};

// Exact circle-circle intersection nearest to a first guess; falls back to
// the guess when the circles are nearly tangent.
Complex circle_circle_refine(const CircleRef& c1, Complex c2, double r2, Complex guess) {
    Complex d = c2 - c1.center;
    double dist = std::abs(d);
    if (dist < 1e-300) return guess;
    double a = (dist * dist + c1.radius * c1.radius - r2 * r2) / (2.0 * dist);
    double h2 = c1.radius * c1.radius - a * a;
    if (h2 <= 0) return guess;
    Complex base = c1.center + a * d / dist;
    Complex off = Complex(0, 1) * (d / dist) * std::sqrt(h2);
    return std::abs(base + off - guess) < std::abs(base - off - guess) ? base + off : base - off;
}

// Exact line-circle intersection nearest to a first guess.
Complex line_circle_refine(const CircleRef& c, Complex p, Complex dir, Complex guess) {
    double t0 = ((c.center - p) * std::conj(dir)).real();
    Complex foot = p + t0 * dir;
    double h2 = c.radius * c.radius - std::norm(foot - c.center);
    if (h2 <= 0) return guess;
    double h = std::sqrt(h2);
    Complex p1 = foot + h * dir, p2 = foot - h * dir;
    return std::abs(p1 - guess) < std::abs(p2 - guess) ? p1 : p2;
}

struct CutEvent {
    std::size_t loop = 0, edge = 0;
    double t = 0;
    Complex point;
    double param = 0;
};

struct Piece {
    int start_event = -1, end_event = -1;  // -1 for whole-loop pieces
    std::vector<PathNode> nodes;
};

BoundaryPath apply_cut(const BoundaryPath& path, const CutShape& cut) {
    if (path.degenerate)
        throw GeometryError("region cut: cannot cut a degenerate (zero-area) region");
    const double scale = path_diameter(path);
    const double spacing = median_spacing(path);
    const char* what = cut.kind == PieceKind::Hole ? "remove_disks" : "clip_region";

    // Nodes can land exactly on the cut curve (a circle clipped by a line
    // through its poles, say). Displace them infinitesimally to the kept side
    // so every crossing falls strictly inside a chord.
    BoundaryPath adjusted;
    const BoundaryPath* src = &path;
    {
        const double snap = 1e-12 * scale;
        const double push = 1e-10 * scale;
        bool touched = false;
        for (const auto& loop : path.loops)
            for (const auto& n : loop.nodes)
                if (std::abs(cut.f(n.zeta)) < snap) touched = true;
        if (touched) {
            adjusted = path;
            for (auto& loop : adjusted.loops)
                for (auto& n : loop.nodes) {
                    if (std::abs(cut.f(n.zeta)) >= snap) continue;
                    Complex dir;  // direction of increasing f (toward kept side)
                    if (cut.is_circle) {
                        Complex radial = n.zeta - cut.center;
                        double m = std::abs(radial);
                        if (m < 1e-300) continue;
                        dir = (cut.keep_inside ? -radial : radial) / m;
                    } else {
                        dir = -cut.normal;
                    }
                    n.zeta += push * dir;
                }
            src = &adjusted;
        }
    }
    const BoundaryPath& work = *src;

    BoundaryPath out;
    out.circles = path.circles;
    out.degenerate = false;
    int cut_circle_index = -1;
    if (cut.is_circle) {
        cut_circle_index = static_cast<int>(out.circles.size());
        out.circles.push_back({cut.center, cut.radius, cut.clockwise()});
    }

    // 1. crossings per loop
    std::vector<CutEvent> events;
    std::vector<std::vector<int>> loop_events(work.loops.size());
    std::vector<double> roots;
    for (std::size_t li = 0; li < work.loops.size(); ++li) {
        const Loop& loop = work.loops[li];
        const std::size_t m = loop.nodes.size();
        for (std::size_t k = 0; k < m; ++k) {
            const PathNode& a = loop.nodes[k];
            const PathNode& b = loop.nodes[(k + 1) % m];
            cut.chord_roots(a.zeta, b.zeta, roots);
            for (double t : roots) {
                CutEvent ev;
                ev.loop = li;
                ev.edge = k;
                ev.t = t;
                ev.point = a.zeta + t * (b.zeta - a.zeta);
                // exact refinement when the crossed edge sits on a known circle
                if (a.circle >= 0 && a.circle == b.circle) {
                    const CircleRef& host = work.circles[a.circle];
                    ev.point = cut.is_circle
                                   ? circle_circle_refine(host, cut.center, cut.radius, ev.point)
                                   : line_circle_refine(host, cut.point, cut.line_dir(), ev.point);
                }
                ev.param = cut.param(ev.point);
                loop_events[li].push_back(static_cast<int>(events.size()));
                events.push_back(ev);
            }
        }
        std::sort(loop_events[li].begin(), loop_events[li].end(), [&](int x, int y) {
            return std::make_pair(events[x].edge, events[x].t) <
                   std::make_pair(events[y].edge, events[y].t);
        });
    }

    std::vector<Piece> pieces;

    // 2. kept runs of the original boundary
    for (std::size_t li = 0; li < work.loops.size(); ++li) {
        const Loop& loop = work.loops[li];
        const std::size_t m = loop.nodes.size();
        const auto& evs = loop_events[li];
        if (evs.empty()) {
            // whole loop kept or dropped; sample the node farthest from the curve
            double best = -1;
            double fbest = 0;
            for (const auto& n : loop.nodes) {
                double v = cut.f(n.zeta);
                if (std::abs(v) > best) {
                    best = std::abs(v);
                    fbest = v;
                }
            }
            if (fbest > 0) {
                Piece p;
                p.nodes = loop.nodes;
                pieces.push_back(std::move(p));
            }
            continue;
        }
        const std::size_t ne = evs.size();
        for (std::size_t i = 0; i < ne; ++i) {
            const CutEvent& e1 = events[evs[i]];
            const CutEvent& e2 = events[evs[(i + 1) % ne]];
            // interior node indices (cyclic): edge e1.edge+1 .. e2.edge
            std::vector<std::size_t> interior;
            std::size_t k = (e1.edge + 1) % m;
            std::size_t steps = (e2.edge + m - e1.edge) % m;
            if (steps == 0 && !(e2.edge == e1.edge && e2.t > e1.t)) steps = m;  // full wrap
            for (std::size_t s = 0; s < steps; ++s) {
                interior.push_back(k);
                k = (k + 1) % m;
            }
            double fs;
            if (!interior.empty()) {
                double best = -1;
                fs = 0;
                for (std::size_t idx : interior) {
                    double v = cut.f(loop.nodes[idx].zeta);
                    if (std::abs(v) > best) {
                        best = std::abs(v);
                        fs = v;
                    }
                }
            } else {
                fs = cut.f(0.5 * (e1.point + e2.point));
            }
            if (fs <= 0) continue;

            Piece p;
            p.start_event = evs[i];
            p.end_event = evs[(i + 1) % ne];
            auto edge_entry_node = [&](const CutEvent& ev, bool at_start) {
                const PathNode& ea = loop.nodes[ev.edge];
                const PathNode& eb = loop.nodes[(ev.edge + 1) % m];
                PathNode nd;
                nd.zeta = ev.point;
                nd.corner = true;
                nd.kind = ea.kind;
                if (ea.circle >= 0 && ea.circle == eb.circle) {
                    const CircleRef& host = work.circles[ea.circle];
                    nd.circle = ea.circle;
                    nd.arc_angle = std::arg(ev.point - host.center);
                    nd.tangent = (host.clockwise ? Complex(0, -1) : Complex(0, 1)) *
                                 std::polar(1.0, nd.arc_angle);
                } else {
                    nd.tangent = unit_phase(eb.zeta - ea.zeta);
                }
                (void)at_start;
                return nd;
            };
            p.nodes.push_back(edge_entry_node(e1, true));
            for (std::size_t idx : interior) p.nodes.push_back(loop.nodes[idx]);
            p.nodes.push_back(edge_entry_node(e2, false));
            pieces.push_back(std::move(p));
        }
    }

    // 3. connectors along the cut curve
    bool any_connector = false;
    if (!events.empty()) {
        std::vector<int> order(events.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            return (cut.clockwise() ? -events[x].param : events[x].param) <
                   (cut.clockwise() ? -events[y].param : events[y].param);
        });
        std::size_t ncand = cut.is_circle ? order.size() : order.size() - 1;
        for (std::size_t i = 0; i < ncand; ++i) {
            const CutEvent& e1 = events[order[i]];
            const CutEvent& e2 = events[order[(i + 1) % order.size()]];
            double arclen;
            double pmid;
            if (cut.is_circle) {
                double sw = cut.sweep(e1.param, e2.param);
                if (sw <= 0 || sw >= 2.0 * kPi) sw = 2.0 * kPi;
                arclen = sw * cut.radius;
                pmid = cut.clockwise() ? e1.param - 0.5 * sw : e1.param + 0.5 * sw;
            } else {
                arclen = e2.param - e1.param;
                pmid = 0.5 * (e1.param + e2.param);
            }
            if (!region_contains(work, cut.point_at(pmid))) continue;
            any_connector = true;

            Piece p;
            p.start_event = order[i];
            p.end_event = order[(i + 1) % order.size()];
            int segs = std::max(1, static_cast<int>(std::ceil(arclen / spacing)));
            auto connector_node = [&](double pr, Complex pos, bool corner) {
                PathNode nd;
                nd.zeta = pos;
                nd.tangent = cut.tangent_at(pr);
                nd.kind = cut.kind;
                nd.corner = corner;
                if (cut.is_circle) {
                    nd.circle = cut_circle_index;
                    nd.arc_angle = std::arg(pos - cut.center);
                }
                return nd;
            };
            p.nodes.push_back(connector_node(e1.param, e1.point, true));
            for (int s = 1; s < segs; ++s) {
                double pr;
                if (cut.is_circle) {
                    double sw = cut.sweep(e1.param, e2.param);
                    if (sw <= 0 || sw >= 2.0 * kPi) sw = 2.0 * kPi;
                    pr = cut.clockwise() ? e1.param - sw * s / segs : e1.param + sw * s / segs;
                } else {
                    pr = e1.param + (e2.param - e1.param) * s / segs;
                }
                p.nodes.push_back(connector_node(pr, cut.point_at(pr), false));
            }
            p.nodes.push_back(connector_node(e2.param, e2.point, true));
            pieces.push_back(std::move(p));
        }
    }

    // 4. whole-curve special cases (no crossings)
    if (events.empty()) {
        bool center_in_region = cut.is_circle && region_contains(work, cut.center);
        if (cut.is_circle && !cut.keep_inside) {
            bool any_kept = !pieces.empty();
            if (center_in_region && distance_to_path(work, cut.center) > cut.radius) {
                // disk strictly interior: new clockwise hole loop
                Loop hole;
                hole.hole = true;
                int m = std::max<int>(24, static_cast<int>(std::ceil(2.0 * kPi * cut.radius / spacing)));
                for (int j = 0; j < m; ++j) {
                    double phi = -2.0 * kPi * j / m;
                    PathNode nd;
                    nd.zeta = cut.center + cut.radius * std::polar(1.0, phi);
                    nd.tangent = Complex(0, -1) * std::polar(1.0, phi);
                    nd.kind = PieceKind::Hole;
                    nd.circle = cut_circle_index;
                    nd.arc_angle = phi;
                    hole.nodes.push_back(nd);
                }
                assign_weights(hole, out.circles);
                for (auto& piece : pieces) {
                    Loop l;
                    l.nodes = std::move(piece.nodes);
                    assign_weights(l, out.circles);
                    l.hole = signed_area(l) < 0;
                    out.loops.push_back(std::move(l));
                }
                out.loops.push_back(std::move(hole));
                return out;
            }
            if (!any_kept)
                throw GeometryError("remove_disks: disk covers the whole region");
            if (!center_in_region)
                throw GeometryError("remove_disks: disk does not intersect the region");
        } else if (cut.is_circle && cut.keep_inside) {
            if (!pieces.empty()) {
                // region entirely inside the clip disk: unchanged
            } else if (center_in_region) {
                // clip disk strictly interior: the disk becomes the region
                Loop l;
                int m = std::max<int>(24, static_cast<int>(std::ceil(2.0 * kPi * cut.radius / spacing)));
                for (int j = 0; j < m; ++j) {
                    double phi = 2.0 * kPi * j / m;
                    PathNode nd;
                    nd.zeta = cut.center + cut.radius * std::polar(1.0, phi);
                    nd.tangent = Complex(0, 1) * std::polar(1.0, phi);
                    nd.kind = PieceKind::Clip;
                    nd.circle = cut_circle_index;
                    nd.arc_angle = phi;
                    l.nodes.push_back(nd);
                }
                assign_weights(l, out.circles);
                out.loops.push_back(std::move(l));
                return out;
            } else {
                throw GeometryError("clip_region: empty intersection with the clip disk");
            }
        } else if (pieces.empty()) {
            throw GeometryError("clip_region: empty intersection with the half-plane");
        }
    }

    // 5. stitch pieces into loops
    std::unordered_map<int, int> out_by_event;
    std::vector<Piece> closed;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (pieces[i].start_event < 0) {
            closed.push_back(std::move(pieces[i]));
            continue;
        }
        if (!out_by_event.emplace(pieces[i].start_event, static_cast<int>(i)).second)
            throw GeometryError(std::string(what) + ": non-transversal intersection (duplicate outgoing piece)");
    }
    std::vector<bool> used(pieces.size(), false);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (used[i] || pieces[i].start_event < 0 || pieces[i].nodes.empty()) continue;
        Loop l;
        int cur = static_cast<int>(i);
        int guard = 0;
        for (;;) {
            if (used[cur])
                throw GeometryError(std::string(what) + ": stitching failed (piece reuse)");
            used[cur] = true;
            for (const auto& nd : pieces[cur].nodes) l.nodes.push_back(nd);
            int next_event = pieces[cur].end_event;
            if (next_event == pieces[static_cast<std::size_t>(i)].start_event) break;
            auto it = out_by_event.find(next_event);
            if (it == out_by_event.end())
                throw GeometryError(std::string(what) + ": stitching failed (open boundary)");
            cur = it->second;
            if (++guard > static_cast<int>(pieces.size()) + 2)
                throw GeometryError(std::string(what) + ": stitching failed (cycle overrun)");
        }
        assign_weights(l, out.circles);
        l.hole = signed_area(l) < 0;
        out.loops.push_back(std::move(l));
    }
    for (auto& piece : closed) {
        Loop l;
        l.nodes = std::move(piece.nodes);
        assign_weights(l, out.circles);
        l.hole = signed_area(l) < 0;
        out.loops.push_back(std::move(l));
    }
    if (!any_connector && !events.empty())
        throw GeometryError(std::string(what) + ": no retained cut arc (degenerate geometry)");
    if (out.loops.empty())
        throw GeometryError(std::string(what) + ": empty result region");
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Numerical range boundary (support-function method)
// ---------------------------------------------------------------------------

namespace {

struct SupportSample {
    bool facet = false;
    Complex p1, p2;  // p2 valid only on facets (inserted after p1)
};

BoundaryPath build_ribbon(const std::vector<Complex>& pts) {
    // principal direction through the centroid
    Complex c = 0;
    for (Complex p : pts) c += p;
    c /= static_cast<double>(pts.size());
    double sxx = 0, sxy = 0, syy = 0;
    for (Complex p : pts) {
        double dx = p.real() - c.real(), dy = p.imag() - c.imag();
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    double half = 0.5 * (sxx + syy);
    double disc = std::sqrt(std::max(0.0, 0.25 * (sxx - syy) * (sxx - syy) + sxy * sxy));
    double l1 = half + disc;
    Complex dir = (std::abs(sxy) > 1e-300) ? unit_phase(Complex(l1 - syy, sxy))
                                           : (sxx >= syy ? Complex(1, 0) : Complex(0, 1));
    double lo = 1e300, hi = -1e300;
    for (Complex p : pts) {
        double t = ((p - c) * std::conj(dir)).real();
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    Complex a = c + lo * dir, b = c + hi * dir;

    BoundaryPath out;
    out.degenerate = true;
    Loop l;
    const int k = 32;
    auto add_side = [&](Complex from, Complex to, Complex tan) {
        for (int j = 0; j <= k; ++j) {
            PathNode nd;
            nd.zeta = from + (to - from) * (static_cast<double>(j) / k);
            nd.tangent = tan;
            nd.corner = (j == 0 || j == k);
            l.nodes.push_back(nd);
        }
    };
    add_side(a, b, unit_phase(b - a));
    add_side(b, a, unit_phase(a - b));
    assign_weights(l, {});
    out.loops.push_back(std::move(l));
    return out;
}

}  // namespace

BoundaryPath numerical_range_boundary(const CMatrix& a, int n_angles, double margin) {
    require_square(a, "numerical_range_boundary");
    if (n_angles < 4) throw Error("numerical_range_boundary: need at least 4 angles");
    const int n = static_cast<int>(a.rows());
    const double scale_a = std::max(1.0, a.norm());

    std::vector<SupportSample> samples(n_angles);
    parallel_for(static_cast<std::size_t>(n_angles), [&](std::size_t j) {
        double theta = 2.0 * kPi * static_cast<double>(j) / n_angles;
        Complex rot = std::polar(1.0, -theta);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(rot * a));
        if (es.info() != Eigen::Success)
            throw NumericalError("numerical_range_boundary: eigensolver failed");
        const auto& ev = es.eigenvalues();
        double lmax = ev(n - 1);
        int first = n - 1;
        while (first > 0 && lmax - ev(first - 1) < 1e-10 * scale_a) --first;
        SupportSample& s = samples[j];
        if (first == n - 1 || n == 1) {
            CVector q = es.eigenvectors().col(n - 1);
            s.p1 = (q.adjoint() * (a * q))(0);
        } else {
            // flat facet: extreme points of the compressed block along the facet
            int k = n - first;
            CMatrix q = es.eigenvectors().rightCols(k);
            CMatrix b = q.adjoint() * a * q;
            Eigen::SelfAdjointEigenSolver<CMatrix> fs(hermitian_part(Complex(0, -1) * rot * b));
            if (fs.info() != Eigen::Success)
                throw NumericalError("numerical_range_boundary: facet eigensolver failed");
            CVector u1 = q * fs.eigenvectors().col(0);
            CVector u2 = q * fs.eigenvectors().col(k - 1);
            Complex z1 = (u1.adjoint() * (a * u1))(0);
            Complex z2 = (u2.adjoint() * (a * u2))(0);
            // insert the lower tangential coordinate first (CCW order)
            if ((Complex(0, -1) * rot * z1).real() <= (Complex(0, -1) * rot * z2).real()) {
                s.p1 = z1;
                s.p2 = z2;
            } else {
                s.p1 = z2;
                s.p2 = z1;
            }
            s.facet = true;
        }
    });

    std::vector<Complex> pts;
    std::vector<double> normals;
    pts.reserve(static_cast<std::size_t>(n_angles) + 8);
    for (int j = 0; j < n_angles; ++j) {
        double theta = 2.0 * kPi * j / n_angles;
        Complex off = margin * std::polar(1.0, theta);
        pts.push_back(samples[j].p1 + off);
        normals.push_back(theta);
        if (samples[j].facet) {
            pts.push_back(samples[j].p2 + off);
            normals.push_back(theta);
        }
    }

    // drop consecutive duplicates (support points pile up at hull corners)
    double diam = 0;
    for (Complex p : pts)
        for (Complex q : {pts.front(), pts.back()}) diam = std::max(diam, std::abs(p - q));
    {
        double lox = 1e300, hix = -1e300, loy = 1e300, hiy = -1e300;
        for (Complex p : pts) {
            lox = std::min(lox, p.real());
            hix = std::max(hix, p.real());
            loy = std::min(loy, p.imag());
            hiy = std::max(hiy, p.imag());
        }
        diam = std::max(diam, std::hypot(hix - lox, hiy - loy));
    }
    if (diam <= 0) diam = std::max(1.0, std::abs(pts.front()));
    double tol = 1e-13 * diam;
    std::vector<Complex> dedup;
    std::vector<double> dedup_normals;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!dedup.empty() && std::abs(pts[i] - dedup.back()) <= tol) continue;
        dedup.push_back(pts[i]);
        dedup_normals.push_back(normals[i]);
    }
    while (dedup.size() > 1 && std::abs(dedup.front() - dedup.back()) <= tol) {
        dedup.pop_back();
        dedup_normals.pop_back();
    }

    if (dedup.size() < 3) {
        // all support points coincide: W(A) is a single point
        return build_ribbon(pts);
    }
    // collinearity check (Hermitian-like spectra give a segment)
    {
        Complex d = unit_phase(dedup[1] - dedup[0]);
        double dev = 0;
        for (Complex p : dedup) dev = std::max(dev, std::abs(((p - dedup[0]) * std::conj(d)).imag()));
        if (dev < 1e-12 * diam) return build_ribbon(dedup);
    }

    // flat facets collapse whole normal fans onto single hull vertices,
    // leaving long straight gaps with no quadrature nodes; subdivide them so
    // refinement actually shrinks the spacing everywhere
    double perim = 0;
    for (std::size_t i = 0; i < dedup.size(); ++i)
        perim += std::abs(dedup[(i + 1) % dedup.size()] - dedup[i]);
    double target = perim / std::max(8, n_angles);

    BoundaryPath out;
    Loop l;
    l.nodes.reserve(dedup.size() + 16);
    for (std::size_t i = 0; i < dedup.size(); ++i) {
        PathNode nd;
        nd.zeta = dedup[i];
        nd.tangent = Complex(0, 1) * std::polar(1.0, dedup_normals[i]);
        nd.kind = PieceKind::Base;
        l.nodes.push_back(nd);
        Complex next = dedup[(i + 1) % dedup.size()];
        double gap = std::abs(next - dedup[i]);
        if (gap > 2.0 * target) {
            int pieces = static_cast<int>(std::ceil(gap / target));
            Complex dir = unit_phase(next - dedup[i]);
            for (int s = 1; s < pieces; ++s) {
                PathNode fill;
                fill.zeta = dedup[i] + (next - dedup[i]) * (static_cast<double>(s) / pieces);
                fill.tangent = dir;
                fill.kind = PieceKind::Base;
                l.nodes.push_back(fill);
            }
        }
    }
    assign_weights(l, {});
    out.loops.push_back(std::move(l));
    return out;
}

double disk_radius(const CMatrix& a, Complex xi, DiskRule rule) {
    require_square(a, "disk_radius");
    if (rule == DiskRule::Explicit) throw Error("disk_radius: rule must be norm or numrad");
    const int n = static_cast<int>(a.rows());
    CMatrix shifted = a;
    shifted.diagonal().array() -= xi;
    double smin = sigma_min(shifted);
    if (smin <= 1e-14 * std::max(1.0, operator_norm(a)))
        throw GeometryError("disk_radius: xi is (numerically) an eigenvalue of A");
    if (rule == DiskRule::Norm) return smin;  // = 1/||(A - xi I)^{-1}||
    (void)n;
    return 1.0 / numerical_radius(resolvent(a, xi));  // w(M) = w(-M)
}

BoundaryPath remove_disks(const BoundaryPath& base, const std::vector<Disk>& disks) {
    BoundaryPath path = base;
    for (const auto& d : disks) {
        if (d.radius <= 0) throw GeometryError("remove_disks: disk radius must be positive");
        CutShape cut;
        cut.is_circle = true;
        cut.center = d.center;
        cut.radius = d.radius;
        cut.keep_inside = false;
        cut.kind = PieceKind::Hole;
        path = apply_cut(path, cut);
    }
    return path;
}

BoundaryPath clip_region(const BoundaryPath& base, const Clip& clip) {
    CutShape cut;
    cut.kind = PieceKind::Clip;
    if (std::holds_alternative<HalfPlaneClip>(clip)) {
        const auto& hp = std::get<HalfPlaneClip>(clip);
        cut.is_circle = false;
        cut.point = hp.point;
        cut.normal = unit_phase(hp.outward_normal);
    } else {
        const auto& dc = std::get<DiskClip>(clip);
        if (dc.radius <= 0) throw GeometryError("clip_region: clip disk radius must be positive");
        cut.is_circle = true;
        cut.center = dc.center;
        cut.radius = dc.radius;
        cut.keep_inside = true;
    }
    return apply_cut(base, cut);
}

// ---------------------------------------------------------------------------
// Pseudospectrum contour (marching squares)
// ---------------------------------------------------------------------------

namespace {

struct Segment {
    std::int64_t from = 0, to = 0;
    Complex pf, pt;
};

std::int64_t edge_key(int orient, int ix, int iy) {
    return (static_cast<std::int64_t>(orient) << 50) |
           (static_cast<std::int64_t>(iy) << 25) | static_cast<std::int64_t>(ix);
}

}  // namespace

BoundaryPath pseudospectrum_contour(const CMatrix& a, double eps, int grid) {
    BoundaryPath probe = numerical_range_boundary(a, 128);
    double lox = 1e300, hix = -1e300, loy = 1e300, hiy = -1e300;
    for (const auto& loop : probe.loops)
        for (const auto& nd : loop.nodes) {
            lox = std::min(lox, nd.zeta.real());
            hix = std::max(hix, nd.zeta.real());
            loy = std::min(loy, nd.zeta.imag());
            hiy = std::max(hiy, nd.zeta.imag());
        }
    double pad = eps + 0.04 * std::max(hix - lox, hiy - loy) + 1e-6;
    GridWindow w{lox - pad, hix + pad, loy - pad, hiy + pad};
    return pseudospectrum_contour(a, eps, grid, w);
}

BoundaryPath pseudospectrum_contour(const CMatrix& a, double eps, int grid,
                                    const GridWindow& w) {
    require_square(a, "pseudospectrum_contour");
    if (eps <= 0) throw Error("pseudospectrum_contour: eps must be positive");
    if (grid < 8) throw Error("pseudospectrum_contour: grid too small");
    if (!(w.x1 > w.x0) || !(w.y1 > w.y0)) throw Error("pseudospectrum_contour: bad window");

    const int nx = grid, ny = grid;
    const double dx = (w.x1 - w.x0) / (nx - 1), dy = (w.y1 - w.y0) / (ny - 1);
    const int n = static_cast<int>(a.rows());

    auto smin_at = [&](Complex z) {
        CMatrix m = -a;
        m.diagonal().array() += z;
        if (n <= 48) {
            Eigen::JacobiSVD<CMatrix> svd(m);
            return svd.singularValues()(n - 1);
        }
        Eigen::BDCSVD<CMatrix> svd(m);
        return svd.singularValues()(n - 1);
    };

    std::vector<double> v(static_cast<std::size_t>(nx) * ny);
    parallel_for(v.size(), [&](std::size_t idx) {
        int ix = static_cast<int>(idx % nx), iy = static_cast<int>(idx / nx);
        v[idx] = smin_at(Complex(w.x0 + ix * dx, w.y0 + iy * dy)) - eps;
    });
    auto val = [&](int ix, int iy) { return v[static_cast<std::size_t>(iy) * nx + ix]; };

    // window guarantee: the level set must be strictly inside
    auto face_ok = [&](int fixed, bool horizontal) {
        if (horizontal) {
            for (int ix = 0; ix < nx; ++ix)
                if (val(ix, fixed) <= 0) return false;
        } else {
            for (int iy = 0; iy < ny; ++iy)
                if (val(fixed, iy) <= 0) return false;
        }
        return true;
    };
    std::string bad;
    if (!face_ok(0, true)) bad += " bottom";
    if (!face_ok(ny - 1, true)) bad += " top";
    if (!face_ok(0, false)) bad += " left";
    if (!face_ok(nx - 1, false)) bad += " right";
    if (!bad.empty())
        throw GeometryError("pseudospectrum_contour: sigma_min <= eps on window face(s):" + bad);

    // march cells; segments oriented with the sublevel set on the left
    std::vector<Segment> segs;
    auto interp = [&](double va, double vb) {
        double t = va / (va - vb);
        return std::clamp(t, 1e-9, 1.0 - 1e-9);
    };
    for (int iy = 0; iy + 1 < ny; ++iy) {
        for (int ix = 0; ix + 1 < nx; ++ix) {
            double vsw = val(ix, iy), vse = val(ix + 1, iy);
            double vne = val(ix + 1, iy + 1), vnw = val(ix, iy + 1);
            int config = (vsw < 0 ? 1 : 0) | (vse < 0 ? 2 : 0) | (vne < 0 ? 4 : 0) |
                         (vnw < 0 ? 8 : 0);
            if (config == 0 || config == 15) continue;
            double x = w.x0 + ix * dx, y = w.y0 + iy * dy;
            Complex ps(x + interp(vsw, vse) * dx, y);
            Complex pe(x + dx, y + interp(vse, vne) * dy);
            Complex pn(x + interp(vnw, vne) * dx, y + dy);
            Complex pw(x, y + interp(vsw, vnw) * dy);
            std::int64_t ks = edge_key(0, ix, iy), ke = edge_key(1, ix + 1, iy);
            std::int64_t kn = edge_key(0, ix, iy + 1), kw = edge_key(1, ix, iy);
            auto add = [&](std::int64_t kf, Complex pf, std::int64_t kt, Complex pt) {
                segs.push_back({kf, kt, pf, pt});
            };
            switch (config) {
                case 1: add(ks, ps, kw, pw); break;
                case 2: add(ke, pe, ks, ps); break;
                case 3: add(ke, pe, kw, pw); break;
                case 4: add(kn, pn, ke, pe); break;
                case 6: add(kn, pn, ks, ps); break;
                case 7: add(kn, pn, kw, pw); break;
                case 8: add(kw, pw, kn, pn); break;
                case 9: add(ks, ps, kn, pn); break;
                case 11: add(ke, pe, kn, pn); break;
                case 12: add(kw, pw, ke, pe); break;
                case 13: add(ks, ps, ke, pe); break;
                case 14: add(kw, pw, ks, ps); break;
                case 5: {  // saddle: one-level sub-cell probe at the center
                    double vc = smin_at(Complex(x + 0.5 * dx, y + 0.5 * dy)) - eps;
                    if (vc < 0) {
                        add(ks, ps, ke, pe);
                        add(kn, pn, kw, pw);
                    } else {
                        add(ks, ps, kw, pw);
                        add(kn, pn, ke, pe);
                    }
                    break;
                }
                case 10: {
                    double vc = smin_at(Complex(x + 0.5 * dx, y + 0.5 * dy)) - eps;
                    if (vc < 0) {
                        add(ke, pe, kn, pn);
                        add(kw, pw, ks, ps);
                    } else {
                        add(ke, pe, ks, ps);
                        add(kw, pw, kn, pn);
                    }
                    break;
                }
                default: break;
            }
        }
    }
    if (segs.empty())
        throw GeometryError("pseudospectrum_contour: empty level set (eps too small for grid?)");

    std::unordered_map<std::int64_t, int> by_from;
    by_from.reserve(segs.size() * 2);
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (!by_from.emplace(segs[i].from, static_cast<int>(i)).second)
            throw GeometryError("pseudospectrum_contour: inconsistent contour topology");
    }

    BoundaryPath out;
    std::vector<bool> used(segs.size(), false);
    double cell = std::hypot(dx, dy);
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (used[i]) continue;
        std::vector<Complex> poly;
        int cur = static_cast<int>(i);
        for (;;) {
            used[cur] = true;
            poly.push_back(segs[cur].pf);
            auto it = by_from.find(segs[cur].to);
            if (it == by_from.end())
                throw GeometryError("pseudospectrum_contour: open contour (grid too coarse)");
            cur = it->second;
            if (cur == static_cast<int>(i)) break;
            if (used[cur]) throw GeometryError("pseudospectrum_contour: contour stitching failed");
        }
        // dedupe near-coincident vertices
        std::vector<Complex> clean;
        for (Complex p : poly)
            if (clean.empty() || std::abs(p - clean.back()) > 1e-9 * cell) clean.push_back(p);
        while (clean.size() > 1 && std::abs(clean.front() - clean.back()) <= 1e-9 * cell)
            clean.pop_back();
        if (clean.size() < 3) continue;

        Loop l;
        const std::size_t m = clean.size();
        l.nodes.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            l.nodes[k].zeta = clean[k];
            Complex d = clean[(k + 1) % m] - clean[(k + m - 1) % m];
            l.nodes[k].tangent = unit_phase(d);
            l.nodes[k].kind = PieceKind::Base;
        }
        assign_weights(l, {});
        l.hole = signed_area(l) < 0;
        out.loops.push_back(std::move(l));
    }
    if (out.loops.empty()) throw GeometryError("pseudospectrum_contour: no usable contour loops");
    return out;
}

// ---------------------------------------------------------------------------
// Connectivity
// ---------------------------------------------------------------------------

namespace {

int flood_fill_components(const BoundaryPath& path, int res) {
    double lox = 1e300, hix = -1e300, loy = 1e300, hiy = -1e300;
    for (const auto& loop : path.loops)
        for (const auto& nd : loop.nodes) {
            lox = std::min(lox, nd.zeta.real());
            hix = std::max(hix, nd.zeta.real());
            loy = std::min(loy, nd.zeta.imag());
            hiy = std::max(hiy, nd.zeta.imag());
        }
    double padx = (hix - lox) * 0.02 + 1e-12, pady = (hiy - loy) * 0.02 + 1e-12;
    lox -= padx; hix += padx; loy -= pady; hiy += pady;
    double dx = (hix - lox) / res, dy = (hiy - loy) / res;

    std::vector<char> mask(static_cast<std::size_t>(res) * res, 0);
    std::vector<double> xs;
    for (int iy = 0; iy < res; ++iy) {
        double y = loy + (iy + 0.5) * dy;
        xs.clear();
        for (const auto& loop : path.loops) {
            const std::size_t m = loop.nodes.size();
            for (std::size_t k = 0; k < m; ++k) {
                Complex a = loop.nodes[k].zeta, b = loop.nodes[(k + 1) % m].zeta;
                double y1 = a.imag(), y2 = b.imag();
                if ((y1 <= y && y < y2) || (y2 <= y && y < y1)) {
                    double t = (y - y1) / (y2 - y1);
                    xs.push_back(a.real() + t * (b.real() - a.real()));
                }
            }
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t p = 0; p + 1 < xs.size(); p += 2) {
            int i0 = static_cast<int>(std::ceil((xs[p] - lox) / dx - 0.5));
            int i1 = static_cast<int>(std::floor((xs[p + 1] - lox) / dx - 0.5));
            for (int ix = std::max(0, i0); ix <= std::min(res - 1, i1); ++ix)
                mask[static_cast<std::size_t>(iy) * res + ix] = 1;
        }
    }

    int comps = 0;
    std::deque<std::pair<int, int>> queue;
    for (int iy = 0; iy < res; ++iy)
        for (int ix = 0; ix < res; ++ix) {
            if (mask[static_cast<std::size_t>(iy) * res + ix] != 1) continue;
            ++comps;
            mask[static_cast<std::size_t>(iy) * res + ix] = 2;
            queue.emplace_back(ix, iy);
            while (!queue.empty()) {
                auto [cx, cy] = queue.front();
                queue.pop_front();
                const int off[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
                for (auto& o : off) {
                    int nx2 = cx + o[0], ny2 = cy + o[1];
                    if (nx2 < 0 || ny2 < 0 || nx2 >= res || ny2 >= res) continue;
                    std::size_t id = static_cast<std::size_t>(ny2) * res + nx2;
                    if (mask[id] == 1) {
                        mask[id] = 2;
                        queue.emplace_back(nx2, ny2);
                    }
                }
            }
        }
    return comps;
}

}  // namespace

int connectivity_components(const BoundaryPath& path) {
    if (path.loops.empty()) throw GeometryError("connectivity_components: empty path");
    if (path.degenerate) return 1;
    int outer = 0;
    for (const auto& loop : path.loops)
        if (!loop.hole) ++outer;
    int filled = flood_fill_components(path, 400);
    if (filled != outer)
        throw GeometryError("connectivity_components: loop count " + std::to_string(outer) +
                            " disagrees with flood fill " + std::to_string(filled));
    return outer;
}

// ---------------------------------------------------------------------------
// RegionBuilder
// ---------------------------------------------------------------------------

namespace {

BoundaryPath polygon_path(const std::vector<Complex>& vertices, int target_nodes) {
    if (vertices.size() < 3) throw GeometryError("polygon region: need at least 3 vertices");
    std::vector<Complex> vs = vertices;
    {
        double s = 0;
        for (std::size_t k = 0; k < vs.size(); ++k) {
            Complex a = vs[k], b = vs[(k + 1) % vs.size()];
            s += a.real() * b.imag() - b.real() * a.imag();
        }
        if (s < 0) std::reverse(vs.begin(), vs.end());
    }
    double perim = 0;
    for (std::size_t k = 0; k < vs.size(); ++k) perim += std::abs(vs[(k + 1) % vs.size()] - vs[k]);
    double target = perim / std::max(16, target_nodes);

    Loop l;
    const std::size_t m = vs.size();
    for (std::size_t k = 0; k < m; ++k) {
        Complex prev = vs[(k + m - 1) % m], cur = vs[k], next = vs[(k + 1) % m];
        Complex t_in = unit_phase(cur - prev), t_out = unit_phase(next - cur);
        PathNode in_node{cur, t_in, 0, PieceKind::Base, true, -1, 0};
        PathNode out_node{cur, t_out, 0, PieceKind::Base, true, -1, 0};
        l.nodes.push_back(in_node);
        l.nodes.push_back(out_node);
        int segs = std::max(1, static_cast<int>(std::ceil(std::abs(next - cur) / target)));
        for (int s = 1; s < segs; ++s) {
            PathNode nd{cur + (next - cur) * (static_cast<double>(s) / segs), t_out, 0,
                        PieceKind::Base, false, -1, 0};
            l.nodes.push_back(nd);
        }
    }
    assign_weights(l, {});
    BoundaryPath out;
    out.loops.push_back(std::move(l));
    return out;
}

}  // namespace

RegionBuilder::RegionBuilder(CMatrix a, RegionSpec spec, RegionOptions opt)
    : a_(std::move(a)), spec_(std::move(spec)), opt_(opt) {
    require_square(a_, "RegionBuilder");
    Eigen::ComplexEigenSolver<CMatrix> es(a_, false);
    if (es.info() != Eigen::Success) throw NumericalError("RegionBuilder: eigensolver failed");
    eigs_ = es.eigenvalues();

    for (const auto& ds : spec_.holes) {
        Disk d;
        d.center = ds.center;
        d.rule = ds.rule;
        d.radius = ds.rule == DiskRule::Explicit ? ds.radius : disk_radius(a_, ds.center, ds.rule);
        if (d.radius <= 0) throw GeometryError("RegionBuilder: non-positive disk radius");
        for (int i = 0; i < eigs_.size(); ++i)
            if (std::abs(eigs_(i) - d.center) < d.radius * (1.0 - 1e-8))
                throw GeometryError("RegionBuilder: removal disk contains an eigenvalue");
        disks_.push_back(d);
    }

    margin_ = spec_.margin;
    if (spec_.base == RegionSpec::Base::NumericalRange) {
        BoundaryPath probe = numerical_range_boundary(a_, opt_.base_angles, spec_.margin);
        if (!probe.degenerate) {
            double diam = path_diameter(probe);
            double dmin = 1e300;
            for (int i = 0; i < eigs_.size(); ++i)
                dmin = std::min(dmin, distance_to_path(probe, eigs_(i)));
            // eigenvalues on (or numerically on) the hull would leave the
            // boundary integrals unresolvable at any sane node count; stand
            // off outward. Any convex superset of W(A) keeps c1 = c2 = 1.
            if (dmin <= 5e-3 * diam) margin_ = spec_.margin + 0.05 * diam;
        }
    }
}

BoundaryPath RegionBuilder::build(int level) const {
    if (level < 0 || level > opt_.max_levels)
        throw NumericalError("RegionBuilder: refinement level out of range");
    BoundaryPath path;
    switch (spec_.base) {
        case RegionSpec::Base::NumericalRange: {
            long long angles = static_cast<long long>(opt_.base_angles) << level;
            if (angles > static_cast<long long>(opt_.max_nodes))
                throw NumericalError("RegionBuilder: node budget exceeded");
            path = numerical_range_boundary(a_, static_cast<int>(angles), margin_);
            break;
        }
        case RegionSpec::Base::Pseudospectrum: {
            if (!contour_cache_)
                contour_cache_ = pseudospectrum_contour(a_, spec_.eps, opt_.contour_grid);
            path = *contour_cache_;
            for (int l = 0; l < level; ++l) {
                if (path.node_count() * 2 > opt_.max_nodes)
                    throw NumericalError("RegionBuilder: node budget exceeded");
                path = path.refined();
            }
            break;
        }
        case RegionSpec::Base::Polygon: {
            long long target = static_cast<long long>(opt_.base_angles) << level;
            if (target > static_cast<long long>(opt_.max_nodes))
                throw NumericalError("RegionBuilder: node budget exceeded");
            path = polygon_path(spec_.polygon, static_cast<int>(target));
            break;
        }
    }
    if (path.degenerate && (!disks_.empty() || !spec_.clips.empty()))
        throw GeometryError("RegionBuilder: degenerate base region cannot be cut");

    if (!disks_.empty()) path = remove_disks(path, disks_);
    for (const auto& c : spec_.clips) path = clip_region(path, c);

    if (!path.degenerate) {
        double diam = path_diameter(path);
        for (int i = 0; i < eigs_.size(); ++i) {
            Complex lam = eigs_(i);
            if (!region_contains(path, lam) || distance_to_path(path, lam) <= 1e-12 * diam)
                throw GeometryError("RegionBuilder: eigenvalue (" + std::to_string(lam.real()) +
                                    "," + std::to_string(lam.imag()) +
                                    ") is not strictly inside the region");
        }
    }
    if (path.node_count() > opt_.max_nodes)
        throw NumericalError("RegionBuilder: node budget exceeded");
    return path;
}

}  // namespace specset
