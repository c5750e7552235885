#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "specset/blaschke.hpp"
#include "specset/bounds.hpp"
#include "specset/diagnostics.hpp"
#include "specset/gallery.hpp"
#include "specset/io.hpp"
#include "specset/matops.hpp"
#include "specset/parallel.hpp"
#include "specset/regions.hpp"

namespace {

using namespace specset;
namespace fs = std::filesystem;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

CMatrix make_matrix(const std::string& gallery, const std::string& matrix_path,
                    std::uint64_t seed) {
    if (!matrix_path.empty()) {
        std::string p = matrix_path;
        if (p.rfind("mm:", 0) == 0) p = p.substr(3);
        return io::read_matrix_market_file(p);
    }
    if (gallery.empty()) throw Error("no matrix given: use --gallery or --matrix");
    auto parts = split(gallery, ':');
    const std::string& kind = parts[0];
    if (kind == "grcar") {
        if (parts.size() < 2) throw Error("gallery grcar:N[:k]");
        int n = std::stoi(parts[1]);
        int k = parts.size() > 2 ? std::stoi(parts[2]) : 3;
        return gallery::grcar(n, k);
    }
    if (kind == "normal") {
        if (parts.size() < 2 || parts[1].rfind("diag(", 0) != 0 || parts[1].back() != ')')
            throw Error("gallery normal:diag(a,b,...)");
        std::string body = parts[1].substr(5, parts[1].size() - 6);
        std::vector<Complex> vals;
        for (const auto& tok : split(body, ',')) vals.push_back(io::parse_complex(tok));
        return gallery::normal_diag(vals);
    }
    if (kind == "jordan") {
        if (parts.size() < 2) throw Error("gallery jordan:N@lambda");
        auto at = split(parts[1], '@');
        int n = std::stoi(at[0]);
        Complex lam = at.size() > 1 ? io::parse_complex(at[1]) : Complex(0, 0);
        return gallery::jordan_block(n, lam);
    }
    if (kind == "randn") {
        if (parts.size() < 2) throw Error("gallery randn:N");
        return gallery::random_complex(std::stoi(parts[1]), seed);
    }
    if (kind == "fig4") return gallery::block_random(gallery::preset_fig4(), seed);
    if (kind == "fig5") return gallery::block_random(gallery::preset_fig5(), seed);
    if (kind == "fig6") return gallery::block_random(gallery::preset_fig6(), seed);
    throw Error("unknown gallery spec: " + gallery);
}

RegionSpec make_region(const std::string& region, const std::string& region_json_path) {
    if (!region_json_path.empty()) {
        std::ifstream is(region_json_path);
        if (!is) throw Error("cannot open region json " + region_json_path);
        std::stringstream ss;
        ss << is.rdbuf();
        return io::parse_region_json(ss.str());
    }
    RegionSpec spec;
    if (region.empty() || region == "numerical_range") return spec;
    if (region.rfind("numerical_range:margin=", 0) == 0) {
        spec.margin = std::stod(region.substr(std::string("numerical_range:margin=").size()));
        return spec;
    }
    if (region.rfind("pseudospectrum:", 0) == 0) {
        spec.base = RegionSpec::Base::Pseudospectrum;
        spec.eps = std::stod(region.substr(std::string("pseudospectrum:").size()));
        return spec;
    }
    if (region.rfind("wminus:", 0) == 0) {
        for (const auto& tok : split(region.substr(7), '+')) {
            if (tok.rfind("disk@", 0) != 0) throw Error("wminus expects disk@center:rule terms");
            auto body = split(tok.substr(5), ':');
            DiskSpec d;
            d.center = io::parse_complex(body[0]);
            std::string rule = body.size() > 1 ? body[1] : "numrad";
            if (rule == "norm") d.rule = DiskRule::Norm;
            else if (rule == "numrad") d.rule = DiskRule::NumRad;
            else if (rule.rfind("r=", 0) == 0) {
                d.rule = DiskRule::Explicit;
                d.radius = std::stod(rule.substr(2));
            } else throw Error("unknown disk rule " + rule);
            spec.holes.push_back(d);
        }
        return spec;
    }
    if (region.rfind("wclip:", 0) == 0) {
        std::string body = region.substr(6);
        if (body.rfind("re<=", 0) == 0) {
            HalfPlaneClip hp;
            hp.point = Complex(std::stod(body.substr(4)), 0);
            hp.outward_normal = Complex(1, 0);
            spec.clips.emplace_back(hp);
        } else if (body.rfind("disk@", 0) == 0) {
            auto at = split(body.substr(5), ':');
            DiskClip dc;
            dc.center = io::parse_complex(at[0]);
            dc.radius = at.size() > 1 ? std::stod(at[1]) : 1.0;
            spec.clips.emplace_back(dc);
        } else {
            throw Error("wclip expects re<=C or disk@center:radius");
        }
        return spec;
    }
    throw Error("unknown region spec: " + region);
}

struct CommonOpts {
    std::string gallery, matrix, region, region_json, out;
    std::uint64_t seed = 1;
    int threads = 0;
    int angles = 512, grid = 300, trace_samples = 256;
    double quad_tol = 1e-6;

    void attach(CLI::App* cmd, bool needs_region) {
        cmd->add_option("--gallery", gallery, "built-in matrix spec (grcar:32, normal:diag(...), fig4, ...)");
        cmd->add_option("--matrix", matrix, "Matrix Market file (optionally mm: prefixed)");
        if (needs_region) {
            cmd->add_option("--region", region, "region preset (numerical_range, pseudospectrum:eps, wminus:..., wclip:...)");
            cmd->add_option("--region-json", region_json, "region description JSON file");
        }
        cmd->add_option("--out", out, "output directory")->required();
        cmd->add_option("--seed", seed, "RNG seed for gallery matrices");
        cmd->add_option("--threads", threads, "worker cap (default: SPECSET_THREADS or hardware)");
        cmd->add_option("--angles", angles, "numerical-range support angles");
        cmd->add_option("--grid", grid, "pseudospectrum grid resolution");
        cmd->add_option("--quad-tol", quad_tol, "quadrature certificate tolerance");
        cmd->add_option("--trace-samples", trace_samples, "kernel trace subsample count");
    }

    RegionOptions region_options() const {
        RegionOptions opt;
        opt.base_angles = angles;
        opt.contour_grid = grid;
        opt.quad_tol = quad_tol;
        opt.trace_samples = trace_samples;
        return opt;
    }

    std::string options_json(const std::string& extra = "") const {
        std::ostringstream os;
        os << "{\"seed\": " << seed << ", \"threads\": " << threads
           << ", \"angles\": " << angles << ", \"grid\": " << grid
           << ", \"quad_tol\": " << io::format_double(quad_tol)
           << ", \"trace_samples\": " << trace_samples;
        if (!extra.empty()) os << ", " << extra;
        os << "}";
        return os.str();
    }

    std::string manifest(const std::string& command, const RegionSpec* spec,
                         const std::string& extra_options = "") const {
        std::ostringstream os;
        os << "{\n  \"command\": \"" << io::json_escape(command) << "\",\n";
        os << "  \"matrix\": \"" << io::json_escape(!matrix.empty() ? matrix : gallery) << "\",\n";
        if (spec) os << "  \"region\": " << io::region_to_json(*spec) << ",\n";
        os << "  \"options\": " << options_json(extra_options) << "\n}\n";
        return os.str();
    }
};

void write_outputs(const std::string& dir, const std::vector<std::pair<std::string, std::string>>& files) {
    for (const auto& [name, content] : files) io::atomic_write((fs::path(dir) / name).string(), content);
}

int cmd_bounds(const CommonOpts& c) {
    if (c.threads > 0) set_thread_count(c.threads);
    CMatrix a = make_matrix(c.gallery, c.matrix, c.seed);
    RegionSpec spec = make_region(c.region, c.region_json);

    Timer total;
    RegionBuilder builder(a, spec, c.region_options());
    Timer bounds_timer;
    BoundReport rep = full_report(builder);
    double bounds_ms = bounds_timer.ms();

    std::string manifest = c.manifest("bounds", &spec);
    std::vector<std::pair<std::string, double>> timings = {
        {"bounds_ms", bounds_ms}, {"total_ms", total.ms()}};
    write_outputs(c.out, {
        {"manifest.json", manifest},
        {"report.json", io::report_to_json(rep, manifest, timings)},
        {"trace.csv", io::trace_csv(rep)},
        {"boundary.csv", io::path_csv(builder.build(0))},
    });
    std::cout << "K_main=" << io::format_double(rep.K_main)
              << " K_cauchy=" << io::format_double(rep.K_cauchy)
              << " c1=" << io::format_double(rep.c1) << " c2=" << io::format_double(rep.c2)
              << " components=" << rep.components << "\n";
    return 0;
}

int cmd_transient(const CommonOpts& c, const std::string& mode, double tmax, int tsteps,
                  int kmax, bool with_lower, int degree, int starts) {
    if (c.threads > 0) set_thread_count(c.threads);
    CMatrix a = make_matrix(c.gallery, c.matrix, c.seed);

    Eigen::ComplexEigenSolver<CMatrix> es(a, false);
    if (es.info() != Eigen::Success) throw NumericalError("transient: eigensolver failed");
    RegionSpec spec;
    std::ostringstream curve;
    double sup_curve = 0;
    if (mode == "exp") {
        for (int i = 0; i < es.eigenvalues().size(); ++i)
            if (es.eigenvalues()(i).real() >= 0)
                throw GeometryError("transient exp mode: eigenvalue (" +
                                    std::to_string(es.eigenvalues()(i).real()) + "," +
                                    std::to_string(es.eigenvalues()(i).imag()) +
                                    ") is not in the open left half-plane");
        HalfPlaneClip hp;
        hp.point = Complex(0, 0);
        hp.outward_normal = Complex(1, 0);
        spec.clips.emplace_back(hp);
        curve << "t,norm\n";
        for (int j = 0; j <= tsteps; ++j) {
            double t = tmax * j / tsteps;
            double nrm = operator_norm(matrix_exponential(a, t));
            sup_curve = std::max(sup_curve, nrm);
            curve << io::format_double(t) << "," << io::format_double(nrm) << "\n";
        }
    } else if (mode == "pow") {
        for (int i = 0; i < es.eigenvalues().size(); ++i)
            if (std::abs(es.eigenvalues()(i)) >= 1.0)
                throw GeometryError("transient pow mode: eigenvalue with |lambda| >= 1");
        DiskClip dc;
        dc.center = Complex(0, 0);
        dc.radius = 1.0;
        spec.clips.emplace_back(dc);
        curve << "k,norm\n";
        CMatrix p = CMatrix::Identity(a.rows(), a.cols());
        for (int k = 0; k <= kmax; ++k) {
            double nrm = operator_norm(p);
            sup_curve = std::max(sup_curve, nrm);
            curve << k << "," << io::format_double(nrm) << "\n";
            p = p * a;
        }
    } else {
        throw Error("transient: mode must be exp or pow");
    }

    Timer total;
    RegionBuilder builder(a, spec, c.region_options());
    BoundReport rep = full_report(builder);
    if (with_lower) {
        OptimizeResult lower = optimize_lower_bound(a, spec, degree, starts, c.seed,
                                                    c.region_options());
        rep.K_lower = lower.K_lower;
    }

    std::ostringstream extra;
    extra << "\"mode\": \"" << mode << "\", \"tmax\": " << io::format_double(tmax)
          << ", \"tsteps\": " << tsteps << ", \"kmax\": " << kmax
          << ", \"with_lower\": " << (with_lower ? "true" : "false");
    std::string manifest = c.manifest("transient", &spec, extra.str());
    std::vector<std::pair<std::string, double>> timings = {{"total_ms", total.ms()}};
    write_outputs(c.out, {
        {"manifest.json", manifest},
        {"curve.csv", curve.str()},
        {"report.json", io::report_to_json(rep, manifest, timings)},
        {"boundary.csv", io::path_csv(builder.build(0))},
    });
    std::cout << "sup_curve=" << io::format_double(sup_curve)
              << " K_main=" << io::format_double(rep.K_main)
              << " K_cauchy=" << io::format_double(rep.K_cauchy) << "\n";
    return 0;
}

int cmd_rankone(const CommonOpts& c, std::string window, int resolution, const std::string& preset) {
    if (c.threads > 0) set_thread_count(c.threads);
    CMatrix a = make_matrix(c.gallery, c.matrix, c.seed);
    if (preset == "grcar32") window = "-1,3,-3,3";
    if (window.empty()) throw Error("rankone: --window x0,x1,y0,y1 or --preset required");
    auto parts = split(window, ',');
    if (parts.size() != 4) throw Error("rankone: window must be x0,x1,y0,y1");
    MapWindow w{std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3])};

    Timer total;
    RankOneDiagnostics diag = rank_one_maps(a, w, resolution);

    std::ostringstream header;
    header << "{\n  \"window\": [" << io::format_double(w.x0) << "," << io::format_double(w.x1)
           << "," << io::format_double(w.y0) << "," << io::format_double(w.y1) << "],\n";
    header << "  \"resolution\": " << resolution << ",\n";
    header << "  \"masked_count\": " << diag.masked_count << ",\n  \"eigenvalues\": [";
    for (int i = 0; i < diag.eigenvalues.size(); ++i)
        header << (i ? "," : "") << "[" << io::format_double(diag.eigenvalues(i).real()) << ","
               << io::format_double(diag.eigenvalues(i).imag()) << "]";
    header << "],\n  \"total_ms\": " << io::format_double(total.ms()) << "\n}\n";

    std::ostringstream extra;
    extra << "\"window\": \"" << io::json_escape(window) << "\", \"resolution\": " << resolution;
    write_outputs(c.out, {
        {"manifest.json", c.manifest("rankone", nullptr, extra.str())},
        {"ratio.csv", io::map_csv(diag.ratio_map, diag.mask)},
        {"overlap.csv", io::map_csv(diag.overlap_map, diag.mask)},
        {"header.json", header.str()},
    });
    std::cout << "masked=" << diag.masked_count << "/" << resolution * resolution << "\n";
    return 0;
}

int cmd_optimal(const CommonOpts& c, int degree, int starts) {
    if (c.threads > 0) set_thread_count(c.threads);
    CMatrix a = make_matrix(c.gallery, c.matrix, c.seed);
    RegionSpec spec = make_region(c.region, c.region_json);

    Timer total;
    BoundReport rep = full_report(a, spec, c.region_options());
    OptimizeResult lower = optimize_lower_bound(a, spec, degree, starts, c.seed,
                                                c.region_options());
    rep.K_lower = lower.K_lower;
    if (lower.K_lower > std::min(rep.K_main, rep.K_cauchy) + 1e-6)
        throw NumericalError("optimal: K_lower exceeds an upper bound (inconsistent run)");

    std::ostringstream oj;
    oj << "{\n  \"K_lower\": " << io::format_double(lower.K_lower) << ",\n  \"roots\": [";
    for (std::size_t i = 0; i < lower.roots.size(); ++i)
        oj << (i ? "," : "") << "[" << io::format_double(lower.roots[i].real()) << ","
           << io::format_double(lower.roots[i].imag()) << "]";
    oj << "],\n  \"ordering\": \"" << (rep.K_cauchy <= rep.K_main ? "K_lower <= K_cauchy <= K_main"
                                                                  : "K_lower <= K_main <= K_cauchy")
       << "\",\n  \"starts\": [";
    for (std::size_t i = 0; i < lower.starts.size(); ++i)
        oj << (i ? "," : "") << "{\"start\": " << lower.starts[i].start_index
           << ", \"iterations\": " << lower.starts[i].iterations
           << ", \"best\": " << io::format_double(lower.starts[i].best_value) << "}";
    oj << "]\n}\n";

    std::ostringstream extra;
    extra << "\"degree\": " << degree << ", \"starts\": " << starts;
    std::string manifest = c.manifest("optimal", &spec, extra.str());
    std::vector<std::pair<std::string, double>> timings = {{"total_ms", total.ms()}};
    write_outputs(c.out, {
        {"manifest.json", manifest},
        {"report.json", io::report_to_json(rep, manifest, timings)},
        {"optimizer.json", oj.str()},
    });
    std::cout << "K_lower=" << io::format_double(lower.K_lower)
              << " K_main=" << io::format_double(rep.K_main)
              << " K_cauchy=" << io::format_double(rep.K_cauchy) << "\n";
    return 0;
}

int cmd_gallery(const CommonOpts& c) {
    CMatrix a = make_matrix(c.gallery, c.matrix, c.seed);
    write_outputs(c.out, {
        {"A.mtx", io::matrix_market_string(a)},
        {"manifest.json", c.manifest("gallery", nullptr)},
    });
    std::cout << "wrote " << (fs::path(c.out) / "A.mtx").string() << " (" << a.rows() << "x"
              << a.cols() << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"specset: K-spectral-set constants for matrices over user-built regions"};
    app.require_subcommand(1);

    CommonOpts cb, ct, cr, co, cg;

    auto* bounds_cmd = app.add_subcommand("bounds", "compute c1, c2, K bounds over a region");
    cb.attach(bounds_cmd, true);

    auto* transient_cmd = app.add_subcommand("transient", "transient envelopes with companion bounds");
    ct.attach(transient_cmd, false);
    std::string mode = "exp";
    double tmax = 30.0;
    int tsteps = 300, kmax = 100, t_degree = 0, t_starts = 20;
    bool with_lower = false;
    transient_cmd->add_option("--mode", mode, "exp (e^{tA}) or pow (A^k)");
    transient_cmd->add_option("--tmax", tmax, "time horizon for exp mode");
    transient_cmd->add_option("--tsteps", tsteps, "curve samples for exp mode");
    transient_cmd->add_option("--kmax", kmax, "max power for pow mode");
    transient_cmd->add_flag("--with-lower", with_lower, "also optimize the lower bound");
    transient_cmd->add_option("--degree", t_degree, "Blaschke degree (0 = auto)");
    transient_cmd->add_option("--starts", t_starts, "optimizer starts");

    auto* rankone_cmd = app.add_subcommand("rankone", "resolvent rank-one structure maps");
    cr.attach(rankone_cmd, false);
    std::string window, preset;
    int resolution = 120;
    rankone_cmd->add_option("--window", window, "x0,x1,y0,y1");
    rankone_cmd->add_option("--preset", preset, "window preset (grcar32)");
    rankone_cmd->add_option("--resolution", resolution, "grid resolution");

    auto* optimal_cmd = app.add_subcommand("optimal", "Blaschke lower bound for the optimal K");
    co.attach(optimal_cmd, true);
    int degree = 0, starts = 20;
    optimal_cmd->add_option("--degree", degree, "Blaschke degree (0 = auto)");
    optimal_cmd->add_option("--starts", starts, "optimizer starts");

    auto* gallery_cmd = app.add_subcommand("gallery", "emit a gallery matrix as Matrix Market");
    cg.attach(gallery_cmd, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (bounds_cmd->parsed()) return cmd_bounds(cb);
        if (transient_cmd->parsed())
            return cmd_transient(ct, mode, tmax, tsteps, kmax, with_lower, t_degree, t_starts);
        if (rankone_cmd->parsed()) return cmd_rankone(cr, window, resolution, preset);
        if (optimal_cmd->parsed()) return cmd_optimal(co, degree, starts);
        if (gallery_cmd->parsed()) return cmd_gallery(cg);
    } catch (const GeometryError& e) {
        std::cerr << "region error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
