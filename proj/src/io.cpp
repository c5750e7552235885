#include "specset/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace specset::io {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("atomic_write: cannot open " + tmp.string());
        os << content;
        if (!os) throw Error("atomic_write: write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

CMatrix read_matrix_market(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw Error("matrix market: empty input");
    std::istringstream hs(header);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix")
        throw Error("matrix market: bad banner");
    if (symmetry != "general") throw Error("matrix market: only 'general' symmetry supported");
    bool coordinate = format == "coordinate";
    if (!coordinate && format != "array") throw Error("matrix market: bad format " + format);
    bool complex_field = field == "complex";
    if (!complex_field && field != "real" && field != "integer")
        throw Error("matrix market: unsupported field " + field);

    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream ds(line);
    long rows = 0, cols = 0, nnz = 0;
    ds >> rows >> cols;
    if (coordinate) ds >> nnz;
    if (rows <= 0 || cols <= 0 || rows != cols)
        throw Error("matrix market: expected a square matrix");

    CMatrix a = CMatrix::Zero(rows, cols);
    if (coordinate) {
        for (long k = 0; k < nnz; ++k) {
            long i, j;
            double re, im = 0;
            if (!(is >> i >> j >> re)) throw Error("matrix market: truncated entries");
            if (complex_field && !(is >> im)) throw Error("matrix market: truncated entries");
            if (i < 1 || j < 1 || i > rows || j > cols)
                throw Error("matrix market: index out of range");
            a(i - 1, j - 1) = Complex(re, im);
        }
    } else {
        for (long j = 0; j < cols; ++j)
            for (long i = 0; i < rows; ++i) {
                double re, im = 0;
                if (!(is >> re)) throw Error("matrix market: truncated entries");
                if (complex_field && !(is >> im)) throw Error("matrix market: truncated entries");
                a(i, j) = Complex(re, im);
            }
    }
    return a;
}

CMatrix read_matrix_market_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open matrix file " + path);
    return read_matrix_market(is);
}

void write_matrix_market(const CMatrix& a, std::ostream& os) {
    os << "%%MatrixMarket matrix array complex general\n";
    os << a.rows() << " " << a.cols() << "\n";
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            os << format_double(a(i, j).real()) << " " << format_double(a(i, j).imag()) << "\n";
}

std::string matrix_market_string(const CMatrix& a) {
    std::ostringstream os;
    write_matrix_market(a, os);
    return os.str();
}

Complex parse_complex(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw Error("parse_complex: empty literal");
    if (s.back() == 'i' || s.back() == 'I') {
        s.pop_back();
        // split at the last +/- that is not an exponent sign and not leading
        std::size_t split = std::string::npos;
        for (std::size_t k = s.size(); k-- > 1;) {
            if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
                split = k;
                break;
            }
        }
        auto parse_imag = [](const std::string& t) {
            if (t.empty() || t == "+") return 1.0;
            if (t == "-") return -1.0;
            return std::stod(t);
        };
        if (split == std::string::npos) return Complex(0.0, parse_imag(s));
        return Complex(std::stod(s.substr(0, split)), parse_imag(s.substr(split)));
    }
    return Complex(std::stod(s), 0.0);
}

namespace {

Complex json_complex(const nlohmann::json& j) {
    if (j.is_array() && j.size() == 2) return Complex(j[0].get<double>(), j[1].get<double>());
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_string()) return parse_complex(j.get<std::string>());
    throw Error("region json: expected complex as [re, im]");
}

}  // namespace

RegionSpec parse_region_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    RegionSpec spec;
    if (j.contains("base")) {
        const auto& b = j["base"];
        std::string kind = b.is_string() ? b.get<std::string>() : b.value("kind", "numerical_range");
        if (kind == "numerical_range") {
            spec.base = RegionSpec::Base::NumericalRange;
            if (b.is_object()) spec.margin = b.value("margin", 0.0);
        } else if (kind == "pseudospectrum") {
            spec.base = RegionSpec::Base::Pseudospectrum;
            if (!b.is_object() || !b.contains("eps"))
                throw Error("region json: pseudospectrum base needs eps");
            spec.eps = b["eps"].get<double>();
            if (spec.eps <= 0) throw Error("region json: eps must be positive");
        } else if (kind == "polygon") {
            spec.base = RegionSpec::Base::Polygon;
            if (!b.is_object() || !b.contains("vertices"))
                throw Error("region json: polygon base needs vertices");
            for (const auto& v : b["vertices"]) spec.polygon.push_back(json_complex(v));
        } else {
            throw Error("region json: unknown base kind " + kind);
        }
    }
    for (const auto& h : j.value("holes", nlohmann::json::array())) {
        DiskSpec d;
        d.center = json_complex(h.at("center"));
        std::string rule = h.value("rule", "numrad");
        if (rule == "norm") d.rule = DiskRule::Norm;
        else if (rule == "numrad") d.rule = DiskRule::NumRad;
        else if (rule == "explicit") {
            d.rule = DiskRule::Explicit;
            d.radius = h.at("radius").get<double>();
            if (d.radius <= 0) throw Error("region json: explicit hole radius must be positive");
        } else throw Error("region json: unknown hole rule " + rule);
        spec.holes.push_back(d);
    }
    for (const auto& c : j.value("clips", nlohmann::json::array())) {
        std::string kind = c.at("kind").get<std::string>();
        if (kind == "half_plane") {
            HalfPlaneClip hp;
            if (c.contains("re_le")) {
                hp.point = Complex(c["re_le"].get<double>(), 0.0);
                hp.outward_normal = Complex(1, 0);
            } else {
                hp.point = json_complex(c.at("point"));
                double ang = c.at("normal_angle").get<double>();
                hp.outward_normal = std::polar(1.0, ang);
            }
            spec.clips.emplace_back(hp);
        } else if (kind == "disk") {
            DiskClip dc;
            dc.center = json_complex(c.at("center"));
            dc.radius = c.at("radius").get<double>();
            if (dc.radius <= 0) throw Error("region json: clip disk radius must be positive");
            spec.clips.emplace_back(dc);
        } else {
            throw Error("region json: unknown clip kind " + kind);
        }
    }
    return spec;
}

namespace {

std::string complex_json(Complex z) {
    return "[" + format_double(z.real()) + "," + format_double(z.imag()) + "]";
}

}  // namespace

std::string region_to_json(const RegionSpec& spec) {
    std::ostringstream os;
    os << "{\"base\":";
    switch (spec.base) {
        case RegionSpec::Base::NumericalRange:
            os << "{\"kind\":\"numerical_range\",\"margin\":" << format_double(spec.margin) << "}";
            break;
        case RegionSpec::Base::Pseudospectrum:
            os << "{\"kind\":\"pseudospectrum\",\"eps\":" << format_double(spec.eps) << "}";
            break;
        case RegionSpec::Base::Polygon: {
            os << "{\"kind\":\"polygon\",\"vertices\":[";
            for (std::size_t i = 0; i < spec.polygon.size(); ++i)
                os << (i ? "," : "") << complex_json(spec.polygon[i]);
            os << "]}";
            break;
        }
    }
    os << ",\"holes\":[";
    for (std::size_t i = 0; i < spec.holes.size(); ++i) {
        const auto& h = spec.holes[i];
        os << (i ? "," : "") << "{\"center\":" << complex_json(h.center) << ",\"rule\":\"";
        os << (h.rule == DiskRule::Norm ? "norm" : h.rule == DiskRule::NumRad ? "numrad" : "explicit");
        os << "\"";
        if (h.rule == DiskRule::Explicit) os << ",\"radius\":" << format_double(h.radius);
        os << "}";
    }
    os << "],\"clips\":[";
    for (std::size_t i = 0; i < spec.clips.size(); ++i) {
        os << (i ? "," : "");
        if (std::holds_alternative<HalfPlaneClip>(spec.clips[i])) {
            const auto& hp = std::get<HalfPlaneClip>(spec.clips[i]);
            os << "{\"kind\":\"half_plane\",\"point\":" << complex_json(hp.point)
               << ",\"normal_angle\":" << format_double(std::arg(hp.outward_normal)) << "}";
        } else {
            const auto& dc = std::get<DiskClip>(spec.clips[i]);
            os << "{\"kind\":\"disk\",\"center\":" << complex_json(dc.center)
               << ",\"radius\":" << format_double(dc.radius) << "}";
        }
    }
    os << "]}";
    return os.str();
}

std::string report_to_json(const BoundReport& rep, const std::string& config_json,
                           const std::vector<std::pair<std::string, double>>& timings) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"config\": " << (config_json.empty() ? "null" : config_json) << ",\n";
    os << "  \"c1\": " << format_double(rep.c1) << ",\n";
    os << "  \"c2\": " << format_double(rep.c2) << ",\n";
    os << "  \"K_main\": " << format_double(rep.K_main) << ",\n";
    os << "  \"K_cauchy\": " << format_double(rep.K_cauchy) << ",\n";
    if (rep.K_closedform)
        os << "  \"K_closedform\": " << format_double(*rep.K_closedform) << ",\n";
    if (rep.K_pseudo) os << "  \"K_pseudo\": " << format_double(*rep.K_pseudo) << ",\n";
    if (rep.K_lower) os << "  \"K_lower\": " << format_double(*rep.K_lower) << ",\n";
    os << "  \"gamma_integral\": " << format_double(rep.gamma_integral) << ",\n";
    os << "  \"argmax_zeta0\": " << complex_json(rep.argmax_zeta0) << ",\n";
    os << "  \"components\": " << rep.components << ",\n";
    os << "  \"quadrature_certificate\": " << format_double(rep.quadrature_certificate) << ",\n";
    os << "  \"refine_level\": " << rep.refine_level << ",\n";
    os << "  \"nodes\": " << rep.nodes << ",\n";
    os << "  \"trace_stride\": " << rep.trace_stride << ",\n";
    os << "  \"applied_margin\": " << format_double(rep.applied_margin) << ",\n";
    os << "  \"timings\": {";
    for (std::size_t i = 0; i < timings.size(); ++i)
        os << (i ? "," : "") << "\"" << json_escape(timings[i].first)
           << "\": " << format_double(timings[i].second);
    os << "}\n";
    os << "}\n";
    return os.str();
}

std::string trace_csv(const BoundReport& rep) {
    std::ostringstream os;
    os << "s,re_zeta,im_zeta,mu_lambda_min,resolvent_norm,numerical_radius_resolvent\n";
    for (const auto& t : rep.traces) {
        os << format_double(t.s) << "," << format_double(t.sample.zeta.real()) << ","
           << format_double(t.sample.zeta.imag()) << ","
           << format_double(t.sample.mu_lambda_min) << ","
           << format_double(t.sample.resolvent_norm) << ","
           << format_double(t.sample.numerical_radius_resolvent) << "\n";
    }
    return os.str();
}

std::string map_csv(const Eigen::MatrixXd& map,
                    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask) {
    std::ostringstream os;
    for (Eigen::Index i = 0; i < map.rows(); ++i) {
        for (Eigen::Index j = 0; j < map.cols(); ++j) {
            if (j) os << ",";
            if (mask.rows() == map.rows() && mask(i, j)) os << "nan";
            else os << format_double(map(i, j));
        }
        os << "\n";
    }
    return os.str();
}

std::string path_csv(const BoundaryPath& path) {
    std::ostringstream os;
    export_path_csv(path, os);
    return os.str();
}

}  // namespace specset::io
