#include "clrcast/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "clrcast/error.hpp"

namespace clrcast {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_number(const std::string& s, const std::string& where) {
    double x = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last || s.empty()) throw DataError(where + ": cannot parse number '" + s + "'");
    if (!std::isfinite(x)) throw DataError(where + ": non-finite value '" + s + "'");
    return x;
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

Observations parse_observations_csv(const std::string& text, const std::string& source) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    Observations obs;
    bool header_seen = false;
    bool with_date = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(trim(line), ',');
        const std::string where = source + ":" + std::to_string(lineno);
        if (!header_seen) {
            if (fields == std::vector<std::string>{"date", "x", "y"}) {
                with_date = true;
            } else if (fields != std::vector<std::string>{"x", "y"}) {
                throw DataError(where + ": expected header 'date,x,y' or 'x,y'");
            }
            header_seen = true;
            continue;
        }
        const std::size_t want = with_date ? 3 : 2;
        if (fields.size() != want)
            throw DataError(where + ": expected " + std::to_string(want) + " fields, got " + std::to_string(fields.size()));
        if (with_date) {
            if (fields[0].empty()) throw DataError(where + ": empty date");
            if (!obs.dates.empty() && !(obs.dates.back() < fields[0]))
                throw DataError(where + ": dates not strictly increasing ('" + fields[0] + "' after '" + obs.dates.back() + "')");
            obs.dates.push_back(fields[0]);
        }
        obs.x.push_back(parse_number(fields[want - 2], where));
        obs.y.push_back(parse_number(fields[want - 1], where));
    }
    if (!header_seen) throw DataError(source + ": empty file");
    return obs;
}

Observations read_observations_csv(const std::filesystem::path& path) {
    return parse_observations_csv(read_text(path), path.string());
}

void write_observations_csv(const std::filesystem::path& path, const Observations& obs) {
    const bool with_date = !obs.dates.empty();
    std::string out = with_date ? "date,x,y\n" : "x,y\n";
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (with_date) out += obs.dates[i] + ",";
        out += format_double(obs.x[i]) + "," + format_double(obs.y[i]) + "\n";
    }
    write_text(path, out);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write " + path.string());
    os << text;
    if (!os) throw DataError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot read " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_grid_csv(const std::filesystem::path& path, const DensityField& f) {
    if (!f.design.is_grid()) throw ConfigError("write_grid_csv: grid design required");
    const int G = f.design.grid_size();
    std::string out = "# grid=" + std::to_string(G) + " space=" + (f.space == Space::density ? "density" : "clr") +
                      " u=" + format_double(f.design.u_lo()) + ":" + format_double(f.design.u_hi()) +
                      " v=" + format_double(f.design.v_lo()) + ":" + format_double(f.design.v_hi());
    if (f.meta.clip_count > 0) out += " clipped=" + std::to_string(f.meta.clip_count);
    out += '\n';
    for (int r = 0; r < G; ++r) {
        for (int c = 0; c < G; ++c) {
            if (c > 0) out += ',';
            out += format_double(f.values(static_cast<Eigen::Index>(r) * G + c));
        }
        out += '\n';
    }
    write_text(path, out);
}

DensityField read_grid_csv(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw DataError(path.string() + ": missing grid header");
    int G = 0;
    std::string space;
    double u0 = 0, u1 = 1, v0 = 0, v1 = 1;
    std::size_t clipped = 0;
    for (const auto& tok : split(line.substr(2), ' ')) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        const std::string where = path.string() + ":1";
        if (key == "grid") {
            G = static_cast<int>(parse_number(val, where));
        } else if (key == "space") {
            space = val;
        } else if (key == "clipped") {
            clipped = static_cast<std::size_t>(parse_number(val, where));
        } else if (key == "u" || key == "v") {
            const auto colon = val.find(':');
            if (colon == std::string::npos) throw DataError(where + ": bad range '" + val + "'");
            const double lo = parse_number(val.substr(0, colon), where);
            const double hi = parse_number(val.substr(colon + 1), where);
            (key == "u" ? u0 : v0) = lo;
            (key == "u" ? u1 : v1) = hi;
        }
    }
    if (G < 1 || (space != "density" && space != "clr")) throw DataError(path.string() + ": malformed grid header");
    DensityField f;
    f.design = Design::midpoint_grid(G, u0, u1, v0, v1);
    f.space = space == "density" ? Space::density : Space::clr;
    f.meta.clip_count = clipped;
    f.values.resize(static_cast<Eigen::Index>(G) * G);
    int r = 0;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(trim(line), ',');
        const std::string where = path.string() + ":" + std::to_string(lineno);
        if (r >= G || static_cast<int>(fields.size()) != G) throw DataError(where + ": grid shape mismatch");
        for (int c = 0; c < G; ++c) f.values(static_cast<Eigen::Index>(r) * G + c) = parse_number(fields[static_cast<std::size_t>(c)], where);
        ++r;
    }
    if (r != G) throw DataError(path.string() + ": expected " + std::to_string(G) + " rows");
    return f;
}

nlohmann::json to_json(const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json to_json(const Vec& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

nlohmann::json to_json(const DensityField& f) {
    nlohmann::json j;
    j["space"] = f.space == Space::density ? "density" : "clr";
    if (f.design.is_grid()) {
        j["design"] = {{"kind", "grid"}, {"G", f.design.grid_size()},
                       {"u", {f.design.u_lo(), f.design.u_hi()}}, {"v", {f.design.v_lo(), f.design.v_hi()}}};
    } else {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : f.design.points()) pts.push_back({p.u, p.v});
        j["design"] = {{"kind", "scattered"}, {"points", pts}};
    }
    j["values"] = to_json(f.values);
    nlohmann::json meta;
    if (f.meta.bandwidth) meta["bandwidth"] = *f.meta.bandwidth;
    meta["clip_count"] = f.meta.clip_count;
    if (f.meta.seed) meta["seed"] = *f.meta.seed;
    if (f.meta.mc_stderr) meta["mc_stderr"] = *f.meta.mc_stderr;
    j["meta"] = meta;
    return j;
}

nlohmann::json to_json(const SplineSurface& s) {
    return {{"degree", s.basis.degree()},
            {"knots_u", s.basis.u().extended()},
            {"knots_v", s.basis.v().extended()},
            {"coefficients", to_json(s.coeffs)},
            {"free_coefficients", to_json(s.free_coeffs)},
            {"zero_integral", s.zero_integral},
            {"diagnostics",
             {{"residual", s.diagnostics.residual},
              {"objective_least_squares", s.diagnostics.least_squares},
              {"objective_penalty", s.diagnostics.penalty},
              {"integral", s.diagnostics.integral}}}};
}

nlohmann::json to_json(const FpcaModel& m) {
    return {{"components", m.components()},
            {"eigen_coefficients", to_json(m.A)},
            {"eigenvalues", to_json(m.eigenvalues)},
            {"explained", to_json(m.explained)},
            {"rotation", to_json(m.rotation)},
            {"varimax_converged", m.varimax_converged},
            {"varimax_sweeps", m.varimax_sweeps},
            {"scores", to_json(m.scores)}};
}

nlohmann::json to_json(const VarModel& m) {
    nlohmann::json phi = nlohmann::json::array();
    for (const auto& P : m.Phi) phi.push_back(to_json(P));
    return {{"p", m.p},
            {"model", model_letter(m.deterministic)},
            {"Phi", phi},
            {"constant", to_json(m.constant)},
            {"trend", to_json(m.trend)},
            {"Sigma", to_json(m.Sigma)},
            {"Sigma_ml", to_json(m.Sigma_ml)},
            {"sigma2_restricted", m.sigma2},
            {"T", m.T},
            {"T_eff", m.T_eff},
            {"spectral_radius", m.spectral_radius},
            {"stable", m.stable}};
}

nlohmann::json to_json(const ScoreForecast& f) {
    return {{"point", to_json(f.point)}, {"half_width", to_json(f.half_width)},
            {"lower", to_json(f.lower())}, {"upper", to_json(f.upper())}};
}

}  // namespace clrcast
