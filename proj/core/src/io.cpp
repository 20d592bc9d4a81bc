#include "growthflow/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "growthflow/errors.hpp"
#include "json.hpp"

namespace growthflow::io {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw BadArgument("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw BadArgument("failed writing " + path.string());
}

void write_field_csv(const std::filesystem::path& path, const VortexParticleField& field) {
    std::string s = "x,y,omega,area\n";
    for (std::size_t i = 0; i < field.size(); ++i) {
        s += format_double(field.positions[i].x) + ',' + format_double(field.positions[i].y) + ',' +
             format_double(field.omega[i]) + ',' + format_double(field.areas[i]) + '\n';
    }
    write_text(path, s);
}

namespace {

double parse_double(std::string_view tok, const std::string& where) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw BadArgument("bad number '" + std::string(tok) + "' in " + where);
    return v;
}

}  // namespace

VortexParticleField read_field_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw BadArgument("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line.rfind("x,y,omega,area", 0) != 0) throw BadArgument(path.string() + ": expected header x,y,omega,area");
    VortexParticleField f;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double v[4];
        std::size_t start = 0;
        for (int c = 0; c < 4; ++c) {
            const std::size_t comma = c < 3 ? line.find(',', start) : line.size();
            if (comma == std::string::npos) throw BadArgument(path.string() + ": short row " + std::to_string(row));
            v[c] = parse_double(std::string_view(line).substr(start, comma - start),
                                path.string() + " row " + std::to_string(row));
            start = comma + 1;
        }
        f.positions.push_back({v[0], v[1]});
        f.omega.push_back(v[2]);
        f.areas.push_back(v[3]);
        f.support_radius = std::max(f.support_radius, norm(Vec2{v[0], v[1]}));
    }
    f.validate();
    return f;
}

void write_trajectory_csv(const std::filesystem::path& path, const FlowTrajectorySet& traj, std::size_t stride) {
    if (stride == 0) throw BadArgument("trajectory stride must be positive");
    std::string s = "t,track_id,x,y\n";
    for (std::size_t k = 0; k < traj.steps(); k += stride) {
        const std::string t = format_double(traj.times[k]);
        for (std::size_t i = 0; i < traj.tracks(); ++i) {
            const Vec2 p = traj.positions[k][i];
            s += t + ',' + std::to_string(i) + ',' + format_double(p.x) + ',' + format_double(p.y) + '\n';
        }
    }
    write_text(path, s);
}

std::string serfati_json(const std::string& scenario, const SerfatiResidual& res) {
    json rows = json::array();
    for (std::size_t l = 0; l < res.lambdas.size(); ++l)
        for (std::size_t t = 0; t < res.times.size(); ++t)
            for (std::size_t p = 0; p < res.eval_points.size(); ++p) {
                const Vec2 a = res.lhs[l][t][p];
                const Vec2 b = res.rhs[l][t][p];
                rows.push_back({{"scenario", scenario},
                                {"lambda", res.lambdas[l]},
                                {"time", res.times[t]},
                                {"point", {res.eval_points[p].x, res.eval_points[p].y}},
                                {"lhs", {a.x, a.y}},
                                {"rhs", {b.x, b.y}},
                                {"abs_err", norm(a - b)}});
            }
    return rows.dump(1) + '\n';
}

void write_serfati_json(const std::filesystem::path& path, const std::string& scenario, const SerfatiResidual& res) {
    write_text(path, serfati_json(scenario, res));
}

std::string stability_json(const StabilityReport& r) {
    json j;
    j["times"] = r.times;
    j["eta"] = r.eta;
    j["L"] = r.L;
    j["M"] = r.M;
    j["Q"] = r.Q;
    j["J_norm"] = r.J_norm;
    j["J1_norm"] = r.J1_norm;
    j["aT"] = r.aT;
    j["du0"] = r.du0;
    j["domega0"] = r.domega0;
    j["s_zeta_norm"] = r.s_zeta_norm;
    j["C0"] = r.C0;
    j["T"] = r.T;
    j["zeta"] = r.zeta_label;
    j["h"] = r.h_label;
    return j.dump(1) + '\n';
}

void write_stability_csv(const std::filesystem::path& path, const StabilityReport& r) {
    const std::vector<double> a = r.aT_series();
    std::string s = "t,eta,L,M,Q,J_norm,J1_norm,aT\n";
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        s += format_double(r.times[k]) + ',' + format_double(r.eta[k]) + ',' + format_double(r.L[k]) + ',' +
             format_double(r.M[k]) + ',' + format_double(r.Q[k]) + ',' + format_double(r.J_norm[k]) + ',' +
             format_double(r.J1_norm[k]) + ',' + format_double(a[k]) + '\n';
    }
    write_text(path, s);
}

}  // namespace growthflow::io
