#include "growthflow/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "growthflow/errors.hpp"
#include "growthflow/fields.hpp"
#include "growthflow/flow.hpp"
#include "growthflow/growth_bounds.hpp"
#include "growthflow/io.hpp"
#include "growthflow/serfati.hpp"
#include "growthflow/stability.hpp"
#include "json.hpp"

#ifndef GROWTHFLOW_VERSION
#define GROWTHFLOW_VERSION "0.0.0"
#endif

namespace growthflow {

using nlohmann::json;

const char* library_version() { return GROWTHFLOW_VERSION; }

namespace {

constexpr std::pair<ScenarioKind, const char*> kKinds[] = {
    {ScenarioKind::RankineSteady, "rankine_steady"},
    {ScenarioKind::Kirchhoff, "kirchhoff"},
    {ScenarioKind::PairShift, "pair_shift"},
    {ScenarioKind::PairAmplitude, "pair_amplitude"},
    {ScenarioKind::SerfatiResidual, "serfati_residual"},
    {ScenarioKind::GrowthboundAudit, "growthbound_audit"},
    {ScenarioKind::MorreySweep, "morrey_sweep"},
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_number(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out))
        throw BadArgument("config key '" + key + "': '" + v + "' is not a finite number");
    return out;
}

long long to_integer(const std::string& key, const std::string& v) {
    const double d = to_number(key, v);
    if (d != std::floor(d) || std::abs(d) > 9e15) throw BadArgument("config key '" + key + "' must be an integer");
    return static_cast<long long>(d);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw BadArgument("config key '" + key + "' expects a list like [0.5, 1]");
    std::vector<double> out;
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw BadArgument("config key '" + key + "' has an empty list entry");
        out.push_back(to_number(key, item));
    }
    return out;
}

std::string unquote(const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    return v;
}

std::string list_text(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + io::format_double(v[i]);
    return s + "]";
}

// ---------------------------------------------------------------------------

struct Run {
    const ScenarioConfig& cfg;
    ScenarioOutcome outcome;
    json measured = json::object();
    bool failed = false;

    void check(const std::string& name, double value, const std::string& relation, double bound, bool pass) {
        outcome.summary.push_back(name + " = " + io::format_double(value) + " " + relation + " " +
                                  io::format_double(bound) + (pass ? "  PASS" : "  FAIL"));
        measured[name] = value;
        failed = failed || !pass;
    }
    void info(const std::string& name, double value) {
        outcome.summary.push_back(name + " = " + io::format_double(value));
        measured[name] = value;
    }
    void info(const std::string& name, const std::string& value) {
        outcome.summary.push_back(name + " = " + value);
        measured[name] = value;
    }
    void artifact(const std::filesystem::path& p) { outcome.artifacts.push_back(p); }
    std::filesystem::path path(const std::string& name) const { return cfg.out / name; }
};

std::vector<Vec2> rankine_probes() {
    std::vector<Vec2> p;
    for (double r : {1.5, 2.0, 3.0})
        for (int k = 0; k < 4; ++k) {
            const double th = (k + 0.5) * std::numbers::pi / 2.0;
            p.push_back({r * std::cos(th), r * std::sin(th)});
        }
    return p;
}

std::vector<Vec2> serfati_points() {
    std::vector<Vec2> p;
    for (double r : {0.6, 1.5, 3.0})
        for (int k = 0; k < 4; ++k) {
            const double th = (k + 0.5) * std::numbers::pi / 2.0;
            p.push_back({r * std::cos(th), r * std::sin(th)});
        }
    return p;
}

std::vector<Vec2> kirchhoff_tracers() {
    std::vector<Vec2> p;
    for (int j = -3; j <= 3; ++j)
        for (int i = -5; i <= 5; ++i) p.push_back({0.5 * i, 0.5 * j});
    return p;
}

void run_rankine(Run& r) {
    const ScenarioConfig& c = r.cfg;
    const GrowthBound h = bound_from_id(c.h);
    const VortexParticleField field = make_rankine(1.0, 1.0, c.n);
    const std::vector<Vec2> probes = rankine_probes();
    const FlowTrajectorySet traj = advect(field, probes, c.T, c.dt, h);
    io::write_field_csv(r.path("field.csv"), field);
    r.artifact("field.csv");
    const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(0.1 / c.dt)));
    io::write_trajectory_csv(r.path("trajectory.csv"), traj, stride);
    r.artifact("trajectory.csv");

    const double drift = velocity_drift(traj, probes);
    double centroid = 0.0;
    for (std::size_t k = 0; k < traj.steps(); ++k) centroid = std::max(centroid, norm(traj.field_at(k).centroid()));
    r.info("particles", static_cast<double>(field.size()));
    r.check("velocity_drift", drift, "<", 1e-3, drift < 1e-3);
    r.check("centroid_drift", centroid, "<=", 1e-8, centroid <= 1e-8);
    const FlowBoundCheck fb = flow_bound_check(traj, h);
    r.info("C0", fb.C0);
    r.check("flow_bound_ratio", fb.max_ratio, "<=", 1.05 * fb.C0, fb.pass);
}

void run_kirchhoff(Run& r) {
    const ScenarioConfig& c = r.cfg;
    const GrowthBound h = bound_from_id(c.h);
    const VortexParticleField field = make_kirchhoff(2.0, 1.0, 1.0, c.n);
    const std::vector<Vec2> tracers = kirchhoff_tracers();
    const FlowTrajectorySet traj = advect(field, tracers, c.T, c.dt, h);
    const RotationEstimate rot = rotation_rate(traj);
    const double exact = 2.0 / 9.0;
    const double rel = std::abs(rot.rate - exact) / exact;

    std::string s = "t,angle\n";
    for (std::size_t k = 0; k < rot.times.size(); ++k)
        s += io::format_double(rot.times[k]) + ',' + io::format_double(rot.angles[k]) + '\n';
    io::write_text(r.path("rotation.csv"), s);
    r.artifact("rotation.csv");
    io::write_field_csv(r.path("field.csv"), field);
    r.artifact("field.csv");
    const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(0.1 / c.dt)));
    io::write_trajectory_csv(r.path("trajectory.csv"), traj, stride);
    r.artifact("trajectory.csv");

    r.info("particles", static_cast<double>(field.size()));
    r.info("rotation_rate", rot.rate);
    r.check("rotation_rel_error", rel, "<=", 0.02, rel <= 0.02);
    const FlowBoundCheck fb = flow_bound_check(traj, h);
    r.info("C0", fb.C0);
    r.check("flow_bound_ratio", fb.max_ratio, "<=", 1.05 * fb.C0, fb.pass);
    const MocCheck moc = moc_check(traj, fb.C0, field.size(), tracers.size());
    r.info("moc_constant", moc.constant);
}

StabilityReport pair_report(const ScenarioConfig& c) {
    PairSetup s;
    s.zeta = bound_from_id(c.zeta);
    s.h = bound_from_id(c.h);
    s.T = c.T;
    s.dt = c.dt;
    s.field1 = make_rankine(1.0, 1.0, c.n);
    if (c.scenario == ScenarioKind::PairShift)
        s.field2 = c.epsilon == 0.0 ? s.field1 : s.field1.translated({c.epsilon, 0.0});
    else
        s.field2 = s.field1.scaled(1.0 + c.epsilon);
    s.probes = sample_grid(1.5, 8);
    return run_pair(s);
}

void run_pair_scenario(Run& r) {
    const StabilityReport rep = pair_report(r.cfg);
    io::write_stability_csv(r.path("stability.csv"), rep);
    io::write_text(r.path("stability.json"), io::stability_json(rep));
    r.artifact("stability.csv");
    r.artifact("stability.json");

    bool eta_ok = true;
    double worst = 0.0;
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
        eta_ok = eta_ok && rep.eta[k] <= rep.M[k];
        if (rep.M[k] > 0.0) worst = std::max(worst, rep.eta[k] / rep.M[k]);
    }
    r.check("eta_over_M_max", worst, "<=", 1.0, eta_ok);
    r.info("aT", rep.aT);
    r.info("M_T", rep.M.back());
    r.info("Q_max", *std::max_element(rep.Q.begin(), rep.Q.end()));
    r.info("s_zeta_norm", rep.s_zeta_norm);
    r.info("C0", rep.C0);
    const std::span<const StabilityReport> one(&rep, 1);
    const EnvelopeFit small = fit_small_data(one);
    r.info("small_data_C", small.C);
    r.info("small_data_samples", static_cast<double>(small.samples));
    const EnvelopeFit q = q_envelope_check(rep);
    r.info("q_envelope_C", q.C);
    r.check("q_envelope_margin", q.margin, ">=", 0.0, q.pass);
    r.info("large_data_C", fit_large_data(one));
    r.info("aT_over_s_zeta", aT_simple_ratio(rep));
}

void run_serfati(Run& r) {
    const ScenarioConfig& c = r.cfg;
    const GrowthBound h = bound_from_id(c.h);
    const VortexParticleField field = make_kirchhoff(2.0, 1.0, 1.0, c.n);
    const double T = *std::max_element(c.times.begin(), c.times.end());
    const FlowTrajectorySet traj = advect(field, {}, T, c.dt, h);
    SerfatiOptions opt;
    opt.time_stride = static_cast<std::size_t>(std::max(1.0, std::round(0.04 / c.dt)));
    const std::vector<Vec2> pts = serfati_points();
    const SerfatiResidual res = serfati_residual(traj, pts, c.times, c.lambdas, opt);
    io::write_serfati_json(r.path("serfati.json"), "serfati_residual", res);
    r.artifact("serfati.json");
    for (std::size_t l = 0; l < res.lambdas.size(); ++l)
        r.info("residual_norm_lambda_" + io::format_double(res.lambdas[l]), res.residual_norm[l]);
    r.info("max_residual", res.max_residual);
}

void run_audit(Run& r) {
    const GrowthBound h = bound_from_id(r.cfg.h);
    const TierReport tier = validate_tier(h);
    r.info("tier", std::string(to_string(tier.tier)));
    for (const Diagnostic& d : tier.failures)
        r.outcome.summary.push_back("failed " + d.predicate + " at " + io::format_double(d.witness) + ": " + d.detail);
    if (tier.envelope) {
        r.info("envelope", std::string(to_string(tier.envelope->shape)));
        r.info("envelope_constant", tier.envelope->constant);
    }
    std::string s = "r,h,H,E,mu\n";
    for (int i = 0; i <= 60; ++i) {
        const double x = std::pow(10.0, -3.0 + 8.0 * i / 60.0);
        std::string H = "nan", E = "nan", mu = "nan";
        if (tier.tier >= Tier::Growth) H = io::format_double(compute_H(h, x));
        if (tier.tier >= Tier::WellPosedness) {
            const EMu em = compute_E_and_mu(h, x, tier.envelope);
            E = io::format_double(em.E);
            mu = io::format_double(em.mu);
        }
        s += io::format_double(x) + ',' + io::format_double(h(x)) + ',' + H + ',' + E + ',' + mu + '\n';
    }
    io::write_text(r.path("growth_bound.csv"), s);
    r.artifact("growth_bound.csv");
}

void run_morrey(Run& r) {
    const ScenarioConfig& c = r.cfg;
    const GrowthBound h = bound_from_id(c.h);
    std::vector<std::pair<std::string, AnalyticSField>> fields{{"rankine", rankine_velocity(1.0, 1.0)}};
    if (c.h.rfind("power:", 0) == 0) {
        const double alpha = to_number("h", c.h.substr(6));
        fields.emplace_back("power", power_velocity(alpha));
    }
    const auto samples = morrey_samples(c.samples, 50.0, c.seed);
    const std::vector<double> rings{10.0, 100.0, 1000.0};
    const std::vector<Vec2> grid = sample_grid(5.0, 20, rings, 64);
    std::string s = "field,ratio\n";
    for (const auto& [name, u] : fields) {
        const double ratio = morrey_modulus_check(u, h, samples, grid);
        s += name + ',' + io::format_double(ratio) + '\n';
        r.info("morrey_ratio_" + name, ratio);
    }
    io::write_text(r.path("morrey.csv"), s);
    r.artifact("morrey.csv");
}

void dispatch(Run& r) {
    switch (r.cfg.scenario) {
        case ScenarioKind::RankineSteady: run_rankine(r); break;
        case ScenarioKind::Kirchhoff: run_kirchhoff(r); break;
        case ScenarioKind::PairShift:
        case ScenarioKind::PairAmplitude: run_pair_scenario(r); break;
        case ScenarioKind::SerfatiResidual: run_serfati(r); break;
        case ScenarioKind::GrowthboundAudit: run_audit(r); break;
        case ScenarioKind::MorreySweep: run_morrey(r); break;
    }
}

json config_json(const ScenarioConfig& c) {
    json j = json::object();
    for (const auto& [k, v] : c.echo()) j[k] = v;
    return j;
}

template <class F>
ScenarioOutcome guarded(F&& body) {
    ScenarioOutcome out;
    try {
        out = body();
    } catch (const HypothesisViolation& e) {
        out.exit_code = 3;
        out.message = std::string("hypothesis violation: ") + e.what();
    } catch (const BlowUp& e) {
        out.exit_code = 4;
        out.message = std::string("numerical blow-up: ") + e.what();
    } catch (const BadArgument& e) {
        out.exit_code = 2;
        out.message = std::string("invalid configuration: ") + e.what();
    } catch (const std::exception& e) {
        out.exit_code = 1;
        out.message = std::string("error: ") + e.what();
    }
    return out;
}

}  // namespace

const char* to_string(ScenarioKind k) {
    for (const auto& [kind, name] : kKinds)
        if (kind == k) return name;
    return "unknown";
}

ScenarioConfig ScenarioConfig::parse(const std::string& text) {
    ScenarioConfig c;
    bool zeta_set = false;
    std::stringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw BadArgument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string val = trim(std::string_view(line).substr(eq + 1));
        if (val.empty()) throw BadArgument("config key '" + key + "' has no value");
        if (key == "scenario") {
            const std::string name = unquote(val);
            const auto it = std::find_if(std::begin(kKinds), std::end(kKinds),
                                         [&](const auto& p) { return name == p.second; });
            if (it == std::end(kKinds)) throw BadArgument("unknown scenario '" + name + "'");
            c.scenario = it->first;
        } else if (key == "h") {
            c.h = unquote(val);
        } else if (key == "zeta") {
            c.zeta = unquote(val);
            zeta_set = true;
        } else if (key == "n") {
            const long long n = to_integer(key, val);
            if (n < 8 || n > 4096) throw BadArgument("n must be in [8, 4096]");
            c.n = static_cast<int>(n);
        } else if (key == "dt") {
            c.dt = to_number(key, val);
        } else if (key == "T") {
            c.T = to_number(key, val);
        } else if (key == "lambdas") {
            c.lambdas = to_list(key, val);
        } else if (key == "times") {
            c.times = to_list(key, val);
        } else if (key == "epsilon") {
            c.epsilon = to_number(key, val);
        } else if (key == "out") {
            c.out = unquote(val);
        } else if (key == "seed") {
            const long long s = to_integer(key, val);
            if (s < 0) throw BadArgument("seed must be nonnegative");
            c.seed = static_cast<unsigned long>(s);
        } else if (key == "samples") {
            const long long s = to_integer(key, val);
            if (s < 1) throw BadArgument("samples must be positive");
            c.samples = static_cast<std::size_t>(s);
        } else {
            throw BadArgument("unknown config key '" + key + "'");
        }
    }
    if (!zeta_set) c.zeta = c.h;
    return c;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw BadArgument("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void ScenarioConfig::validate() const {
    if (!(dt > 0.0)) throw BadArgument("dt must be positive");
    if (!(T > 0.0)) throw BadArgument("T must be positive");
    if (dt > T) throw BadArgument("dt must not exceed T");
    if (!(epsilon >= 0.0)) throw BadArgument("epsilon must be nonnegative");
    if (lambdas.empty()) throw BadArgument("lambdas must not be empty");
    for (double l : lambdas)
        if (!(l > 0.0)) throw BadArgument("lambdas must be positive");
    if (times.empty()) throw BadArgument("times must not be empty");
    for (double t : times) {
        if (!(t > 0.0)) throw BadArgument("times must be positive");
        if (std::abs(t / dt - std::round(t / dt)) > 1e-9 * std::max(1.0, t / dt))
            throw BadArgument("times must lie on the dt grid");
    }
    if (out.empty()) throw BadArgument("out must not be empty");
    const GrowthBound hb = bound_from_id(h);
    const GrowthBound zb = bound_from_id(zeta);
    if (scenario == ScenarioKind::PairShift || scenario == ScenarioKind::PairAmplitude) {
        for (int i = 0; i <= 200; ++i) {
            const double r = i == 0 ? 0.0 : std::pow(10.0, -6.0 + 10.0 * i / 200.0);
            if (zb(r) < hb(r) * (1.0 - 1e-12))
                throw HypothesisViolation("zeta >= h fails at r = " + io::format_double(r));
        }
    }
}

std::map<std::string, std::string> ScenarioConfig::echo() const {
    return {{"scenario", to_string(scenario)},
            {"h", h},
            {"zeta", zeta},
            {"n", std::to_string(n)},
            {"dt", io::format_double(dt)},
            {"T", io::format_double(T)},
            {"lambdas", list_text(lambdas)},
            {"times", list_text(times)},
            {"epsilon", io::format_double(epsilon)},
            {"out", out.generic_string()},
            {"seed", std::to_string(seed)},
            {"samples", std::to_string(samples)}};
}

ScenarioOutcome run(const ScenarioConfig& config) {
    return guarded([&] {
        config.validate();
        Run r{config, {}, json::object(), false};
        std::filesystem::create_directories(config.out);
        dispatch(r);
        json manifest;
        manifest["library"] = {{"name", "growthflow"}, {"version", library_version()}};
        manifest["config"] = config_json(config);
        manifest["measured"] = r.measured;
        manifest["summary"] = r.outcome.summary;
        json arts = json::array();
        for (const auto& a : r.outcome.artifacts) arts.push_back(a.generic_string());
        manifest["artifacts"] = arts;
        io::write_text(config.out / "manifest.json", manifest.dump(2) + '\n');
        r.outcome.artifacts.push_back("manifest.json");
        r.outcome.exit_code = r.failed ? 1 : 0;
        if (r.failed) r.outcome.message = "one or more checks failed";
        return r.outcome;
    });
}

ScenarioOutcome convergence(const ScenarioConfig& config, int levels) {
    return guarded([&] {
        if (levels < 2) throw BadArgument("convergence needs levels >= 2");
        config.validate();
        if (config.scenario == ScenarioKind::GrowthboundAudit || config.scenario == ScenarioKind::MorreySweep)
            throw BadArgument(std::string("convergence is not defined for ") + to_string(config.scenario));

        std::vector<std::string> columns;
        std::vector<std::vector<double>> errors;
        ScenarioOutcome out;
        std::string table;
        for (int k = 0; k < levels; ++k) {
            ScenarioConfig c = config;
            c.n = config.n << k;
            c.dt = config.dt / static_cast<double>(1 << k);
            c.out = config.out / ("level" + std::to_string(k));
            c.validate();
            Run r{c, {}, json::object(), false};
            std::filesystem::create_directories(c.out);
            dispatch(r);
            std::vector<std::string> names;
            switch (c.scenario) {
                case ScenarioKind::RankineSteady: names = {"velocity_drift", "centroid_drift"}; break;
                case ScenarioKind::Kirchhoff: names = {"rotation_rel_error"}; break;
                case ScenarioKind::PairShift:
                case ScenarioKind::PairAmplitude: names = {"M_T", "aT"}; break;
                case ScenarioKind::SerfatiResidual:
                    for (double l : c.lambdas) names.push_back("residual_norm_lambda_" + io::format_double(l));
                    break;
                default: break;
            }
            if (k == 0) {
                columns = names;
                table = "level,n,dt";
                for (const auto& n : names) table += ',' + n + ',' + n + "_order";
                table += '\n';
            }
            std::vector<double> row;
            table += std::to_string(k) + ',' + std::to_string(c.n) + ',' + io::format_double(c.dt);
            for (std::size_t i = 0; i < names.size(); ++i) {
                const double e = r.measured.at(names[i]).get<double>();
                row.push_back(e);
                double order = std::nan("");
                if (k > 0 && errors.back()[i] > 0.0 && e > 0.0) order = std::log2(errors.back()[i] / e);
                table += ',' + io::format_double(e) + ',' + (std::isnan(order) ? std::string("nan") : io::format_double(order));
                out.summary.push_back("level " + std::to_string(k) + " " + names[i] + " = " + io::format_double(e) +
                                      (std::isnan(order) ? std::string() : " order " + io::format_double(order)));
            }
            table += '\n';
            errors.push_back(row);
        }
        io::write_text(config.out / "convergence.csv", table);
        out.artifacts.push_back("convergence.csv");
        return out;
    });
}

}  // namespace growthflow
