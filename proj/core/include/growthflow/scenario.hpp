#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace growthflow {

const char* library_version();

enum class ScenarioKind {
    RankineSteady,
    Kirchhoff,
    PairShift,
    PairAmplitude,
    SerfatiResidual,
    GrowthboundAudit,
    MorreySweep,
};

const char* to_string(ScenarioKind k);

struct ScenarioConfig {
    ScenarioKind scenario = ScenarioKind::RankineSteady;
    std::string h = "const";
    std::string zeta = "const";
    int n = 48;
    double dt = 0.02;
    double T = 1.0;
    std::vector<double> lambdas{0.5, 1.0, 2.0};
    /// Serfati evaluation times; the run covers max(times).
    std::vector<double> times{1.0, 2.0};
    double epsilon = 0.01;
    std::filesystem::path out = "out";
    unsigned long seed = 1;
    std::size_t samples = 10000;

    /// Flat `key = value` text. Values are numbers, strings (optionally
    /// quoted) or `[a, b, ...]` number lists; `#` starts a comment.
    /// Throws BadArgument on unknown keys or invalid values.
    static ScenarioConfig parse(const std::string& text);
    static ScenarioConfig load(const std::filesystem::path& path);

    /// Range checks; for pair scenarios also zeta >= h (HypothesisViolation).
    void validate() const;

    std::map<std::string, std::string> echo() const;
};

struct ScenarioOutcome {
    int exit_code = 0;
    std::string message;
    std::vector<std::string> summary;
    std::vector<std::filesystem::path> artifacts;
};

/// Runs one scenario and writes manifest.json plus CSV/JSON artifacts into
/// config.out. Exit codes: 0 ok, 1 failed check or internal error,
/// 2 invalid config, 3 hypothesis violation, 4 numerical blow-up.
ScenarioOutcome run(const ScenarioConfig& config);

/// Reruns with n and 1/dt doubled per level and writes convergence.csv with
/// the error measure of the scenario per level and observed orders.
ScenarioOutcome convergence(const ScenarioConfig& config, int levels);

}  // namespace growthflow
