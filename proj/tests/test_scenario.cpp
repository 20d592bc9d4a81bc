#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "growthflow/errors.hpp"
#include "growthflow/scenario.hpp"
#include "json.hpp"

using namespace growthflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("growthflow_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
    const ScenarioConfig c = ScenarioConfig::parse(R"(
# pair run
scenario = "pair_shift"
h = const
n = 24
dt = 0.05   # coarse
T = 0.5
lambdas = [0.5, 1, 4]
epsilon = 1e-3
out = "some dir"
)");
    CHECK(c.scenario == ScenarioKind::PairShift);
    CHECK(c.h == "const");
    CHECK(c.zeta == "const");
    CHECK(c.n == 24);
    CHECK(c.dt == 0.05);
    CHECK(c.lambdas == std::vector<double>{0.5, 1.0, 4.0});
    CHECK(c.epsilon == 1e-3);
    CHECK(c.out == fs::path("some dir"));
    CHECK(c.echo().at("scenario") == "pair_shift");

    CHECK(ScenarioConfig::parse("h = power:0.25").zeta == "power:0.25");
    CHECK_THROWS_AS(ScenarioConfig::parse("colour = red"), BadArgument);
    CHECK_THROWS_AS(ScenarioConfig::parse("scenario = tornado"), BadArgument);
    CHECK_THROWS_AS(ScenarioConfig::parse("n = many"), BadArgument);
    CHECK_THROWS_AS(ScenarioConfig::parse("lambdas = [1, x]"), BadArgument);
    CHECK_THROWS_AS(ScenarioConfig::parse("seed = -1"), BadArgument);
    CHECK_THROWS_AS(ScenarioConfig::load("/nonexistent/config.toml"), BadArgument);
}

TEST_CASE("config validation") {
    ScenarioConfig c;
    CHECK_NOTHROW(c.validate());
    c.dt = -0.01;
    CHECK_THROWS_AS(c.validate(), BadArgument);
    c = ScenarioConfig{};
    c.times = {0.03};
    CHECK_THROWS_AS(c.validate(), BadArgument);
    c = ScenarioConfig{};
    c.h = "exp";
    CHECK_THROWS_AS(c.validate(), BadArgument);
    c = ScenarioConfig{};
    c.scenario = ScenarioKind::PairShift;
    c.h = "power:0.25";
    c.zeta = "const";
    CHECK_THROWS_AS(c.validate(), HypothesisViolation);
    c.zeta = "power:0.5";
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("exit codes") {
    ScenarioConfig bad;
    bad.dt = 0.0;
    bad.out = scratch("bad");
    CHECK(run(bad).exit_code == 2);

    ScenarioConfig hyp;
    hyp.scenario = ScenarioKind::PairAmplitude;
    hyp.h = "power:0.25";
    hyp.zeta = "const";
    hyp.out = scratch("hyp");
    CHECK(run(hyp).exit_code == 3);

    ScenarioConfig audit;
    audit.scenario = ScenarioKind::GrowthboundAudit;
    audit.h = "quarterlog";
    audit.out = scratch("audit");
    const ScenarioOutcome a = run(audit);
    CHECK(a.exit_code == 0);
    CHECK(fs::exists(audit.out / "growth_bound.csv"));
    CHECK(fs::exists(audit.out / "manifest.json"));

    CHECK(convergence(audit, 2).exit_code == 2);
    ScenarioConfig rk;
    rk.out = scratch("conv_one");
    CHECK(convergence(rk, 1).exit_code == 2);
}

TEST_CASE("identical pair run writes zero series") {
    ScenarioConfig c;
    c.scenario = ScenarioKind::PairShift;
    c.n = 16;
    c.dt = 0.05;
    c.T = 0.3;
    c.epsilon = 0.0;
    c.out = scratch("zero");
    const ScenarioOutcome o = run(c);
    REQUIRE(o.exit_code == 0);
    const auto m = nlohmann::json::parse(slurp(c.out / "manifest.json"));
    CHECK(m["measured"]["aT"].get<double>() == 0.0);
    CHECK(m["measured"]["M_T"].get<double>() == 0.0);
    CHECK(m["config"]["scenario"] == "pair_shift");
    CHECK(m["library"]["version"] == library_version());
    const auto s = nlohmann::json::parse(slurp(c.out / "stability.json"));
    for (double v : s["eta"].get<std::vector<double>>()) CHECK(v == 0.0);
}

TEST_CASE("runs are deterministic") {
    ScenarioConfig c;
    c.scenario = ScenarioKind::PairShift;
    c.n = 16;
    c.dt = 0.05;
    c.T = 0.3;
    c.epsilon = 0.01;
    c.out = scratch("det_a");
    REQUIRE(run(c).exit_code == 0);
    const std::string a = slurp(c.out / "stability.csv");
    c.out = scratch("det_b");
    REQUIRE(run(c).exit_code == 0);
    CHECK(a == slurp(c.out / "stability.csv"));
    CHECK(!a.empty());
}
