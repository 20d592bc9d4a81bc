#include <iostream>

#include "CLI11.hpp"
#include "growthflow/errors.hpp"
#include "growthflow/parallel.hpp"
#include "growthflow/scenario.hpp"

namespace gf = growthflow;

namespace {

int report(const gf::ScenarioOutcome& out) {
    for (const auto& line : out.summary) std::cout << line << '\n';
    if (!out.message.empty()) std::cerr << out.message << '\n';
    return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scenario runner for growing-velocity 2D Euler diagnostics"};
    app.require_subcommand(1);
    unsigned threads = 0;
    std::string out_dir;
    app.add_option("--threads", threads, "Cap on worker threads (0 = hardware)");
    app.add_option("--out", out_dir, "Output directory (overrides the config)");
    app.set_version_flag("--version", std::string(gf::library_version()));

    std::string config_path;
    int levels = 3;
    CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario");
    run_cmd->add_option("config", config_path, "Scenario config file")->required();
    CLI::App* conv_cmd = app.add_subcommand("convergence", "Refinement study over levels");
    conv_cmd->add_option("config", config_path, "Scenario config file")->required();
    conv_cmd->add_option("--levels", levels, "Number of levels (>= 2)");
    // Global options may also follow the subcommand.
    run_cmd->fallthrough();
    conv_cmd->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (threads > 0) gf::set_max_threads(threads);
    gf::ScenarioConfig config;
    try {
        config = gf::ScenarioConfig::load(config_path);
    } catch (const gf::Error& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 2;
    }
    if (!out_dir.empty()) config.out = out_dir;

    if (*run_cmd) return report(gf::run(config));
    return report(gf::convergence(config, levels));
}
