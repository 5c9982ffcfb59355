// kgfw run --config <file> [--preset fig1|fig2|fig3] [--output-dir DIR] [--n-points N] [--override key=value]...
//
// Exit codes: 0 success, 1 invalid configuration, 2 numerical failure.

#include "kgfw/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

int run_command(const std::string& config_path, const std::string& preset, const std::string& output_dir,
                std::size_t n_points, const std::vector<std::string>& overrides) {
    kgfw::Settings settings;
    kgfw::ScenarioConfig config;
    try {
        settings = kgfw::preset_settings(preset.empty() ? "default" : preset);
        if (!config_path.empty())
            for (const auto& [k, v] : kgfw::read_settings(config_path)) settings[k] = v;
        if (n_points) settings["grid.n_points"] = std::to_string(n_points);
        if (!output_dir.empty()) settings["run.output_dir"] = output_dir;
        for (const auto& o : overrides) kgfw::apply_override(settings, o);

        std::vector<kgfw::ConfigViolation> violations;
        config = kgfw::config_from_settings(settings, &violations);
        for (const auto& v : kgfw::validate_config(config)) violations.push_back(v);
        if (!violations.empty()) {
            std::cerr << "kgfw: invalid configuration\n";
            for (const auto& v : violations) std::cerr << "  " << v.field << ": " << v.message << '\n';
            return 1;
        }
    } catch (const kgfw::ConfigError& e) {
        std::cerr << "kgfw: " << e.what() << '\n';
        return 1;
    }

    try {
        const auto manifest = kgfw::run(config);
        std::cout << "wrote " << manifest.files.size() << " files to " << config.output_dir << " in "
                  << manifest.timing.value("total", 0.0) << " s\n";
        return 0;
    } catch (const kgfw::ConfigError& e) {
        std::cerr << "kgfw: " << e.what() << '\n';
        return 1;
    } catch (const kgfw::StageError& e) {
        std::cerr << "kgfw: stage " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "kgfw: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Klein-Gordon wavepacket dynamics through supercritical barrier trains"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a scenario and write CSV/JSON artifacts");
    std::string config_path;
    std::string preset;
    std::string output_dir;
    std::size_t n_points = 0;
    std::vector<std::string> overrides;
    run->add_option("--config", config_path, "scenario file (INI-style sections)")->check(CLI::ExistingFile);
    run->add_option("--preset", preset, "base preset")->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
    run->add_option("--output-dir", output_dir, "directory for artifacts");
    run->add_option("--n-points", n_points, "grid points N");
    run->add_option("--override", overrides, "section.key=value, repeatable")->take_all();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    if (config_path.empty() && preset.empty()) {
        std::cerr << "kgfw: run needs --config and/or --preset\n";
        return 1;
    }
    return run_command(config_path, preset, output_dir, n_points, overrides);
}
