#pragma once

#include "kgfw/constants.hpp"
#include "kgfw/error.hpp"
#include "kgfw/evolution.hpp"
#include "kgfw/potentials.hpp"
#include "kgfw/spectral.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace kgfw {

enum class OlcSampling { snapshot_times, barrier_exits };
enum class RunRepresentation { fw, canonical, both };

/// Flat `section.key -> value` settings, as read from a config file or
/// command-line overrides. Values are raw strings; arrays look like `[1, 2, 3]`.
using Settings = std::map<std::string, std::string>;

struct GridConfig {
    double x_min = -40.0;
    double x_max = 40.0;
    std::size_t n_points = 1024;
};

struct ScenarioConfig {
    PhysicalConstants constants;
    GridConfig grid;
    BarrierSpec barrier;
    InitialPacketSpec packet;
    RunRepresentation representation = RunRepresentation::fw;
    std::vector<double> times;
    double t0 = 0.0;
    bool free_reference = false;
    OlcSampling olc_sampling = OlcSampling::snapshot_times;
    std::string output_dir = "out";
    EigenOptions solver;

    /// Representations actually run, FW first.
    std::vector<Representation> representations() const;
};

/// Settings of a named preset: `default`, `fig1`, `fig2` or `fig3`.
Settings preset_settings(std::string_view name);

/// Parses an INI-style file: `[section]` headers, `key = value` lines,
/// `#` comments, quoted strings, `[a, b]` arrays.
Settings read_settings(const std::filesystem::path& path);

/// Parses `section.key=value`.
void apply_override(Settings& settings, std::string_view assignment);

struct ConfigViolation {
    std::string field;
    std::string message;
};

/// Builds a config from settings. Unknown keys and unparsable values are
/// reported as violations; the returned config is then only partially filled.
ScenarioConfig config_from_settings(const Settings& settings, std::vector<ConfigViolation>* violations = nullptr);

/// Empty iff the config is runnable.
std::vector<ConfigViolation> validate_config(const ScenarioConfig& config);

nlohmann::json config_to_json(const ScenarioConfig& config);

/// A stage of `run` failed; `stage` names it.
class StageError : public NumericalError {
public:
    StageError(std::string stage, const std::string& what)
        : NumericalError(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct RunManifest {
    nlohmann::json config;
    nlohmann::json residuals;  // per representation, the validate_spectrum values
    std::vector<std::string> files;  // relative to the output directory
    nlohmann::json timing;     // seconds per stage

    nlohmann::json to_json() const;
};

/// Runs the scenario and writes every artifact plus manifest.json into
/// config.output_dir. Throws ConfigError if the config does not validate
/// and StageError for numerical failures.
RunManifest run(const ScenarioConfig& config);

}  // namespace kgfw
