#include "kgfw/scenario.hpp"

#include "kgfw/diagnostics.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace kgfw {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<Representation> ScenarioConfig::representations() const {
    switch (representation) {
        case RunRepresentation::fw: return {Representation::fw};
        case RunRepresentation::canonical: return {Representation::canonical};
        case RunRepresentation::both: return {Representation::fw, Representation::canonical};
    }
    return {};
}

Settings preset_settings(std::string_view name) {
    Settings s{
        {"constants.hbar", "1"},          {"constants.c", "1"},
        {"constants.m", "1"},             {"constants.q", "1"},
        {"grid.x_min", "-40"},            {"grid.x_max", "40"},
        {"grid.n_points", "1024"},        {"barrier.v0", "5"},
        {"barrier.length", "2"},          {"barrier.steepness", "20"},
        {"barrier.count", "7"},           {"barrier.spacing", "4"},
        {"barrier.first_center", "0"},    {"packet.x0", "-4"},
        {"packet.p0", "2"},               {"packet.width", "2"},
        {"packet.normalize_charge", "true"}, {"run.representation", "fw"},
        {"run.times", "[0, 6.5, 28.5]"},  {"run.t0", "0"},
        {"run.free_reference", "false"},  {"run.olc_sampling", "snapshot_times"},
        {"run.output_dir", "out"},        {"solver.refine_nonreal", "true"},
        {"solver.pair_tolerance", "1e-8"}, {"solver.biorthonormality_threshold", "1e-8"},
    };
    if (name == "default" || name == "fig1") return s;
    if (name == "fig2") {
        s["run.representation"] = "both";
        s["run.times"] = "[28.5]";
        s["run.free_reference"] = "true";
        return s;
    }
    if (name == "fig3") {
        s["run.olc_sampling"] = "barrier_exits";
        s["run.times"] = "[]";
        return s;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected fig1, fig2 or fig3)");
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

// Drops `#` comments that are not inside quotes.
std::string strip_comments(std::istream& in) {
    std::string out;
    std::string line;
    while (std::getline(in, line)) {
        char quote = 0;
        std::size_t cut = line.size();
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char ch = line[i];
            if (quote) {
                if (ch == quote) quote = 0;
            } else if (ch == '"' || ch == '\'') {
                quote = ch;
            } else if (ch == '#') {
                cut = i;
                break;
            }
        }
        out += line.substr(0, cut);
        out += '\n';
    }
    return out;
}

double parse_double(const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
        throw std::invalid_argument("expected a number, got '" + text + "'");
    return v;
}

std::size_t parse_count(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("expected a non-negative integer, got '" + text + "'");
    return static_cast<std::size_t>(std::stoull(t));
}

bool parse_bool(const std::string& text) {
    std::string t = trim(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw std::invalid_argument("expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& text) {
    std::string t = trim(text);
    if (!t.empty() && t.front() == '[') {
        if (t.back() != ']') throw std::invalid_argument("unterminated list '" + text + "'");
        t = t.substr(1, t.size() - 2);
    }
    std::vector<double> out;
    if (trim(t).empty()) return out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
    return out;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string time_label(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", t);
    return buf;
}

}  // namespace

Settings read_settings(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::istringstream cleaned(strip_comments(in));
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(cleaned, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(path.string() + ": line " + std::to_string(e.line()) + ": " + e.message());
    }
    Settings out;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError(path.string() + ": key '" + section + "' is outside any [section]");
        for (const auto& [key, value] : body) out[section + "." + key] = unquote(trim(value.data()));
    }
    return out;
}

void apply_override(Settings& settings, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ConfigError("override '" + std::string(assignment) + "' must look like section.key=value");
    const std::string key = trim(assignment.substr(0, eq));
    if (key.find('.') == std::string::npos || key.front() == '.' || key.back() == '.')
        throw ConfigError("override key '" + key + "' must look like section.key");
    settings[key] = unquote(trim(assignment.substr(eq + 1)));
}

ScenarioConfig config_from_settings(const Settings& settings, std::vector<ConfigViolation>* violations) {
    ScenarioConfig c;
    std::vector<ConfigViolation> local;
    auto& problems = violations ? *violations : local;
    std::size_t count = 0;
    double spacing = 4.0;
    double first_center = 0.0;
    bool explicit_centers = false;

    const std::map<std::string, std::function<void(const std::string&)>> handlers{
        {"constants.hbar", [&](const std::string& v) { c.constants.hbar = parse_double(v); }},
        {"constants.c", [&](const std::string& v) { c.constants.c = parse_double(v); }},
        {"constants.m", [&](const std::string& v) { c.constants.m = parse_double(v); }},
        {"constants.q", [&](const std::string& v) { c.constants.q = parse_double(v); }},
        {"grid.x_min", [&](const std::string& v) { c.grid.x_min = parse_double(v); }},
        {"grid.x_max", [&](const std::string& v) { c.grid.x_max = parse_double(v); }},
        {"grid.n_points", [&](const std::string& v) { c.grid.n_points = parse_count(v); }},
        {"barrier.v0", [&](const std::string& v) { c.barrier.v0 = parse_double(v); }},
        {"barrier.length", [&](const std::string& v) { c.barrier.length = parse_double(v); }},
        {"barrier.steepness", [&](const std::string& v) { c.barrier.steepness = parse_double(v); }},
        {"barrier.count", [&](const std::string& v) { count = parse_count(v); }},
        {"barrier.spacing", [&](const std::string& v) { spacing = parse_double(v); }},
        {"barrier.first_center", [&](const std::string& v) { first_center = parse_double(v); }},
        {"barrier.centers",
         [&](const std::string& v) {
             c.barrier.centers = parse_list(v);
             explicit_centers = true;
         }},
        {"packet.x0", [&](const std::string& v) { c.packet.x0 = parse_double(v); }},
        {"packet.p0", [&](const std::string& v) { c.packet.p0 = parse_double(v); }},
        {"packet.width", [&](const std::string& v) { c.packet.width = parse_double(v); }},
        {"packet.normalize_charge", [&](const std::string& v) { c.packet.normalize_charge = parse_bool(v); }},
        {"run.representation",
         [&](const std::string& v) {
             if (v == "fw" || v == "FW") c.representation = RunRepresentation::fw;
             else if (v == "canonical") c.representation = RunRepresentation::canonical;
             else if (v == "both") c.representation = RunRepresentation::both;
             else throw std::invalid_argument("expected fw, canonical or both, got '" + v + "'");
         }},
        {"run.times", [&](const std::string& v) { c.times = parse_list(v); }},
        {"run.t0", [&](const std::string& v) { c.t0 = parse_double(v); }},
        {"run.free_reference", [&](const std::string& v) { c.free_reference = parse_bool(v); }},
        {"run.olc_sampling",
         [&](const std::string& v) {
             if (v == "snapshot_times") c.olc_sampling = OlcSampling::snapshot_times;
             else if (v == "barrier_exits") c.olc_sampling = OlcSampling::barrier_exits;
             else throw std::invalid_argument("expected snapshot_times or barrier_exits, got '" + v + "'");
         }},
        {"run.output_dir", [&](const std::string& v) { c.output_dir = v; }},
        {"solver.refine_nonreal", [&](const std::string& v) { c.solver.refine_nonreal = parse_bool(v); }},
        {"solver.pair_tolerance", [&](const std::string& v) { c.solver.pair_tolerance = parse_double(v); }},
        {"solver.biorthonormality_threshold",
         [&](const std::string& v) { c.solver.biorthonormality_threshold = parse_double(v); }},
    };

    for (const auto& [key, value] : settings) {
        const auto h = handlers.find(key);
        if (h == handlers.end()) {
            problems.push_back({key, "unknown setting"});
            continue;
        }
        try {
            h->second(value);
        } catch (const std::exception& e) {
            problems.push_back({key, e.what()});
        }
    }
    if (!explicit_centers) {
        c.barrier = BarrierSpec::evenly_spaced(c.barrier.v0, c.barrier.length, c.barrier.steepness, count, spacing,
                                               first_center);
    }
    return c;
}

std::vector<ConfigViolation> validate_config(const ScenarioConfig& c) {
    std::vector<ConfigViolation> out;
    auto positive = [&](double v, const char* field) {
        if (!(v > 0.0)) out.push_back({field, "must be strictly positive"});
    };
    positive(c.constants.hbar, "constants.hbar");
    positive(c.constants.c, "constants.c");
    positive(c.constants.m, "constants.m");
    positive(c.constants.q, "constants.q");

    bool grid_ok = true;
    if (!(c.grid.x_max > c.grid.x_min)) {
        out.push_back({"grid.x_max", "must exceed grid.x_min"});
        grid_ok = false;
    }
    if (c.grid.n_points < 8) {
        out.push_back({"grid.n_points", "must be at least 8"});
        grid_ok = false;
    } else if (c.grid.n_points % 2 != 0) {
        out.push_back({"grid.n_points", "must be even"});
        grid_ok = false;
    }

    try {
        c.barrier.validate();
    } catch (const std::invalid_argument& e) {
        out.push_back({"barrier", e.what()});
    }

    if (grid_ok && c.constants.hbar > 0.0) {
        const Grids grids = make_grids(c.grid.x_min, c.grid.x_max, c.grid.n_points, c.constants.hbar);
        for (const auto& p : packet_violations(c.packet, grids, &c.barrier)) out.push_back({"packet", p});
    }

    if (c.times.empty() && c.olc_sampling == OlcSampling::snapshot_times)
        out.push_back({"run.times", "needs at least one snapshot time"});
    for (std::size_t i = 1; i < c.times.size(); ++i)
        if (c.times[i] < c.times[i - 1]) {
            out.push_back({"run.times", "must be non-decreasing"});
            break;
        }
    if (c.olc_sampling == OlcSampling::barrier_exits && c.barrier.centers.empty())
        out.push_back({"run.olc_sampling", "barrier_exits needs at least one barrier"});

    if (c.constants.c > 0.0 && c.grid.x_max > c.grid.x_min) {
        const LightConeSpec cone = LightConeSpec::from_packet(c.packet, c.t0, c.constants);
        double latest = c.t0;
        for (double t : c.times) latest = std::max(latest, t);
        if (c.olc_sampling == OlcSampling::barrier_exits)
            for (const auto& e : barrier_exit_times(c.barrier, cone)) latest = std::max(latest, e.t);
        if (cone.position(latest) >= c.grid.x_max)
            out.push_back({"run.times", "light cone reaches x = " + format_number(cone.position(latest)) +
                                            " at t = " + format_number(latest) + ", beyond grid.x_max"});
    }
    if (!(c.solver.pair_tolerance > 0.0)) out.push_back({"solver.pair_tolerance", "must be strictly positive"});
    if (!(c.solver.biorthonormality_threshold > 0.0))
        out.push_back({"solver.biorthonormality_threshold", "must be strictly positive"});
    if (c.output_dir.empty()) out.push_back({"run.output_dir", "must not be empty"});
    return out;
}

json config_to_json(const ScenarioConfig& c) {
    const char* rep = c.representation == RunRepresentation::fw          ? "fw"
                      : c.representation == RunRepresentation::canonical ? "canonical"
                                                                         : "both";
    return json{
        {"constants", {{"hbar", c.constants.hbar}, {"c", c.constants.c}, {"m", c.constants.m}, {"q", c.constants.q}}},
        {"grid", {{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"n_points", c.grid.n_points}}},
        {"barrier",
         {{"v0", c.barrier.v0},
          {"length", c.barrier.length},
          {"steepness", c.barrier.steepness},
          {"centers", c.barrier.centers}}},
        {"packet",
         {{"x0", c.packet.x0},
          {"p0", c.packet.p0},
          {"width", c.packet.width},
          {"normalize_charge", c.packet.normalize_charge}}},
        {"run",
         {{"representation", rep},
          {"times", c.times},
          {"t0", c.t0},
          {"free_reference", c.free_reference},
          {"olc_sampling", c.olc_sampling == OlcSampling::barrier_exits ? "barrier_exits" : "snapshot_times"},
          {"output_dir", c.output_dir}}},
        {"solver",
         {{"refine_nonreal", c.solver.refine_nonreal},
          {"pair_tolerance", c.solver.pair_tolerance},
          {"biorthonormality_threshold", c.solver.biorthonormality_threshold}}},
    };
}

json RunManifest::to_json() const {
    return json{{"config", config}, {"residuals", residuals}, {"files", files}, {"timing", timing}};
}

namespace {

class Stopwatch {
public:
    explicit Stopwatch(json& sink) : sink_(sink) {}

    template <class F>
    auto time(const std::string& stage, F&& f) {
        const auto start = std::chrono::steady_clock::now();
        auto finish = [&] {
            sink_[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        };
        try {
            if constexpr (std::is_void_v<decltype(f())>) {
                f();
                finish();
            } else {
                auto result = f();
                finish();
                return result;
            }
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(stage, e.what());
        }
    }

private:
    json& sink_;
};

json report_json(const ValidationReport& r, double kernel_residual, const SpectralDecomposition& d) {
    double worst_refined = 0.0;
    for (const auto& m : d.refined) worst_refined = std::max(worst_refined, m.residual);
    return json{{"pseudo_hermiticity", kernel_residual},
                {"biorthonormality", r.biorthonormality},
                {"pairing_mismatch", r.pairing_mismatch},
                {"conjugation_closure", r.conjugation_closure},
                {"sigma3_relation", r.sigma3_relation},
                {"completeness", r.completeness},
                {"nonreal_pairs", r.nonreal_pairs},
                {"max_imaginary", r.max_imaginary},
                {"max_abs_eigenvalue", r.max_abs_eigenvalue},
                {"refined_modes", d.refined.size()},
                {"max_refined_residual", worst_refined},
                {"flagged", r.flagged()}};
}

}  // namespace

RunManifest run(const ScenarioConfig& config) {
    const auto violations = validate_config(config);
    if (!violations.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& v : violations) msg += "\n  " + v.field + ": " + v.message;
        throw ConfigError(msg);
    }

    RunManifest manifest;
    manifest.config = config_to_json(config);
    manifest.residuals = json::object();
    manifest.timing = json::object();
    Stopwatch watch(manifest.timing);
    const auto run_start = std::chrono::steady_clock::now();

    std::vector<std::pair<std::string, std::string>> outputs;
    const Grids grids = make_grids(config.grid.x_min, config.grid.x_max, config.grid.n_points, config.constants.hbar);
    const FourierTable table =
        watch.time("fourier_table", [&] { return FourierTable(config.barrier, grids.momentum, grids.hbar); });
    const LightConeSpec cone = LightConeSpec::from_packet(config.packet, config.t0, config.constants);

    struct Sample {
        double t;
        std::optional<std::size_t> barrier;
        bool snapshot;
    };
    std::vector<Sample> samples;
    if (config.olc_sampling == OlcSampling::barrier_exits) {
        for (const auto& e : barrier_exit_times(config.barrier, cone)) samples.push_back({e.t, e.index, false});
    } else {
        for (double t : config.times) samples.push_back({t, std::nullopt, true});
    }
    if (config.olc_sampling == OlcSampling::barrier_exits)
        for (double t : config.times) samples.push_back({t, std::nullopt, true});

    auto diagnose = [&](const TwoComponentState& momentum_state, const Sample& s, std::vector<DiagnosticsRecord>& rows,
                        const std::string& density_name) {
        const DensityProfile rho = charge_density(to_position(momentum_state, grids), grids, config.constants.q);
        if (s.snapshot) {
            std::ostringstream csv;
            write_density_csv(csv, rho);
            outputs.emplace_back(density_name, csv.str());
        }
        if (!s.snapshot || config.olc_sampling == OlcSampling::snapshot_times)
            rows.push_back({s.t, total_charge(rho), olc_fraction(rho, cone), s.barrier});
    };

    for (const Representation rep : config.representations()) {
        const std::string tag(to_string(rep));
        const KernelMatrix kernel =
            watch.time("assemble_" + tag, [&] { return assemble_kernel(rep, grids, config.constants, table); });
        const double kernel_residual = pseudo_hermiticity_residual(kernel);
        const SpectralDecomposition decomp =
            watch.time("decompose_" + tag, [&] { return eigendecompose(kernel, config.solver); });
        const ValidationReport report = watch.time("validate_" + tag, [&] { return validate_spectrum(decomp, kernel); });
        const json residuals = report_json(report, kernel_residual, decomp);
        manifest.residuals[tag] = residuals;
        if (!report.passed()) {
            std::clog << "kgfw: " << tag << " spectrum validation flagged:";
            for (const auto& f : report.flagged()) std::clog << ' ' << f;
            std::clog << '\n';
        }

        const TwoComponentState state0 = watch.time("initial_state_" + tag, [&] {
            auto s = initial_wavepacket(config.packet, grids, config.constants, &config.barrier, rep);
            s.time = config.t0;
            return s;
        });
        const SpectralCoefficients coeffs = watch.time("project_" + tag, [&] { return project(decomp, state0); });

        std::vector<DiagnosticsRecord> rows;
        std::vector<DiagnosticsRecord> free_rows;
        watch.time("evolve_" + tag, [&] {
            for (const auto& s : samples) {
                diagnose(evolve(decomp, coeffs, s.t), s, rows, "density_" + tag + "_t" + time_label(s.t) + ".csv");
                if (config.free_reference) {
                    const auto free = rep == Representation::fw
                                          ? free_evolve(state0, s.t, grids, config.constants)
                                          : free_evolve_canonical(state0, s.t, grids, config.constants);
                    diagnose(free, s, free_rows, "density_" + tag + "_free_t" + time_label(s.t) + ".csv");
                }
            }
        });

        std::ostringstream diag;
        write_diagnostics_csv(diag, rows);
        outputs.emplace_back("diagnostics_" + tag + ".csv", diag.str());
        if (config.free_reference) {
            std::ostringstream free_diag;
            write_diagnostics_csv(free_diag, free_rows);
            outputs.emplace_back("diagnostics_" + tag + "_free.csv", free_diag.str());
        }
        std::ostringstream eig;
        write_eigenvalues_csv(eig, decomp);
        outputs.emplace_back("eigenvalues_" + tag + ".csv", eig.str());
        outputs.emplace_back("validation_" + tag + ".json", residuals.dump(2) + "\n");
    }

    watch.time("write", [&] {
        const fs::path dir(config.output_dir);
        fs::create_directories(dir);
        for (const auto& [name, body] : outputs) {
            std::ofstream out(dir / name, std::ios::binary);
            out << body;
            if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
            manifest.files.push_back(name);
        }
        manifest.files.emplace_back("manifest.json");
        manifest.timing["total"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        out << manifest.to_json().dump(2) << '\n';
        if (!out) throw std::runtime_error("cannot write manifest.json");
    });
    return manifest;
}

}  // namespace kgfw
