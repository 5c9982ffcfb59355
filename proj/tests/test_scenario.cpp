#include "kgfw/scenario.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace kgfw;
namespace fs = std::filesystem;

namespace {

bool has_field(const std::vector<ConfigViolation>& v, const std::string& field) {
    for (const auto& x : v)
        if (x.field == field) return true;
    return false;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("kgfw_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Settings small_settings(const fs::path& out) {
    auto s = preset_settings("fig1");
    s["grid.x_min"] = "-10";
    s["grid.x_max"] = "22";
    s["grid.n_points"] = "128";
    s["barrier.count"] = "3";
    s["run.times"] = "[0, 2, 5]";
    s["run.output_dir"] = out.string();
    return s;
}

int run_cli(const std::string& args) {
    const int status = std::system((std::string(KGFW_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("presets") {
    std::vector<ConfigViolation> problems;
    const auto fig1 = config_from_settings(preset_settings("fig1"), &problems);
    CHECK(problems.empty());
    CHECK(validate_config(fig1).empty());
    CHECK(fig1.barrier.centers.size() == 7);
    CHECK(fig1.barrier.centers.back() == 24.0);
    CHECK(fig1.barrier.v0 == 5.0);
    CHECK(fig1.barrier.steepness == 20.0);
    CHECK(fig1.packet.x0 == -4.0);
    CHECK(fig1.packet.p0 == 2.0);
    CHECK(fig1.packet.width == 2.0);
    CHECK(fig1.times == std::vector<double>{0.0, 6.5, 28.5});
    CHECK(fig1.representations() == std::vector<Representation>{Representation::fw});

    const auto fig2 = config_from_settings(preset_settings("fig2"));
    CHECK(validate_config(fig2).empty());
    CHECK(fig2.free_reference);
    CHECK(fig2.representations().size() == 2);
    CHECK(fig2.times == std::vector<double>{28.5});

    const auto fig3 = config_from_settings(preset_settings("fig3"));
    CHECK(validate_config(fig3).empty());
    CHECK(fig3.olc_sampling == OlcSampling::barrier_exits);
    CHECK(fig3.times.empty());

    CHECK(validate_config(config_from_settings(preset_settings("default"))).empty());
    CHECK_THROWS_AS(preset_settings("fig4"), ConfigError);
}

TEST_CASE("validation names the offending field") {
    auto s = preset_settings("fig1");
    s["grid.n_points"] = "1023";
    CHECK(has_field(validate_config(config_from_settings(s)), "grid.n_points"));

    s = preset_settings("fig1");
    s["packet.x0"] = "-1.5";
    const auto v = validate_config(config_from_settings(s));
    REQUIRE(has_field(v, "packet"));
    CHECK(v.front().message.find("barrier 1") != std::string::npos);

    s = preset_settings("fig1");
    s["run.times"] = "[0, 5, 2]";
    CHECK(has_field(validate_config(config_from_settings(s)), "run.times"));

    s = preset_settings("fig1");
    s["run.times"] = "[0, 50]";
    CHECK(has_field(validate_config(config_from_settings(s)), "run.times"));

    s = preset_settings("fig1");
    s["barrier.spacing"] = "1.5";
    CHECK(has_field(validate_config(config_from_settings(s)), "barrier"));

    s = preset_settings("fig1");
    s["constants.m"] = "-1";
    CHECK(has_field(validate_config(config_from_settings(s)), "constants.m"));

    s = preset_settings("fig1");
    s["grid.x_max"] = "-50";
    CHECK(has_field(validate_config(config_from_settings(s)), "grid.x_max"));

    std::vector<ConfigViolation> parse;
    s = preset_settings("fig1");
    s["barrier.v0"] = "five";
    s["packet.colour"] = "red";
    s["run.representation"] = "dirac";
    config_from_settings(s, &parse);
    CHECK(has_field(parse, "barrier.v0"));
    CHECK(has_field(parse, "packet.colour"));
    CHECK(has_field(parse, "run.representation"));
}

TEST_CASE("explicit barrier centers") {
    auto s = preset_settings("fig1");
    s["barrier.centers"] = "[0, 5, 11]";
    const auto c = config_from_settings(s);
    CHECK(c.barrier.centers == std::vector<double>{0.0, 5.0, 11.0});
    CHECK(validate_config(c).empty());
}

TEST_CASE("config file and overrides") {
    const auto dir = scratch_dir("config");
    const auto file = dir / "scenario.toml";
    std::ofstream(file) << "# a scenario\n"
                           "[grid]\n"
                           "x_min = -20   # left\n"
                           "n_points = 256\n"
                           "[run]\n"
                           "representation = \"canonical\"\n"
                           "output_dir = \"out#1\"\n"
                           "times = [0, 1.5, 3]\n";
    auto s = preset_settings("fig1");
    for (const auto& [k, v] : read_settings(file)) s[k] = v;
    apply_override(s, "packet.p0=2.5");
    apply_override(s, " grid.x_max = 30 ");
    const auto c = config_from_settings(s);
    CHECK(c.grid.x_min == -20.0);
    CHECK(c.grid.x_max == 30.0);
    CHECK(c.grid.n_points == 256);
    CHECK(c.packet.p0 == 2.5);
    CHECK(c.output_dir == "out#1");
    CHECK(c.times == std::vector<double>{0.0, 1.5, 3.0});
    CHECK(c.representation == RunRepresentation::canonical);

    CHECK_THROWS_AS(apply_override(s, "p0"), ConfigError);
    CHECK_THROWS_AS(apply_override(s, "p0=3"), ConfigError);

    const auto bad = dir / "bad.toml";
    std::ofstream(bad) << "orphan = 1\n[grid]\nn_points = 64\n";
    CHECK_THROWS_AS(read_settings(bad), ConfigError);
    CHECK_THROWS_AS(read_settings(dir / "missing.toml"), ConfigError);
}

TEST_CASE("run writes a reproducible artifact set") {
    const auto a = scratch_dir("run_a");
    const auto b = scratch_dir("run_b");
    auto sa = small_settings(a);
    sa["run.representation"] = "both";
    sa["run.free_reference"] = "true";
    auto sb = sa;
    sb["run.output_dir"] = b.string();

    const auto manifest = run(config_from_settings(sa));
    run(config_from_settings(sb));

    for (const char* name : {"density_fw_t0.csv", "density_fw_t2.csv", "density_fw_t5.csv", "density_fw_free_t5.csv",
                             "density_canonical_t5.csv", "density_canonical_free_t5.csv", "diagnostics_fw.csv",
                             "diagnostics_fw_free.csv", "diagnostics_canonical.csv", "eigenvalues_fw.csv",
                             "eigenvalues_canonical.csv", "validation_fw.json", "manifest.json"}) {
        CHECK_MESSAGE(fs::exists(a / name), name);
    }
    for (const auto& entry : fs::directory_iterator(a)) {
        if (entry.path().extension() != ".csv") continue;
        CHECK_MESSAGE(slurp(entry.path()) == slurp(b / entry.path().filename()), entry.path().filename().string());
    }

    const auto j = nlohmann::json::parse(slurp(a / "manifest.json"));
    for (const char* key : {"config", "residuals", "files", "timing"}) CHECK(j.contains(key));
    CHECK(j["files"].size() == manifest.files.size());
    CHECK(j["config"]["grid"]["n_points"] == 128);
    CHECK(j["residuals"]["fw"] == nlohmann::json::parse(slurp(a / "validation_fw.json")));

    // manifest residuals are the validate_spectrum values
    const auto c = config_from_settings(sa);
    const auto grids = make_grids(c.grid.x_min, c.grid.x_max, c.grid.n_points);
    const auto kernel = assemble_fw_kernel(grids, c.constants, c.barrier);
    const auto report = validate_spectrum(eigendecompose(kernel, c.solver), kernel);
    CHECK(j["residuals"]["fw"]["biorthonormality"].get<double>() == report.biorthonormality);
    CHECK(j["residuals"]["fw"]["completeness"].get<double>() == report.completeness);
    CHECK(j["residuals"]["fw"]["sigma3_relation"].get<double>() == report.sigma3_relation);
    CHECK(j["residuals"]["fw"]["pairing_mismatch"].get<double>() == report.pairing_mismatch);

    std::ifstream diag(a / "diagnostics_fw.csv");
    std::string line;
    int rows = -1;
    while (std::getline(diag, line)) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("barrier-exit sampling writes one row per barrier") {
    const auto dir = scratch_dir("exits");
    auto s = small_settings(dir);
    s["run.olc_sampling"] = "barrier_exits";
    s["run.times"] = "[]";
    run(config_from_settings(s));
    std::ifstream diag(dir / "diagnostics_fw.csv");
    std::string line;
    std::getline(diag, line);
    std::vector<std::string> rows;
    while (std::getline(diag, line)) rows.push_back(line);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].rfind("4.00000000000000e+00,", 0) == 0);
    CHECK(rows[2].substr(rows[2].size() - 2) == ",3");
    CHECK_FALSE(fs::exists(dir / "density_fw_t4.csv"));
}

TEST_CASE("run rejects invalid configs and names failing stages") {
    auto s = small_settings(scratch_dir("invalid"));
    s["grid.n_points"] = "127";
    CHECK_THROWS_AS(run(config_from_settings(s)), ConfigError);

    s = small_settings(scratch_dir("stage"));
    s["solver.pair_tolerance"] = "1e-30";
    try {
        run(config_from_settings(s));
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "decompose_fw");
    }
}

TEST_CASE("command line exit codes") {
    const auto dir = scratch_dir("cli");
    CHECK(run_cli("run --preset fig1 --n-points 128 --override grid.x_min=-10 --override grid.x_max=22 "
                  "--override barrier.count=3 --override run.times=[0,2] --output-dir " +
                  (dir / "ok").string()) == 0);
    CHECK(fs::exists(dir / "ok" / "manifest.json"));
    CHECK(run_cli("run --preset fig1 --n-points 127 --output-dir " + (dir / "bad").string()) == 1);
    CHECK(run_cli("run --preset fig1 --override nonsense --output-dir " + (dir / "bad").string()) == 1);
    CHECK(run_cli("run") == 1);
    CHECK(run_cli("run --preset fig1 --n-points 128 --override grid.x_min=-10 --override grid.x_max=22 "
                  "--override barrier.count=3 --override run.times=[0] --override solver.pair_tolerance=1e-30 "
                  "--output-dir " +
                  (dir / "numerical").string()) == 2);
    CHECK_FALSE(fs::exists(dir / "bad"));

    const auto file = dir / "cfg.toml";
    std::ofstream(file) << "[grid]\nx_min = -10\nx_max = 22\nn_points = 128\n[barrier]\ncount = 3\n[run]\ntimes = [0]\n";
    CHECK(run_cli("run --config " + file.string() + " --output-dir " + (dir / "file").string()) == 0);
}
