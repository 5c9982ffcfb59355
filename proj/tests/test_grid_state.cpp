#include "helpers.hpp"

#include "kgfw/grid.hpp"
#include "kgfw/state.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>
#include <random>
#include <sstream>

using namespace kgfw;

TEST_CASE("make_grids follows the box duality") {
    auto g = make_grids(-std::numbers::pi, std::numbers::pi, 8);
    CHECK(g.momentum.dp == doctest::Approx(1.0).epsilon(1e-15));

    g = make_grids(-80.0, 80.0, 1024);
    CHECK(g.momentum.dp == doctest::Approx(2.0 * std::numbers::pi / 160.0).epsilon(1e-15));
    CHECK(g.momentum.dp == doctest::Approx(0.03927).epsilon(1e-4));
    CHECK(g.momentum.dp * g.space.dx() * 1024 == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-14));

    g = make_grids(0.0, 10.0, 16, 2.5);
    CHECK(g.momentum.dp * g.space.dx() * 16 == doctest::Approx(2.0 * std::numbers::pi * 2.5).epsilon(1e-14));
    CHECK(g.momentum.p_min() == doctest::Approx(-8 * g.momentum.dp));
    CHECK(g.momentum.p_max() == doctest::Approx(7 * g.momentum.dp));
    CHECK(g.momentum.p(8) == 0.0);
    CHECK(g.space.x(0) == 0.0);
    CHECK(g.space.x(15) == doctest::Approx(10.0 - g.space.dx()));
}

TEST_CASE("make_grids rejects bad input") {
    CHECK_THROWS_AS(make_grids(0.0, 1.0, 7), std::invalid_argument);
    CHECK_THROWS_AS(make_grids(0.0, 1.0, 6), std::invalid_argument);
    CHECK_THROWS_AS(make_grids(1.0, 0.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(make_grids(1.0, 1.0, 8), std::invalid_argument);
}

TEST_CASE("physical constants") {
    PhysicalConstants k;
    CHECK(k.compton_wavelength() == 1.0);
    CHECK_NOTHROW(k.validate());
    k.m = 0.0;
    CHECK_THROWS_AS(k.validate(), std::invalid_argument);
}

TEST_CASE("to_position matches the direct sum") {
    const auto g = make_grids(-3.0, 5.0, 16, 1.3);
    const auto s = testing::random_state(16, Domain::momentum, 7);
    const auto x = to_position(s, g);
    for (std::size_t j = 0; j < 16; ++j) {
        std::complex<double> sum = 0.0;
        for (std::size_t m = 0; m < 16; ++m)
            sum += to_double(s.phi[m]) * std::polar(1.0, g.momentum.p(m) * g.space.x(j) / g.hbar);
        sum *= g.momentum.dp / std::sqrt(2.0 * std::numbers::pi * g.hbar);
        CHECK(std::abs(to_double(x.phi[j]) - sum) < 1e-12);
    }
}

TEST_CASE("single momentum mode has constant magnitude in position space") {
    const auto g = make_grids(-10.0, 10.0, 64);
    auto s = TwoComponentState::zeros(64, Representation::fw, Domain::momentum);
    s.phi[32] = 1;  // p = 0
    const auto x = to_position(s, g);
    const double expected = g.momentum.dp / std::sqrt(2.0 * std::numbers::pi);
    for (std::size_t j = 0; j < 64; ++j) {
        CHECK(std::abs(to_double(x.phi[j])) == doctest::Approx(expected).epsilon(1e-14));
        CHECK(to_double(x.chi[j]) == std::complex<double>(0.0));
    }
}

TEST_CASE("constant position profile concentrates at p = 0") {
    const auto g = make_grids(-10.0, 10.0, 64);
    auto s = TwoComponentState::zeros(64, Representation::fw, Domain::position);
    for (auto& v : s.phi) v = 1;
    const auto p = to_momentum(s, g);
    for (std::size_t m = 0; m < 64; ++m) {
        if (m == 32) CHECK(std::abs(to_double(p.phi[m])) > 1.0);
        else CHECK(std::abs(to_double(p.phi[m])) < 1e-14);
    }
}

TEST_CASE("transforms are mutually inverse, linear and unitary") {
    const auto g = make_grids(-17.0, 23.0, 256);
    const auto s = testing::random_state(256, Domain::momentum, 11);
    const auto back = to_momentum(to_position(s, g), g);
    CHECK(testing::rel_l2(back, s) < 1e-12);

    auto sx = testing::random_state(256, Domain::position, 12);
    CHECK(testing::rel_l2(to_position(to_momentum(sx, g), g), sx) < 1e-12);

    // Parseval
    const auto x = to_position(s, g);
    double px = 0.0, pp = 0.0;
    for (std::size_t j = 0; j < 256; ++j) {
        px += std::norm(to_double(x.phi[j])) * g.space.dx();
        pp += std::norm(to_double(s.phi[j])) * g.momentum.dp;
    }
    CHECK(px == doctest::Approx(pp).epsilon(1e-10));

    // linearity
    const auto t = testing::random_state(256, Domain::position, 13);
    const complex_ext a{0.3, -1.2}, b{2.0, 0.5};
    auto combo = sx;
    for (std::size_t j = 0; j < 256; ++j) {
        combo.phi[j] = a * sx.phi[j] + b * t.phi[j];
        combo.chi[j] = a * sx.chi[j] + b * t.chi[j];
    }
    const auto fs = to_momentum(sx, g), ft = to_momentum(t, g), fc = to_momentum(combo, g);
    auto expected = fc;
    for (std::size_t j = 0; j < 256; ++j) {
        expected.phi[j] = a * fs.phi[j] + b * ft.phi[j];
        expected.chi[j] = a * fs.chi[j] + b * ft.chi[j];
    }
    CHECK(testing::rel_l2(fc, expected) < 1e-12);
}

TEST_CASE("cos^8 packet survives a momentum round trip") {
    const auto g = make_grids(-40.0, 40.0, 1024);
    InitialPacketSpec spec;
    const auto p = initial_wavepacket(spec, g, PhysicalConstants{});
    const auto x = to_position(p, g);
    const auto again = to_position(to_momentum(x, g), g);
    CHECK(testing::rel_l2(again, x) < 1e-10);
    // samples are proportional to the analytic profile; the peak falls between
    // grid points, so the amplitude comes from a least-squares fit
    std::vector<double> profile(1024), sample(1024);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < 1024; ++j) {
        const double xx = g.space.x(j);
        profile[j] = std::abs(xx + 4.0) <= 1.0 ? std::pow(std::cos(std::numbers::pi * (xx + 4.0) / 2.0), 8) : 0.0;
        sample[j] = std::abs(to_double(x.phi[j]));
        num += profile[j] * sample[j];
        den += profile[j] * profile[j];
    }
    const double amplitude = num / den;
    for (std::size_t j = 0; j < 1024; ++j)
        CHECK(sample[j] == doctest::Approx(amplitude * profile[j]).epsilon(1e-10).scale(1e-12));
}

TEST_CASE("charge density is the sigma3 quadratic form") {
    const auto g = make_grids(-5.0, 5.0, 32);
    auto s = testing::random_state(32, Domain::position, 3);

    auto particle = s;
    for (auto& v : particle.chi) v = 0;
    for (double r : charge_density(particle, g, 1.0).values()) CHECK(r >= 0.0);

    auto balanced = s;
    balanced.chi = balanced.phi;
    for (double r : charge_density(balanced, g, 1.0).values()) CHECK(r == 0.0);

    const auto base = charge_density(s, g, 2.0);
    bool has_negative = false;
    for (std::size_t j = 0; j < 32; ++j) {
        CHECK(base.at(j) == doctest::Approx(2.0 * (std::norm(to_double(s.phi[j])) - std::norm(to_double(s.chi[j])))));
        has_negative = has_negative || base.at(j) < 0.0;
    }
    CHECK(has_negative);  // mixed states may be locally negative

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (int trial = 0; trial < 10; ++trial) {
        auto rotated = s;
        const complex_ext phase = unit_phase_ext(angle(rng));
        for (auto& v : rotated.phi) v *= phase;
        for (auto& v : rotated.chi) v *= phase;
        const auto rho = charge_density(rotated, g, 2.0);
        for (std::size_t j = 0; j < 32; ++j) CHECK(rho.at(j) == doctest::Approx(base.at(j)).epsilon(1e-14));
    }
}

TEST_CASE("grid and domain mismatches are rejected") {
    const auto g = make_grids(-5.0, 5.0, 32);
    const auto s = testing::random_state(16, Domain::momentum, 1);
    CHECK_THROWS_AS(to_position(s, g), std::invalid_argument);
    const auto m = testing::random_state(32, Domain::momentum, 1);
    CHECK_THROWS_AS(to_momentum(m, g), std::invalid_argument);
    CHECK_THROWS_AS(charge_density(m, g, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(representation_from_string("dirac"), std::invalid_argument);
    CHECK(representation_from_string("FW") == Representation::fw);
}

TEST_CASE("density CSV") {
    const auto g = make_grids(0.0, 8.0, 8);
    auto s = TwoComponentState::zeros(8, Representation::fw, Domain::position, 1.5);
    s.phi[1] = complex_ext{1.0 / 3.0, 0.0};
    std::ostringstream out;
    write_density_csv(out, charge_density(s, g, 1.0));
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,rho,t");
    std::getline(in, line);
    CHECK(line == "0.00000000000000e+00,0.00000000000000e+00,1.50000000000000e+00");
    std::getline(in, line);
    CHECK(line == "1.00000000000000e+00,1.11111111111111e-01,1.50000000000000e+00");
}
