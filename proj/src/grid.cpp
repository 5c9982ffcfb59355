#include "kgfw/grid.hpp"

#include <boost/math/constants/constants.hpp>

#include <stdexcept>
#include <string>

namespace kgfw {

bool Grids::same_as(const Grids& other) const {
    return space.x_min == other.space.x_min && space.x_max == other.space.x_max && space.n == other.space.n &&
           hbar == other.hbar;
}

Grids make_grids(double x_min, double x_max, std::size_t n, double hbar) {
    if (!(x_max > x_min)) throw std::invalid_argument("grid: x_max must exceed x_min");
    if (n < 8) throw std::invalid_argument("grid: need at least 8 points, got " + std::to_string(n));
    if (n % 2 != 0) throw std::invalid_argument("grid: point count must be even, got " + std::to_string(n));
    if (!(hbar > 0.0)) throw std::invalid_argument("grid: hbar must be positive");

    Grids g;
    g.space = {x_min, x_max, n};
    g.momentum = {boost::math::constants::two_pi<double>() * hbar / (x_max - x_min), n};
    g.hbar = hbar;
    return g;
}

}  // namespace kgfw
