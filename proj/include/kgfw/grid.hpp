#pragma once

#include <cstddef>

namespace kgfw {

/// Uniform periodic position grid; nodes sit at cell left edges,
/// x_j = x_min + j * dx for j = 0..n-1.
struct SpatialGrid {
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t n = 0;

    double length() const { return x_max - x_min; }
    double dx() const { return length() / static_cast<double>(n); }
    double x(std::size_t j) const { return x_min + static_cast<double>(j) * dx(); }
};

/// Momentum grid dual to a SpatialGrid: p_j = (j - n/2) * dp with
/// dp = 2 pi hbar / (x_max - x_min), so dp * dx * n = 2 pi hbar.
struct MomentumGrid {
    double dp = 0.0;
    std::size_t n = 0;

    double p(std::size_t j) const {
        return (static_cast<double>(j) - static_cast<double>(n / 2)) * dp;
    }
    double p_min() const { return p(0); }
    double p_max() const { return p(n - 1); }
};

struct Grids {
    SpatialGrid space;
    MomentumGrid momentum;
    double hbar = 1.0;

    std::size_t size() const { return space.n; }
    bool same_as(const Grids& other) const;
};

/// Builds the dual grids. Requires x_max > x_min and an even n >= 8.
Grids make_grids(double x_min, double x_max, std::size_t n, double hbar = 1.0);

}  // namespace kgfw
