#pragma once

#include "kgfw/constants.hpp"
#include "kgfw/grid.hpp"

#include <complex>
#include <cstddef>
#include <vector>

namespace kgfw {

/// A train of identical tanh-smoothed rectangular barriers.
struct BarrierSpec {
    double v0 = 0.0;         // barrier height
    double length = 0.0;     // width L
    double steepness = 0.0;  // edge steepness epsilon (inverse length)
    std::vector<double> centers;

    /// `count` barriers at first_center + i * spacing.
    static BarrierSpec evenly_spaced(double v0, double length, double steepness, std::size_t count,
                                     double spacing, double first_center = 0.0);

    /// V0 > 2 m c^2. Reported, not enforced.
    bool supercritical(const PhysicalConstants& constants) const;

    /// Throws std::invalid_argument on non-positive parameters, unsorted
    /// centers or overlapping barriers. A zero height is allowed (free run).
    void validate() const;

    double left_edge(std::size_t i) const { return centers[i] - 0.5 * length; }
    double right_edge(std::size_t i) const { return centers[i] + 0.5 * length; }
};

/// V(x) = sum_i V0/2 [tanh(eps(x - x_i + L/2)) - tanh(eps(x - x_i - L/2))].
double potential_value(const BarrierSpec& spec, double x);

/// Closed-form (1/sqrt(2 pi hbar)) * integral V(x) exp(-ikx/hbar) dx. Each
/// barrier contributes
///
///   exp(-i k x_i/hbar) (pi V0 / eps) sin(kL/2hbar) / sinh(pi k / 2 eps hbar) / sqrt(2 pi hbar)
///
/// which tends to V0 L / sqrt(2 pi hbar) as k -> 0.
std::complex<double> potential_fourier(const BarrierSpec& spec, double k, double hbar = 1.0);

/// Vtilde tabulated on every momentum difference k = (i - j) dp of a grid,
/// i.e. 2n - 1 offsets. Negative offsets are the exact conjugates of the
/// positive ones so kernels built from the table are exactly pseudo-Hermitian.
class FourierTable {
public:
    FourierTable(const BarrierSpec& spec, const MomentumGrid& momentum, double hbar);

    /// Vtilde(p_i - p_j) for offset = i - j.
    std::complex<double> at(std::ptrdiff_t offset) const {
        return values_[static_cast<std::size_t>(offset + static_cast<std::ptrdiff_t>(n_) - 1)];
    }

    std::size_t grid_size() const { return n_; }
    double dp() const { return dp_; }
    double hbar() const { return hbar_; }

private:
    std::size_t n_;
    double dp_;
    double hbar_;
    std::vector<std::complex<double>> values_;
};

}  // namespace kgfw
