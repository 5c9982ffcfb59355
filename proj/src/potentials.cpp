#include "kgfw/potentials.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/sinc.hpp>
#include <boost/math/special_functions/sinhc.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace kgfw {

namespace {

// tanh(a) - tanh(b) without cancellation when a and b share a sign.
double tanh_difference(double a, double b) {
    if (a < 0.0 && b < 0.0) return tanh_difference(-b, -a);
    if (a >= 0.0 && b >= 0.0) {
        const double ea = std::exp(-2.0 * a);
        const double eb = std::exp(-2.0 * b);
        return -2.0 * eb * std::expm1(-2.0 * (a - b)) / ((1.0 + ea) * (1.0 + eb));
    }
    return std::tanh(a) - std::tanh(b);
}

// x / sinh(x), finite for all x (0 in the far tail).
double x_over_sinh(double x) {
    const double ax = std::abs(x);
    if (ax > 20.0) {
        const double e = std::exp(-ax);
        return 2.0 * ax * e / (1.0 - e * e);
    }
    return 1.0 / boost::math::sinhc_pi(x);
}

}  // namespace

BarrierSpec BarrierSpec::evenly_spaced(double v0, double length, double steepness, std::size_t count,
                                       double spacing, double first_center) {
    BarrierSpec spec{v0, length, steepness, {}};
    spec.centers.reserve(count);
    for (std::size_t i = 0; i < count; ++i) spec.centers.push_back(first_center + static_cast<double>(i) * spacing);
    return spec;
}

bool BarrierSpec::supercritical(const PhysicalConstants& constants) const {
    return v0 > 2.0 * constants.rest_energy();
}

void BarrierSpec::validate() const {
    if (!(v0 >= 0.0)) throw std::invalid_argument("barrier: v0 must be non-negative");
    if (!(length > 0.0)) throw std::invalid_argument("barrier: length must be positive");
    if (!(steepness > 0.0)) throw std::invalid_argument("barrier: steepness must be positive");
    for (std::size_t i = 1; i < centers.size(); ++i) {
        if (!(centers[i] > centers[i - 1]))
            throw std::invalid_argument("barrier: centers must be strictly increasing (index " + std::to_string(i) +
                                        ")");
        if (!(centers[i] - centers[i - 1] > length))
            throw std::invalid_argument("barrier: barriers " + std::to_string(i) + " and " + std::to_string(i + 1) +
                                        " overlap");
    }
}

double potential_value(const BarrierSpec& spec, double x) {
    double v = 0.0;
    for (double xi : spec.centers) {
        const double a = spec.steepness * (x - xi + 0.5 * spec.length);
        const double b = spec.steepness * (x - xi - 0.5 * spec.length);
        v += 0.5 * spec.v0 * tanh_difference(a, b);
    }
    return v;
}

std::complex<double> potential_fourier(const BarrierSpec& spec, double k, double hbar) {
    using boost::math::constants::pi;
    const double kappa = k / hbar;
    // (pi V0/eps) sin(kappa L/2) / sinh(pi kappa / 2 eps) = V0 L sinc(kappa L/2) * x/sinh(x), x = pi kappa / 2 eps
    const double shape = spec.v0 * spec.length * boost::math::sinc_pi(0.5 * kappa * spec.length) *
                         x_over_sinh(0.5 * pi<double>() * kappa / spec.steepness);
    const double norm = 1.0 / std::sqrt(2.0 * pi<double>() * hbar);
    std::complex<double> total = 0.0;
    for (double xi : spec.centers) total += std::polar(shape * norm, -kappa * xi);
    return total;
}

FourierTable::FourierTable(const BarrierSpec& spec, const MomentumGrid& momentum, double hbar)
    : n_(momentum.n), dp_(momentum.dp), hbar_(hbar), values_(2 * momentum.n - 1) {
    const auto zero = static_cast<std::ptrdiff_t>(n_) - 1;
    values_[static_cast<std::size_t>(zero)] = potential_fourier(spec, 0.0, hbar).real();
    for (std::ptrdiff_t o = 1; o <= zero; ++o) {
        const auto v = potential_fourier(spec, static_cast<double>(o) * dp_, hbar);
        values_[static_cast<std::size_t>(zero + o)] = v;
        values_[static_cast<std::size_t>(zero - o)] = std::conj(v);
    }
}

}  // namespace kgfw
