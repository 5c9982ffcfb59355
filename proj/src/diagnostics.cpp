#include "kgfw/diagnostics.hpp"

#include "kgfw/evolution.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace kgfw {

LightConeSpec LightConeSpec::from_packet(const InitialPacketSpec& packet, double t0,
                                         const PhysicalConstants& constants) {
    return {packet.right_edge(), t0, constants.c};
}

double total_charge(const DensityProfile& density) {
    real_ext sum = 0;
    for (const auto& r : density.rho) sum += r;
    return static_cast<double>(sum * static_cast<real_ext>(density.grid.dx()));
}

double charge_beyond(const DensityProfile& density, double x) {
    const SpatialGrid& g = density.grid;
    if (x >= g.x_max) throw std::out_of_range("position " + std::to_string(x) + " is beyond x_max = " +
                                              std::to_string(g.x_max) + " (grid too small for this time)");
    if (x <= g.x_min) return total_charge(density);
    const double u = (x - g.x_min) / g.dx();
    auto j0 = static_cast<std::size_t>(std::floor(u));
    if (j0 >= g.n) j0 = g.n - 1;
    const double frac = u - static_cast<double>(j0);
    real_ext sum = density.rho[j0] * static_cast<real_ext>(1.0 - frac);
    for (std::size_t j = j0 + 1; j < density.rho.size(); ++j) sum += density.rho[j];
    return static_cast<double>(sum * static_cast<real_ext>(g.dx()));
}

double olc_fraction(const DensityProfile& density, const LightConeSpec& cone) {
    const double outside = charge_beyond(density, cone.position(density.time));
    return outside / total_charge(density);
}

std::vector<BarrierExit> barrier_exit_times(const BarrierSpec& barrier, const LightConeSpec& cone) {
    std::vector<BarrierExit> out;
    for (std::size_t i = 0; i < barrier.centers.size(); ++i) {
        const double x = barrier.right_edge(i);
        out.push_back({i + 1, cone.t0 + (x - cone.edge) / cone.c, x});
    }
    return out;
}

Eigen::Matrix2cd plane_wave_matrix(double x, std::complex<double> k) {
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> ep = std::exp(i * k * x);
    const std::complex<double> em = std::exp(-i * k * x);
    Eigen::Matrix2cd m;
    m << ep, em, i * k * ep, -i * k * em;
    return m;
}

double KleinTransmission::current_defect() const {
    Eigen::Matrix2cd s3 = Eigen::Matrix2cd::Identity();
    s3(1, 1) = -1.0;
    return (transfer.adjoint() * s3 * transfer - s3).cwiseAbs().maxCoeff();
}

KleinTransmission klein_transmission(double energy, double v0, double length, const PhysicalConstants& constants) {
    const double mc2 = constants.rest_energy();
    if (!(energy > mc2))
        throw std::invalid_argument("klein_transmission: E must exceed mc^2 (no propagating outside mode)");
    if (!(length > 0.0)) throw std::invalid_argument("klein_transmission: length must be positive");

    const double hc = constants.hbar * constants.c;
    const double inside = energy - v0;
    KleinTransmission t;
    t.k_outside = std::sqrt(energy * energy - mc2 * mc2) / hc;
    t.k_inside = std::sqrt(std::complex<double>((inside - mc2) * (inside + mc2), 0.0)) / hc;
    if (t.k_inside == 0.0)
        throw std::invalid_argument("klein_transmission: |E - V0| = mc^2 exactly, inside wavenumber vanishes");
    t.klein_zone = energy < v0 - mc2;
    t.evanescent_inside = std::abs(inside) < mc2;

    const double a = -0.5 * length;
    const double b = 0.5 * length;
    // (A, B) on the left = M_k(a)^-1 M_q(a) M_q(b)^-1 M_k(b) (T, 0) on the right
    t.transfer = plane_wave_matrix(a, t.k_outside).inverse() * plane_wave_matrix(a, t.k_inside) *
                 plane_wave_matrix(b, t.k_inside).inverse() * plane_wave_matrix(b, t.k_outside);
    t.transmission = 1.0 / t.transfer(0, 0);
    t.reflection = t.transfer(1, 0) / t.transfer(0, 0);
    return t;
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records) {
    out << "t,q_total,olc_fraction,barrier_index\n";
    char line[160];
    for (const auto& r : records) {
        std::snprintf(line, sizeof line, "%.14e,%.14e,%.14e,", r.t, r.q_total, r.olc_fraction);
        out << line;
        if (r.barrier_index) out << *r.barrier_index;
        out << '\n';
    }
}

}  // namespace kgfw
