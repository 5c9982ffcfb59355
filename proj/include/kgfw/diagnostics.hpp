#pragma once

#include "kgfw/constants.hpp"
#include "kgfw/potentials.hpp"
#include "kgfw/state.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace kgfw {

struct InitialPacketSpec;

/// Forward light cone from the right edge of the initial support.
struct LightConeSpec {
    double edge = 0.0;
    double t0 = 0.0;
    double c = 1.0;

    double position(double t) const { return edge + c * (t - t0); }

    static LightConeSpec from_packet(const InitialPacketSpec& packet, double t0, const PhysicalConstants& constants);
};

struct DiagnosticsRecord {
    double t = 0.0;
    double q_total = 0.0;
    double olc_fraction = 0.0;
    std::optional<std::size_t> barrier_index;  // 1-based
};

/// Riemann sum of rho dx, accumulated in quad precision.
double total_charge(const DensityProfile& density);

/// Charge to the right of x. Cells [x_j, x_j + dx) carry rho_j; the cell
/// containing x contributes its share beyond x.
double charge_beyond(const DensityProfile& density, double x);

/// Signed charge beyond the light cone divided by the total charge.
/// Throws std::out_of_range if the cone has left the grid.
double olc_fraction(const DensityProfile& density, const LightConeSpec& cone);

struct BarrierExit {
    std::size_t index = 0;  // 1-based
    double t = 0.0;
    double x = 0.0;  // right edge of the barrier
};

/// Times at which the cone passes each barrier's right edge.
std::vector<BarrierExit> barrier_exit_times(const BarrierSpec& barrier, const LightConeSpec& cone);

/// Plane-wave amplitudes (A, B) of psi = A e^{ikx} + B e^{-ikx} mapped to (psi, psi') at x.
Eigen::Matrix2cd plane_wave_matrix(double x, std::complex<double> k);

/// Stationary scattering off a sharp rectangular barrier [-L/2, L/2].
struct KleinTransmission {
    std::complex<double> transmission;
    std::complex<double> reflection;
    std::complex<double> k_outside;
    std::complex<double> k_inside;
    Eigen::Matrix2cd transfer;  // outgoing-side amplitudes -> incoming-side amplitudes
    bool klein_zone = false;
    bool evanescent_inside = false;

    /// |R|^2 + |T|^2 - 1; zero when the outside flux is conserved.
    double flux_defect() const { return std::norm(reflection) + std::norm(transmission) - 1.0; }

    /// |det M - 1|. Each interface contributes k'/k and k/k', so the product is 1.
    double determinant_defect() const { return std::abs(transfer.determinant() - 1.0); }

    /// max |M^dagger s3 M - s3|: the current k(|A|^2 - |B|^2) is the same on both sides.
    double current_defect() const;
};

/// Matches plane waves with k = sqrt(E^2 - m^2c^4)/(hbar c) outside and
/// k' = sqrt((E - V0)^2 - m^2c^4)/(hbar c) inside, continuity of psi and psi'
/// at both edges. Requires E > mc^2.
KleinTransmission klein_transmission(double energy, double v0, double length,
                                     const PhysicalConstants& constants = {});

/// CSV `t,q_total,olc_fraction,barrier_index`; empty index when absent.
void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records);

}  // namespace kgfw
