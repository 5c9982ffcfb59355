#pragma once

#include "kgfw/extended.hpp"
#include "kgfw/grid.hpp"

#include <complex>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace kgfw {

enum class Representation { canonical, fw };

/// Which grid the samples of a state live on.
enum class Domain { momentum, position };

std::string_view to_string(Representation rep);
Representation representation_from_string(std::string_view name);

/// Two-component (phi, chi) wavefunction sampled on one of the dual grids.
///
/// Amplitudes are held in quad precision: once unstable modes have grown,
/// |phi|^2 and |chi|^2 can exceed the total charge by twelve orders of
/// magnitude and the charge is their small difference.
struct TwoComponentState {
    Representation representation = Representation::fw;
    Domain domain = Domain::momentum;
    std::vector<complex_ext> phi;
    std::vector<complex_ext> chi;
    double time = 0.0;

    std::size_t size() const { return phi.size(); }

    /// Zero state of the given size.
    static TwoComponentState zeros(std::size_t n, Representation rep, Domain domain, double time = 0.0);

    /// Builds a state from double-precision samples.
    static TwoComponentState from_double(const std::vector<std::complex<double>>& phi,
                                         const std::vector<std::complex<double>>& chi,
                                         Representation rep, Domain domain, double time = 0.0);

    std::vector<std::complex<double>> phi_double() const;
    std::vector<std::complex<double>> chi_double() const;

    /// (phi, chi) stacked into one 2n vector, rounded to double.
    std::vector<std::complex<double>> stacked_double() const;

    /// Sum over samples of |phi|^2 + |chi|^2 times the grid weight.
    double weighted_norm_squared(double weight) const;
};

/// Signed charge density on the position grid, x_j at cell left edges.
struct DensityProfile {
    SpatialGrid grid;
    std::vector<real_ext> rho;
    double time = 0.0;

    double at(std::size_t j) const { return static_cast<double>(rho[j]); }
    std::vector<double> values() const;
};

/// Discrete analogue of (1/sqrt(2 pi hbar)) * integral Psi(p) exp(ipx/hbar) dp,
/// with dp weights. Unitary up to the dx/dp weights.
TwoComponentState to_position(const TwoComponentState& state, const Grids& grids);

/// Inverse of to_position: (1/sqrt(2 pi hbar)) * sum_j Psi(x_j) exp(-ipx_j/hbar) dx.
TwoComponentState to_momentum(const TwoComponentState& state, const Grids& grids);

/// rho_j = q (|phi_j|^2 - |chi_j|^2). Requires position-space samples.
DensityProfile charge_density(const TwoComponentState& state, const Grids& grids, double q);

/// CSV with header `x,rho,t`, 15 significant digits.
void write_density_csv(std::ostream& out, const DensityProfile& density);

}  // namespace kgfw
