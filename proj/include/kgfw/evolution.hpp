#pragma once

#include "kgfw/constants.hpp"
#include "kgfw/grid.hpp"
#include "kgfw/potentials.hpp"
#include "kgfw/spectral.hpp"
#include "kgfw/state.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace kgfw {

/// cos^8 packet of compact support [x0 - width/2, x0 + width/2] with mean momentum p0.
struct InitialPacketSpec {
    double x0 = -4.0;
    double p0 = 2.0;
    double width = 2.0;
    bool normalize_charge = true;

    double left_edge() const { return x0 - 0.5 * width; }
    double right_edge() const { return x0 + 0.5 * width; }
};

/// Empty when the packet can be placed on the grid without touching a barrier.
std::vector<std::string> packet_violations(const InitialPacketSpec& spec, const Grids& grids,
                                           const BarrierSpec* barrier = nullptr);

/// phi(x) = cos^8(pi (x - x0) / width) exp(i p0 x / hbar) inside the support,
/// chi = 0, transformed to momentum space. Normalized to unit total charge
/// when requested. The same profile is used for either representation.
TwoComponentState initial_wavepacket(const InitialPacketSpec& spec, const Grids& grids,
                                     const PhysicalConstants& constants, const BarrierSpec* barrier = nullptr,
                                     Representation rep = Representation::fw);

struct SpectralCoefficients {
    Representation representation = Representation::fw;
    Eigen::VectorXcd c;  // c_n = <l_n|Psi(t0)> dp
    double t0 = 0.0;
};

SpectralCoefficients project(const SpectralDecomposition& decomp, const TwoComponentState& state0);

/// Psi(t, p) = sum_n exp(-i eps_n (t - t0) / hbar) c_n r_n in momentum space.
/// Refined (non-real) modes are summed in quad precision.
TwoComponentState evolve(const SpectralDecomposition& decomp, const SpectralCoefficients& coeffs, double t);

/// Exact field-free FW propagation: phi picks up exp(-i E_p t/hbar), chi exp(+i E_p t/hbar).
TwoComponentState free_evolve(const TwoComponentState& state0, double t, const Grids& grids,
                              const PhysicalConstants& constants);

/// Field-free propagation of a canonical state: U(p), free FW phases, U^-1(p).
TwoComponentState free_evolve_canonical(const TwoComponentState& state0, double t, const Grids& grids,
                                        const PhysicalConstants& constants);

}  // namespace kgfw
