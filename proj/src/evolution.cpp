#include "kgfw/evolution.hpp"

#include "kgfw/fw_transform.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <stdexcept>

namespace kgfw {

using Eigen::Index;

std::vector<std::string> packet_violations(const InitialPacketSpec& spec, const Grids& grids,
                                           const BarrierSpec* barrier) {
    std::vector<std::string> out;
    if (!(spec.width > 0.0)) {
        out.emplace_back("width must be positive");
        return out;
    }
    if (spec.left_edge() < grids.space.x_min || spec.right_edge() > grids.space.x_max)
        out.emplace_back("support [" + std::to_string(spec.left_edge()) + ", " + std::to_string(spec.right_edge()) +
                         "] leaves the grid");
    if (barrier) {
        for (std::size_t i = 0; i < barrier->centers.size(); ++i) {
            if (spec.right_edge() > barrier->left_edge(i) && spec.left_edge() < barrier->right_edge(i))
                out.emplace_back("support overlaps barrier " + std::to_string(i + 1));
        }
    }
    return out;
}

TwoComponentState initial_wavepacket(const InitialPacketSpec& spec, const Grids& grids,
                                     const PhysicalConstants& constants, const BarrierSpec* barrier,
                                     Representation rep) {
    const auto problems = packet_violations(spec, grids, barrier);
    if (!problems.empty()) throw std::invalid_argument("packet: " + problems.front());

    using boost::math::constants::pi;
    const std::size_t n = grids.size();
    auto state = TwoComponentState::zeros(n, rep, Domain::position);
    const double half = 0.5 * spec.width;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = grids.space.x(j);
        if (std::abs(x - spec.x0) > half) continue;
        const double c = std::cos(pi<double>() * (x - spec.x0) / spec.width);
        const double c2 = c * c;
        const double c4 = c2 * c2;
        state.phi[j] = to_ext(std::polar(c4 * c4, spec.p0 * x / constants.hbar));
    }
    if (spec.normalize_charge) {
        const real_ext charge =
            static_cast<real_ext>(constants.q) * static_cast<real_ext>(state.weighted_norm_squared(grids.space.dx()));
        if (charge == 0) throw std::invalid_argument("packet: no grid point inside the support");
        if (!(charge > 0)) throw std::invalid_argument("packet: cannot normalize to Q = 1 with q <= 0");
        const real_ext scale = 1 / sqrtq(charge);
        for (auto& v : state.phi) v *= scale;
    }
    return to_momentum(state, grids);
}

SpectralCoefficients project(const SpectralDecomposition& decomp, const TwoComponentState& state0) {
    if (state0.representation != decomp.representation)
        throw std::invalid_argument("project: state is in the " + std::string(to_string(state0.representation)) +
                                    " representation, decomposition in " +
                                    std::string(to_string(decomp.representation)));
    if (state0.domain != Domain::momentum) throw std::invalid_argument("project: state must be in momentum space");
    if (2 * state0.size() != decomp.size()) throw std::invalid_argument("project: state size does not match grid");

    const auto stacked = state0.stacked_double();
    const Eigen::Map<const Eigen::VectorXcd> psi(stacked.data(), static_cast<Index>(stacked.size()));
    SpectralCoefficients c;
    c.representation = decomp.representation;
    c.t0 = state0.time;
    c.c = decomp.left.adjoint() * psi * decomp.dp();
    return c;
}

TwoComponentState evolve(const SpectralDecomposition& decomp, const SpectralCoefficients& coeffs, double t) {
    if (coeffs.representation != decomp.representation)
        throw std::invalid_argument("evolve: coefficients belong to another representation");
    const double tau = t - coeffs.t0;
    if (tau < 0.0) std::clog << "kgfw: evolving backward in time (t = " << t << " < t0 = " << coeffs.t0 << ")\n";

    const Index size = static_cast<Index>(decomp.size());
    const double hbar = decomp.constants.hbar;
    Eigen::VectorXcd a(size);
    for (Index k = 0; k < size; ++k)
        a[k] = decomp.refined_mode(static_cast<std::size_t>(k)) ? 0.0
                                                                : coeffs.c[k] * std::exp(std::complex<double>(0.0, -tau / hbar) * decomp.eigenvalues[k]);
    const Eigen::VectorXcd psi = decomp.right * a;

    std::vector<complex_ext> total(static_cast<std::size_t>(size));
    for (Index i = 0; i < size; ++i) total[static_cast<std::size_t>(i)] = to_ext(psi[i]);

    const real_ext tau_h = static_cast<real_ext>(tau) / static_cast<real_ext>(hbar);
    for (const auto& mode : decomp.refined) {
        // exp(-i eps tau / hbar) = exp(Im eps tau / hbar) exp(-i Re eps tau / hbar)
        const complex_ext factor = expq(mode.eigenvalue.imag() * tau_h) * unit_phase_ext(-mode.eigenvalue.real() * tau_h);
        const complex_ext amp = factor * to_ext(coeffs.c[static_cast<Index>(mode.index)]);
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += amp * mode.right[i];
    }

    const std::size_t n = decomp.grids.size();
    TwoComponentState out = TwoComponentState::zeros(n, decomp.representation, Domain::momentum, t);
    for (std::size_t j = 0; j < n; ++j) {
        out.phi[j] = total[j];
        out.chi[j] = total[n + j];
    }
    return out;
}

namespace {

void check_free_input(const TwoComponentState& s, const Grids& grids, Representation rep) {
    if (s.representation != rep)
        throw std::invalid_argument("free evolution expects a " + std::string(to_string(rep)) + " state");
    if (s.domain != Domain::momentum) throw std::invalid_argument("free evolution expects a momentum-space state");
    if (s.size() != grids.size()) throw std::invalid_argument("free evolution: state size does not match grid");
}

}  // namespace

TwoComponentState free_evolve(const TwoComponentState& state0, double t, const Grids& grids,
                              const PhysicalConstants& constants) {
    check_free_input(state0, grids, Representation::fw);
    TwoComponentState out = state0;
    out.time = t;
    const real_ext tau_h = static_cast<real_ext>(t - state0.time) / static_cast<real_ext>(constants.hbar);
    for (std::size_t j = 0; j < grids.size(); ++j) {
        const real_ext e = energy(grids.momentum.p(j), constants);
        out.phi[j] *= unit_phase_ext(-e * tau_h);
        out.chi[j] *= unit_phase_ext(e * tau_h);
    }
    return out;
}

TwoComponentState free_evolve_canonical(const TwoComponentState& state0, double t, const Grids& grids,
                                        const PhysicalConstants& constants) {
    check_free_input(state0, grids, Representation::canonical);
    TwoComponentState out = state0;
    out.time = t;
    const real_ext tau_h = static_cast<real_ext>(t - state0.time) / static_cast<real_ext>(constants.hbar);
    for (std::size_t j = 0; j < grids.size(); ++j) {
        const auto s = fw_matrix(grids.momentum.p(j), constants);
        const real_ext e = energy(grids.momentum.p(j), constants);
        const complex_ext a = state0.phi[j];
        const complex_ext b = state0.chi[j];
        const complex_ext f = (static_cast<real_ext>(s.u(0, 0)) * a + static_cast<real_ext>(s.u(0, 1)) * b) *
                              unit_phase_ext(-e * tau_h);
        const complex_ext g = (static_cast<real_ext>(s.u(1, 0)) * a + static_cast<real_ext>(s.u(1, 1)) * b) *
                              unit_phase_ext(e * tau_h);
        out.phi[j] = static_cast<real_ext>(s.u_inv(0, 0)) * f + static_cast<real_ext>(s.u_inv(0, 1)) * g;
        out.chi[j] = static_cast<real_ext>(s.u_inv(1, 0)) * f + static_cast<real_ext>(s.u_inv(1, 1)) * g;
    }
    return out;
}

}  // namespace kgfw
