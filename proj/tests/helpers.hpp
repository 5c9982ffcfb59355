#pragma once

#include "kgfw/diagnostics.hpp"
#include "kgfw/evolution.hpp"
#include "kgfw/spectral.hpp"
#include "kgfw/state.hpp"

#include <complex>
#include <random>
#include <vector>

namespace testing {

inline double rel_l2(const kgfw::TwoComponentState& a, const kgfw::TwoComponentState& b) {
    kgfw::real_ext diff = 0;
    kgfw::real_ext ref = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        diff += kgfw::norm_ext(a.phi[j] - b.phi[j]) + kgfw::norm_ext(a.chi[j] - b.chi[j]);
        ref += kgfw::norm_ext(b.phi[j]) + kgfw::norm_ext(b.chi[j]);
    }
    return std::sqrt(static_cast<double>(diff / ref));
}

inline kgfw::TwoComponentState random_state(std::size_t n, kgfw::Domain domain, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<std::complex<double>> phi(n), chi(n);
    for (std::size_t j = 0; j < n; ++j) {
        phi[j] = {g(rng), g(rng)};
        chi[j] = {g(rng), g(rng)};
    }
    return kgfw::TwoComponentState::from_double(phi, chi, kgfw::Representation::fw, domain);
}

inline double charge_of(const kgfw::TwoComponentState& momentum_state, const kgfw::Grids& grids) {
    return kgfw::total_charge(kgfw::charge_density(kgfw::to_position(momentum_state, grids), grids, 1.0));
}

/// Fig. 1 barrier shape (V0 = 5, L = 2, eps = 20) with `count` barriers spaced by 4.
inline kgfw::BarrierSpec fig1_barriers(std::size_t count = 7, double v0 = 5.0) {
    return kgfw::BarrierSpec::evenly_spaced(v0, 2.0, 20.0, count, 4.0, 0.0);
}

}  // namespace testing
