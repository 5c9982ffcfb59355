#pragma once

// Quad-precision scalars for amplitudes whose charge cancels across many
// orders of magnitude. std::complex<__float128> is only used for +, -, *,
// conj and the helpers below; nothing here calls std::abs or std::exp on it.

#include <complex>
#include <quadmath.h>

namespace kgfw {

using real_ext = __float128;
using complex_ext = std::complex<real_ext>;

inline real_ext norm_ext(const complex_ext& z) { return z.real() * z.real() + z.imag() * z.imag(); }

inline complex_ext to_ext(const std::complex<double>& z) { return {z.real(), z.imag()}; }

inline std::complex<double> to_double(const complex_ext& z) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

/// exp(i * angle) evaluated in quad precision.
inline complex_ext unit_phase_ext(real_ext angle) {
    real_ext s;
    real_ext c;
    sincosq(angle, &s, &c);
    return {c, s};
}

}  // namespace kgfw
