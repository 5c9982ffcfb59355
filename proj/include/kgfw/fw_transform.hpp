#pragma once

#include "kgfw/constants.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace kgfw {

/// E_p = sqrt(p^2 c^2 + m^2 c^4).
double energy(double p, const PhysicalConstants& constants);

/// Free Foldy-Wouthuysen matrix U(p) and its closed-form inverse.
struct FWMatrixSample {
    double p = 0.0;
    Eigen::Matrix2d u;
    Eigen::Matrix2d u_inv;
};

/// U(p) = (4 m c^2 E_p)^(-1/2) [(mc^2 + E_p) - (mc^2 - E_p) sigma_1]; the
/// inverse flips the sign of the sigma_1 term.
FWMatrixSample fw_matrix(double p, const PhysicalConstants& constants);

/// Entries of W(p, p') = U(p) U^-1(p') = [[w+, w-], [w-, w+]],
/// w(+/-) = (E_p +/- E_p') / (2 sqrt(E_p E_p')).
struct DressingWeights {
    double plus = 0.0;
    double minus = 0.0;
};

DressingWeights fw_kernel_w(double p, double p_prime, const PhysicalConstants& constants);

/// Same weights from precomputed energies; used by kernel assembly.
inline DressingWeights dressing_from_energies(double e_p, double e_p_prime) {
    const double denom = 2.0 * std::sqrt(e_p * e_p_prime);
    return {(e_p + e_p_prime) / denom, (e_p - e_p_prime) / denom};
}

}  // namespace kgfw
