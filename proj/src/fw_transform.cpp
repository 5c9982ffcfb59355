#include "kgfw/fw_transform.hpp"

#include <cmath>

namespace kgfw {

double energy(double p, const PhysicalConstants& constants) {
    return std::hypot(p * constants.c, constants.rest_energy());
}

FWMatrixSample fw_matrix(double p, const PhysicalConstants& constants) {
    const double mc2 = constants.rest_energy();
    const double e = energy(p, constants);
    const double a = mc2 + e;
    // mc^2 - E_p, written without cancellation at small p
    const double b = -(p * constants.c) * (p * constants.c) / a;
    const double pref = 1.0 / std::sqrt(4.0 * mc2 * e);

    FWMatrixSample s;
    s.p = p;
    s.u << pref * a, -pref * b, -pref * b, pref * a;
    s.u_inv << pref * a, pref * b, pref * b, pref * a;
    return s;
}

DressingWeights fw_kernel_w(double p, double p_prime, const PhysicalConstants& constants) {
    return dressing_from_energies(energy(p, constants), energy(p_prime, constants));
}

}  // namespace kgfw
