#pragma once

namespace kgfw {

/// Physical constants of the scalar particle. Natural units by default.
struct PhysicalConstants {
    double hbar = 1.0;
    double c = 1.0;
    double m = 1.0;
    double q = 1.0;

    double rest_energy() const { return m * c * c; }
    double compton_wavelength() const { return hbar / (m * c); }

    /// Throws std::invalid_argument unless every constant is strictly positive.
    void validate() const;
};

}  // namespace kgfw
