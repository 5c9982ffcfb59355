#pragma once

#include "kgfw/constants.hpp"
#include "kgfw/extended.hpp"
#include "kgfw/grid.hpp"
#include "kgfw/potentials.hpp"
#include "kgfw/state.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace kgfw {

/// Discretized 2n x 2n Hamiltonian kernel in blocks
///
///   K = [ K11  K12 ]
///       [ K21  K22 ]
///
/// acting on stacked (phi(p_1..p_n), chi(p_1..p_n)). The eigenproblem is
/// sum_j K_ij r_j dp = eps r_i, i.e. the standard eigenproblem of K * dp.
struct KernelMatrix {
    Representation representation = Representation::fw;
    Grids grids;
    PhysicalConstants constants;
    Eigen::MatrixXcd entries;

    std::size_t n() const { return grids.size(); }
    double dp() const { return grids.momentum.dp; }

    /// K * dp, the matrix whose eigenpairs are the spectrum.
    Eigen::MatrixXcd weighted() const { return entries * dp(); }

    /// Block (a, b) with a, b in {1, 2}.
    Eigen::MatrixXcd block(int a, int b) const;
};

/// FW kernel: K11/K22 = +/-E_p/dp on the diagonal plus Vtilde(p_i - p_j) w+ / sqrt(2 pi hbar);
/// K12 = K21 = Vtilde(p_i - p_j) w- / sqrt(2 pi hbar).
KernelMatrix assemble_fw_kernel(const Grids& grids, const PhysicalConstants& constants,
                                const FourierTable& table);
KernelMatrix assemble_fw_kernel(const Grids& grids, const PhysicalConstants& constants,
                                const BarrierSpec& barrier);

/// Canonical (Feshbach-Villars) kernel: per-mode 2x2 block
/// [[mc^2 + p^2/2m, p^2/2m], [-p^2/2m, -mc^2 - p^2/2m]] / dp on the diagonal,
/// plus Vtilde(p_i - p_j) / sqrt(2 pi hbar) on both diagonal blocks.
KernelMatrix assemble_canonical_kernel(const Grids& grids, const PhysicalConstants& constants,
                                       const FourierTable& table);
KernelMatrix assemble_canonical_kernel(const Grids& grids, const PhysicalConstants& constants,
                                       const BarrierSpec& barrier);

KernelMatrix assemble_kernel(Representation rep, const Grids& grids, const PhysicalConstants& constants,
                             const FourierTable& table);
KernelMatrix assemble_kernel(Representation rep, const Grids& grids, const PhysicalConstants& constants,
                             const BarrierSpec& barrier);

/// max |sigma3 K sigma3 - K^dagger| over all entries.
double pseudo_hermiticity_residual(const KernelMatrix& kernel);

/// A non-real eigenpair re-solved in quad precision. `right` is the stacked
/// 2n-vector; the double column in SpectralDecomposition::right is its rounding.
struct RefinedMode {
    std::size_t index = 0;
    complex_ext eigenvalue{};
    std::vector<complex_ext> right;
    double residual = 0.0;  // ||K dp r - eps r||_inf / ||r||_inf after the last sweep
    int iterations = 0;
};

struct EigenOptions {
    /// Conjugate pairs must match within pair_tolerance * max|eps|; eigenvalues
    /// with |Im eps| at or below it are treated as real.
    double pair_tolerance = 1e-8;
    /// Above this max |<l_m|r_n> dp - delta_mn| the offending clusters are re-biorthogonalized.
    double biorthonormality_threshold = 1e-8;
    /// |<l_n|r_n>| of unit vectors below this marks a defective (degenerate) basis.
    double degenerate_overlap = 1e-12;
    /// Re-solve non-real eigenpairs in quad precision.
    bool refine_nonreal = true;
};

/// Biorthonormal eigensystem of K * dp.
///
/// Order and phase are canonical: eigenpairs sorted by (Re eps, Im eps), each
/// right vector rotated so its largest-magnitude entry is real and positive,
/// left vectors scaled so <l_n|r_n> dp = 1.
struct SpectralDecomposition {
    Representation representation = Representation::fw;
    Grids grids;
    PhysicalConstants constants;
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd right;
    Eigen::MatrixXcd left;
    /// Index of the conjugate partner; real eigenvalues pair with themselves.
    std::vector<std::size_t> pairing;
    std::vector<RefinedMode> refined;
    double real_tolerance = 0.0;  // absolute |Im eps| cut between real and non-real

    std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
    double dp() const { return grids.momentum.dp; }
    double max_abs_eigenvalue() const;
    bool is_real(std::size_t n) const { return std::abs(eigenvalues[static_cast<Eigen::Index>(n)].imag()) <= real_tolerance; }
    std::size_t nonreal_count() const;
    const RefinedMode* refined_mode(std::size_t n) const;
};

SpectralDecomposition eigendecompose(const KernelMatrix& kernel, const EigenOptions& options = {});

/// max |<l_m|r_n> dp - delta_mn|.
double biorthonormality_residual(const SpectralDecomposition& decomp);

struct ValidationThresholds {
    double biorthonormality = 1e-8;
    double pairing = 1e-8;
    double sigma3_relation = 1e-6;
    double completeness = 1e-7;
};

/// Numerical health of a decomposition. All residuals are maxima over eigenpairs.
struct ValidationReport {
    double biorthonormality = 0.0;   // max |<l_m|r_n> dp - delta_mn|
    double pairing_mismatch = 0.0;   // max |eps_pair(n) - conj(eps_n)| / max|eps|
    double conjugation_closure = 0.0;  // max_n min_m |eps_m - conj(eps_n)| / max|eps|
    double sigma3_relation = 0.0;    // max ||K^dagger s3 r_n - eps_n s3 r_n|| / ||s3 r_n||, K dp-weighted
    double completeness = 0.0;       // max |sum_n r_n l_n^dagger dp - I|
    std::size_t nonreal_pairs = 0;
    double max_imaginary = 0.0;
    double max_abs_eigenvalue = 0.0;

    /// Names of residuals above their thresholds.
    std::vector<std::string> flagged(const ValidationThresholds& thresholds = {}) const;
    bool passed(const ValidationThresholds& thresholds = {}) const { return flagged(thresholds).empty(); }
};

ValidationReport validate_spectrum(const SpectralDecomposition& decomp, const KernelMatrix& kernel);

/// CSV `re,im,paired_index`, one row per eigenvalue in canonical order.
void write_eigenvalues_csv(std::ostream& out, const SpectralDecomposition& decomp);

}  // namespace kgfw
