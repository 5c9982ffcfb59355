#pragma once

// Quad-precision polishing of individual eigenpairs of a dense double matrix.

#include "kgfw/extended.hpp"

#include <Eigen/Dense>

#include <vector>

namespace kgfw {

/// A * x - shift * x with x and shift in quad precision and A exact in double.
/// The A * x product is accumulated with error-free transformations
/// (FMA two-product, two-sum), so the result carries roughly twice the double
/// precision even when it is sixteen orders of magnitude below |A||x|.
std::vector<complex_ext> compensated_residual(const Eigen::MatrixXcd& a, const std::vector<complex_ext>& x,
                                              complex_ext shift);

struct EigenpairPolish {
    complex_ext eigenvalue;
    std::vector<complex_ext> vector;
    double residual = 0.0;
    int iterations = 0;
};

/// Newton polishing of eigenpair `index` of `a` using the double eigensystem
/// (right columns, left columns with <l_m|r_n> weight = delta) as the
/// approximate inverse of (a - eps). Stops once the correction is below
/// `tolerance` relative to the vector or after `max_iterations` sweeps.
EigenpairPolish polish_eigenpair(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& eigenvalues,
                                 const Eigen::MatrixXcd& right, const Eigen::MatrixXcd& left, double weight,
                                 Eigen::Index index, int max_iterations = 6, double tolerance = 1e-30);

}  // namespace kgfw
