#include "kgfw/refine.hpp"

#include <cmath>
#include <stdexcept>

namespace kgfw {

namespace {

// s + v = (new s) + e exactly; e is accumulated into lo.
inline void two_sum_into(double& s, double v, double& lo) {
    const double t = s + v;
    const double bv = t - s;
    lo += (s - (t - bv)) + (v - bv);
    s = t;
}

real_ext max_abs(const std::vector<complex_ext>& v) {
    real_ext m = 0;
    for (const auto& z : v) m = fmaxq(m, fmaxq(fabsq(z.real()), fabsq(z.imag())));
    return m;
}

}  // namespace

std::vector<complex_ext> compensated_residual(const Eigen::MatrixXcd& a, const std::vector<complex_ext>& x,
                                              complex_ext shift) {
    const auto n = static_cast<std::size_t>(a.rows());
    if (static_cast<std::size_t>(a.cols()) != x.size()) throw std::invalid_argument("residual: size mismatch");
    const std::size_t cols = x.size();

    std::vector<double> re_hi(n, 0.0), re_lo(n, 0.0), im_hi(n, 0.0), im_lo(n, 0.0);
    const std::complex<double>* col = a.data();
    for (std::size_t j = 0; j < cols; ++j, col += n) {
        const double xr = static_cast<double>(x[j].real());
        const double xi = static_cast<double>(x[j].imag());
        const double lr = static_cast<double>(x[j].real() - xr);
        const double li = static_cast<double>(x[j].imag() - xi);
        for (std::size_t i = 0; i < n; ++i) {
            const double ar = col[i].real();
            const double ai = col[i].imag();

            const double p1 = ar * xr;
            const double p2 = ai * xi;
            double lo = std::fma(ar, xr, -p1) - std::fma(ai, xi, -p2) + (ar * lr - ai * li);
            two_sum_into(re_hi[i], p1, lo);
            two_sum_into(re_hi[i], -p2, lo);
            re_lo[i] += lo;

            const double p3 = ar * xi;
            const double p4 = ai * xr;
            lo = std::fma(ar, xi, -p3) + std::fma(ai, xr, -p4) + (ar * li + ai * lr);
            two_sum_into(im_hi[i], p3, lo);
            two_sum_into(im_hi[i], p4, lo);
            im_lo[i] += lo;
        }
    }

    std::vector<complex_ext> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const complex_ext ax{static_cast<real_ext>(re_hi[i]) + re_lo[i], static_cast<real_ext>(im_hi[i]) + im_lo[i]};
        out[i] = ax - shift * x[i];
    }
    return out;
}

EigenpairPolish polish_eigenpair(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& eigenvalues,
                                 const Eigen::MatrixXcd& right, const Eigen::MatrixXcd& left, double weight,
                                 Eigen::Index index, int max_iterations, double tolerance) {
    const Eigen::Index size = a.rows();
    EigenpairPolish out;
    out.eigenvalue = to_ext(eigenvalues[index]);
    out.vector.resize(static_cast<std::size_t>(size));
    for (Eigen::Index i = 0; i < size; ++i) out.vector[static_cast<std::size_t>(i)] = to_ext(right(i, index));

    Eigen::VectorXcd res_d(size);
    Eigen::VectorXcd coeff(size);
    real_ext last_step = INFINITY;
    auto residual = compensated_residual(a, out.vector, out.eigenvalue);
    for (int it = 0; it < max_iterations; ++it) {
        for (Eigen::Index i = 0; i < size; ++i) res_d[i] = to_double(residual[static_cast<std::size_t>(i)]);
        // residual = sum_m y_m r_m; invert (A - eps) on every direction but r_n
        const Eigen::VectorXcd y = left.adjoint() * res_d * weight;
        const std::complex<double> eps = to_double(out.eigenvalue);
        for (Eigen::Index m = 0; m < size; ++m) coeff[m] = (m == index) ? 0.0 : -y[m] / (eigenvalues[m] - eps);
        const Eigen::VectorXcd step = right * coeff;

        for (Eigen::Index i = 0; i < size; ++i) out.vector[static_cast<std::size_t>(i)] += to_ext(step[i]);
        out.eigenvalue += to_ext(y[index]);
        ++out.iterations;
        residual = compensated_residual(a, out.vector, out.eigenvalue);

        const real_ext step_size = static_cast<real_ext>(step.cwiseAbs().maxCoeff()) / max_abs(out.vector);
        if (step_size <= tolerance || step_size >= last_step) break;
        last_step = step_size;
    }
    out.residual = static_cast<double>(max_abs(residual) / max_abs(out.vector));
    return out;
}

}  // namespace kgfw
