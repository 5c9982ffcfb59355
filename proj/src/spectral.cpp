#include "kgfw/spectral.hpp"

#include "kgfw/error.hpp"
#include "kgfw/fw_transform.hpp"
#include "kgfw/refine.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace kgfw {

using Eigen::Index;

Eigen::MatrixXcd KernelMatrix::block(int a, int b) const {
    if (a < 1 || a > 2 || b < 1 || b > 2) throw std::out_of_range("kernel block index must be 1 or 2");
    const auto n = static_cast<Index>(this->n());
    return entries.block((a - 1) * n, (b - 1) * n, n, n);
}

namespace {

void check_table(const Grids& grids, const FourierTable& table) {
    if (table.grid_size() != grids.size() || table.dp() != grids.momentum.dp || table.hbar() != grids.hbar)
        throw std::invalid_argument("Fourier table was built for a different momentum grid");
}

double inv_sqrt_two_pi_hbar(double hbar) {
    return 1.0 / std::sqrt(boost::math::constants::two_pi<double>() * hbar);
}

}  // namespace

KernelMatrix assemble_fw_kernel(const Grids& grids, const PhysicalConstants& constants, const FourierTable& table) {
    check_table(grids, table);
    const auto n = static_cast<Index>(grids.size());
    const double dp = grids.momentum.dp;
    const double s = inv_sqrt_two_pi_hbar(grids.hbar);

    std::vector<double> e(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) e[static_cast<std::size_t>(i)] = energy(grids.momentum.p(static_cast<std::size_t>(i)), constants);

    KernelMatrix k;
    k.representation = Representation::fw;
    k.grids = grids;
    k.constants = constants;
    k.entries.resize(2 * n, 2 * n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const auto w = dressing_from_energies(e[static_cast<std::size_t>(i)], e[static_cast<std::size_t>(j)]);
            const std::complex<double> v = table.at(i - j);
            const std::complex<double> diag = v * w.plus * s;
            const std::complex<double> off = v * w.minus * s;
            k.entries(i, j) = diag;
            k.entries(n + i, n + j) = diag;
            k.entries(i, n + j) = off;
            k.entries(n + i, j) = off;
        }
    }
    for (Index i = 0; i < n; ++i) {
        k.entries(i, i) += e[static_cast<std::size_t>(i)] / dp;
        k.entries(n + i, n + i) -= e[static_cast<std::size_t>(i)] / dp;
    }
    return k;
}

KernelMatrix assemble_fw_kernel(const Grids& grids, const PhysicalConstants& constants, const BarrierSpec& barrier) {
    return assemble_fw_kernel(grids, constants, FourierTable(barrier, grids.momentum, grids.hbar));
}

KernelMatrix assemble_canonical_kernel(const Grids& grids, const PhysicalConstants& constants,
                                       const FourierTable& table) {
    check_table(grids, table);
    const auto n = static_cast<Index>(grids.size());
    const double dp = grids.momentum.dp;
    const double s = inv_sqrt_two_pi_hbar(grids.hbar);
    const double mc2 = constants.rest_energy();

    KernelMatrix k;
    k.representation = Representation::canonical;
    k.grids = grids;
    k.constants = constants;
    k.entries = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const std::complex<double> v = table.at(i - j) * s;
            k.entries(i, j) = v;
            k.entries(n + i, n + j) = v;
        }
    }
    for (Index i = 0; i < n; ++i) {
        const double p = grids.momentum.p(static_cast<std::size_t>(i));
        const double kin = p * p / (2.0 * constants.m);
        k.entries(i, i) += (mc2 + kin) / dp;
        k.entries(n + i, n + i) -= (mc2 + kin) / dp;
        k.entries(i, n + i) = kin / dp;
        k.entries(n + i, i) = -kin / dp;
    }
    return k;
}

KernelMatrix assemble_canonical_kernel(const Grids& grids, const PhysicalConstants& constants,
                                       const BarrierSpec& barrier) {
    return assemble_canonical_kernel(grids, constants, FourierTable(barrier, grids.momentum, grids.hbar));
}

KernelMatrix assemble_kernel(Representation rep, const Grids& grids, const PhysicalConstants& constants,
                             const FourierTable& table) {
    return rep == Representation::fw ? assemble_fw_kernel(grids, constants, table)
                                     : assemble_canonical_kernel(grids, constants, table);
}

KernelMatrix assemble_kernel(Representation rep, const Grids& grids, const PhysicalConstants& constants,
                             const BarrierSpec& barrier) {
    return assemble_kernel(rep, grids, constants, FourierTable(barrier, grids.momentum, grids.hbar));
}

double pseudo_hermiticity_residual(const KernelMatrix& kernel) {
    const Index size = kernel.entries.rows();
    const Index n = size / 2;
    double worst = 0.0;
    for (Index j = 0; j < size; ++j) {
        for (Index i = 0; i < size; ++i) {
            const double sign = ((i < n) == (j < n)) ? 1.0 : -1.0;
            worst = std::max(worst, std::abs(sign * kernel.entries(i, j) - std::conj(kernel.entries(j, i))));
        }
    }
    return worst;
}

double SpectralDecomposition::max_abs_eigenvalue() const {
    return eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
}

std::size_t SpectralDecomposition::nonreal_count() const {
    std::size_t count = 0;
    for (std::size_t n = 0; n < size(); ++n)
        if (!is_real(n)) ++count;
    return count;
}

const RefinedMode* SpectralDecomposition::refined_mode(std::size_t n) const {
    auto it = std::lower_bound(refined.begin(), refined.end(), n,
                               [](const RefinedMode& m, std::size_t idx) { return m.index < idx; });
    return (it != refined.end() && it->index == n) ? &*it : nullptr;
}

namespace {

// Largest-magnitude entry made real and positive (first index wins ties).
std::complex<double> canonical_phase(const Eigen::Ref<const Eigen::VectorXcd>& v) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }
    if (best_abs <= 0.0) throw NumericalError("eigensolver returned a zero eigenvector");
    return std::conj(v[best]) / best_abs;
}

struct UnionFind {
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> parent;
};

// Clusters whose mutual overlaps exceed the threshold get L_C <- L_C inv(M_CC)^dagger,
// which makes the cluster's Gram block the identity.
void rebiorthogonalize(SpectralDecomposition& d, const Eigen::MatrixXcd& gram, double threshold) {
    const auto size = static_cast<std::size_t>(gram.rows());
    UnionFind uf(size);
    std::vector<bool> touched(size, false);
    for (std::size_t j = 0; j < size; ++j)
        for (std::size_t i = 0; i < size; ++i) {
            const double target = (i == j) ? 1.0 : 0.0;
            if (std::abs(gram(static_cast<Index>(i), static_cast<Index>(j)) - target) > threshold) {
                uf.unite(i, j);
                touched[i] = touched[j] = true;
            }
        }
    std::vector<std::vector<std::size_t>> clusters(size);
    for (std::size_t i = 0; i < size; ++i)
        if (touched[i]) clusters[uf.find(i)].push_back(i);

    for (const auto& c : clusters) {
        if (c.empty()) continue;
        const auto m = static_cast<Index>(c.size());
        Eigen::MatrixXcd block(m, m);
        Eigen::MatrixXcd lc(d.left.rows(), m);
        for (Index b = 0; b < m; ++b) {
            lc.col(b) = d.left.col(static_cast<Index>(c[static_cast<std::size_t>(b)]));
            for (Index a = 0; a < m; ++a)
                block(a, b) = gram(static_cast<Index>(c[static_cast<std::size_t>(a)]),
                                   static_cast<Index>(c[static_cast<std::size_t>(b)]));
        }
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(block);
        if (!lu.isInvertible()) throw NumericalError("degenerate basis: singular overlap block in re-biorthogonalization");
        const Eigen::MatrixXcd updated = lc * lu.inverse().adjoint();
        for (Index b = 0; b < m; ++b) d.left.col(static_cast<Index>(c[static_cast<std::size_t>(b)])) = updated.col(b);
    }
}

std::vector<std::size_t> pair_conjugates(const SpectralDecomposition& d) {
    const std::size_t size = d.size();
    const double tol = d.real_tolerance;
    std::vector<std::size_t> pairing(size);
    for (std::size_t n = 0; n < size; ++n) {
        if (d.is_real(n)) {
            pairing[n] = n;
            continue;
        }
        const std::complex<double> target = std::conj(d.eigenvalues[static_cast<Index>(n)]);
        std::vector<std::size_t> candidates;
        double nearest = INFINITY;
        std::size_t nearest_index = size;
        for (std::size_t m = 0; m < size; ++m) {
            if (m == n || d.is_real(m)) continue;
            const double dist = std::abs(d.eigenvalues[static_cast<Index>(m)] - target);
            if (dist <= tol) candidates.push_back(m);
            if (dist < nearest) {
                nearest = dist;
                nearest_index = m;
            }
        }
        if (candidates.empty()) {
            char msg[256];
            std::snprintf(msg, sizeof msg,
                          "unmatched non-real eigenvalue %.10g%+.10gi (|Im| = %.3g, nearest conjugate off by %.3g)",
                          target.real(), -target.imag(), std::abs(target.imag()), nearest);
            throw NumericalError(msg);
        }
        if (candidates.size() == 1) {
            pairing[n] = candidates.front();
            continue;
        }
        // Several within tolerance: the partner is the one sigma3 r_n overlaps with.
        Eigen::VectorXcd s3r = d.right.col(static_cast<Index>(n));
        s3r.tail(s3r.size() / 2) *= -1.0;
        double best = -1.0;
        for (std::size_t m : candidates) {
            const double overlap = std::abs(s3r.dot(d.right.col(static_cast<Index>(m))));
            if (overlap > best) {
                best = overlap;
                nearest_index = m;
            }
        }
        pairing[n] = nearest_index;
    }
    return pairing;
}

}  // namespace

double biorthonormality_residual(const SpectralDecomposition& d) {
    Eigen::MatrixXcd g = d.left.adjoint() * d.right * d.dp();
    g.diagonal().array() -= 1.0;
    return g.cwiseAbs().maxCoeff();
}

namespace {

void resort(SpectralDecomposition& d) {
    const auto n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& w = d.eigenvalues;
    auto key = [&](std::size_t k) { return w[static_cast<Index>(k)]; };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (key(a).real() != key(b).real()) return key(a).real() < key(b).real();
        return key(a).imag() < key(b).imag();
    });
    if (std::is_sorted(order.begin(), order.end())) return;

    std::vector<std::size_t> where(n);
    for (std::size_t k = 0; k < n; ++k) where[order[k]] = k;
    Eigen::VectorXcd values(w.size());
    Eigen::MatrixXcd right(d.right.rows(), d.right.cols()), left(d.left.rows(), d.left.cols());
    std::vector<std::size_t> pairing(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto src = static_cast<Index>(order[k]);
        values[static_cast<Index>(k)] = w[src];
        right.col(static_cast<Index>(k)) = d.right.col(src);
        left.col(static_cast<Index>(k)) = d.left.col(src);
        pairing[k] = where[d.pairing[order[k]]];
    }
    d.eigenvalues = std::move(values);
    d.right = std::move(right);
    d.left = std::move(left);
    d.pairing = std::move(pairing);
    for (auto& mode : d.refined) mode.index = where[mode.index];
    std::sort(d.refined.begin(), d.refined.end(),
              [](const RefinedMode& a, const RefinedMode& b) { return a.index < b.index; });
}

}  // namespace

SpectralDecomposition eigendecompose(const KernelMatrix& kernel, const EigenOptions& options) {
    const Index size = kernel.entries.rows();
    if (size == 0 || kernel.entries.cols() != size) throw std::invalid_argument("kernel must be square and non-empty");

    const Eigen::MatrixXcd weighted = kernel.weighted();
    Eigen::MatrixXcd work = weighted;
    Eigen::VectorXcd w(size);
    Eigen::MatrixXcd vl(size, size);
    Eigen::MatrixXcd vr(size, size);
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'V', 'V', static_cast<lapack_int>(size), work.data(),
                                          static_cast<lapack_int>(size), w.data(), vl.data(),
                                          static_cast<lapack_int>(size), vr.data(), static_cast<lapack_int>(size));
    if (info != 0) throw NumericalError("zgeev failed with info = " + std::to_string(info));
    work.resize(0, 0);

    std::vector<Index> order(static_cast<std::size_t>(size));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (w[a].real() != w[b].real()) return w[a].real() < w[b].real();
        return w[a].imag() < w[b].imag();
    });

    SpectralDecomposition d;
    d.representation = kernel.representation;
    d.grids = kernel.grids;
    d.constants = kernel.constants;
    d.eigenvalues.resize(size);
    d.right.resize(size, size);
    d.left.resize(size, size);
    const double dp = kernel.dp();
    for (Index k = 0; k < size; ++k) {
        const Index src = order[static_cast<std::size_t>(k)];
        d.eigenvalues[k] = w[src];
        const std::complex<double> phase = canonical_phase(vr.col(src));
        d.right.col(k) = vr.col(src) * phase;
        d.left.col(k) = vl.col(src) * phase;
        const std::complex<double> overlap = d.left.col(k).dot(d.right.col(k));
        if (std::abs(overlap) < options.degenerate_overlap) {
            char msg[200];
            std::snprintf(msg, sizeof msg, "degenerate basis: |<l|r>| = %.3g at eigenvalue %.10g%+.10gi",
                          std::abs(overlap), w[src].real(), w[src].imag());
            throw NumericalError(msg);
        }
        d.left.col(k) /= std::conj(overlap * dp);
    }
    vl.resize(0, 0);
    vr.resize(0, 0);

    d.real_tolerance = options.pair_tolerance * d.max_abs_eigenvalue();
    d.pairing = pair_conjugates(d);

    {
        Eigen::MatrixXcd gram = d.left.adjoint() * d.right * dp;
        Eigen::MatrixXcd defect = gram;
        defect.diagonal().array() -= 1.0;
        if (defect.cwiseAbs().maxCoeff() > options.biorthonormality_threshold)
            rebiorthogonalize(d, gram, options.biorthonormality_threshold);
    }

    if (options.refine_nonreal) {
        for (std::size_t n = 0; n < d.size(); ++n) {
            if (d.is_real(n)) continue;
            auto polished = polish_eigenpair(weighted, d.eigenvalues, d.right, d.left, dp, static_cast<Index>(n));
            RefinedMode mode;
            mode.index = n;
            mode.eigenvalue = polished.eigenvalue;
            mode.right = std::move(polished.vector);
            mode.residual = polished.residual;
            mode.iterations = polished.iterations;
            d.refined.push_back(std::move(mode));
        }
        for (const auto& mode : d.refined) {
            const auto k = static_cast<Index>(mode.index);
            d.eigenvalues[k] = to_double(mode.eigenvalue);
            for (Index i = 0; i < size; ++i) d.right(i, k) = to_double(mode.right[static_cast<std::size_t>(i)]);
        }
        // refinement moves eigenvalues by rounding-level amounts; conjugate
        // partners can then trade places in the (Re, Im) order
        resort(d);
    }
    return d;
}

std::vector<std::string> ValidationReport::flagged(const ValidationThresholds& t) const {
    std::vector<std::string> out;
    if (!(biorthonormality <= t.biorthonormality)) out.emplace_back("biorthonormality");
    if (!(pairing_mismatch <= t.pairing)) out.emplace_back("pairing_mismatch");
    if (!(conjugation_closure <= t.pairing)) out.emplace_back("conjugation_closure");
    if (!(sigma3_relation <= t.sigma3_relation)) out.emplace_back("sigma3_relation");
    if (!(completeness <= t.completeness)) out.emplace_back("completeness");
    return out;
}

ValidationReport validate_spectrum(const SpectralDecomposition& d, const KernelMatrix& kernel) {
    const Index size = static_cast<Index>(d.size());
    if (kernel.entries.rows() != size) throw std::invalid_argument("kernel and decomposition sizes differ");
    const Index n = size / 2;
    ValidationReport r;
    r.max_abs_eigenvalue = d.max_abs_eigenvalue();
    const double scale = r.max_abs_eigenvalue > 0.0 ? r.max_abs_eigenvalue : 1.0;

    r.biorthonormality = biorthonormality_residual(d);

    {
        Eigen::MatrixXcd c = d.right * d.left.adjoint() * d.dp();
        c.diagonal().array() -= 1.0;
        r.completeness = c.cwiseAbs().maxCoeff();
    }

    {
        Eigen::MatrixXcd s3r = d.right;
        s3r.bottomRows(n) *= -1.0;
        Eigen::MatrixXcd res = kernel.entries.adjoint() * s3r * kernel.dp();
        for (Index k = 0; k < size; ++k) {
            res.col(k) -= d.eigenvalues[k] * s3r.col(k);
            r.sigma3_relation = std::max(r.sigma3_relation, res.col(k).norm() / s3r.col(k).norm());
        }
    }

    for (Index k = 0; k < size; ++k) {
        const std::complex<double> target = std::conj(d.eigenvalues[k]);
        if (!d.pairing.empty()) {
            const auto partner = static_cast<Index>(d.pairing[static_cast<std::size_t>(k)]);
            r.pairing_mismatch = std::max(r.pairing_mismatch, std::abs(d.eigenvalues[partner] - target) / scale);
        }
        double nearest = INFINITY;
        for (Index m = 0; m < size; ++m) nearest = std::min(nearest, std::abs(d.eigenvalues[m] - target));
        r.conjugation_closure = std::max(r.conjugation_closure, nearest / scale);
        r.max_imaginary = std::max(r.max_imaginary, std::abs(d.eigenvalues[k].imag()));
    }
    r.nonreal_pairs = d.nonreal_count() / 2;
    return r;
}

void write_eigenvalues_csv(std::ostream& out, const SpectralDecomposition& d) {
    out << "re,im,paired_index\n";
    char line[128];
    for (std::size_t k = 0; k < d.size(); ++k) {
        const auto e = d.eigenvalues[static_cast<Index>(k)];
        std::snprintf(line, sizeof line, "%.14e,%.14e,%zu\n", e.real(), e.imag(), d.pairing.empty() ? k : d.pairing[k]);
        out << line;
    }
}

}  // namespace kgfw
