#include "kgfw/state.hpp"

#include <fftw3.h>

#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace kgfw {

std::string_view to_string(Representation rep) { return rep == Representation::fw ? "fw" : "canonical"; }

Representation representation_from_string(std::string_view name) {
    if (name == "fw" || name == "FW") return Representation::fw;
    if (name == "canonical") return Representation::canonical;
    throw std::invalid_argument("unknown representation '" + std::string(name) + "'");
}

TwoComponentState TwoComponentState::zeros(std::size_t n, Representation rep, Domain domain, double time) {
    TwoComponentState s;
    s.representation = rep;
    s.domain = domain;
    s.phi.assign(n, complex_ext{});
    s.chi.assign(n, complex_ext{});
    s.time = time;
    return s;
}

TwoComponentState TwoComponentState::from_double(const std::vector<std::complex<double>>& phi,
                                                 const std::vector<std::complex<double>>& chi, Representation rep,
                                                 Domain domain, double time) {
    if (phi.size() != chi.size()) throw std::invalid_argument("state: phi and chi lengths differ");
    auto s = zeros(phi.size(), rep, domain, time);
    for (std::size_t j = 0; j < phi.size(); ++j) {
        s.phi[j] = to_ext(phi[j]);
        s.chi[j] = to_ext(chi[j]);
    }
    return s;
}

std::vector<std::complex<double>> TwoComponentState::phi_double() const {
    std::vector<std::complex<double>> out(phi.size());
    for (std::size_t j = 0; j < phi.size(); ++j) out[j] = to_double(phi[j]);
    return out;
}

std::vector<std::complex<double>> TwoComponentState::chi_double() const {
    std::vector<std::complex<double>> out(chi.size());
    for (std::size_t j = 0; j < chi.size(); ++j) out[j] = to_double(chi[j]);
    return out;
}

std::vector<std::complex<double>> TwoComponentState::stacked_double() const {
    std::vector<std::complex<double>> out(2 * phi.size());
    for (std::size_t j = 0; j < phi.size(); ++j) {
        out[j] = to_double(phi[j]);
        out[phi.size() + j] = to_double(chi[j]);
    }
    return out;
}

double TwoComponentState::weighted_norm_squared(double weight) const {
    real_ext sum = 0;
    for (std::size_t j = 0; j < phi.size(); ++j) sum += norm_ext(phi[j]) + norm_ext(chi[j]);
    return static_cast<double>(sum * weight);
}

std::vector<double> DensityProfile::values() const {
    std::vector<double> out(rho.size());
    for (std::size_t j = 0; j < rho.size(); ++j) out[j] = static_cast<double>(rho[j]);
    return out;
}

namespace {

// One in-place quad plan per (size, sign). FFTW's planner is not
// thread-safe, executing an existing plan on new arrays is.
class PlanCache {
public:
    fftwq_plan get(int n, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        auto* buf = static_cast<fftwq_complex*>(fftwq_malloc(sizeof(fftwq_complex) * static_cast<std::size_t>(n)));
        fftwq_plan plan = fftwq_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
        fftwq_free(buf);
        if (!plan) throw std::runtime_error("fftw: could not create plan");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftwq_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : data(static_cast<fftwq_complex*>(fftwq_malloc(sizeof(fftwq_complex) * n))) {
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftwq_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftwq_complex* data;
};

const real_ext two_pi_ext = 2 * M_PIq;

void check_grid(const TwoComponentState& state, const Grids& grids, Domain expected) {
    if (state.phi.size() != grids.size() || state.chi.size() != grids.size())
        throw std::invalid_argument("state size " + std::to_string(state.phi.size()) + " does not match grid size " +
                                    std::to_string(grids.size()));
    if (state.domain != expected)
        throw std::invalid_argument(expected == Domain::momentum ? "state is not in momentum space"
                                                                 : "state is not in position space");
}

// exp(i sign p_m x_min / hbar) with p_m x_min / hbar = 2 pi (m - n/2) x_min / (x_max - x_min).
std::vector<complex_ext> offset_phases(const Grids& grids, int sign) {
    const std::size_t n = grids.size();
    const real_ext scale = two_pi_ext * static_cast<real_ext>(grids.space.x_min) /
                           (static_cast<real_ext>(grids.space.x_max) - static_cast<real_ext>(grids.space.x_min));
    std::vector<complex_ext> out(n);
    const auto half = static_cast<long>(n / 2);
    for (std::size_t m = 0; m < n; ++m)
        out[m] = unit_phase_ext(sign * scale * static_cast<real_ext>(static_cast<long>(m) - half));
    return out;
}

// out_j = prefactor * post_j * sum_m pre_m in_m exp(sign 2 pi i m j / n)
void transform(const std::vector<complex_ext>& in, std::vector<complex_ext>& out, int fftw_sign,
               const std::vector<complex_ext>& pre, const std::vector<complex_ext>& post, real_ext prefactor,
               bool alternate_in, bool alternate_out) {
    const std::size_t n = in.size();
    FftwBuffer buf(n);
    for (std::size_t j = 0; j < n; ++j) {
        complex_ext v = in[j];
        if (!pre.empty()) v *= pre[j];
        if (alternate_in && (j & 1U)) v = -v;
        buf.data[j][0] = v.real();
        buf.data[j][1] = v.imag();
    }
    fftwq_execute_dft(plan_cache().get(static_cast<int>(n), fftw_sign), buf.data, buf.data);
    out.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        complex_ext v{buf.data[j][0] * prefactor, buf.data[j][1] * prefactor};
        if (!post.empty()) v *= post[j];
        if (alternate_out && (j & 1U)) v = -v;
        out[j] = v;
    }
}

}  // namespace

TwoComponentState to_position(const TwoComponentState& state, const Grids& grids) {
    check_grid(state, grids, Domain::momentum);
    // psi(x_j) = dp / sqrt(2 pi hbar) (-1)^j sum_m psi_m exp(i p_m x_min / hbar) exp(2 pi i m j / n)
    const auto phases = offset_phases(grids, +1);
    const real_ext pref =
        static_cast<real_ext>(grids.momentum.dp) / sqrtq(two_pi_ext * static_cast<real_ext>(grids.hbar));
    TwoComponentState out = state;
    out.domain = Domain::position;
    transform(state.phi, out.phi, FFTW_BACKWARD, phases, {}, pref, false, true);
    transform(state.chi, out.chi, FFTW_BACKWARD, phases, {}, pref, false, true);
    return out;
}

TwoComponentState to_momentum(const TwoComponentState& state, const Grids& grids) {
    check_grid(state, grids, Domain::position);
    // psi(p_m) = dx / sqrt(2 pi hbar) exp(-i p_m x_min / hbar) sum_j (-1)^j psi_j exp(-2 pi i m j / n)
    const auto phases = offset_phases(grids, -1);
    const real_ext dx = (static_cast<real_ext>(grids.space.x_max) - static_cast<real_ext>(grids.space.x_min)) /
                        static_cast<real_ext>(grids.size());
    const real_ext pref = dx / sqrtq(two_pi_ext * static_cast<real_ext>(grids.hbar));
    TwoComponentState out = state;
    out.domain = Domain::momentum;
    transform(state.phi, out.phi, FFTW_FORWARD, {}, phases, pref, true, false);
    transform(state.chi, out.chi, FFTW_FORWARD, {}, phases, pref, true, false);
    return out;
}

DensityProfile charge_density(const TwoComponentState& state, const Grids& grids, double q) {
    check_grid(state, grids, Domain::position);
    DensityProfile d;
    d.grid = grids.space;
    d.time = state.time;
    d.rho.resize(state.size());
    const real_ext qe = q;
    for (std::size_t j = 0; j < state.size(); ++j) d.rho[j] = qe * (norm_ext(state.phi[j]) - norm_ext(state.chi[j]));
    return d;
}

void write_density_csv(std::ostream& out, const DensityProfile& density) {
    out << "x,rho,t\n";
    char line[128];
    for (std::size_t j = 0; j < density.rho.size(); ++j) {
        std::snprintf(line, sizeof line, "%.14e,%.14e,%.14e\n", density.grid.x(j), density.at(j), density.time);
        out << line;
    }
}

}  // namespace kgfw
