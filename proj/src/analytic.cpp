#include "wgqed/analytic.h"

#include "wgqed/errors.h"
#include "wgqed/specfun.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wgqed::analytic {

namespace {

struct Uniform {
    std::size_t n_atoms;
    double beta;
    double gamma;
};

Uniform uniform_of(const model::EnsembleParams &params)
{
    const double beta = params.common_beta();
    return {params.n_atoms(), beta, params.gamma()};
}

void check_atom(std::size_t n, std::size_t n_atoms)
{
    if (n < 1 || n > n_atoms) {
        throw std::out_of_range("atom index " + std::to_string(n) + " outside 1.." +
                                std::to_string(n_atoms));
    }
}

void check_time(double t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("time must be finite and non-negative");
    }
}

// scale * L_k^(alpha)(x) for k = 0..count-1. The recurrence is linear, so a
// scale folded into the seeds keeps physical amplitudes in range.
std::vector<double> scaled_laguerre_sequence(std::size_t count, int alpha, double x, double scale)
{
    std::vector<double> out(count);
    if (count == 0) {
        return out;
    }
    out[0] = scale;
    if (count > 1) {
        out[1] = scale * (1.0 + alpha - x);
    }
    for (std::size_t k = 1; k + 1 < count; ++k) {
        const double kd = static_cast<double>(k);
        out[k + 1] = ((2.0 * kd + 1.0 + alpha - x) * out[k] - (kd + alpha) * out[k - 1]) / (kd + 1.0);
    }
    return out;
}

// Direction of (L_0(x), ..., L_{count-1}(x)) as a unit vector, rescaling on the fly.
std::vector<double> unit_laguerre_vector(std::size_t count, double x)
{
    std::vector<double> out(count);
    out[0] = 1.0;
    if (count > 1) {
        out[1] = 1.0 - x;
    }
    for (std::size_t k = 1; k + 1 < count; ++k) {
        const double kd = static_cast<double>(k);
        out[k + 1] = ((2.0 * kd + 1.0 - x) * out[k] - kd * out[k - 1]) / (kd + 1.0);
        if (std::abs(out[k + 1]) > 1e200) {
            for (std::size_t j = 0; j <= k + 1; ++j) {
                out[j] *= 1e-200;
            }
        }
    }
    double peak = 0.0;
    for (double v : out) {
        peak = std::max(peak, std::abs(v));
    }
    double norm = 0.0;
    for (double &v : out) {
        v /= peak;
        norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double &v : out) {
        v /= norm;
    }
    return out;
}

} // namespace

double phi_td(std::size_t n, double t, const model::EnsembleParams &params)
{
    const auto u = uniform_of(params);
    check_atom(n, u.n_atoms);
    check_time(t);
    const double x = 2.0 * u.beta * u.gamma * t;
    const auto seq = scaled_laguerre_sequence(n, 0, x, std::exp(-u.gamma * t));
    return seq[n - 1] / std::sqrt(static_cast<double>(u.n_atoms));
}

std::vector<double> phi_td_all(double t, const model::EnsembleParams &params)
{
    const auto u = uniform_of(params);
    check_time(t);
    const double x = 2.0 * u.beta * u.gamma * t;
    auto seq = scaled_laguerre_sequence(u.n_atoms, 0, x,
                                        std::exp(-u.gamma * t) / std::sqrt(static_cast<double>(u.n_atoms)));
    return seq;
}

cplx chi_td(std::size_t n, double t, const model::EnsembleParams &params)
{
    const auto u = uniform_of(params);
    check_atom(n, u.n_atoms);
    check_time(t);
    const double x = 2.0 * u.beta * u.gamma * t;
    const auto seq = scaled_laguerre_sequence(n, 1, x, std::exp(-u.gamma * t));
    const double magnitude =
        std::sqrt(2.0 * u.beta * u.gamma / static_cast<double>(u.n_atoms)) * seq[n - 1];
    return {0.0, -magnitude}; // 1/i = -i
}

std::vector<double> subradiant_times(const model::EnsembleParams &params)
{
    return subradiant_times(params, params.n_atoms() == 0 ? 0 : params.n_atoms() - 1);
}

std::vector<double> subradiant_times(const model::EnsembleParams &params, std::size_t count)
{
    const auto u = uniform_of(params);
    if (u.beta <= 0.0) {
        throw DomainError("subradiant_times: beta must be positive");
    }
    const int degree = static_cast<int>(u.n_atoms) - 1;
    if (static_cast<int>(count) > degree) {
        throw std::out_of_range("subradiant_times: at most N-1 passage times exist");
    }
    const auto roots = specfun::laguerre_roots(degree, 1, static_cast<int>(count));
    std::vector<double> times;
    times.reserve(roots.size());
    for (double x : roots.values) {
        times.push_back(x / (2.0 * u.beta * u.gamma));
    }
    return times;
}

std::vector<double> subradiant_state(std::size_t m, const model::EnsembleParams &params)
{
    const auto u = uniform_of(params);
    if (m < 1 || m + 1 > u.n_atoms) {
        throw std::out_of_range("subradiant_state: m must lie in 1..N-1");
    }
    const auto roots = specfun::laguerre_roots(static_cast<int>(u.n_atoms) - 1, 1, static_cast<int>(m));
    return unit_laguerre_vector(u.n_atoms, roots.values.back());
}

model::CollectiveBasis collective_basis(const model::EnsembleParams &params)
{
    const auto u = uniform_of(params);
    if (u.beta <= 0.0) {
        throw DomainError("collective_basis: beta must be positive");
    }
    model::CollectiveBasis basis;
    basis.vectors.reserve(u.n_atoms);
    basis.vectors.emplace_back(u.n_atoms, 1.0 / std::sqrt(static_cast<double>(u.n_atoms)));
    basis.times.push_back(0.0);
    const auto roots = specfun::laguerre_roots(static_cast<int>(u.n_atoms) - 1, 1);
    for (double x : roots.values) {
        basis.vectors.push_back(unit_laguerre_vector(u.n_atoms, x));
        basis.times.push_back(x / (2.0 * u.beta * u.gamma));
    }
    return basis;
}

double phi_td_bessel(std::size_t n, double t, const model::EnsembleParams &params)
{
    const auto u = uniform_of(params);
    check_atom(n, u.n_atoms);
    check_time(t);
    const double od = model::od_linear(params);
    const double nd = static_cast<double>(u.n_atoms);
    const double arg = std::sqrt(2.0 * u.gamma * od * t * (static_cast<double>(n) - 1.0) / nd);
    return std::exp(-u.gamma * t) * specfun::bessel_j(0, arg) / std::sqrt(nd);
}

cplx chi_td_bessel(double t, const model::EnsembleParams &params)
{
    const auto u = uniform_of(params);
    check_time(t);
    const double od = model::od_linear(params);
    // e^{-gamma t} J_1(y) / (i sqrt(t)), y = sqrt(2 gamma OD t); at t -> 0 the
    // ratio J_1(y)/sqrt(t) tends to sqrt(2 gamma OD)/2.
    const double rate = 2.0 * u.gamma * od;
    const double y = std::sqrt(rate * t);
    double j1_over_root_t = 0.0;
    if (y < 1e-6) {
        j1_over_root_t = std::sqrt(rate) * (0.5 - y * y / 16.0);
    } else {
        j1_over_root_t = specfun::bessel_j(1, y) / std::sqrt(t);
    }
    return {0.0, -std::exp(-u.gamma * t) * j1_over_root_t};
}

std::vector<double> bessel_subradiant_times(std::size_t count, const model::EnsembleParams &params)
{
    const auto u = uniform_of(params);
    const double od = model::od_linear(params);
    if (!(od > 0.0)) {
        throw DomainError("bessel_subradiant_times: optical depth must be positive");
    }
    std::vector<double> times;
    if (count == 0) {
        return times;
    }
    const auto zeros = specfun::bessel_j1_zeros(static_cast<int>(count));
    for (double z : zeros.values) {
        times.push_back(z * z / (2.0 * u.gamma * od));
    }
    return times;
}

double phi_heaviside(std::size_t n, double t, const model::EnsembleParams &params)
{
    const auto u = uniform_of(params);
    check_atom(n, u.n_atoms);
    check_time(t);
    if (n > kHeavisideClosedFormAtoms) {
        throw UnsupportedConfiguration(
            "closed-form Heaviside response is available for the first four atoms only; "
            "use the spectral engine");
    }
    const double b = u.beta;
    const double gt = u.gamma * t;
    const double x = 2.0 * b * gt;
    const double lag = specfun::laguerre(static_cast<int>(n) - 1, 0, x);
    double correction = 0.0;
    switch (n) {
    case 1:
        break;
    case 2:
        correction = -2.0 * b;
        break;
    case 3:
        correction = -4.0 * b + 4.0 * b * b * (1.0 + gt);
        break;
    case 4:
        correction = -2.0 * b * (3.0 - 6.0 * b + 4.0 * b * b) +
                     4.0 * b * b * (3.0 * gt - 2.0 * b * gt - b * gt * gt);
        break;
    default:
        break;
    }
    return std::exp(-gt) * (lag + correction) / std::sqrt(static_cast<double>(u.n_atoms));
}

double gamma_ens_t0(const model::EnsembleParams &params)
{
    const auto u = uniform_of(params);
    return 2.0 * u.gamma * (static_cast<double>(u.n_atoms) * u.beta + 1.0 - u.beta);
}

std::vector<double> asymptotic_projections(const model::EnsembleParams &params)
{
    const auto u = uniform_of(params);
    return std::vector<double>(u.n_atoms, 1.0 / static_cast<double>(u.n_atoms));
}

double asymptotic_time(const model::EnsembleParams &params)
{
    const auto u = uniform_of(params);
    if (u.n_atoms < 2) {
        return 0.0;
    }
    const auto roots = specfun::laguerre_roots(static_cast<int>(u.n_atoms) - 1, 1);
    return 3.0 * roots.values.back() / (2.0 * u.beta * u.gamma);
}

} // namespace wgqed::analytic
