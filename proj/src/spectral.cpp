#include "wgqed/spectral.h"

#include "wgqed/errors.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wgqed::spectral {

namespace {

cplx pole_w(double delta, double gamma)
{
    return 1.0 / cplx(gamma, delta);
}

void check_delta(double delta)
{
    if (!std::isfinite(delta)) {
        throw DomainError("detuning must be finite");
    }
}

void check_atom(std::size_t n, const model::EnsembleParams &params)
{
    if (n < 1 || n > params.n_atoms()) {
        throw std::out_of_range("atom index " + std::to_string(n) + " outside 1.." +
                                std::to_string(params.n_atoms()));
    }
}

} // namespace

cplx ipow(cplx z, std::size_t n)
{
    cplx result = 1.0;
    while (n > 0) {
        if (n & 1U) {
            result *= z;
        }
        n >>= 1U;
        if (n > 0) {
            z *= z;
        }
    }
    return result;
}

FrequencyGrid FrequencyGrid::symmetric(std::size_t count, double span)
{
    if (count < 2 || (count & (count - 1)) != 0) {
        throw ConfigError("frequency grid count must be a power of two >= 2");
    }
    if (!(span > 0.0) || !std::isfinite(span)) {
        throw ConfigError("frequency grid span must be positive");
    }
    FrequencyGrid g;
    g.count = count;
    g.span = span;
    g.spacing = 2.0 * span / static_cast<double>(count);
    g.detunings.resize(count);
    const double half = static_cast<double>(count) / 2.0;
    for (std::size_t j = 0; j < count; ++j) {
        g.detunings[j] = (static_cast<double>(j) - half + 0.5) * g.spacing;
    }
    return g;
}

cplx atom_transmission(double delta, double beta, double gamma)
{
    check_delta(delta);
    return 1.0 - 2.0 * beta * gamma * pole_w(delta, gamma);
}

cplx ensemble_transmission(double delta, const model::EnsembleParams &params)
{
    check_delta(delta);
    return Chain(params).field(pole_w(delta, params.gamma()));
}

std::vector<cplx> ensemble_transmission(const FrequencyGrid &grid,
                                        const model::EnsembleParams &params)
{
    const Chain chain(params);
    std::vector<cplx> out;
    out.reserve(grid.detunings.size());
    for (double d : grid.detunings) {
        out.push_back(chain.field(pole_w(d, params.gamma())));
    }
    return out;
}

cplx partial_transmission(std::size_t n, double delta, const model::EnsembleParams &params)
{
    check_delta(delta);
    if (n > params.n_atoms()) {
        throw std::out_of_range("partial_transmission: n exceeds atom count");
    }
    cplx t = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        t *= atom_transmission(delta, params.beta(i), params.gamma());
    }
    return t;
}

cplx phi_spectrum(std::size_t n, double delta, const model::EnsembleParams &params)
{
    check_atom(n, params);
    const double kappa = 2.0 * params.beta(n - 1) * params.gamma();
    // i (t_n - t_{n-1}) / sqrt(kappa) = -i sqrt(kappa) w t_{n-1}; the second form
    // stays finite for kappa -> 0.
    const cplx w = pole_w(delta, params.gamma());
    return cplx(0.0, -std::sqrt(kappa)) * w * partial_transmission(n - 1, delta, params);
}

Chain::Chain(const model::EnsembleParams &params, std::size_t passes)
    : n_atoms_(params.n_atoms()), passes_(passes), gamma_(params.gamma())
{
    if (passes == 0) {
        throw DomainError("chain needs at least one pass");
    }
    for (double beta : params.betas()) {
        const double kappa = 2.0 * beta * gamma_;
        if (!runs_.empty() && runs_.back().first == kappa) {
            ++runs_.back().second;
        } else {
            runs_.emplace_back(kappa, 1);
        }
    }
}

double Chain::total_kappa() const
{
    double sum = 0.0;
    for (const auto &[kappa, mult] : runs_) {
        sum += kappa * static_cast<double>(mult);
    }
    return sum * static_cast<double>(passes_);
}

cplx Chain::field(cplx w) const
{
    cplx t = 1.0;
    for (const auto &[kappa, mult] : runs_) {
        t *= ipow(1.0 - kappa * w, mult);
    }
    return ipow(t, passes_);
}

series::Series Chain::field_series(cplx eps, int order) const
{
    const series::Series w = series::pole(eps, order);
    series::Series t = series::constant(1.0, order);
    for (const auto &[kappa, mult] : runs_) {
        const series::Series factor = series::add(series::constant(1.0, order), series::scale(w, -kappa));
        t = series::multiply(t, series::power(factor, mult));
    }
    return series::power(t, passes_);
}

} // namespace wgqed::spectral
