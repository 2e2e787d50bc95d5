#include "wgqed/model.h"

#include "wgqed/errors.h"

#include <algorithm>
#include <functional>
#include <limits>
#include <cmath>
#include <numbers>
#include <string>

namespace wgqed::model {

namespace {

void validate(const std::vector<double> &betas, double gamma)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw DomainError("EnsembleParams: gamma must be positive and finite");
    }
    for (std::size_t i = 0; i < betas.size(); ++i) {
        const double b = betas[i];
        if (!(b >= 0.0 && b <= 1.0)) {
            throw DomainError("EnsembleParams: beta_" + std::to_string(i + 1) +
                              " must lie in [0, 1]");
        }
    }
}

} // namespace

EnsembleParams::EnsembleParams(std::vector<double> betas, double gamma)
    : betas_(std::move(betas)), gamma_(gamma)
{
    validate(betas_, gamma_);
}

EnsembleParams EnsembleParams::uniform(std::size_t n_atoms, double beta, double gamma)
{
    return EnsembleParams(std::vector<double>(n_atoms, beta), gamma);
}

EnsembleParams EnsembleParams::from_betas(std::vector<double> betas, double gamma)
{
    return EnsembleParams(std::move(betas), gamma);
}

bool EnsembleParams::uniform_beta() const
{
    return std::adjacent_find(betas_.begin(), betas_.end(), std::not_equal_to<>()) ==
           betas_.end();
}

double EnsembleParams::common_beta() const
{
    if (betas_.empty()) {
        throw UnsupportedConfiguration("ensemble has no atoms");
    }
    if (!uniform_beta()) {
        throw UnsupportedConfiguration(
            "closed-form solutions require a uniform coupling beta; use the spectral engine");
    }
    return betas_.front();
}

EnsembleParams EnsembleParams::repeated(std::size_t times) const
{
    std::vector<double> out;
    out.reserve(betas_.size() * times);
    for (std::size_t r = 0; r < times; ++r) {
        out.insert(out.end(), betas_.begin(), betas_.end());
    }
    return EnsembleParams(std::move(out), gamma_);
}

EnsembleParams EnsembleParams::reversed() const
{
    return EnsembleParams(std::vector<double>(betas_.rbegin(), betas_.rend()), gamma_);
}

UnitSystem::UnitSystem(double gamma_hz) : gamma_hz_(gamma_hz)
{
    if (!(gamma_hz > 0.0) || !std::isfinite(gamma_hz)) {
        throw DomainError("UnitSystem: gamma_hz must be positive");
    }
}

double UnitSystem::gamma_hz() const
{
    return gamma_hz_.value_or(kDefaultGammaHz);
}

double UnitSystem::to_ns(double t_gamma) const
{
    // gamma = 2 pi gamma_hz in s^-1
    return t_gamma / (2.0 * std::numbers::pi * gamma_hz()) * 1e9;
}

double UnitSystem::from_ns(double t_ns) const
{
    return t_ns * 1e-9 * (2.0 * std::numbers::pi * gamma_hz());
}

StateSnapshot StateSnapshot::from_amplitudes(double time, std::vector<cplx> phis,
                                             const EnsembleParams &params, cplx chi_in)
{
    if (phis.size() != params.n_atoms()) {
        throw DomainError("StateSnapshot: amplitude count does not match atom count");
    }
    StateSnapshot s;
    s.time = time;
    s.chis.resize(phis.size());
    cplx chi = chi_in;
    const cplx minus_i(0.0, -1.0);
    for (std::size_t n = 0; n < phis.size(); ++n) {
        chi += minus_i * std::sqrt(2.0 * params.beta(n) * params.gamma()) * phis[n];
        s.chis[n] = chi;
    }
    s.phis = std::move(phis);
    return s;
}

double StateSnapshot::population() const
{
    double p = 0.0;
    for (const auto &a : phis) {
        p += std::norm(a);
    }
    return p;
}

StateSnapshot timed_dicke(const EnsembleParams &params)
{
    const std::size_t n = params.n_atoms();
    if (n == 0) {
        throw DomainError("timed_dicke: ensemble has no atoms");
    }
    std::vector<cplx> phis(n, cplx(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
    return StateSnapshot::from_amplitudes(0.0, std::move(phis), params);
}

OpticalDepth od(const EnsembleParams &params)
{
    // |1 - 2 beta|^2 per atom on resonance.
    double od_value = 0.0;
    for (double b : params.betas()) {
        const double t = std::abs(1.0 - 2.0 * b);
        if (t == 0.0) {
            return {std::numeric_limits<double>::infinity(), true};
        }
        od_value -= 2.0 * std::log(t);
    }
    return {od_value, false};
}

double od_linear(const EnsembleParams &params)
{
    double s = 0.0;
    for (double b : params.betas()) {
        s += b;
    }
    return 4.0 * s;
}

std::size_t atoms_for_od(double target, double beta, OdDefinition definition)
{
    if (!(target >= 0.0) || !std::isfinite(target)) {
        throw DomainError("atoms_for_od: target optical depth must be finite and non-negative");
    }
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw DomainError("atoms_for_od: beta must lie in (0, 1]");
    }
    double per_atom = 0.0;
    if (definition == OdDefinition::Linear) {
        per_atom = 4.0 * beta;
    } else {
        const double t = std::abs(1.0 - 2.0 * beta);
        if (t == 0.0) {
            throw DomainError("atoms_for_od: beta = 1/2 gives infinite optical depth per atom");
        }
        per_atom = -2.0 * std::log(t);
    }
    const double n = std::round(target / per_atom);
    return static_cast<std::size_t>(std::max(1.0, n));
}

} // namespace wgqed::model
