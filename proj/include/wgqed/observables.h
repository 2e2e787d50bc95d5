#pragma once

#include "wgqed/model.h"
#include "wgqed/pulse.h"

#include <cstddef>
#include <limits>
#include <vector>

// Decay rates and basis projections derived from traces. Rates are in units of gamma.
namespace wgqed::observables {

// Samples whose population (or guided power) falls below this fraction of the trace
// maximum end the trace / are masked.
inline constexpr double kPopulationFloor = 1e-12;
inline constexpr double kLightMaskFloor = 1e-10;

struct DecayRateTrace {
    std::vector<double> times;
    std::vector<double> gamma_ens;    // -dP/dt / P
    std::vector<double> gamma_ens_wg; // |chi_N|^2 / P
    std::vector<double> gamma_fs;     // sum 2 gamma (1 - beta_n)|phi_n|^2 / P
    std::vector<double> gamma_light;  // -d ln|chi_N|^2 / dt, NaN where masked
    std::vector<bool> light_masked;
    bool truncated = false; // population underflow cut the trace short
};

struct LightRateTrace {
    std::vector<double> times;
    std::vector<double> rate; // NaN where masked
    std::vector<bool> masked;
};

struct DecompositionTrace {
    std::vector<double> times;
    std::vector<std::vector<double>> projections; // [time][basis vector]
    bool truncated = false;
};

// First derivative of uniformly sampled data: 9-point stencils (8th order), one-sided
// near the ends. Needs at least 9 samples.
std::vector<double> derivative(const std::vector<double> &y, double dt);

// Finite-difference weights for the m-th derivative at x0 from nodes xs.
std::vector<double> fd_weights(double x0, const std::vector<double> &xs, int m);

// Expects a free-decay window (no drive inside it).
DecayRateTrace gamma_ens(const pulse::AtomTraces &traces, const model::EnsembleParams &params);

// -d/dt ln of the emitted guided power over `window`.
LightRateTrace gamma_light(const pulse::FieldTrace &field,
                           pulse::TimeWindow window = {0.0, std::numeric_limits<double>::infinity()});
LightRateTrace gamma_light(const std::vector<double> &times, const std::vector<double> &power);

// dP/dt + sum 2 gamma (1 - beta_n)|phi_n|^2 + |chi_N|^2 - |chi_0|^2, zero if energy is conserved.
std::vector<double> energy_residual(const pulse::AtomTraces &traces, const model::EnsembleParams &params);

DecompositionTrace decompose(const pulse::AtomTraces &traces, const model::CollectiveBasis &basis);

// Same decomposition for a single state.
std::vector<double> project(const std::vector<cplx> &phis, const model::CollectiveBasis &basis);

} // namespace wgqed::observables
