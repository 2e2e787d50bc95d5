#pragma once

#include "wgqed/model.h"

#include <cstddef>
#include <vector>

// Closed-form free evolution of a uniformly coupled ensemble. Atom indices are
// 1-based (n = 1 is the first atom the guided light meets).
namespace wgqed::analytic {

// Excited amplitude after timed Dicke preparation: e^{-gamma t} L_{n-1}(2 beta gamma t)/sqrt(N).
double phi_td(std::size_t n, double t, const model::EnsembleParams &params);

// Guided field right after atom n: (sqrt(2 beta gamma)/i) sum_{m<=n} phi_m(t).
cplx chi_td(std::size_t n, double t, const model::EnsembleParams &params);

// All amplitudes at once (one recurrence sweep instead of N).
std::vector<double> phi_td_all(double t, const model::EnsembleParams &params);

// Zeros tau_m of the guided power: roots of L_{N-1}^(1)(2 beta gamma t), ascending.
std::vector<double> subradiant_times(const model::EnsembleParams &params);

// Only the first `count` passage times; cheap for very large N.
std::vector<double> subradiant_times(const model::EnsembleParams &params, std::size_t count);

// Unit vector proportional to phi_n(tau_m), m = 1..N-1.
std::vector<double> subradiant_state(std::size_t m, const model::EnsembleParams &params);

model::CollectiveBasis collective_basis(const model::EnsembleParams &params);

// Large-N, small-beta forms; OD is the collective optical depth 4 beta N.
double phi_td_bessel(std::size_t n, double t, const model::EnsembleParams &params);
cplx chi_td_bessel(double t, const model::EnsembleParams &params);

// Zeros of chi_td_bessel: x_m^2 / (2 gamma OD) with x_m the zeros of J_1.
std::vector<double> bessel_subradiant_times(std::size_t count, const model::EnsembleParams &params);

// Atom amplitudes after a long resonant drive switched off at t = 0, normalised so
// phi_1(0) = 1/sqrt(N). Closed forms exist for the first four atoms.
inline constexpr std::size_t kHeavisideClosedFormAtoms = 4;
double phi_heaviside(std::size_t n, double t, const model::EnsembleParams &params);

// Total energy decay rate of the timed Dicke state at t = 0: 2 gamma (N beta + 1 - beta).
double gamma_ens_t0(const model::EnsembleParams &params);

// Long-time limit of the squared projections on the collective basis: 1/N each.
std::vector<double> asymptotic_projections(const model::EnsembleParams &params);

// Time from which the decomposition is considered asymptotic: 2 beta gamma t = 3 x_{N-1}.
double asymptotic_time(const model::EnsembleParams &params);

} // namespace wgqed::analytic
