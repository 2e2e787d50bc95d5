#pragma once

#include "wgqed/model.h"
#include "wgqed/series.h"

#include <cstddef>
#include <utility>
#include <vector>

// Frequency-domain response of the chain. Detunings are in units of gamma and the
// transform convention is U(delta) = integral u(t) e^{-i delta t} dt.
namespace wgqed::spectral {

// Uniform detunings symmetric about zero: delta_j = -span + (j + 1/2) spacing.
struct FrequencyGrid {
    std::vector<double> detunings;
    std::size_t count = 0;
    double span = 0.0;
    double spacing = 0.0;

    static FrequencyGrid symmetric(std::size_t count, double span);
};

cplx atom_transmission(double delta, double beta, double gamma);

// Product over all atoms; equal-beta runs are raised to a power.
cplx ensemble_transmission(double delta, const model::EnsembleParams &params);

// Field right after atom n (t_0 = 1).
cplx partial_transmission(std::size_t n, double delta, const model::EnsembleParams &params);

// Excitation amplitude of atom n per unit input field:
// i (t_n - t_{n-1}) / sqrt(2 beta_n gamma).
cplx phi_spectrum(std::size_t n, double delta, const model::EnsembleParams &params);

std::vector<cplx> ensemble_transmission(const FrequencyGrid &grid,
                                        const model::EnsembleParams &params);

// Atoms grouped into runs of equal coupling, traversed `passes` times.
// All evaluations take w = 1/(gamma + i delta), so a carrier detuning enters as a
// complex shift of gamma.
class Chain {
public:
    explicit Chain(const model::EnsembleParams &params, std::size_t passes = 1);

    std::size_t n_atoms() const { return n_atoms_; }
    std::size_t passes() const { return passes_; }
    double gamma() const { return gamma_; }
    // Sum of 2 beta_n gamma over every atom traversal.
    double total_kappa() const;

    cplx field(cplx w) const;

    // Field transmission as a series in p, where w = p / (1 + eps p).
    series::Series field_series(cplx eps, int order) const;

    // (kappa, multiplicity) in propagation order.
    const std::vector<std::pair<double, std::size_t>> &runs() const { return runs_; }

private:
    std::vector<std::pair<double, std::size_t>> runs_;
    std::size_t n_atoms_ = 0;
    std::size_t passes_ = 1;
    double gamma_ = 1.0;
};

// z^n by repeated squaring.
cplx ipow(cplx z, std::size_t n);

} // namespace wgqed::spectral
