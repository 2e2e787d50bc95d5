#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace wgqed {

using cplx = std::complex<double>;

namespace model {

// gamma/2pi used when SI output is requested without an explicit value (Cs D2 line).
inline constexpr double kDefaultGammaHz = 2.6e6;

// Per-atom coupling fractions beta_n and the single-atom amplitude decay rate gamma.
// Time is measured in 1/gamma and detuning in gamma; v_g = 1.
class EnsembleParams {
public:
    EnsembleParams() = default;

    static EnsembleParams uniform(std::size_t n_atoms, double beta, double gamma = 1.0);
    static EnsembleParams from_betas(std::vector<double> betas, double gamma = 1.0);

    std::size_t n_atoms() const { return betas_.size(); }
    const std::vector<double> &betas() const { return betas_; }
    double beta(std::size_t index) const { return betas_.at(index); }
    double gamma() const { return gamma_; }
    bool uniform_beta() const;

    // Common coupling; throws UnsupportedConfiguration for heterogeneous ensembles.
    double common_beta() const;

    // Same atoms repeated `times` in sequence (m passes through one ensemble).
    EnsembleParams repeated(std::size_t times) const;
    EnsembleParams reversed() const;

private:
    EnsembleParams(std::vector<double> betas, double gamma);

    std::vector<double> betas_;
    double gamma_ = 1.0;
};

// Times are reported in units of 1/gamma, optionally converted to ns via gamma/2pi in Hz.
class UnitSystem {
public:
    UnitSystem() = default;
    explicit UnitSystem(double gamma_hz);

    bool si() const { return gamma_hz_.has_value(); }
    double gamma_hz() const;
    double to_ns(double t_gamma) const;
    double from_ns(double t_ns) const;

private:
    std::optional<double> gamma_hz_;
};

// Excited amplitudes phi_n and the guided field chi_n right after each atom.
struct StateSnapshot {
    double time = 0.0;
    std::vector<cplx> phis;
    std::vector<cplx> chis;

    // chi_n = chi_{n-1} + sqrt(2 beta_n gamma)/i phi_n, chi_0 = chi_in.
    static StateSnapshot from_amplitudes(double time, std::vector<cplx> phis,
                                         const EnsembleParams &params, cplx chi_in = 0.0);
    double population() const;
};

// Timed Dicke vector (index 0) followed by the N-1 subradiant vectors.
struct CollectiveBasis {
    std::vector<std::vector<double>> vectors;
    std::vector<double> times; // passage time of vectors[m], m >= 1; times[0] = 0

    std::size_t size() const { return vectors.size(); }
};

StateSnapshot timed_dicke(const EnsembleParams &params);

struct OpticalDepth {
    double value = 0.0;
    bool infinite = false;
};

// -ln |t_N(0)|^2 from the exact per-atom product.
OpticalDepth od(const EnsembleParams &params);

// Collective optical depth 4 sum_n beta_n (approximately od() for small beta).
double od_linear(const EnsembleParams &params);

enum class OdDefinition { Linear, Exact };

// Atom count whose optical depth is closest to `target` for a uniform coupling.
std::size_t atoms_for_od(double target, double beta, OdDefinition definition);

} // namespace model
} // namespace wgqed
