#include "wgqed/observables.h"

#include "wgqed/errors.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wgqed::observables {

namespace {

constexpr int kStencil = 9;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double uniform_step(const std::vector<double> &times)
{
    if (times.size() < kStencil) {
        throw PreconditionError("trace too short for finite differences (need 9 samples)");
    }
    return times[1] - times[0];
}

} // namespace

std::vector<double> fd_weights(double x0, const std::vector<double> &xs, int m)
{
    // Fornberg's recursion.
    const int n = static_cast<int>(xs.size()) - 1;
    std::vector<std::vector<double>> c(xs.size(), std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        w[i] = c[i][m];
    }
    return w;
}

std::vector<double> derivative(const std::vector<double> &y, double dt)
{
    const std::size_t n = y.size();
    if (n < kStencil) {
        throw PreconditionError("derivative needs at least 9 samples");
    }
    std::vector<double> nodes(kStencil);
    for (int i = 0; i < kStencil; ++i) {
        nodes[i] = i;
    }
    // Weights per position of the evaluation point inside the 9-node window.
    std::vector<std::vector<double>> weights(kStencil);
    for (int pos = 0; pos < kStencil; ++pos) {
        weights[pos] = fd_weights(pos, nodes, 1);
    }
    std::vector<double> d(n);
    const std::size_t half = kStencil / 2;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo;
        if (i < half) {
            lo = 0;
        } else if (i + half >= n) {
            lo = n - kStencil;
        } else {
            lo = i - half;
        }
        const auto &w = weights[i - lo];
        double acc = 0.0;
        for (int k = 0; k < kStencil; ++k) {
            acc += w[k] * y[lo + k];
        }
        d[i] = acc / dt;
    }
    return d;
}

DecayRateTrace gamma_ens(const pulse::AtomTraces &traces, const model::EnsembleParams &params)
{
    if (traces.n_atoms() != params.n_atoms()) {
        throw PreconditionError("gamma_ens: traces and params describe different ensembles");
    }
    const double dt = uniform_step(traces.times);
    const std::size_t n = traces.size();
    std::vector<double> pop(n);
    std::vector<double> loss(n);
    std::vector<double> guided(n);
    for (std::size_t k = 0; k < n; ++k) {
        double p = 0.0;
        double l = 0.0;
        for (std::size_t a = 0; a < traces.n_atoms(); ++a) {
            const double q = std::norm(traces.phis[a][k]);
            p += q;
            l += 2.0 * params.gamma() * (1.0 - params.beta(a)) * q;
        }
        pop[k] = p;
        loss[k] = l;
        guided[k] = std::norm(traces.chi_out[k]);
    }
    const double pmax = *std::max_element(pop.begin(), pop.end());
    std::size_t keep = n;
    for (std::size_t k = 0; k < n; ++k) {
        if (!(pop[k] > kPopulationFloor * pmax)) {
            keep = k;
            break;
        }
    }
    const auto dpop = derivative(pop, dt);
    const auto dguided = derivative(guided, dt);
    const double gmax = *std::max_element(guided.begin(), guided.end());

    DecayRateTrace out;
    out.truncated = keep < n;
    for (std::size_t k = 0; k < keep; ++k) {
        out.times.push_back(traces.times[k]);
        out.gamma_ens.push_back(-dpop[k] / pop[k]);
        out.gamma_ens_wg.push_back(guided[k] / pop[k]);
        out.gamma_fs.push_back(loss[k] / pop[k]);
        const bool mask = !(guided[k] > kLightMaskFloor * gmax);
        out.light_masked.push_back(mask);
        out.gamma_light.push_back(mask ? kNaN : -dguided[k] / guided[k]);
    }
    return out;
}

LightRateTrace gamma_light(const std::vector<double> &times, const std::vector<double> &power)
{
    if (times.size() != power.size()) {
        throw std::invalid_argument("gamma_light: times and power differ in length");
    }
    const double dt = uniform_step(times);
    const auto dp = derivative(power, dt);
    // Reference is the first sample (t = 0+ for a free-decay window).
    const double pmax = power.front() > 0.0 ? power.front() : *std::max_element(power.begin(), power.end());
    LightRateTrace out;
    out.times = times;
    out.rate.resize(times.size());
    out.masked.resize(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        const bool mask = !(power[k] > kLightMaskFloor * pmax);
        out.masked[k] = mask;
        out.rate[k] = mask ? kNaN : -dp[k] / power[k];
    }
    return out;
}

LightRateTrace gamma_light(const pulse::FieldTrace &field, pulse::TimeWindow window)
{
    std::vector<double> times;
    std::vector<double> power;
    for (std::size_t k = 0; k < field.grid.count; ++k) {
        const double t = field.grid.time(k);
        if (t >= window.begin - 1e-9 * field.grid.dt && t <= window.end) {
            times.push_back(t);
            power.push_back(std::norm(field.emitted[k]));
        }
    }
    return gamma_light(times, power);
}

std::vector<double> energy_residual(const pulse::AtomTraces &traces, const model::EnsembleParams &params)
{
    if (traces.n_atoms() != params.n_atoms()) {
        throw PreconditionError("energy_residual: traces and params describe different ensembles");
    }
    const double dt = uniform_step(traces.times);
    const std::size_t n = traces.size();
    std::vector<double> pop(n, 0.0);
    std::vector<double> sink(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t a = 0; a < traces.n_atoms(); ++a) {
            const double q = std::norm(traces.phis[a][k]);
            pop[k] += q;
            sink[k] += 2.0 * params.gamma() * (1.0 - params.beta(a)) * q;
        }
        sink[k] += std::norm(traces.chi_out[k]) - std::norm(traces.chi_in[k]);
    }
    const auto dpop = derivative(pop, dt);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = dpop[k] + sink[k];
    }
    return out;
}

std::vector<double> project(const std::vector<cplx> &phis, const model::CollectiveBasis &basis)
{
    double pop = 0.0;
    for (const auto &p : phis) {
        pop += std::norm(p);
    }
    std::vector<double> out(basis.size());
    for (std::size_t b = 0; b < basis.size(); ++b) {
        const auto &vec = basis.vectors[b];
        if (vec.size() != phis.size()) {
            throw PreconditionError("decompose: basis built for a different atom count");
        }
        cplx overlap = 0.0;
        for (std::size_t n = 0; n < vec.size(); ++n) {
            overlap += vec[n] * phis[n];
        }
        out[b] = std::norm(overlap) / pop;
    }
    return out;
}

DecompositionTrace decompose(const pulse::AtomTraces &traces, const model::CollectiveBasis &basis)
{
    DecompositionTrace out;
    double pmax = 0.0;
    for (std::size_t k = 0; k < traces.size(); ++k) {
        pmax = std::max(pmax, traces.population(k));
    }
    std::vector<cplx> phis(traces.n_atoms());
    for (std::size_t k = 0; k < traces.size(); ++k) {
        const double p = traces.population(k);
        if (!(p > kPopulationFloor * pmax)) {
            out.truncated = true;
            break;
        }
        for (std::size_t a = 0; a < traces.n_atoms(); ++a) {
            phis[a] = traces.phis[a][k];
        }
        out.times.push_back(traces.times[k]);
        out.projections.push_back(project(phis, basis));
    }
    return out;
}

} // namespace wgqed::observables
