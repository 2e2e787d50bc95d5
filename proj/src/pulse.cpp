#include "wgqed/pulse.h"

#include "wgqed/errors.h"
#include "wgqed/fft.h"
#include "wgqed/series.h"
#include "wgqed/spectral.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace wgqed::pulse {

namespace {

constexpr double kPi = std::numbers::pi;

// Terms of the short-time expansion removed before the FFT.
constexpr int kSeriesOrder = 10;

// Alias check: remainder energy in the outer band fraction vs total signal energy.
constexpr double kEdgeBand = 0.05;
constexpr double kEdgeEnergyLimit = 1e-6;

enum class Drive { Impulse, Step };

struct Edge {
    cplx weight;
    double time;
};

// Representation of a pulse as a constant level plus jumps (or impulses).
struct Decomposed {
    Drive drive = Drive::Step;
    cplx level = 0.0;
    std::vector<Edge> edges;
};

// One linear response of the chain (field or atom), rotating frame.
struct Kernel {
    std::vector<cplx> values; // on the FFT-ordered detunings
    series::Series series;    // same response in powers of p = 1/(sigma + i delta)
    cplx dc = 0.0;            // value at delta = 0
};

// Frequency-side quantities shared by every kernel on one grid.
struct Context {
    TimeGrid grid;
    double detuning = 0.0;
    double sigma = 1.0;
    cplx c;   // gamma + i detuning
    cplx eps; // c - sigma
    std::vector<double> delta;
    std::vector<cplx> w; // 1/(c + i delta)
    std::vector<cplx> p; // 1/(sigma + i delta)
    std::vector<cplx> v; // 1/(i delta)

    Context(const TimeGrid &g, double gamma, double det, double total_kappa) : grid(g), detuning(det)
    {
        sigma = gamma + total_kappa + std::abs(det);
        c = cplx(gamma, det);
        eps = c - sigma;
        const std::size_t n = grid.count;
        const double spacing = 2.0 * kPi / grid.duration();
        delta.resize(n);
        w.resize(n);
        p.resize(n);
        v.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double jj = j < n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
            const double d = (jj + 0.5) * spacing;
            delta[j] = d;
            w[j] = 1.0 / (c + cplx(0.0, d));
            p[j] = 1.0 / cplx(sigma, d);
            v[j] = cplx(0.0, -1.0 / d);
        }
    }
};

Kernel field_kernel(const spectral::Chain &chain, const Context &ctx)
{
    Kernel k;
    k.values.resize(ctx.grid.count);
    for (std::size_t j = 0; j < ctx.grid.count; ++j) {
        k.values[j] = chain.field(ctx.w[j]);
    }
    k.series = chain.field_series(ctx.eps, kSeriesOrder);
    k.dc = chain.field(1.0 / ctx.c);
    return k;
}

// Spectrum G and its p-series for the chosen drive, plus the plateau that a unit
// step leaves behind.
struct Prepared {
    std::vector<cplx> g;
    series::Series s;
    cplx plateau = 0.0;
    cplx direct = 0.0;
};

Prepared prepare(const Kernel &k, Drive drive, const Context &ctx)
{
    Prepared out;
    const std::size_t n = ctx.grid.count;
    out.g.resize(n);
    if (drive == Drive::Impulse) {
        out.direct = k.series[0];
        for (std::size_t j = 0; j < n; ++j) {
            out.g[j] = k.values[j] - out.direct;
        }
        out.s = k.series;
        out.s[0] = 0.0;
    } else {
        out.plateau = k.dc;
        for (std::size_t j = 0; j < n; ++j) {
            out.g[j] = (k.values[j] - k.dc) * ctx.v[j];
        }
        series::Series shifted = k.series;
        shifted[0] -= k.dc;
        // 1/(i delta) = p / (1 - sigma p)
        out.s = series::multiply(shifted, series::pole(-ctx.sigma, kSeriesOrder));
    }
    return out;
}

std::vector<cplx> edge_phases(const std::vector<Edge> &edges, const Context &ctx)
{
    std::vector<cplx> e(ctx.grid.count, 0.0);
    for (const auto &edge : edges) {
        for (std::size_t j = 0; j < ctx.grid.count; ++j) {
            e[j] += edge.weight * std::polar(1.0, -ctx.delta[j] * edge.time);
        }
    }
    return e;
}

void check_aliasing(const std::vector<cplx> &remainder, const std::vector<cplx> &full, const Context &ctx)
{
    const double edge = (1.0 - kEdgeBand) * ctx.grid.frequency_span();
    double e_edge = 0.0;
    double e_total = 0.0;
    for (std::size_t j = 0; j < ctx.grid.count; ++j) {
        e_total += std::norm(full[j]);
        if (std::abs(ctx.delta[j]) > edge) {
            e_edge += std::norm(remainder[j]);
        }
    }
    if (e_total > 0.0 && e_edge > kEdgeEnergyLimit * e_total) {
        throw ConfigError("time grid too coarse for this response: " + std::to_string(e_edge / e_total) +
                          " of the spectral energy sits at the band edge; reduce dt");
    }
}

// e^{-sigma tau} sum_k s_k tau^{k-1}/(k-1)!, the inverse transform of sum_k s_k p^k.
class SingularPart {
public:
    SingularPart(const series::Series &s, double sigma) : sigma_(sigma)
    {
        double fact = 1.0;
        for (std::size_t k = 1; k < s.size(); ++k) {
            if (k > 1) {
                fact *= static_cast<double>(k - 1);
            }
            coeffs_.push_back(s[k] / fact);
        }
    }
    cplx operator()(double tau) const
    {
        if (sigma_ * tau > 745.0) {
            return 0.0;
        }
        cplx acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            acc = acc * tau + *it;
        }
        return acc * std::exp(-sigma_ * tau);
    }

private:
    double sigma_;
    std::vector<cplx> coeffs_;
};

bool switched_on(double tau, double dt)
{
    return tau >= -1e-9 * dt;
}

// Response of one kernel to the decomposed drive in the rotating frame.
std::vector<cplx> synthesize_response(const Kernel &k, const Decomposed &d, const Context &ctx)
{
    const auto &grid = ctx.grid;
    const std::size_t n = grid.count;
    const Prepared pr = prepare(k, d.drive, ctx);
    const std::vector<cplx> phases = edge_phases(d.edges, ctx);

    std::vector<cplx> buf(n);
    std::vector<cplx> full(n);
    const double o = static_cast<double>(grid.origin);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx r = pr.g[j] - series::evaluate(pr.s, ctx.p[j]);
        buf[j] = r * phases[j];
        full[j] = pr.g[j] * phases[j];
    }
    check_aliasing(buf, full, ctx);
    for (std::size_t j = 0; j < n; ++j) {
        buf[j] *= std::polar(1.0, -ctx.delta[j] * o * grid.dt);
    }
    fft::transform(buf, fft::Direction::Backward);
    const double inv_t = 1.0 / grid.duration();
    for (std::size_t m = 0; m < n; ++m) {
        buf[m] *= std::polar(inv_t, kPi * static_cast<double>(m) / static_cast<double>(n));
    }

    const SingularPart singular(pr.s, ctx.sigma);
    for (const auto &edge : d.edges) {
        for (std::size_t m = 0; m < n; ++m) {
            const double tau = grid.time(m) - edge.time;
            if (switched_on(tau, grid.dt)) {
                buf[m] += edge.weight * (pr.plateau + singular(std::max(tau, 0.0)));
            }
        }
        if (d.drive == Drive::Impulse) {
            const std::size_t idx = grid.nearest_index(edge.time);
            buf[idx] += edge.weight * pr.direct / grid.dt;
        }
    }
    if (d.drive == Drive::Step) {
        for (auto &x : buf) {
            x += d.level * pr.plateau;
        }
    }
    return buf;
}

std::vector<Edge> falling_edge(cplx height, double end, double fall)
{
    if (fall <= 0.0) {
        return {{-height, end}};
    }
    std::vector<Edge> edges;
    const double steps = static_cast<double>(kFallSteps);
    for (std::size_t i = 0; i < kFallSteps; ++i) {
        edges.push_back({-height / steps, end - fall + fall * (static_cast<double>(i) + 0.5) / steps});
    }
    return edges;
}

Decomposed decompose_pulse(const Pulse &pulse, const TimeGrid &grid)
{
    Decomposed d;
    switch (pulse.shape) {
    case Shape::Delta:
        d.drive = Drive::Impulse;
        d.edges.push_back({pulse.amplitude, grid.time(grid.nearest_index(pulse.end_time))});
        break;
    case Shape::Boxcar: {
        d.drive = Drive::Step;
        d.edges.push_back({pulse.amplitude, pulse.end_time - pulse.duration});
        const auto fall = falling_edge(pulse.amplitude, pulse.end_time, pulse.fall_time);
        d.edges.insert(d.edges.end(), fall.begin(), fall.end());
        break;
    }
    case Shape::Heaviside:
        d.drive = Drive::Step;
        d.level = pulse.amplitude;
        d.edges = falling_edge(pulse.amplitude, pulse.end_time, pulse.fall_time);
        break;
    case Shape::Custom:
        throw std::logic_error("custom pulses are handled by convolution");
    }
    return d;
}

void check_fits(const Pulse &pulse, const TimeGrid &grid)
{
    pulse.validate();
    grid.validate();
    const double first = grid.time(0);
    const double last = grid.time(grid.count - 1);
    if (pulse.shape == Shape::Custom) {
        if (pulse.samples.size() != grid.count) {
            throw ConfigError("custom pulse needs one sample per grid point (" + std::to_string(grid.count) + ")");
        }
        return;
    }
    double start = pulse.end_time;
    if (pulse.shape == Shape::Boxcar) {
        start -= pulse.duration;
    }
    if (start < first || pulse.end_time > last) {
        throw ConfigError("pulse does not fit inside the time grid");
    }
    if (last - pulse.end_time < 10.0) {
        throw ConfigError("time grid must extend at least 10/gamma past the pulse end");
    }
}

std::vector<cplx> carrier(const TimeGrid &grid, double detuning)
{
    std::vector<cplx> out(grid.count, 1.0);
    if (detuning != 0.0) {
        for (std::size_t m = 0; m < grid.count; ++m) {
            out[m] = std::polar(1.0, detuning * grid.time(m));
        }
    }
    return out;
}

std::vector<cplx> envelope(const Pulse &pulse, const TimeGrid &grid)
{
    std::vector<cplx> env(grid.count, 0.0);
    if (pulse.shape == Shape::Custom) {
        return pulse.samples;
    }
    const Decomposed d = decompose_pulse(pulse, grid);
    for (std::size_t m = 0; m < grid.count; ++m) {
        if (d.drive == Drive::Impulse) {
            continue;
        }
        cplx u = d.level;
        for (const auto &edge : d.edges) {
            if (switched_on(grid.time(m) - edge.time, grid.dt)) {
                u += edge.weight;
            }
        }
        env[m] = u;
    }
    if (d.drive == Drive::Impulse) {
        env[grid.nearest_index(pulse.end_time)] = pulse.amplitude / grid.dt;
    }
    return env;
}

// Zero-order-hold samples: sum of jumps convolved with the sampled step response.
std::vector<cplx> custom_response(const Kernel &k, const Pulse &pulse, const Context &ctx)
{
    const TimeGrid &grid = ctx.grid;
    const std::size_t n = grid.count;
    TimeGrid lag_grid = grid;
    lag_grid.origin = 0;
    Context lag_ctx = ctx;
    lag_ctx.grid = lag_grid;
    Decomposed unit;
    unit.drive = Drive::Step;
    unit.edges.push_back({1.0, 0.0});
    std::vector<cplx> step = synthesize_response(k, unit, lag_ctx);

    std::vector<cplx> a(2 * n, 0.0);
    std::vector<cplx> b(2 * n, 0.0);
    cplx prev = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        a[m] = pulse.samples[m] - prev;
        prev = pulse.samples[m];
        b[m] = step[m];
    }
    fft::transform(a, fft::Direction::Forward);
    fft::transform(b, fft::Direction::Forward);
    for (std::size_t m = 0; m < 2 * n; ++m) {
        a[m] *= b[m];
    }
    fft::transform(a, fft::Direction::Backward);
    std::vector<cplx> out(n);
    const double norm = 1.0 / static_cast<double>(2 * n);
    for (std::size_t m = 0; m < n; ++m) {
        out[m] = a[m] * norm;
    }
    return out;
}

std::vector<cplx> respond(const Kernel &k, const Pulse &pulse, const Context &ctx)
{
    std::vector<cplx> out = pulse.shape == Shape::Custom ? custom_response(k, pulse, ctx)
                                                         : synthesize_response(k, decompose_pulse(pulse, ctx.grid), ctx);
    if (ctx.detuning != 0.0) {
        const auto rot = carrier(ctx.grid, ctx.detuning);
        for (std::size_t m = 0; m < out.size(); ++m) {
            out[m] *= rot[m];
        }
    }
    return out;
}

FieldTrace propagate_chain(const Pulse &pulse, const spectral::Chain &chain, const TimeGrid &grid)
{
    check_fits(pulse, grid);
    const Context ctx(grid, chain.gamma(), pulse.carrier_detuning, chain.total_kappa());
    FieldTrace trace;
    trace.grid = grid;
    trace.input = synthesize(pulse, grid);
    trace.samples = respond(field_kernel(chain, ctx), pulse, ctx);
    trace.emitted.resize(grid.count);
    for (std::size_t m = 0; m < grid.count; ++m) {
        trace.emitted[m] = trace.samples[m] - trace.input[m];
    }
    return trace;
}

// Walks the chain atom by atom, handing each atom's kernel to `visit`.
template <typename Visit>
void for_each_atom_kernel(const model::EnsembleParams &params, const Context &ctx, Visit visit)
{
    const std::size_t n = ctx.grid.count;
    std::vector<cplx> before(n, 1.0); // t_{n-1} on the grid
    series::Series before_s = series::constant(1.0, kSeriesOrder);
    const series::Series w_s = series::pole(ctx.eps, kSeriesOrder);
    const cplx w0 = 1.0 / ctx.c;
    cplx before_dc = 1.0;
    Kernel k;
    k.values.resize(n);
    for (std::size_t atom = 0; atom < params.n_atoms(); ++atom) {
        const double kappa = 2.0 * params.beta(atom) * params.gamma();
        const cplx pref(0.0, -std::sqrt(kappa));
        for (std::size_t j = 0; j < n; ++j) {
            k.values[j] = pref * ctx.w[j] * before[j];
            before[j] *= 1.0 - kappa * ctx.w[j];
        }
        k.series = series::scale(series::multiply(w_s, before_s), pref);
        k.dc = pref * w0 * before_dc;
        visit(atom, k);
        before_s = series::multiply(before_s, series::add(series::constant(1.0, kSeriesOrder), series::scale(w_s, -kappa)));
        before_dc *= 1.0 - kappa * w0;
    }
}

} // namespace

Pulse Pulse::delta(cplx amplitude)
{
    Pulse p;
    p.shape = Shape::Delta;
    p.amplitude = amplitude;
    return p;
}

Pulse Pulse::boxcar(double duration, cplx amplitude)
{
    Pulse p;
    p.shape = Shape::Boxcar;
    p.duration = duration;
    p.amplitude = amplitude;
    return p;
}

Pulse Pulse::heaviside(cplx amplitude)
{
    Pulse p;
    p.shape = Shape::Heaviside;
    p.amplitude = amplitude;
    return p;
}

Pulse Pulse::custom(std::vector<cplx> samples)
{
    Pulse p;
    p.shape = Shape::Custom;
    p.samples = std::move(samples);
    return p;
}

void Pulse::validate() const
{
    if (!std::isfinite(end_time) || !std::isfinite(carrier_detuning) || !std::isfinite(amplitude.real()) ||
        !std::isfinite(amplitude.imag())) {
        throw ConfigError("pulse parameters must be finite");
    }
    if (shape == Shape::Boxcar && !(duration > 0.0 && std::isfinite(duration))) {
        throw ConfigError("boxcar duration must be positive");
    }
    if (!(fall_time >= 0.0) || !std::isfinite(fall_time)) {
        throw ConfigError("fall_time must be non-negative");
    }
    if (shape == Shape::Boxcar && fall_time > duration) {
        throw ConfigError("fall_time exceeds the boxcar duration");
    }
    if (shape == Shape::Custom && samples.empty()) {
        throw ConfigError("custom pulse has no samples");
    }
}

TimeGrid TimeGrid::standard()
{
    return from_span(kDefaultGridCount, kDefaultFrequencySpan, kDefaultGridCount / 8);
}

TimeGrid TimeGrid::from_span(std::size_t count, double frequency_span, std::size_t origin)
{
    if (!(frequency_span > 0.0)) {
        throw ConfigError("frequency span must be positive");
    }
    return from_step(kPi / frequency_span, count, origin);
}

TimeGrid TimeGrid::from_step(double dt, std::size_t count, std::size_t origin)
{
    TimeGrid g;
    g.dt = dt;
    g.count = count;
    g.origin = origin;
    g.validate();
    return g;
}

double TimeGrid::frequency_span() const
{
    return kPi / dt;
}

std::size_t TimeGrid::nearest_index(double t) const
{
    const double k = std::round(t / dt + static_cast<double>(origin));
    if (k < 0.0 || k > static_cast<double>(count - 1)) {
        throw ConfigError("time " + std::to_string(t) + " lies outside the grid");
    }
    return static_cast<std::size_t>(k);
}

std::vector<double> TimeGrid::times() const
{
    std::vector<double> t(count);
    for (std::size_t k = 0; k < count; ++k) {
        t[k] = time(k);
    }
    return t;
}

void TimeGrid::validate() const
{
    if (count < 16 || (count & (count - 1)) != 0) {
        throw ConfigError("grid count must be a power of two >= 16");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ConfigError("grid dt must be positive");
    }
    if (origin >= count) {
        throw ConfigError("grid origin must lie inside the grid");
    }
}

std::vector<double> FieldTrace::power() const
{
    std::vector<double> out(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        out[k] = std::norm(samples[k]);
    }
    return out;
}

std::vector<double> FieldTrace::emitted_power() const
{
    std::vector<double> out(emitted.size());
    for (std::size_t k = 0; k < emitted.size(); ++k) {
        out[k] = std::norm(emitted[k]);
    }
    return out;
}

double AtomTraces::population(std::size_t column) const
{
    double p = 0.0;
    for (const auto &row : phis) {
        p += std::norm(row.at(column));
    }
    return p;
}

model::StateSnapshot AtomTraces::snapshot(std::size_t column, const model::EnsembleParams &params) const
{
    std::vector<cplx> amps;
    amps.reserve(phis.size());
    for (const auto &row : phis) {
        amps.push_back(row.at(column));
    }
    return model::StateSnapshot::from_amplitudes(times.at(column), std::move(amps), params, chi_in.at(column));
}

std::vector<cplx> synthesize(const Pulse &pulse, const TimeGrid &grid)
{
    check_fits(pulse, grid);
    std::vector<cplx> env = envelope(pulse, grid);
    if (pulse.carrier_detuning != 0.0) {
        const auto rot = carrier(grid, pulse.carrier_detuning);
        for (std::size_t m = 0; m < env.size(); ++m) {
            env[m] *= rot[m];
        }
    }
    return env;
}

FieldTrace propagate(const Pulse &pulse, const model::EnsembleParams &params, const TimeGrid &grid)
{
    return propagate_chain(pulse, spectral::Chain(params), grid);
}

FieldTrace ring_roundtrips(const Pulse &pulse, const model::EnsembleParams &single_pass, std::size_t m,
                           const TimeGrid &grid)
{
    if (m < 1) {
        throw DomainError("ring_roundtrips needs m >= 1");
    }
    return propagate_chain(pulse, spectral::Chain(single_pass, m), grid);
}

AtomTraces atom_traces(const Pulse &pulse, const model::EnsembleParams &params, const TimeGrid &grid,
                       TimeWindow window)
{
    const FieldTrace field = propagate(pulse, params, grid);
    const spectral::Chain chain(params);
    const Context ctx(grid, params.gamma(), pulse.carrier_detuning, chain.total_kappa());

    AtomTraces traces;
    traces.grid = grid;
    std::vector<std::size_t> columns;
    for (std::size_t m = 0; m < grid.count; ++m) {
        if (window.contains(grid.time(m))) {
            columns.push_back(m);
        }
    }
    if (columns.empty()) {
        throw ConfigError("trace window contains no grid samples");
    }
    traces.first = columns.front();
    // An impulse is over by 0+, like the atom amplitudes stored at its sample.
    const bool impulse = pulse.shape == Shape::Delta;
    for (std::size_t m : columns) {
        traces.times.push_back(grid.time(m));
        traces.chi_out.push_back(impulse ? field.emitted[m] : field.samples[m]);
        traces.chi_in.push_back(impulse ? cplx(0.0) : field.input[m]);
    }
    traces.phis.resize(params.n_atoms());
    for_each_atom_kernel(params, ctx, [&](std::size_t atom, const Kernel &k) {
        const std::vector<cplx> row = respond(k, pulse, ctx);
        auto &dst = traces.phis[atom];
        dst.reserve(columns.size());
        for (std::size_t m : columns) {
            dst.push_back(row[m]);
        }
    });
    return traces;
}

model::StateSnapshot atom_snapshot(const Pulse &pulse, const model::EnsembleParams &params,
                                   const TimeGrid &grid, double t)
{
    check_fits(pulse, grid);
    if (pulse.shape == Shape::Custom) {
        throw UnsupportedConfiguration("atom_snapshot supports analytic pulse shapes only; use atom_traces");
    }
    const spectral::Chain chain(params);
    const Context ctx(grid, params.gamma(), pulse.carrier_detuning, chain.total_kappa());
    const Decomposed d = decompose_pulse(pulse, grid);
    const std::size_t n = grid.count;

    // z_j = e^{i delta_j t} sum_e w_e e^{-i delta_j t_e} / T and its moments against p^k,
    // so each atom costs one pass over the band.
    const std::vector<cplx> phases = edge_phases(d.edges, ctx);
    std::vector<cplx> z(n);
    std::vector<cplx> moments(kSeriesOrder + 1, 0.0);
    const double inv_t = 1.0 / grid.duration();
    for (std::size_t j = 0; j < n; ++j) {
        z[j] = phases[j] * std::polar(inv_t, ctx.delta[j] * t);
        cplx pk = 1.0;
        for (int k = 0; k <= kSeriesOrder; ++k) {
            moments[k] += pk * z[j];
            pk *= ctx.p[j];
        }
    }

    // Aliasing is governed by the field response, which carries the full chain.
    {
        const Prepared pr = prepare(field_kernel(chain, ctx), d.drive, ctx);
        std::vector<cplx> rem(n);
        std::vector<cplx> full(n);
        for (std::size_t j = 0; j < n; ++j) {
            rem[j] = (pr.g[j] - series::evaluate(pr.s, ctx.p[j])) * phases[j];
            full[j] = pr.g[j] * phases[j];
        }
        check_aliasing(rem, full, ctx);
    }

    std::vector<cplx> phis(params.n_atoms());
    for_each_atom_kernel(params, ctx, [&](std::size_t atom, const Kernel &k) {
        const Prepared pr = prepare(k, d.drive, ctx);
        cplx acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += pr.g[j] * z[j];
        }
        for (int kk = 1; kk <= kSeriesOrder; ++kk) {
            acc -= pr.s[kk] * moments[kk];
        }
        const SingularPart singular(pr.s, ctx.sigma);
        for (const auto &edge : d.edges) {
            const double tau = t - edge.time;
            if (switched_on(tau, grid.dt)) {
                acc += edge.weight * (pr.plateau + singular(std::max(tau, 0.0)));
            }
        }
        if (d.drive == Drive::Step) {
            acc += d.level * pr.plateau;
        }
        phis[atom] = acc * std::polar(1.0, pulse.carrier_detuning * t);
    });

    // Input field at t (envelope value; a delta drive contributes nothing off its instant).
    cplx chi_in = 0.0;
    if (d.drive == Drive::Step) {
        chi_in = d.level;
        for (const auto &edge : d.edges) {
            if (switched_on(t - edge.time, grid.dt)) {
                chi_in += edge.weight;
            }
        }
        chi_in *= std::polar(1.0, pulse.carrier_detuning * t);
    }
    return model::StateSnapshot::from_amplitudes(t, std::move(phis), params, chi_in);
}

HomodyneTrace homodyne(const FieldTrace &signal, const Pulse &lo, double relative_phase, const TimeGrid &grid)
{
    if (!(signal.grid == grid)) {
        throw ConfigError("homodyne: local oscillator grid differs from the signal grid");
    }
    const std::vector<cplx> ref = synthesize(lo, grid);
    const cplx rot = std::polar(1.0, relative_phase);
    HomodyneTrace out;
    out.times = grid.times();
    out.power.resize(grid.count);
    out.in_phase.resize(grid.count);
    for (std::size_t m = 0; m < grid.count; ++m) {
        const cplx l = rot * ref[m];
        out.power[m] = std::norm(signal.samples[m] + l);
        const double mag = std::abs(l);
        out.in_phase[m] = mag > 0.0 ? std::real(signal.samples[m] * std::conj(l)) / mag : 0.0;
    }
    return out;
}

std::vector<double> find_power_minima(const FieldTrace &trace, double threshold, TimeWindow window)
{
    const auto power = trace.emitted_power();
    const auto &u = trace.emitted;
    const auto &grid = trace.grid;
    std::size_t start = grid.count;
    for (std::size_t m = 0; m < grid.count; ++m) {
        if (grid.time(m) >= window.begin - 1e-9 * grid.dt) {
            start = m;
            break;
        }
    }
    std::vector<double> minima;
    if (start >= grid.count) {
        return minima;
    }
    const double ref = power[start];
    // the tail below the noise floor is round-off, not signal
    std::size_t stop = start;
    for (std::size_t m = grid.count; m-- > start;) {
        if (power[m] >= kMinimumNoiseFloor * ref) {
            stop = m;
            break;
        }
    }
    for (std::size_t m = start + 1; m + 1 < grid.count && m < stop; ++m) {
        if (grid.time(m) > window.end) {
            break;
        }
        if (!(power[m] <= power[m - 1] && power[m] < power[m + 1])) {
            continue;
        }
        // Parabola through the three complex samples, then the minimum of its modulus.
        const cplx c0 = u[m];
        const cplx c1 = 0.5 * (u[m + 1] - u[m - 1]);
        const cplx c2 = 0.5 * (u[m + 1] + u[m - 1]) - u[m];
        auto mod2 = [&](double x) { return std::norm(c0 + x * (c1 + x * c2)); };
        double lo = -1.0;
        double hi = 1.0;
        const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 80; ++it) {
            const double x1 = hi - ratio * (hi - lo);
            const double x2 = lo + ratio * (hi - lo);
            if (mod2(x1) < mod2(x2)) {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        const double x = 0.5 * (lo + hi);
        if (mod2(x) < threshold * ref) {
            minima.push_back(grid.time(m) + x * grid.dt);
        }
    }
    return minima;
}

std::vector<double> sign_changes(const std::vector<double> &times, const std::vector<double> &values,
                                 TimeWindow window)
{
    if (times.size() != values.size()) {
        throw std::invalid_argument("sign_changes: times and values differ in length");
    }
    std::vector<double> out;
    std::size_t prev = times.size();
    for (std::size_t m = 0; m < times.size(); ++m) {
        if (!window.contains(times[m]) || values[m] == 0.0) {
            continue;
        }
        if (prev < times.size() && (values[prev] > 0.0) != (values[m] > 0.0)) {
            const double f = values[prev] / (values[prev] - values[m]);
            out.push_back(times[prev] + f * (times[m] - times[prev]));
        }
        prev = m;
    }
    return out;
}

TimeWindow decay_window(const FieldTrace &trace, double fraction, double t0)
{
    const auto power = trace.emitted_power();
    const auto &grid = trace.grid;
    const std::size_t start = grid.nearest_index(t0);
    const double ref = power[start];
    TimeWindow w{grid.time(start), grid.time(start)};
    for (std::size_t m = start; m < grid.count; ++m) {
        if (power[m] >= fraction * ref) {
            w.end = grid.time(m);
        }
    }
    return w;
}

} // namespace wgqed::pulse
