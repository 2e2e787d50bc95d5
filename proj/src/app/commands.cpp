#include "wgqed/app/commands.h"

#include "wgqed/analytic.h"
#include "wgqed/app/csv.h"
#include "wgqed/app/manifest.h"
#include "wgqed/errors.h"
#include "wgqed/observables.h"
#include "wgqed/pulse.h"
#include "wgqed/spectral.h"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

namespace wgqed::app {

namespace {

using json = nlohmann::json;

constexpr double kBoxcarDefaultNs = 100.0;
constexpr double kRingBoxcarDefaultNs = 110.0;
constexpr double kLoDefaultNs = 240.0;

class Clock {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ns columns appear when gamma_hz is given or any *_ns value is used.
struct Units {
    model::UnitSystem conv;
    bool si = false;

    explicit Units(const RunConfig &cfg)
        : conv(cfg.gamma_hz.value_or(model::kDefaultGammaHz))
    {
        si = cfg.gamma_hz || cfg.pulse.duration_ns || cfg.pulse.fall_time_ns || cfg.lo.duration_ns ||
             cfg.t_max_ns;
    }

    double resolve(const std::optional<double> &gamma_units, const std::optional<double> &ns,
                   double fallback) const
    {
        if (gamma_units && ns) {
            throw ConfigError("a time is given both in 1/gamma and in ns");
        }
        if (gamma_units) {
            return *gamma_units;
        }
        if (ns) {
            return conv.from_ns(*ns);
        }
        return fallback;
    }

    std::vector<std::string> time_columns(const std::string &stem = "time") const
    {
        std::vector<std::string> c{stem + "_gamma"};
        if (si) {
            c.push_back(stem + "_ns");
        }
        return c;
    }

    void push_time(std::vector<Cell> &row, double t) const
    {
        row.emplace_back(t);
        if (si) {
            row.emplace_back(conv.to_ns(t));
        }
    }
};

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string> &b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

json od_json(const model::EnsembleParams &p)
{
    const auto od = model::od(p);
    json j;
    j["od_linear"] = model::od_linear(p);
    if (od.infinite) {
        j["od_exact"] = "inf";
    } else {
        j["od_exact"] = od.value;
    }
    return j;
}

pulse::TimeGrid make_grid(const RunConfig &cfg)
{
    return pulse::TimeGrid::from_span(cfg.grid.count, cfg.grid.span, cfg.grid.origin.value_or(cfg.grid.count / 8));
}

pulse::Pulse make_pulse(const RunConfig &cfg, const Units &units, double default_boxcar_ns)
{
    pulse::Pulse p;
    const std::string &shape = cfg.pulse.shape;
    if (shape == "delta") {
        p = pulse::Pulse::delta(cfg.pulse.amplitude);
    } else if (shape == "boxcar") {
        p = pulse::Pulse::boxcar(units.resolve(cfg.pulse.duration, cfg.pulse.duration_ns,
                                               units.conv.from_ns(default_boxcar_ns)),
                                 cfg.pulse.amplitude);
    } else if (shape == "heaviside") {
        p = pulse::Pulse::heaviside(cfg.pulse.amplitude);
    } else {
        throw ConfigError("pulse.shape must be delta, boxcar or heaviside (got '" + shape + "')");
    }
    p.carrier_detuning = cfg.pulse.detuning;
    p.fall_time = units.resolve(cfg.pulse.fall_time, cfg.pulse.fall_time_ns, 0.0);
    p.validate();
    return p;
}

double pulse_start(const pulse::Pulse &p)
{
    switch (p.shape) {
    case pulse::Shape::Boxcar:
        return p.end_time - 1.25 * p.duration;
    case pulse::Shape::Heaviside:
        return p.end_time - 1.0;
    default:
        return p.end_time;
    }
}

std::string resolve_mode(const RunConfig &cfg, bool analytic_possible)
{
    if (cfg.mode == "auto") {
        return analytic_possible ? "analytic" : "spectral";
    }
    if (cfg.mode == "analytic") {
        if (!analytic_possible) {
            throw UnsupportedConfiguration(
                "analytic mode needs a delta pulse, uniform beta and a single pass; use --mode spectral");
        }
        return cfg.mode;
    }
    if (cfg.mode == "spectral") {
        return cfg.mode;
    }
    throw ConfigError("mode must be auto, analytic or spectral (got '" + cfg.mode + "')");
}

std::vector<double> sample_times(double t_max, double dt)
{
    if (!(dt > 0.0) || !(t_max > 0.0)) {
        throw ConfigError("sample_dt and t_max must be positive");
    }
    const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k) {
        t[k] = static_cast<double>(k) * dt;
    }
    return t;
}

// Closed-form traces for the timed Dicke state.
pulse::AtomTraces analytic_traces(const model::EnsembleParams &params, const std::vector<double> &times)
{
    pulse::AtomTraces tr;
    tr.times = times;
    tr.grid.dt = times.size() > 1 ? times[1] - times[0] : 1.0;
    tr.grid.count = times.size();
    tr.phis.assign(params.n_atoms(), std::vector<cplx>(times.size()));
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto phi = analytic::phi_td_all(times[k], params);
        for (std::size_t n = 0; n < phi.size(); ++n) {
            tr.phis[n][k] = phi[n];
        }
        tr.chi_out.push_back(analytic::chi_td(params.n_atoms(), times[k], params));
        tr.chi_in.push_back(0.0);
    }
    return tr;
}

void write_field(RunRecorder &rec, const Units &units, const std::string &name, const std::vector<double> &times,
                 const std::vector<cplx> &values)
{
    CsvTable t(rec.run_hash(), concat(units.time_columns(), {"re", "im", "power"}));
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::vector<Cell> row;
        units.push_time(row, times[k]);
        row.emplace_back(values[k].real());
        row.emplace_back(values[k].imag());
        row.emplace_back(std::norm(values[k]));
        t.add_row(std::move(row));
    }
    rec.write(name, t.str());
}

void write_atoms(RunRecorder &rec, const Units &units, const pulse::AtomTraces &tr)
{
    CsvTable t(rec.run_hash(), concat(units.time_columns(), {"atom", "re", "im", "population"}));
    for (std::size_t k = 0; k < tr.size(); ++k) {
        for (std::size_t n = 0; n < tr.n_atoms(); ++n) {
            std::vector<Cell> row;
            units.push_time(row, tr.times[k]);
            row.emplace_back(static_cast<long long>(n + 1));
            row.emplace_back(tr.phis[n][k].real());
            row.emplace_back(tr.phis[n][k].imag());
            row.emplace_back(std::norm(tr.phis[n][k]));
            t.add_row(std::move(row));
        }
    }
    rec.write("atoms.csv", t.str());
}

void write_rates(RunRecorder &rec, const Units &units, const pulse::AtomTraces &tr,
                 const model::EnsembleParams &params)
{
    const auto rates = observables::gamma_ens(tr, params);
    CsvTable t(rec.run_hash(),
               concat(units.time_columns(), {"gamma_ens", "gamma_ens_wg", "gamma_fs", "gamma_light"}));
    for (std::size_t k = 0; k < rates.times.size(); ++k) {
        std::vector<Cell> row;
        units.push_time(row, rates.times[k]);
        row.emplace_back(rates.gamma_ens[k]);
        row.emplace_back(rates.gamma_ens_wg[k]);
        row.emplace_back(rates.gamma_fs[k]);
        row.emplace_back(rates.gamma_light[k]);
        t.add_row(std::move(row));
    }
    rec.write("rates.csv", t.str());
    rec.extra()["rates_truncated"] = rates.truncated;
}

void write_passages(RunRecorder &rec, const Units &units, const std::vector<double> &taus)
{
    CsvTable t(rec.run_hash(), concat({"m"}, units.time_columns("tau")));
    for (std::size_t m = 0; m < taus.size(); ++m) {
        std::vector<Cell> row{static_cast<long long>(m + 1)};
        units.push_time(row, taus[m]);
        t.add_row(std::move(row));
    }
    rec.write("passages.csv", t.str());
}

json params_json(const RunConfig &cfg, const EnsembleChoice &ens)
{
    json j = to_json(cfg);
    j["resolved.n_atoms"] = ens.params.n_atoms();
    return j;
}

// Ensemble per pass plus the number of passes.
struct Setup {
    EnsembleChoice ensemble;
    std::size_t passes = 1;
};

Setup resolve_setup(const RunConfig &cfg)
{
    Setup s;
    if (cfg.od_single) {
        if (cfg.od) {
            throw ConfigError("give either od or od_single");
        }
        RunConfig single = cfg;
        single.od = cfg.od_single;
        s.ensemble = resolve_ensemble(single);
    } else {
        s.ensemble = resolve_ensemble(cfg);
    }
    if (cfg.roundtrips < 1) {
        throw ConfigError("roundtrips must be >= 1");
    }
    s.passes = cfg.roundtrips;
    s.ensemble.info["roundtrips"] = s.passes;
    s.ensemble.info["od_total_linear"] = static_cast<double>(s.passes) * model::od_linear(s.ensemble.params);
    return s;
}

pulse::FieldTrace run_field(const pulse::Pulse &p, const Setup &s, const pulse::TimeGrid &grid)
{
    if (s.passes > 1) {
        return pulse::ring_roundtrips(p, s.ensemble.params, s.passes, grid);
    }
    return pulse::propagate(p, s.ensemble.params, grid);
}

template <typename Task>
void run_parallel(std::size_t count, std::size_t workers, Task task)
{
    workers = std::max<std::size_t>(1, std::min(workers, count));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto body = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(body);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace

int exit_code_for(const std::exception &e)
{
    if (dynamic_cast<const ConfigError *>(&e) != nullptr) {
        return kExitConfig;
    }
    return kExitNumeric;
}

EnsembleChoice resolve_ensemble(const RunConfig &cfg)
{
    EnsembleChoice out;
    const double gamma = 1.0;
    if (cfg.n_atoms && cfg.od) {
        throw ConfigError("give either n_atoms or od, not both");
    }
    if (!cfg.betas.empty()) {
        if (cfg.od || cfg.beta) {
            throw ConfigError("betas excludes beta and od");
        }
        if (cfg.n_atoms && *cfg.n_atoms != cfg.betas.size()) {
            throw ConfigError("n_atoms does not match the length of betas");
        }
        out.params = model::EnsembleParams::from_betas(cfg.betas, gamma);
        out.info["betas"] = cfg.betas;
    } else if (cfg.n_atoms) {
        if (!cfg.beta) {
            throw ConfigError("n_atoms needs beta");
        }
        out.params = model::EnsembleParams::uniform(*cfg.n_atoms, *cfg.beta, gamma);
        out.info["beta"] = *cfg.beta;
    } else if (cfg.od) {
        const double beta = cfg.beta.value_or(kDefaultOdBeta);
        const std::size_t n = model::atoms_for_od(*cfg.od, beta, model::OdDefinition::Linear);
        out.params = model::EnsembleParams::uniform(n, beta, gamma);
        out.info["beta"] = beta;
        if (!cfg.beta) {
            out.info["beta_defaulted"] = true;
        }
        out.info["od_requested"] = *cfg.od;
        out.info["od_inversion"] = "n_atoms = round(od / (4 beta))";
    } else {
        throw ConfigError("specify n_atoms and beta, betas, or od and beta");
    }
    out.info["n_atoms"] = out.params.n_atoms();
    const json od_info = od_json(out.params);
    for (const auto &[k, v] : od_info.items()) {
        out.info[k] = v;
    }
    return out;
}

std::vector<std::string> cmd_evolve(const RunConfig &cfg)
{
    const Clock clock;
    const Units units(cfg);
    const Setup setup = resolve_setup(cfg);
    const auto &params = setup.ensemble.params;
    const pulse::Pulse p = make_pulse(cfg, units, kBoxcarDefaultNs);
    const bool analytic_ok = p.shape == pulse::Shape::Delta && params.uniform_beta() && setup.passes == 1 &&
                             p.carrier_detuning == 0.0;
    const std::string mode = resolve_mode(cfg, analytic_ok);
    const double t_max = units.resolve(cfg.t_max, cfg.t_max_ns, 10.0);

    json pj = params_json(cfg, setup.ensemble);
    pj["resolved.mode"] = mode;
    RunRecorder rec("evolve", cfg.out, pj);
    rec.extra()["ensemble"] = setup.ensemble.info;

    if (mode == "analytic") {
        const auto times = sample_times(t_max, cfg.sample_dt);
        const auto tr = analytic_traces(params, times);
        write_field(rec, units, "power.csv", tr.times, tr.chi_out);
        if (params.n_atoms() <= cfg.max_traced) {
            write_atoms(rec, units, tr);
        }
        write_rates(rec, units, tr, params);
        write_passages(rec, units, params.n_atoms() > 1 ? analytic::subradiant_times(params) : std::vector<double>{});
    } else {
        const auto grid = make_grid(cfg);
        rec.extra()["grid"] = {{"dt", grid.dt}, {"count", grid.count}, {"origin", grid.origin},
                               {"frequency_span", grid.frequency_span()}};
        const auto field = run_field(p, setup, grid);
        std::vector<double> times;
        std::vector<cplx> values;
        const double t0 = pulse_start(p);
        for (std::size_t k = 0; k < grid.count; ++k) {
            const double t = grid.time(k);
            if (t >= t0 - 1e-9 && t <= p.end_time + t_max + 1e-9) {
                times.push_back(t);
                // The delta spike itself is not written.
                values.push_back(p.shape == pulse::Shape::Delta ? field.emitted[k] : field.samples[k]);
            }
        }
        write_field(rec, units, "power.csv", times, values);
        write_passages(rec, units,
                       pulse::find_power_minima(field, pulse::kMinimumThreshold, {p.end_time, p.end_time + t_max}));
        if (setup.passes == 1 && params.n_atoms() <= cfg.max_traced) {
            const auto tr = pulse::atom_traces(p, params, grid, {p.end_time, p.end_time + t_max});
            write_atoms(rec, units, tr);
            write_rates(rec, units, tr, params);
        } else {
            rec.extra()["atom_traces"] = "skipped: more atoms than atoms.max_traced or several passes";
        }
    }
    rec.finish(clock.seconds());
    return rec.files();
}

std::vector<std::string> cmd_subradiance(const RunConfig &cfg)
{
    const Clock clock;
    const Units units(cfg);
    struct Point {
        double od = 0.0;
        double beta = 0.0;
        std::size_t passes = 1;
        std::vector<double> betas; // non-empty for an explicit ensemble
        std::size_t n_atoms = 0;
        std::vector<double> taus;
        double od_achieved = 0.0;
    };
    std::vector<Point> points;
    const bool single = cfg.n_atoms || cfg.od || cfg.od_single || !cfg.betas.empty();
    const bool ring = cfg.roundtrips > 1 || cfg.od_single;
    std::string mode = resolve_mode(cfg, !ring);
    if (ring) {
        mode = "spectral";
    }
    std::optional<Setup> setup;
    if (single) {
        setup = resolve_setup(cfg);
        Point pt;
        pt.passes = setup->passes;
        pt.n_atoms = setup->ensemble.params.n_atoms();
        pt.od = cfg.od_single ? *cfg.od_single * static_cast<double>(pt.passes)
                              : cfg.od.value_or(model::od_linear(setup->ensemble.params));
        pt.beta = setup->ensemble.params.uniform_beta() ? setup->ensemble.params.beta(0) : 0.0;
        points.push_back(pt);
    } else {
        if (!(cfg.sweep.od_step > 0.0) || cfg.sweep.od_max < cfg.sweep.od_min || cfg.sweep.betas.empty()) {
            throw ConfigError("sweep needs od_min <= od_max, od_step > 0 and at least one beta");
        }
        const auto steps = static_cast<std::size_t>(std::floor((cfg.sweep.od_max - cfg.sweep.od_min) / cfg.sweep.od_step + 1e-9));
        for (double beta : cfg.sweep.betas) {
            for (std::size_t i = 0; i <= steps; ++i) {
                Point pt;
                pt.od = cfg.sweep.od_min + static_cast<double>(i) * cfg.sweep.od_step;
                pt.beta = beta;
                pt.n_atoms = model::atoms_for_od(pt.od, beta, model::OdDefinition::Linear);
                points.push_back(pt);
            }
        }
    }
    if (mode == "analytic" && setup && !setup->ensemble.params.uniform_beta()) {
        throw UnsupportedConfiguration("analytic passage times need uniform beta; use --mode spectral");
    }

    const pulse::Pulse p = make_pulse(cfg, units, kBoxcarDefaultNs);
    const auto grid = make_grid(cfg);
    run_parallel(points.size(), cfg.workers, [&](std::size_t i) {
        Point &pt = points[i];
        const model::EnsembleParams params =
            setup ? setup->ensemble.params : model::EnsembleParams::uniform(pt.n_atoms, pt.beta);
        pt.od_achieved = static_cast<double>(pt.passes) * model::od_linear(params);
        const std::size_t count = std::min(cfg.sweep.count, pt.n_atoms * pt.passes - 1);
        if (mode == "analytic") {
            pt.taus = analytic::subradiant_times(params, single && cfg.n_atoms ? pt.n_atoms - 1 : count);
        } else {
            Setup s;
            s.ensemble.params = params;
            s.passes = pt.passes;
            const auto field = run_field(p, s, grid);
            auto minima = pulse::find_power_minima(field, pulse::kMinimumThreshold, {p.end_time, grid.time(grid.count - 1)});
            if (minima.size() > count) {
                minima.resize(count);
            }
            for (auto &t : minima) {
                t -= p.end_time;
            }
            pt.taus = minima;
        }
    });

    json pj = to_json(cfg);
    pj["resolved.mode"] = mode;
    RunRecorder rec("subradiance", cfg.out, pj);
    if (setup) {
        rec.extra()["ensemble"] = setup->ensemble.info;
    }
    CsvTable t(rec.run_hash(), concat({"od", "beta", "n_atoms", "od_achieved", "m"}, units.time_columns("tau")));
    for (const auto &pt : points) {
        for (std::size_t m = 0; m < pt.taus.size(); ++m) {
            std::vector<Cell> row{pt.od, pt.beta, static_cast<long long>(pt.n_atoms), pt.od_achieved,
                                  static_cast<long long>(m + 1)};
            units.push_time(row, pt.taus[m]);
            t.add_row(std::move(row));
        }
    }
    rec.write("subradiance.csv", t.str());
    if (!single && cfg.sweep.betas.size() > 1) {
        // Curves compared at equal achieved OD (N is rounded differently per beta).
        std::map<double, std::vector<const Point *>> curves;
        for (const auto &pt : points) {
            curves[pt.beta].push_back(&pt);
        }
        double worst = 0.0;
        const auto &ref = curves.at(cfg.sweep.betas.front());
        for (const auto &[beta, curve] : curves) {
            if (beta == cfg.sweep.betas.front()) {
                continue;
            }
            for (std::size_t m = 0; m < cfg.sweep.count; ++m) {
                for (const Point *r : ref) {
                    if (m >= r->taus.size()) {
                        continue;
                    }
                    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
                        const Point *a = curve[i];
                        const Point *b = curve[i + 1];
                        if (m >= a->taus.size() || m >= b->taus.size() || r->od_achieved < a->od_achieved ||
                            r->od_achieved > b->od_achieved || b->od_achieved <= a->od_achieved) {
                            continue;
                        }
                        const double f = (r->od_achieved - a->od_achieved) / (b->od_achieved - a->od_achieved);
                        const double tau = a->taus[m] + f * (b->taus[m] - a->taus[m]);
                        worst = std::max(worst, std::abs(tau - r->taus[m]) / r->taus[m]);
                        break;
                    }
                }
            }
        }
        rec.extra()["beta_agreement_max_rel_dev"] = worst;
        rec.extra()["beta_agreement_basis"] = "interpolated at equal achieved optical depth";
    }
    rec.finish(clock.seconds());
    return rec.files();
}

std::vector<std::string> cmd_homodyne(const RunConfig &cfg)
{
    const Clock clock;
    const Units units(cfg);
    const Setup setup = resolve_setup(cfg);
    RunConfig pc = cfg;
    if (pc.pulse.shape == "delta") {
        pc.pulse.shape = "boxcar";
    }
    const pulse::Pulse p = make_pulse(pc, units, kRingBoxcarDefaultNs);
    const double lo_len = units.resolve(cfg.lo.duration, cfg.lo.duration_ns, units.conv.from_ns(kLoDefaultNs));
    pulse::Pulse lo = pulse::Pulse::boxcar(lo_len, cfg.lo.amplitude);
    lo.end_time = p.end_time + lo_len;
    lo.carrier_detuning = p.carrier_detuning;
    const auto grid = make_grid(cfg);
    const auto field = run_field(p, setup, grid);
    const auto trace = pulse::homodyne(field, lo, cfg.lo.relative_phase, grid);
    const double t_max = units.resolve(cfg.t_max, cfg.t_max_ns, lo_len);

    RunRecorder rec("homodyne", cfg.out, params_json(cfg, setup.ensemble));
    rec.extra()["ensemble"] = setup.ensemble.info;
    CsvTable t(rec.run_hash(), concat(units.time_columns(), {"power", "in_phase", "signal_power"}));
    const double t0 = pulse_start(p);
    std::vector<double> times;
    std::vector<double> quad;
    for (std::size_t k = 0; k < grid.count; ++k) {
        const double tk = grid.time(k);
        if (tk < t0 - 1e-9 || tk > p.end_time + t_max + 1e-9) {
            continue;
        }
        std::vector<Cell> row;
        units.push_time(row, tk);
        row.emplace_back(trace.power[k]);
        row.emplace_back(trace.in_phase[k]);
        row.emplace_back(std::norm(field.samples[k]));
        t.add_row(std::move(row));
        times.push_back(tk);
        quad.push_back(trace.in_phase[k]);
    }
    rec.write("homodyne.csv", t.str());

    pulse::TimeWindow win = pulse::decay_window(field, pulse::kDecayWindowFraction, p.end_time);
    win.begin += 0.5 * grid.dt; // the switch-off sample itself is not a crossing
    const auto flips = pulse::sign_changes(times, quad, win);
    CsvTable f(rec.run_hash(), concat({"flip"}, units.time_columns()));
    for (std::size_t i = 0; i < flips.size(); ++i) {
        std::vector<Cell> row{static_cast<long long>(i + 1)};
        units.push_time(row, flips[i] - p.end_time);
        f.add_row(std::move(row));
    }
    rec.write("flips.csv", f.str());
    rec.extra()["decay_window"] = {{"begin", win.begin - p.end_time}, {"end", win.end - p.end_time},
                                   {"power_fraction", pulse::kDecayWindowFraction}};
    rec.finish(clock.seconds());
    return rec.files();
}

std::vector<std::string> cmd_spectrum(const RunConfig &cfg)
{
    const Clock clock;
    const Setup setup = resolve_setup(cfg);
    const auto &params = setup.ensemble.params;
    if (cfg.spectrum_count < 2 || !(cfg.spectrum_span > 0.0)) {
        throw ConfigError("spectrum.count must be >= 2 and spectrum.span > 0");
    }
    RunRecorder rec("spectrum", cfg.out, params_json(cfg, setup.ensemble));
    rec.extra()["ensemble"] = setup.ensemble.info;
    const spectral::Chain chain(params, setup.passes);
    CsvTable t(rec.run_hash(), {"delta_gamma", "re", "im", "magnitude", "phase", "power"});
    // Closed grid so that delta = 0 is sampled exactly.
    const auto half = static_cast<long long>(cfg.spectrum_count / 2);
    const double step = cfg.spectrum_span / static_cast<double>(half);
    for (long long j = -half; j <= half; ++j) {
        const double d = static_cast<double>(j) * step;
        const cplx tr = chain.field(1.0 / cplx(params.gamma(), d));
        t.add_row({d, tr.real(), tr.imag(), std::abs(tr), std::arg(tr), std::norm(tr)});
    }
    rec.write("spectrum.csv", t.str());
    rec.finish(clock.seconds());
    return rec.files();
}

std::vector<std::string> cmd_decompose(const RunConfig &cfg)
{
    const Clock clock;
    const Units units(cfg);
    const Setup setup = resolve_setup(cfg);
    const auto &params = setup.ensemble.params;
    if (setup.passes != 1) {
        throw UnsupportedConfiguration("decompose works on a single pass");
    }
    if (params.n_atoms() > cfg.max_traced) {
        throw PreconditionError("decompose needs n_atoms <= atoms.max_traced");
    }
    const auto basis = analytic::collective_basis(params);
    const double t_default = std::max(10.0, 1.2 * analytic::asymptotic_time(params));
    const double t_max = units.resolve(cfg.t_max, cfg.t_max_ns, t_default);
    RunConfig pc = cfg;
    const pulse::Pulse p = make_pulse(pc, units, kBoxcarDefaultNs);
    const std::string mode = resolve_mode(cfg, p.shape == pulse::Shape::Delta && p.carrier_detuning == 0.0);

    pulse::AtomTraces tr;
    if (mode == "analytic") {
        tr = analytic_traces(params, sample_times(t_max, cfg.sample_dt));
    } else {
        tr = pulse::atom_traces(p, params, make_grid(cfg), {p.end_time, p.end_time + t_max});
    }
    const auto dec = observables::decompose(tr, basis);

    json pj = params_json(cfg, setup.ensemble);
    pj["resolved.mode"] = mode;
    RunRecorder rec("decompose", cfg.out, pj);
    rec.extra()["ensemble"] = setup.ensemble.info;
    rec.extra()["truncated"] = dec.truncated;
    std::vector<std::string> cols = units.time_columns();
    cols.push_back("timed_dicke");
    for (std::size_t m = 1; m < basis.size(); ++m) {
        cols.push_back("sub_" + std::to_string(m));
    }
    CsvTable t(rec.run_hash(), cols);
    for (std::size_t k = 0; k < dec.times.size(); ++k) {
        std::vector<Cell> row;
        units.push_time(row, dec.times[k] - (mode == "analytic" ? 0.0 : p.end_time));
        for (double v : dec.projections[k]) {
            row.emplace_back(v);
        }
        t.add_row(std::move(row));
    }
    rec.write("decomposition.csv", t.str());
    CsvTable b(rec.run_hash(), concat({"m"}, units.time_columns("tau")));
    for (std::size_t m = 1; m < basis.size(); ++m) {
        std::vector<Cell> row{static_cast<long long>(m)};
        units.push_time(row, basis.times[m]);
        b.add_row(std::move(row));
    }
    rec.write("basis_times.csv", b.str());
    rec.finish(clock.seconds());
    return rec.files();
}

namespace {

enum class Kind { Integer, Real, Text, List };

struct FlagSpec {
    const char *flag;
    const char *key;
    Kind kind;
    const char *help;
};

const std::vector<FlagSpec> &flag_specs()
{
    static const std::vector<FlagSpec> specs = {
        {"--n-atoms", "n_atoms", Kind::Integer, "number of atoms N"},
        {"--beta", "beta", Kind::Real, "uniform coupling fraction"},
        {"--betas", "betas", Kind::List, "per-atom couplings (comma separated)"},
        {"--od", "od", Kind::Real, "optical depth; N = round(od / 4 beta)"},
        {"--od-single", "od_single", Kind::Real, "optical depth of one pass (ring setups)"},
        {"--roundtrips", "roundtrips", Kind::Integer, "passes through the ensemble"},
        {"--gamma-hz", "gamma_hz", Kind::Real, "gamma/2pi in Hz; adds ns columns"},
        {"--mode", "mode", Kind::Text, "auto | analytic | spectral"},
        {"--pulse", "pulse.shape", Kind::Text, "delta | boxcar | heaviside"},
        {"--duration", "pulse.duration", Kind::Real, "boxcar length in 1/gamma"},
        {"--duration-ns", "pulse.duration_ns", Kind::Real, "boxcar length in ns"},
        {"--fall-time", "pulse.fall_time", Kind::Real, "falling edge length in 1/gamma"},
        {"--fall-time-ns", "pulse.fall_time_ns", Kind::Real, "falling edge length in ns"},
        {"--detuning", "pulse.detuning", Kind::Real, "carrier detuning in gamma"},
        {"--amplitude", "pulse.amplitude", Kind::Real, "pulse amplitude"},
        {"--grid-count", "grid.count", Kind::Integer, "time samples (power of two)"},
        {"--grid-span", "grid.span", Kind::Real, "frequency half-width in gamma"},
        {"--grid-origin", "grid.origin", Kind::Integer, "sample index of t = 0"},
        {"--od-min", "sweep.od_min", Kind::Real, "sweep start"},
        {"--od-max", "sweep.od_max", Kind::Real, "sweep end"},
        {"--od-step", "sweep.od_step", Kind::Real, "sweep step"},
        {"--sweep-betas", "sweep.betas", Kind::List, "couplings compared in the sweep"},
        {"--count", "sweep.count", Kind::Integer, "passage times per point"},
        {"--lo-phase", "lo.relative_phase", Kind::Real, "local oscillator phase in rad"},
        {"--lo-duration", "lo.duration", Kind::Real, "local oscillator length in 1/gamma"},
        {"--lo-duration-ns", "lo.duration_ns", Kind::Real, "local oscillator length in ns"},
        {"--lo-amplitude", "lo.amplitude", Kind::Real, "local oscillator amplitude"},
        {"--t-max", "t_max", Kind::Real, "trace length after switch-off in 1/gamma"},
        {"--t-max-ns", "t_max_ns", Kind::Real, "trace length after switch-off in ns"},
        {"--sample-dt", "sample_dt", Kind::Real, "sampling step of analytic traces"},
        {"--max-traced", "atoms.max_traced", Kind::Integer, "largest N for per-atom output"},
        {"--spectrum-count", "spectrum.count", Kind::Integer, "spectrum intervals"},
        {"--spectrum-span", "spectrum.span", Kind::Real, "spectrum half-width in gamma"},
        {"--workers", "workers", Kind::Integer, "concurrent sweep points"},
        {"--out", "out", Kind::Text, "output directory"},
    };
    return specs;
}

json convert(const FlagSpec &spec, const std::vector<std::string> &raw)
{
    try {
        switch (spec.kind) {
        case Kind::Integer: {
            std::size_t pos = 0;
            const long long v = std::stoll(raw.back(), &pos);
            if (pos != raw.back().size()) {
                throw std::invalid_argument("");
            }
            return v;
        }
        case Kind::Real: {
            std::size_t pos = 0;
            const double v = std::stod(raw.back(), &pos);
            if (pos != raw.back().size()) {
                throw std::invalid_argument("");
            }
            return v;
        }
        case Kind::Text:
            return raw.back();
        case Kind::List: {
            json arr = json::array();
            for (const auto &r : raw) {
                std::size_t pos = 0;
                arr.push_back(std::stod(r, &pos));
                if (pos != r.size()) {
                    throw std::invalid_argument("");
                }
            }
            return arr;
        }
        }
    } catch (const std::logic_error &) {
    }
    throw ConfigError(std::string("invalid value for ") + spec.flag);
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Collective decay of waveguide-coupled atoms"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "wgqed 0.3.0");

    const std::vector<std::pair<std::string, std::function<std::vector<std::string>(const RunConfig &)>>> commands = {
        {"evolve", cmd_evolve},
        {"subradiance", cmd_subradiance},
        {"homodyne", cmd_homodyne},
        {"spectrum", cmd_spectrum},
        {"decompose", cmd_decompose},
    };
    const std::map<std::string, std::string> blurbs = {
        {"evolve", "guided power, atom amplitudes and decay rates after excitation"},
        {"subradiance", "subradiant passage times (single point or OD sweep)"},
        {"homodyne", "interference of the emitted light with a local oscillator"},
        {"spectrum", "ensemble transmission versus detuning"},
        {"decompose", "projections on the timed Dicke and subradiant states"},
    };

    std::string config_path;
    std::map<std::string, std::vector<std::string>> raw;
    std::map<std::string, CLI::Option *> opts;
    std::vector<std::pair<std::string, CLI::App *>> subs;
    for (const auto &[name, fn] : commands) {
        CLI::App *sub = app.add_subcommand(name, blurbs.at(name));
        sub->add_option("--config", config_path, "JSON configuration file");
        for (const auto &spec : flag_specs()) {
            const std::string id = name + spec.flag;
            CLI::Option *o = sub->add_option(spec.flag, raw[id], spec.help);
            if (spec.kind == Kind::List) {
                o->delimiter(',');
            } else {
                o->expected(1);
            }
            opts[id] = o;
        }
        subs.emplace_back(name, sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (!subs[i].second->parsed()) {
                continue;
            }
            const std::string &name = subs[i].first;
            RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
            json overrides = json::object();
            for (const auto &spec : flag_specs()) {
                const std::string id = name + spec.flag;
                if (opts[id]->count() > 0) {
                    overrides[spec.key] = convert(spec, raw[id]);
                }
            }
            apply_json(cfg, overrides);
            const auto files = commands[i].second(cfg);
            out << "wrote " << files.size() << " files to " << cfg.out << "\n";
        }
        return kExitOk;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

} // namespace wgqed::app
