#pragma once

#include "wgqed/model.h"

#include <cstddef>
#include <limits>
#include <vector>

// Time-domain propagation of a guided pulse through the chain. Times in 1/gamma,
// detunings in gamma. All traces are evaluated in the frame of the atomic resonance.
namespace wgqed::pulse {

enum class Shape { Delta, Boxcar, Heaviside, Custom };

struct Pulse {
    Shape shape = Shape::Delta;
    double duration = 0.0;         // boxcar length
    double end_time = 0.0;         // switch-off (boxcar, heaviside) or impulse instant (delta)
    double carrier_detuning = 0.0; // drive frequency minus atomic resonance
    cplx amplitude = 1.0;          // delta: pulse area
    double fall_time = 0.0;        // linear falling edge, 0 = ideal step
    std::vector<cplx> samples;     // custom envelope, one value per grid sample, held to the next

    static Pulse delta(cplx amplitude = 1.0);
    static Pulse boxcar(double duration, cplx amplitude = 1.0);
    static Pulse heaviside(cplx amplitude = 1.0);
    static Pulse custom(std::vector<cplx> samples);

    void validate() const;
};

// A finite fall time is realised as this many equal steps spread over the ramp.
inline constexpr std::size_t kFallSteps = 16;

inline constexpr std::size_t kDefaultGridCount = std::size_t{1} << 18;
inline constexpr double kDefaultFrequencySpan = 200.0;

// t_k = (k - origin) dt. The frequency band is |delta| < pi/dt.
struct TimeGrid {
    double dt = 0.0;
    std::size_t count = 0;
    std::size_t origin = 0;

    // 2^18 samples over +-200 gamma, t = 0 at count/8.
    static TimeGrid standard();
    static TimeGrid from_span(std::size_t count, double frequency_span, std::size_t origin);
    static TimeGrid from_step(double dt, std::size_t count, std::size_t origin);

    double time(std::size_t k) const { return (static_cast<double>(k) - static_cast<double>(origin)) * dt; }
    double frequency_span() const;
    double duration() const { return dt * static_cast<double>(count); }
    std::size_t nearest_index(double t) const;
    std::vector<double> times() const;
    void validate() const;

    bool operator==(const TimeGrid &other) const = default;
};

struct TimeWindow {
    double begin = -std::numeric_limits<double>::infinity();
    double end = std::numeric_limits<double>::infinity();

    bool contains(double t) const { return t >= begin && t <= end; }
};

struct FieldTrace {
    TimeGrid grid;
    std::vector<cplx> samples; // u_out after the chain
    std::vector<cplx> input;   // u_in entering the chain
    std::vector<cplx> emitted; // u_out - u_in (no impulse spike)

    std::vector<double> times() const { return grid.times(); }
    std::vector<double> power() const;
    std::vector<double> emitted_power() const;
};

struct AtomTraces {
    TimeGrid grid;
    std::size_t first = 0; // grid index of column 0
    std::vector<double> times;
    std::vector<std::vector<cplx>> phis; // row n-1 belongs to atom n
    std::vector<cplx> chi_out;           // guided field after the last atom (impulse excluded)
    std::vector<cplx> chi_in;

    std::size_t n_atoms() const { return phis.size(); }
    std::size_t size() const { return times.size(); }
    double population(std::size_t column) const;
    model::StateSnapshot snapshot(std::size_t column, const model::EnsembleParams &params) const;
};

// Input field on the grid (envelope times e^{i detuning t}).
std::vector<cplx> synthesize(const Pulse &pulse, const TimeGrid &grid);

FieldTrace propagate(const Pulse &pulse, const model::EnsembleParams &params, const TimeGrid &grid);

// m passes through the same ensemble: the transmission raised to the m-th power.
FieldTrace ring_roundtrips(const Pulse &pulse, const model::EnsembleParams &single_pass, std::size_t m,
                           const TimeGrid &grid);

// One inverse transform per atom; only samples inside `window` are stored.
AtomTraces atom_traces(const Pulse &pulse, const model::EnsembleParams &params, const TimeGrid &grid,
                       TimeWindow window = {});

// All amplitudes at a single (not necessarily on-grid) time by direct summation.
model::StateSnapshot atom_snapshot(const Pulse &pulse, const model::EnsembleParams &params,
                                   const TimeGrid &grid, double t);

struct HomodyneTrace {
    std::vector<double> times;
    std::vector<double> power;    // |u_signal + e^{i phase} u_lo|^2
    std::vector<double> in_phase; // Re(u_signal conj(e^{i phase} u_lo)) / |u_lo|, 0 where the LO is off
};

HomodyneTrace homodyne(const FieldTrace &signal, const Pulse &lo, double relative_phase,
                       const TimeGrid &grid);

// Passage detection: local minima of the emitted power inside `window` lying below
// threshold * power at the window start. The complex emitted amplitude is interpolated
// quadratically through three samples and |.|^2 minimised on that interpolant.
// The search ends where the power falls for good below kMinimumNoiseFloor * reference.
inline constexpr double kMinimumThreshold = 1e-3;
inline constexpr double kMinimumNoiseFloor = 1e-20;
std::vector<double> find_power_minima(const FieldTrace &trace, double threshold = kMinimumThreshold,
                                      TimeWindow window = {0.0, std::numeric_limits<double>::infinity()});

// Zero crossings of `values` inside `window`, linearly interpolated.
std::vector<double> sign_changes(const std::vector<double> &times, const std::vector<double> &values,
                                 TimeWindow window = {});

// [t0, last time the emitted power is still >= fraction * power at t0].
inline constexpr double kDecayWindowFraction = 1e-2;
TimeWindow decay_window(const FieldTrace &trace, double fraction, double t0 = 0.0);

} // namespace wgqed::pulse
