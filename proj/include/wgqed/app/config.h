#pragma once

#include "wgqed/pulse.h"

#include <json.hpp>

#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

// Run configuration shared by every subcommand. The file form is JSON, either flat
// dotted keys ("pulse.shape") or the equivalent nested objects.
namespace wgqed::app {

struct PulseConfig {
    std::string shape = "delta"; // delta | boxcar | heaviside
    std::optional<double> duration;
    std::optional<double> duration_ns;
    std::optional<double> fall_time;
    std::optional<double> fall_time_ns;
    double detuning = 0.0;
    double amplitude = 1.0;
};

struct GridConfig {
    std::size_t count = pulse::kDefaultGridCount;
    double span = pulse::kDefaultFrequencySpan;
    std::optional<std::size_t> origin;
};

struct SweepConfig {
    double od_min = 10.0;
    double od_max = 63.0;
    double od_step = 1.0;
    std::vector<double> betas{0.0055, 0.2};
    std::size_t count = 3;
};

struct LoConfig {
    double relative_phase = std::numbers::pi;
    std::optional<double> duration;
    std::optional<double> duration_ns;
    double amplitude = 1.0;
};

struct RunConfig {
    std::optional<std::size_t> n_atoms;
    std::optional<double> beta;
    std::vector<double> betas;
    std::optional<double> od;
    std::optional<double> od_single;
    std::size_t roundtrips = 1;
    std::optional<double> gamma_hz;
    std::string mode = "auto"; // auto | analytic | spectral

    PulseConfig pulse;
    GridConfig grid;
    SweepConfig sweep;
    LoConfig lo;

    std::optional<double> t_max;
    std::optional<double> t_max_ns;
    double sample_dt = 0.005;
    std::size_t max_traced = 200;
    std::size_t spectrum_count = 4096;
    double spectrum_span = 20.0;
    std::size_t workers = 1;
    std::string out = ".";
};

// Every accepted key, dotted form.
const std::vector<std::string> &known_keys();

// Overlay the keys of `doc` onto `cfg`. Unknown keys or wrong types raise ConfigError
// (all unknown keys are listed in one message).
void apply_json(RunConfig &cfg, const nlohmann::json &doc);

RunConfig load_config(const std::string &path);

// Flat dotted-key view with every set value.
nlohmann::json to_json(const RunConfig &cfg);

} // namespace wgqed::app
