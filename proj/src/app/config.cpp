#include "wgqed/app/config.h"

#include "wgqed/errors.h"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace wgqed::app {

namespace {

using json = nlohmann::json;

void flatten(const json &node, const std::string &prefix, std::map<std::string, json> &out)
{
    if (node.is_object() && (prefix.empty() || node.size() > 0)) {
        for (const auto &[key, value] : node.items()) {
            flatten(value, prefix.empty() ? key : prefix + "." + key, out);
        }
        return;
    }
    out[prefix] = node;
}

template <typename T>
T as(const json &v, const std::string &key)
{
    try {
        if constexpr (std::is_same_v<T, std::size_t>) {
            if (!v.is_number_integer() || v.get<long long>() < 0) {
                throw ConfigError("");
            }
            return v.get<std::size_t>();
        } else if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) {
                throw ConfigError("");
            }
            return v.get<double>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) {
                throw ConfigError("");
            }
            return v.get<std::string>();
        } else {
            if (!v.is_array()) {
                throw ConfigError("");
            }
            T out;
            for (const auto &x : v) {
                if (!x.is_number()) {
                    throw ConfigError("");
                }
                out.push_back(x.get<double>());
            }
            return out;
        }
    } catch (const ConfigError &) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

using Setter = std::function<void(RunConfig &, const json &, const std::string &)>;

const std::map<std::string, Setter> &setters()
{
    static const std::map<std::string, Setter> table = {
        {"n_atoms", [](RunConfig &c, const json &v, const std::string &k) { c.n_atoms = as<std::size_t>(v, k); }},
        {"beta", [](RunConfig &c, const json &v, const std::string &k) { c.beta = as<double>(v, k); }},
        {"betas", [](RunConfig &c, const json &v, const std::string &k) { c.betas = as<std::vector<double>>(v, k); }},
        {"od", [](RunConfig &c, const json &v, const std::string &k) { c.od = as<double>(v, k); }},
        {"od_single", [](RunConfig &c, const json &v, const std::string &k) { c.od_single = as<double>(v, k); }},
        {"roundtrips", [](RunConfig &c, const json &v, const std::string &k) { c.roundtrips = as<std::size_t>(v, k); }},
        {"gamma_hz", [](RunConfig &c, const json &v, const std::string &k) { c.gamma_hz = as<double>(v, k); }},
        {"mode", [](RunConfig &c, const json &v, const std::string &k) { c.mode = as<std::string>(v, k); }},
        {"pulse.shape", [](RunConfig &c, const json &v, const std::string &k) { c.pulse.shape = as<std::string>(v, k); }},
        {"pulse.duration", [](RunConfig &c, const json &v, const std::string &k) { c.pulse.duration = as<double>(v, k); }},
        {"pulse.duration_ns", [](RunConfig &c, const json &v, const std::string &k) { c.pulse.duration_ns = as<double>(v, k); }},
        {"pulse.fall_time", [](RunConfig &c, const json &v, const std::string &k) { c.pulse.fall_time = as<double>(v, k); }},
        {"pulse.fall_time_ns", [](RunConfig &c, const json &v, const std::string &k) { c.pulse.fall_time_ns = as<double>(v, k); }},
        {"pulse.detuning", [](RunConfig &c, const json &v, const std::string &k) { c.pulse.detuning = as<double>(v, k); }},
        {"pulse.amplitude", [](RunConfig &c, const json &v, const std::string &k) { c.pulse.amplitude = as<double>(v, k); }},
        {"grid.count", [](RunConfig &c, const json &v, const std::string &k) { c.grid.count = as<std::size_t>(v, k); }},
        {"grid.span", [](RunConfig &c, const json &v, const std::string &k) { c.grid.span = as<double>(v, k); }},
        {"grid.origin", [](RunConfig &c, const json &v, const std::string &k) { c.grid.origin = as<std::size_t>(v, k); }},
        {"sweep.od_min", [](RunConfig &c, const json &v, const std::string &k) { c.sweep.od_min = as<double>(v, k); }},
        {"sweep.od_max", [](RunConfig &c, const json &v, const std::string &k) { c.sweep.od_max = as<double>(v, k); }},
        {"sweep.od_step", [](RunConfig &c, const json &v, const std::string &k) { c.sweep.od_step = as<double>(v, k); }},
        {"sweep.betas", [](RunConfig &c, const json &v, const std::string &k) { c.sweep.betas = as<std::vector<double>>(v, k); }},
        {"sweep.count", [](RunConfig &c, const json &v, const std::string &k) { c.sweep.count = as<std::size_t>(v, k); }},
        {"lo.relative_phase", [](RunConfig &c, const json &v, const std::string &k) { c.lo.relative_phase = as<double>(v, k); }},
        {"lo.duration", [](RunConfig &c, const json &v, const std::string &k) { c.lo.duration = as<double>(v, k); }},
        {"lo.duration_ns", [](RunConfig &c, const json &v, const std::string &k) { c.lo.duration_ns = as<double>(v, k); }},
        {"lo.amplitude", [](RunConfig &c, const json &v, const std::string &k) { c.lo.amplitude = as<double>(v, k); }},
        {"t_max", [](RunConfig &c, const json &v, const std::string &k) { c.t_max = as<double>(v, k); }},
        {"t_max_ns", [](RunConfig &c, const json &v, const std::string &k) { c.t_max_ns = as<double>(v, k); }},
        {"sample_dt", [](RunConfig &c, const json &v, const std::string &k) { c.sample_dt = as<double>(v, k); }},
        {"atoms.max_traced", [](RunConfig &c, const json &v, const std::string &k) { c.max_traced = as<std::size_t>(v, k); }},
        {"spectrum.count", [](RunConfig &c, const json &v, const std::string &k) { c.spectrum_count = as<std::size_t>(v, k); }},
        {"spectrum.span", [](RunConfig &c, const json &v, const std::string &k) { c.spectrum_span = as<double>(v, k); }},
        {"workers", [](RunConfig &c, const json &v, const std::string &k) { c.workers = as<std::size_t>(v, k); }},
        {"out", [](RunConfig &c, const json &v, const std::string &k) { c.out = as<std::string>(v, k); }},
    };
    return table;
}

} // namespace

const std::vector<std::string> &known_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto &[name, setter] : setters()) {
            k.push_back(name);
        }
        return k;
    }();
    return keys;
}

void apply_json(RunConfig &cfg, const nlohmann::json &doc)
{
    if (!doc.is_object()) {
        throw ConfigError("config root must be an object");
    }
    std::map<std::string, json> flat;
    flatten(doc, "", flat);
    std::vector<std::string> unknown;
    for (const auto &[key, value] : flat) {
        if (setters().count(key) == 0) {
            unknown.push_back(key);
        }
    }
    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto &k : unknown) {
            msg += " " + k;
        }
        throw ConfigError(msg);
    }
    for (const auto &[key, value] : flat) {
        setters().at(key)(cfg, value, key);
    }
}

RunConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    RunConfig cfg;
    apply_json(cfg, doc);
    return cfg;
}

nlohmann::json to_json(const RunConfig &c)
{
    json j;
    auto put = [&](const std::string &k, const auto &v) { j[k] = v; };
    auto opt = [&](const std::string &k, const auto &v) {
        if (v) {
            j[k] = *v;
        }
    };
    opt("n_atoms", c.n_atoms);
    opt("beta", c.beta);
    if (!c.betas.empty()) {
        put("betas", c.betas);
    }
    opt("od", c.od);
    opt("od_single", c.od_single);
    put("roundtrips", c.roundtrips);
    opt("gamma_hz", c.gamma_hz);
    put("mode", c.mode);
    put("pulse.shape", c.pulse.shape);
    opt("pulse.duration", c.pulse.duration);
    opt("pulse.duration_ns", c.pulse.duration_ns);
    opt("pulse.fall_time", c.pulse.fall_time);
    opt("pulse.fall_time_ns", c.pulse.fall_time_ns);
    put("pulse.detuning", c.pulse.detuning);
    put("pulse.amplitude", c.pulse.amplitude);
    put("grid.count", c.grid.count);
    put("grid.span", c.grid.span);
    opt("grid.origin", c.grid.origin);
    put("sweep.od_min", c.sweep.od_min);
    put("sweep.od_max", c.sweep.od_max);
    put("sweep.od_step", c.sweep.od_step);
    put("sweep.betas", c.sweep.betas);
    put("sweep.count", c.sweep.count);
    put("lo.relative_phase", c.lo.relative_phase);
    opt("lo.duration", c.lo.duration);
    opt("lo.duration_ns", c.lo.duration_ns);
    put("lo.amplitude", c.lo.amplitude);
    opt("t_max", c.t_max);
    opt("t_max_ns", c.t_max_ns);
    put("sample_dt", c.sample_dt);
    put("atoms.max_traced", c.max_traced);
    put("spectrum.count", c.spectrum_count);
    put("spectrum.span", c.spectrum_span);
    return j;
}

} // namespace wgqed::app
