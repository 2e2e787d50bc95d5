#include "wgqed/app/commands.h"
#include "wgqed/specfun.h"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
    fs::path dir;
};

const fs::path kGolden = WGQED_GOLDEN_DIR;
const fs::path kScratch = WGQED_SCRATCH_DIR;

Run run(const std::string &name, std::vector<std::string> args)
{
    Run r;
    r.dir = kScratch / name;
    fs::remove_all(r.dir);
    args.insert(args.begin(), "wgqed");
    args.push_back("--out");
    args.push_back(r.dir.string());
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    r.code = wgqed::app::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

// no --out appended
Run run_raw(std::vector<std::string> args)
{
    args.insert(args.begin(), "wgqed");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    Run r;
    r.code = wgqed::app::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing " << p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        parts.push_back(cur);
    }
    return parts;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t index(const std::string &name) const
    {
        const auto it = std::find(header.begin(), header.end(), name);
        REQUIRE_MESSAGE(it != header.end(), "no column " << name);
        return static_cast<std::size_t>(it - header.begin());
    }
    std::vector<double> col(const std::string &name) const
    {
        const std::size_t j = index(name);
        std::vector<double> v;
        for (const auto &r : rows) {
            v.push_back(r[j]);
        }
        return v;
    }
};

bool parse_number(const std::string &s, double &v)
{
    if (s.empty()) {
        return false;
    }
    char *end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

Table read_table(const fs::path &p)
{
    const auto lines = split(slurp(p), '\n');
    REQUIRE(lines.size() >= 2);
    REQUIRE(lines[0].rfind("# run_hash=", 0) == 0);
    Table t;
    t.header = split(lines[1], ',');
    for (std::size_t i = 2; i < lines.size(); ++i) {
        std::vector<double> row;
        for (const auto &c : split(lines[i], ',')) {
            double v = std::nan("");
            parse_number(c, v);
            row.push_back(v);
        }
        REQUIRE(row.size() == t.header.size());
        t.rows.push_back(std::move(row));
    }
    return t;
}

json read_manifest(const fs::path &dir)
{
    return json::parse(slurp(dir / "manifest.json"));
}

bool updating()
{
    const char *v = std::getenv("WGQED_UPDATE_GOLDEN");
    return v != nullptr && std::string(v) == "1";
}

// Hash line and header exact; numbers to 1e-9 relative, with a floor scaled to the
// column so that noise-level tails do not dominate.
void compare_csv(const fs::path &got, const fs::path &want)
{
    const auto g = split(slurp(got), '\n');
    const auto w = split(slurp(want), '\n');
    REQUIRE_MESSAGE(g.size() == w.size(), got.filename().string() << " line count");
    REQUIRE(g.size() >= 2);
    CHECK(g[0] == w[0]);
    CHECK(g[1] == w[1]);
    std::vector<std::vector<std::string>> gc, wc;
    std::vector<double> scale(split(w[1], ',').size(), 0.0);
    for (std::size_t i = 2; i < w.size(); ++i) {
        gc.push_back(split(g[i], ','));
        wc.push_back(split(w[i], ','));
        REQUIRE(gc.back().size() == scale.size());
        REQUIRE(wc.back().size() == scale.size());
        for (std::size_t j = 0; j < scale.size(); ++j) {
            double v = 0.0;
            if (parse_number(wc.back()[j], v) && std::isfinite(v)) {
                scale[j] = std::max(scale[j], std::abs(v));
            }
        }
    }
    std::size_t bad = 0;
    for (std::size_t i = 0; i < wc.size(); ++i) {
        for (std::size_t j = 0; j < scale.size(); ++j) {
            double a = 0.0, b = 0.0;
            if (parse_number(gc[i][j], a) && parse_number(wc[i][j], b)) {
                const bool same = (std::isnan(a) && std::isnan(b)) || a == b ||
                                  std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)) + 1e-12 * scale[j];
                if (!same && bad++ < 5) {
                    MESSAGE(got.filename().string() << " row " << i << " col " << j << ": " << gc[i][j] << " vs "
                                                    << wc[i][j]);
                }
            } else if (gc[i][j] != wc[i][j]) {
                ++bad;
            }
        }
    }
    CHECK_MESSAGE(bad == 0, got.filename().string() << ": " << bad << " cells differ");
}

void check_golden(const std::string &name, const std::vector<std::string> &args)
{
    const Run r = run(name, args);
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const fs::path want = kGolden / name;
    if (updating()) {
        fs::remove_all(want);
        fs::create_directories(want);
        for (const auto &e : fs::directory_iterator(r.dir)) {
            fs::copy_file(e.path(), want / e.path().filename());
        }
        MESSAGE("updated " << want.string());
        return;
    }
    REQUIRE_MESSAGE(fs::exists(want), "no fixture for " << name << " (run with WGQED_UPDATE_GOLDEN=1)");
    const json gm = read_manifest(r.dir);
    const json wm = read_manifest(want);
    for (const char *key : {"run_hash", "parameters", "ensemble", "command"}) {
        CHECK_MESSAGE(gm.value(key, json()) == wm.value(key, json()), key);
    }
    REQUIRE(gm["outputs"].size() == wm["outputs"].size());
    for (std::size_t i = 0; i < wm["outputs"].size(); ++i) {
        const std::string file = wm["outputs"][i]["file"];
        CHECK(gm["outputs"][i]["file"] == file);
        compare_csv(r.dir / file, want / file);
    }
}

const std::map<std::string, std::vector<std::string>> &cases()
{
    static const std::map<std::string, std::vector<std::string>> c = {
        {"evolve_n4_analytic", {"evolve", "--n-atoms", "4", "--beta", "0.4", "--mode", "analytic"}},
        {"evolve_od31_boxcar",
         {"evolve", "--od", "31", "--beta", "0.0055", "--pulse", "boxcar", "--duration-ns", "100", "--gamma-hz", "2.6e6"}},
        {"evolve_n1", {"evolve", "--n-atoms", "1", "--beta", "0.2"}},
        {"subradiance_sweep", {"subradiance", "--od-min", "5", "--od-max", "63"}},
        {"subradiance_n4", {"subradiance", "--n-atoms", "4", "--beta", "0.4", "--mode", "analytic"}},
        {"subradiance_ring", {"subradiance", "--roundtrips", "3", "--od-single", "21"}},
        {"homodyne_od31", {"homodyne", "--od", "31", "--beta", "0.0055", "--gamma-hz", "2.6e6"}},
        {"spectrum_n1", {"spectrum", "--n-atoms", "1", "--beta", "0.5"}},
        {"decompose_n4", {"decompose", "--n-atoms", "4", "--beta", "0.4"}},
    };
    return c;
}

Table case_table(const std::string &name, const std::string &file)
{
    const Run r = run(name + "_prop", cases().at(name));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    return read_table(r.dir / file);
}

} // namespace

TEST_CASE("golden fixtures for every documented invocation")
{
    for (const auto &[name, args] : cases()) {
        CAPTURE(name);
        check_golden(name, args);
    }
}

TEST_CASE("evolve N=1: pure exponential decay")
{
    const auto t = case_table("evolve_n1", "power.csv");
    const auto time = t.col("time_gamma");
    const auto power = t.col("power");
    REQUIRE(time.size() > 100);
    for (std::size_t k = 0; k < time.size(); ++k) {
        if (time[k] < 20.0) {
            CHECK(std::abs(power[k] - 0.4 * std::exp(-2.0 * time[k])) <= 1e-9 * 0.4 * std::exp(-2.0 * time[k]));
        }
    }
    const auto rates = case_table("evolve_n1", "rates.csv");
    for (double g : rates.col("gamma_ens")) {
        CHECK(std::abs(g - 2.0) < 1e-6);
    }
}

TEST_CASE("evolve N=4 analytic: passages are the scaled Laguerre roots, superradiant start")
{
    const auto t = case_table("evolve_n4_analytic", "passages.csv");
    const auto roots = wgqed::specfun::laguerre_roots(3, 1);
    const auto tau = t.col("tau_gamma");
    REQUIRE(tau.size() == 3);
    for (std::size_t m = 0; m < 3; ++m) {
        CHECK(std::abs(tau[m] - roots[m] / 0.8) < 1e-12);
    }
    const auto rates = case_table("evolve_n4_analytic", "rates.csv");
    CHECK(std::abs(rates.col("gamma_ens")[0] - 4.4) < 1e-4);
    CHECK(std::abs(rates.col("gamma_light")[0] - 4.4) < 1e-4);
}

TEST_CASE("evolve OD 31 boxcar: first two minima near 6.1 ns and 30.6 ns")
{
    const auto t = case_table("evolve_od31_boxcar", "passages.csv");
    const auto ns = t.col("tau_ns");
    REQUIRE(ns.size() >= 2);
    CHECK(std::abs(ns[0] - 6.1) <= 0.5);
    CHECK(std::abs(ns[1] - 30.6) <= 1.5);
}

TEST_CASE("subradiance N=4: the three Laguerre-root times")
{
    const auto t = case_table("subradiance_n4", "subradiance.csv");
    const auto roots = wgqed::specfun::laguerre_roots(3, 1);
    const auto tau = t.col("tau_gamma");
    const auto m = t.col("m");
    REQUIRE(tau.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(m[k] == static_cast<double>(k + 1));
        CHECK(std::abs(tau[k] - roots[k] / 0.8) < 1e-12);
    }
}

TEST_CASE("subradiance sweep: the two couplings agree at equal optical depth")
{
    const auto t = case_table("subradiance_sweep", "subradiance.csv");
    const auto od = t.col("od");
    const auto beta = t.col("beta");
    const auto m = t.col("m");
    const auto tau = t.col("tau_gamma");
    const auto achieved = t.col("od_achieved");
    // N is rounded per coupling, so compare tau * OD (the passage times scale as 1 / OD)
    std::map<std::pair<double, double>, std::map<double, double>> by; // (od, m) -> beta -> tau * od
    for (std::size_t k = 0; k < od.size(); ++k) {
        by[{od[k], m[k]}][beta[k]] = tau[k] * achieved[k];
    }
    REQUIRE(by.size() == 59 * 3);
    double worst_all = 0.0, worst = 0.0;
    for (const auto &[key, v] : by) {
        REQUIRE(v.size() == 2);
        const double a = v.begin()->second, b = v.rbegin()->second;
        const double dev = std::abs(a - b) / std::min(a, b);
        worst_all = std::max(worst_all, dev);
        if (key.first >= 10.0) {
            worst = std::max(worst, dev);
        }
    }
    MESSAGE("max relative deviation: " << worst << " over OD 10..63, " << worst_all << " over 5..63");
    CHECK(worst < 0.03);
}

TEST_CASE("subradiance ring: three passes equal the tripled chain")
{
    const auto ring = case_table("subradiance_ring", "subradiance.csv");
    const Run d = run("subradiance_ring_direct",
                      {"subradiance", "--n-atoms", "2865", "--beta", "0.0055", "--mode", "spectral"});
    REQUIRE_MESSAGE(d.code == 0, d.err);
    const auto direct = read_table(d.dir / "subradiance.csv");
    const auto a = ring.col("tau_gamma");
    const auto b = direct.col("tau_gamma");
    REQUIRE(a.size() == 3);
    REQUIRE(b.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::abs(a[k] - b[k]) <= 1e-9 * b[k]);
    }
    CHECK(ring.col("od_achieved")[0] == doctest::Approx(direct.col("od_achieved")[0]).epsilon(1e-12));
    // and the rounded OD 63 ensemble (N = 2864) to the resolution of the sweep
    const auto od63 = case_table("subradiance_ring", "subradiance.csv");
    const Run e = run("subradiance_od63", {"subradiance", "--od", "63"});
    REQUIRE(e.code == 0);
    const auto c = read_table(e.dir / "subradiance.csv").col("tau_gamma");
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::abs(od63.col("tau_gamma")[k] - c[k]) <= 2e-3 * c[k]);
    }
}

TEST_CASE("homodyne OD 31: sign flips next to the power minima")
{
    const auto flips = case_table("homodyne_od31", "flips.csv").col("time_ns");
    const auto minima = case_table("evolve_od31_boxcar", "passages.csv").col("tau_ns");
    const auto trace = case_table("homodyne_od31", "homodyne.csv").col("time_ns");
    REQUIRE(trace.size() > 2);
    const double dt = trace[1] - trace[0];
    REQUIRE(flips.size() >= 2);
    CHECK(std::abs(flips[0] - minima[0]) < dt);
    CHECK(std::abs(flips[1] - minima[1]) < dt);
    CHECK(std::abs(flips[0] - 6.1) <= 0.5);
    CHECK(std::abs(flips[1] - 30.6) <= 1.5);
}

TEST_CASE("spectrum N=1, beta=0.5: no transmission on resonance")
{
    const auto t = case_table("spectrum_n1", "spectrum.csv");
    const auto d = t.col("delta_gamma");
    const auto mag = t.col("magnitude");
    REQUIRE(d.size() == 4097);
    bool seen = false;
    for (std::size_t k = 0; k < d.size(); ++k) {
        CHECK(mag[k] <= 1.0 + 1e-15);
        if (d[k] == 0.0) {
            seen = true;
            CHECK(mag[k] < 1e-15);
        }
    }
    CHECK(seen);
}

TEST_CASE("decompose N=4: timed Dicke start, complete basis")
{
    const auto t = case_table("decompose_n4", "decomposition.csv");
    const std::vector<std::string> cols{"timed_dicke", "sub_1", "sub_2", "sub_3"};
    CHECK(std::abs(t.rows[0][t.index("timed_dicke")] - 1.0) < 1e-12);
    for (const auto &row : t.rows) {
        double s = 0.0;
        for (const auto &c : cols) {
            s += row[t.index(c)];
        }
        CHECK(std::abs(s - 1.0) < 1e-9);
    }
    std::ostringstream last;
    for (const auto &c : cols) {
        last << c << "=" << t.rows.back()[t.index(c)] << " ";
    }
    MESSAGE("final projections at t=" << t.rows.back()[0] << ": " << last.str());
}

TEST_CASE("exit codes")
{
    SUBCASE("help")
    {
        CHECK(run_raw({"--help"}).code == 0);
        CHECK(run_raw({"evolve", "--help"}).code == 0);
    }
    SUBCASE("unknown config keys are all listed")
    {
        const fs::path cfg = kScratch / "bad_keys.json";
        fs::create_directories(kScratch);
        std::ofstream(cfg) << R"({"n_atoms": 4, "beta": 0.4, "bogus": 1, "pulse": {"nope": 2}})";
        const Run r = run("bad_keys", {"evolve", "--config", cfg.string()});
        CHECK(r.code == 2);
        CHECK(r.err.find("bogus") != std::string::npos);
        CHECK(r.err.find("pulse.nope") != std::string::npos);
    }
    SUBCASE("bad values")
    {
        CHECK(run("bad1", {"evolve", "--n-atoms", "x4", "--beta", "0.4"}).code == 2);
        CHECK(run("bad2", {"evolve", "--n-atoms", "4", "--beta", "0.4", "--mode", "sideways"}).code == 2);
        CHECK(run("bad3", {"evolve", "--n-atoms", "4", "--od", "3", "--beta", "0.4"}).code == 2);
        CHECK(run("bad4", {"evolve", "--n-atoms", "4", "--frobnicate", "1"}).code == 2);
        CHECK(run_raw({}).code == 2);
    }
    SUBCASE("physics preconditions")
    {
        const Run r = run("het", {"evolve", "--betas", "0.1,0.3", "--mode", "analytic"});
        CHECK(r.code == 3);
        CHECK(r.err.find("analytic") != std::string::npos);
        CHECK(run("range", {"evolve", "--n-atoms", "3", "--beta", "1.5"}).code == 3);
    }
}

TEST_CASE("config file and flags resolve to the same run")
{
    const fs::path cfg = kScratch / "n4.json";
    fs::create_directories(kScratch);
    std::ofstream(cfg) << R"({"n_atoms": 4, "beta": 0.4, "mode": "analytic"})";
    const Run a = run("cfg_file", {"evolve", "--config", cfg.string()});
    const Run b = run("cfg_flags", cases().at("evolve_n4_analytic"));
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(read_manifest(a.dir)["run_hash"] == read_manifest(b.dir)["run_hash"]);
    CHECK(slurp(a.dir / "power.csv") == slurp(b.dir / "power.csv"));
}

TEST_CASE("reruns are byte identical apart from wall time")
{
    for (const std::string name : {"evolve_n4_analytic", "evolve_od31_boxcar", "homodyne_od31"}) {
        CAPTURE(name);
        const Run a = run(name + "_a", cases().at(name));
        const Run b = run(name + "_b", cases().at(name));
        REQUIRE(a.code == 0);
        REQUIRE(b.code == 0);
        json ma = read_manifest(a.dir), mb = read_manifest(b.dir);
        ma.erase("wall_time_s");
        mb.erase("wall_time_s");
        CHECK(ma == mb);
        for (const auto &o : ma["outputs"]) {
            const std::string f = o["file"];
            CHECK(slurp(a.dir / f) == slurp(b.dir / f));
        }
    }
    // concurrent sweep points are collected in order
    auto args = cases().at("subradiance_sweep");
    const Run s1 = run("sweep_w1", args);
    args.insert(args.end(), {"--workers", "4"});
    const Run s4 = run("sweep_w4", args);
    REQUIRE(s1.code == 0);
    REQUIRE(s4.code == 0);
    CHECK(slurp(s1.dir / "subradiance.csv") == slurp(s4.dir / "subradiance.csv"));
}
