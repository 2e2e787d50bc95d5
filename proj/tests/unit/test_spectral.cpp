#include "wgqed/errors.h"
#include "wgqed/model.h"
#include "wgqed/series.h"
#include "wgqed/spectral.h"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace wgqed;
using model::EnsembleParams;

namespace {

std::vector<double> random_betas(std::mt19937_64 &rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(1e-3, 1.0);
    std::vector<double> b(n);
    for (auto &x : b) {
        x = u(rng);
    }
    return b;
}

cplx naive_product(double delta, const std::vector<double> &betas, double gamma)
{
    cplx t = 1.0;
    for (double b : betas) {
        t *= 1.0 - 2.0 * b * gamma / cplx(gamma, delta);
    }
    return t;
}

} // namespace

TEST_CASE("atom_transmission: examples")
{
    CHECK(std::abs(spectral::atom_transmission(0.0, 0.5, 1.0)) < 1e-16);
    CHECK(std::abs(spectral::atom_transmission(0.0, 1.0, 1.0) + 1.0) < 1e-16);
    double prev = 0.0;
    for (double d : {1.0, 10.0, 100.0, 1e4}) {
        const double m = std::abs(spectral::atom_transmission(d, 0.3, 1.0));
        CHECK(m > prev);
        prev = m;
    }
    CHECK(std::abs(1.0 - prev) < 1e-7);
    CHECK_THROWS_AS(spectral::atom_transmission(std::nan(""), 0.3, 1.0), DomainError);
}

TEST_CASE("ensemble_transmission: empty product, uniform power, OD consistency")
{
    CHECK(spectral::ensemble_transmission(0.3, EnsembleParams::from_betas({})) == cplx(1.0, 0.0));
    const auto p = EnsembleParams::uniform(7, 0.23, 1.4);
    for (double d : {-3.0, 0.0, 0.8, 25.0}) {
        const cplx single = spectral::atom_transmission(d, 0.23, 1.4);
        CHECK(std::abs(spectral::ensemble_transmission(d, p) - std::pow(single, 7)) < 1e-14);
    }
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        auto b = random_betas(rng, 1 + static_cast<std::size_t>(trial % 9));
        for (auto &x : b) {
            x *= 0.49; // stay below critical coupling
        }
        const auto q = EnsembleParams::from_betas(b);
        CHECK(std::norm(spectral::ensemble_transmission(0.0, q)) ==
              doctest::Approx(std::exp(-model::od(q).value)).epsilon(1e-12));
    }
}

TEST_CASE("passivity: |t_N| <= 1")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ud(-50.0, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto b = random_betas(rng, 1 + static_cast<std::size_t>(trial % 30));
        const auto q = EnsembleParams::from_betas(b, 0.5 + (trial % 3));
        for (int k = 0; k < 20; ++k) {
            CHECK(std::abs(spectral::ensemble_transmission(ud(rng), q)) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("resonant extinction is monotone in N")
{
    for (double beta : {0.01, 0.2, 0.45}) {
        double prev = -1.0;
        for (std::size_t n = 1; n <= 40; ++n) {
            // -ln |t_N(0)|^2, so the comparison survives saturation of 1 - |t_N|^2
            const double ext = -std::log(std::norm(spectral::ensemble_transmission(0.0, EnsembleParams::uniform(n, beta))));
            CHECK(ext > prev);
            prev = ext;
        }
    }
}

TEST_CASE("permutation: t_N is order independent, phi_n is not")
{
    const auto p = EnsembleParams::from_betas({0.05, 0.3, 0.6, 0.12});
    const auto r = p.reversed();
    bool phi_differs = false;
    for (double d : {-2.0, 0.0, 0.7, 5.0}) {
        CHECK(std::abs(spectral::ensemble_transmission(d, p) - spectral::ensemble_transmission(d, r)) < 1e-14);
        phi_differs = phi_differs || std::abs(spectral::phi_spectrum(1, d, p) - spectral::phi_spectrum(1, d, r)) > 1e-3;
    }
    CHECK(phi_differs);
}

TEST_CASE("phi_spectrum: single atom and telescoping sum")
{
    // Steady-state amplitude of a resonantly driven atom: -i sqrt(2 beta gamma)/gamma.
    const auto p1 = EnsembleParams::uniform(1, 0.3, 1.0);
    CHECK(std::abs(spectral::phi_spectrum(1, 0.0, p1) - cplx(0.0, -std::sqrt(0.6))) < 1e-15);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ud(-20.0, 20.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto b = random_betas(rng, 1 + static_cast<std::size_t>(trial % 12));
        const auto q = EnsembleParams::from_betas(b, 1.0 + 0.1 * trial);
        const double d = ud(rng);
        cplx sum = 0.0;
        for (std::size_t n = 1; n <= b.size(); ++n) {
            sum += std::sqrt(2.0 * b[n - 1] * q.gamma()) * cplx(0.0, -1.0) * spectral::phi_spectrum(n, d, q);
            // Field after atom n.
            CHECK(std::abs(1.0 + sum - spectral::partial_transmission(n, d, q)) < 1e-12);
        }
        CHECK(std::abs(sum - (spectral::ensemble_transmission(d, q) - 1.0)) < 1e-12);
    }
    CHECK_THROWS_AS(spectral::phi_spectrum(2, 0.0, p1), std::out_of_range);
}

TEST_CASE("FrequencyGrid: symmetric, evenly spaced")
{
    const auto g = spectral::FrequencyGrid::symmetric(64, 8.0);
    REQUIRE(g.detunings.size() == 64);
    CHECK(g.spacing == doctest::Approx(2.0 * 8.0 / 64));
    for (std::size_t j = 0; j < 64; ++j) {
        CHECK(std::abs(g.detunings[j] + g.detunings[63 - j]) < 1e-14);
        if (j > 0) {
            CHECK(g.detunings[j] - g.detunings[j - 1] == doctest::Approx(g.spacing).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(spectral::FrequencyGrid::symmetric(63, 8.0), ConfigError);
    CHECK_THROWS_AS(spectral::FrequencyGrid::symmetric(64, 0.0), ConfigError);
    const auto t = spectral::ensemble_transmission(g, EnsembleParams::uniform(3, 0.2));
    for (std::size_t j = 0; j < 64; ++j) {
        CHECK(std::abs(t[j] - spectral::ensemble_transmission(g.detunings[j], EnsembleParams::uniform(3, 0.2))) < 1e-15);
    }
}

TEST_CASE("ipow matches repeated multiplication")
{
    const cplx z(0.93, -0.21);
    cplx acc = 1.0;
    for (std::size_t n = 0; n < 200; ++n) {
        CHECK(std::abs(spectral::ipow(z, n) - acc) < 1e-13 * std::max(1.0, std::abs(acc)));
        acc *= z;
    }
}

TEST_CASE("Chain: runs, passes, field and its small-w series")
{
    const auto p = EnsembleParams::from_betas({0.1, 0.1, 0.3, 0.3, 0.3, 0.1}, 1.2);
    const spectral::Chain c(p, 3);
    REQUIRE(c.runs().size() == 3);
    CHECK(c.runs()[1].second == 3);
    CHECK(c.total_kappa() == doctest::Approx(3 * 2 * 1.2 * 1.2).epsilon(1e-14));
    const auto rep = p.repeated(3);
    for (double d : {-4.0, 0.0, 0.5, 30.0}) {
        const cplx w = 1.0 / cplx(1.2, d);
        CHECK(std::abs(c.field(w) - naive_product(d, rep.betas(), 1.2)) < 1e-13);
    }
    CHECK_THROWS_AS(spectral::Chain(p, 0), DomainError);

    // F(w(p)) with w = p / (1 + eps p) agrees with the truncated series to O(p^{K+1}).
    const cplx eps(0.5, 0.3);
    const int order = 10;
    const auto s = c.field_series(eps, order);
    REQUIRE(static_cast<int>(s.size()) == order + 1);
    for (double mag : {1e-2, 3e-3}) {
        const cplx pp = mag * cplx(0.6, 0.8);
        const cplx w = pp / (1.0 + eps * pp);
        const double err = std::abs(series::evaluate(s, pp) - c.field(w));
        CHECK(err < 1e3 * std::pow(mag * c.total_kappa(), order + 1) + 1e-14);
    }
}
