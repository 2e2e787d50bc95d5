#include "wgqed/specfun.h"

#include "wgqed/errors.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wgqed::specfun {

namespace {

void require_finite(double x, const char *what)
{
    if (!std::isfinite(x)) {
        throw DomainError(std::string(what) + ": argument must be finite");
    }
}

void require_indices(int n, int alpha, const char *what)
{
    if (n < 0 || alpha < 0) {
        throw DomainError(std::string(what) + ": degree and alpha must be non-negative");
    }
}

double bisection_tolerance(double x)
{
    return std::max(2e-13, 8.0 * std::numeric_limits<double>::epsilon() * std::abs(x));
}

// Upper bound on the largest zero of L_n^(alpha).
double laguerre_root_bound(int degree, int alpha)
{
    return 4.0 * degree + 2.0 * alpha + 2.0;
}

double bessel_series(int order, double x)
{
    const double half = 0.5 * x;
    double term = 1.0;
    for (int k = 1; k <= order; ++k) {
        term *= half / k;
    }
    double sum = term;
    const double q = half * half;
    for (int k = 1; k < 200; ++k) {
        term *= -q / (static_cast<double>(k) * (k + order));
        sum += term;
        if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) {
            break;
        }
    }
    return sum;
}

// Normalised backward recurrence; J_0 + 2 sum_k J_2k = 1 fixes the scale.
double bessel_miller(int order, double x)
{
    int start = static_cast<int>(x + 30.0 + 8.0 * std::cbrt(x)) + order;
    start += start % 2;
    double next = 0.0;
    double current = 1e-300;
    double norm = 0.0;
    double wanted = 0.0;
    for (int k = start; k >= 1; --k) {
        const double previous = (2.0 * k / x) * current - next;
        next = current;
        current = previous; // now holds f_{k-1}
        if (k - 1 == order) {
            wanted = current;
        }
        if ((k - 1) % 2 == 0 && k - 1 > 0) {
            norm += 2.0 * current;
        }
        if (std::abs(current) > 1e250) {
            current *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    norm += current; // f_0
    return wanted / norm;
}

} // namespace

double laguerre(int n, int alpha, double x)
{
    require_finite(x, "laguerre");
    require_indices(n, alpha, "laguerre");
    if (n == 0) {
        return 1.0;
    }
    double prev = 1.0;
    double cur = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

LaguerreValue laguerre_with_derivative(int n, int alpha, double x)
{
    // d/dx L_n^(a) = -L_{n-1}^(a+1)
    const double value = laguerre(n, alpha, x);
    const double derivative = n == 0 ? 0.0 : -laguerre(n - 1, alpha + 1, x);
    return {value, derivative};
}

int laguerre_roots_below(int degree, int alpha, double x)
{
    require_finite(x, "laguerre_roots_below");
    require_indices(degree, alpha, "laguerre_roots_below");
    // LDL^T pivots of J - x I for the monic Laguerre Jacobi matrix:
    // diagonal 2k + alpha + 1, squared off-diagonal k (k + alpha).
    int negatives = 0;
    double pivot = 1.0;
    for (int k = 0; k < degree; ++k) {
        const double diag = 2.0 * k + alpha + 1.0 - x;
        const double offsq = static_cast<double>(k) * (k + alpha);
        pivot = k == 0 ? diag : diag - offsq / pivot;
        if (pivot == 0.0) {
            pivot = -std::numeric_limits<double>::min();
        }
        if (pivot < 0.0) {
            ++negatives;
        }
    }
    return negatives;
}

PolyRoots laguerre_roots(int degree, int alpha)
{
    return laguerre_roots(degree, alpha, degree);
}

PolyRoots laguerre_roots(int degree, int alpha, int count)
{
    require_indices(degree, alpha, "laguerre_roots");
    if (count < 0 || count > degree) {
        throw DomainError("laguerre_roots: count must lie in [0, degree]");
    }
    PolyRoots roots;
    roots.degree = degree;
    roots.values.reserve(static_cast<std::size_t>(count));

    // The sign-change count of L_0, ..., L_d is the interlacing property in
    // counting form: it brackets every root without missing any.
    double lo = 0.0;
    const double upper = laguerre_root_bound(degree, alpha);
    for (int i = 0; i < count; ++i) {
        double hi = upper;
        // Tighten hi to the first point where more than i roots lie below.
        double a = lo;
        double b = hi;
        while (b - a > bisection_tolerance(b)) {
            const double mid = 0.5 * (a + b);
            if (laguerre_roots_below(degree, alpha, mid) > i) {
                b = mid;
            } else {
                a = mid;
            }
        }
        double root = 0.5 * (a + b);

        // One guarded Newton step; rejected if it leaves the bracket.
        const auto lv = laguerre_with_derivative(degree, alpha, root);
        if (std::isfinite(lv.value) && std::isfinite(lv.derivative) && lv.derivative != 0.0) {
            const double polished = root - lv.value / lv.derivative;
            if (polished >= a - bisection_tolerance(a) && polished <= b + bisection_tolerance(b)) {
                root = polished;
            }
        }
        roots.values.push_back(root);
        lo = b;
    }
    return roots;
}

double bessel_j(int order, double x)
{
    require_finite(x, "bessel_j");
    if (order < 0) {
        throw DomainError("bessel_j: order must be non-negative");
    }
    if (x < 0.0) {
        throw DomainError("bessel_j: negative argument");
    }
    if (x == 0.0) {
        return order == 0 ? 1.0 : 0.0;
    }
    if (x < kBesselCrossover) {
        return bessel_series(order, x);
    }
    return bessel_miller(order, x);
}

PolyRoots bessel_j1_zeros(int count)
{
    if (count < 1) {
        throw DomainError("bessel_j1_zeros: count must be positive");
    }
    PolyRoots zeros;
    zeros.degree = count;
    // Zeros are spaced by more than pi/2 everywhere, so a 0.5 scan brackets each once.
    double a = 1.0;
    double fa = bessel_j(1, a);
    while (static_cast<int>(zeros.values.size()) < count) {
        const double b = a + 0.5;
        const double fb = bessel_j(1, b);
        if ((fa < 0.0) != (fb < 0.0)) {
            double lo = a;
            double hi = b;
            double flo = fa;
            while (hi - lo > 1e-14 * std::max(1.0, hi)) {
                const double mid = 0.5 * (lo + hi);
                const double fm = bessel_j(1, mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            zeros.values.push_back(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    return zeros;
}

double bessel_overlap(double a, double b)
{
    if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b < 0.0) {
        throw DomainError("bessel_overlap: arguments must be finite and non-negative");
    }
    const double j0a = bessel_j(0, a);
    const double j1a = bessel_j(1, a);
    if (std::abs(a - b) <= 1e-9 * std::max(1.0, a)) {
        return 0.5 * (j0a * j0a + j1a * j1a);
    }
    const double j0b = bessel_j(0, b);
    const double j1b = bessel_j(1, b);
    return (a * j0b * j1a - b * j0a * j1b) / (a * a - b * b);
}

} // namespace wgqed::specfun
