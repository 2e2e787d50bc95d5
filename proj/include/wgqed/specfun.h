#pragma once

#include <cstddef>
#include <vector>

namespace wgqed::specfun {

// Positive real roots of a polynomial or of J_1, strictly increasing.
struct PolyRoots {
    std::vector<double> values;
    int degree = 0;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

// Generalised Laguerre polynomial L_n^(alpha)(x) by upward three-term recurrence.
// Throws DomainError for non-finite x or negative n/alpha.
double laguerre(int n, int alpha, double x);

// L_n^(alpha) and d/dx L_n^(alpha) together (used for Newton polishing).
struct LaguerreValue {
    double value;
    double derivative;
};
LaguerreValue laguerre_with_derivative(int n, int alpha, double x);

// All `degree` roots of L_degree^(alpha).
PolyRoots laguerre_roots(int degree, int alpha);

// Only the `count` smallest roots of L_degree^(alpha); cost is O(count * degree).
PolyRoots laguerre_roots(int degree, int alpha, int count);

// Number of roots of L_degree^(alpha) strictly below x (Sturm count of the
// Jacobi matrix). Exposed for tests of the bracketing logic.
int laguerre_roots_below(int degree, int alpha, double x);

// Bessel function of the first kind J_order(x), x >= 0.
// Power series below kBesselCrossover, normalised Miller backward recurrence above.
inline constexpr double kBesselCrossover = 12.0;
double bessel_j(int order, double x);

// First `count` positive zeros of J_1.
PolyRoots bessel_j1_zeros(int count);

// integral_0^1 xi J_0(a xi) J_0(b xi) d xi in closed form (limit form for a == b).
double bessel_overlap(double a, double b);

} // namespace wgqed::specfun
