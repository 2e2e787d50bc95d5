#include "wgqed/series.h"

#include <algorithm>
#include <stdexcept>

namespace wgqed::series {

Series constant(cplx value, int order)
{
    if (order < 0) {
        throw std::invalid_argument("series order must be non-negative");
    }
    Series s(static_cast<std::size_t>(order) + 1, 0.0);
    s[0] = value;
    return s;
}

Series pole(cplx eps, int order)
{
    Series s = constant(0.0, order);
    cplx term = 1.0;
    for (std::size_t k = 1; k < s.size(); ++k) {
        s[k] = term;
        term *= -eps;
    }
    return s;
}

Series add(const Series &a, const Series &b)
{
    const std::size_t n = std::min(a.size(), b.size());
    Series out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = a[k] + b[k];
    }
    return out;
}

Series scale(const Series &a, cplx factor)
{
    Series out = a;
    for (auto &c : out) {
        c *= factor;
    }
    return out;
}

Series multiply(const Series &a, const Series &b)
{
    const std::size_t n = std::min(a.size(), b.size());
    Series out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == cplx(0.0)) {
            continue;
        }
        for (std::size_t j = 0; i + j < n; ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

Series power(const Series &a, std::size_t exponent)
{
    Series result = constant(1.0, static_cast<int>(a.size()) - 1);
    Series base = a;
    while (exponent > 0) {
        if (exponent & 1U) {
            result = multiply(result, base);
        }
        exponent >>= 1U;
        if (exponent > 0) {
            base = multiply(base, base);
        }
    }
    return result;
}

cplx evaluate(const Series &a, cplx x)
{
    cplx acc = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

} // namespace wgqed::series
