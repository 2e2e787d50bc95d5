#pragma once

#include "wgqed/model.h"

#include <cstddef>
#include <vector>

// Truncated power series with complex coefficients c_0..c_K.
namespace wgqed::series {

using Series = std::vector<cplx>;

Series constant(cplx value, int order);

// p / (1 + eps p) expanded in p.
Series pole(cplx eps, int order);

Series add(const Series &a, const Series &b);
Series scale(const Series &a, cplx factor);
Series multiply(const Series &a, const Series &b);
Series power(const Series &a, std::size_t exponent);

// Sum_k c_k x^k.
cplx evaluate(const Series &a, cplx x);

} // namespace wgqed::series
