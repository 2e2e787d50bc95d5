#pragma once

#include "wgqed/model.h"

#include <vector>

namespace wgqed::fft {

enum class Direction { Forward, Backward };

// In-place unnormalised DFT. Forward uses e^{-2 pi i jk/n}, backward e^{+2 pi i jk/n}.
// Plan creation is serialised internally; execution runs concurrently.
void transform(std::vector<cplx> &data, Direction direction);

const char *backend_version();

} // namespace wgqed::fft
