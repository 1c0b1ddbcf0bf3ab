#pragma once

#include "mode/image.hpp"

namespace mode::detail {

// Semi-global scanline aggregation over a (height, width, num_k) cost volume,
// averaged over the 8 canonical directions. Scanlines along the wrapped
// (azimuth) axis have no seam: pure wrap-axis paths run two laps around the
// cylinder and keep the second; slanted paths step the wrapped index modulo
// its extent. Sentinel entries pass through unchanged and never enter a
// path minimum.
void sgm_aggregate_raw(const float* cost, float* out, int height, int width,
                       int num_k, float p1, float p2, WrapAxis wrap,
                       float sentinel);

}  // namespace mode::detail
