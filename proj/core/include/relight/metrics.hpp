#ifndef RELIGHT_METRICS_HPP
#define RELIGHT_METRICS_HPP

#include "relight/raster.hpp"

namespace relight {

// Shannon entropy (bits) of the 256-bin histogram of the 8-bit luminance.
double discrete_entropy(const RgbImage& img);

// 10 log10(1/MSE) over all channels; identical images return the 99 dB
// sentinel, and the value is capped there.
double psnr(const RgbImage& a, const RgbImage& b);

double mean_luminance(const RgbImage& img);

} // namespace relight

#endif
