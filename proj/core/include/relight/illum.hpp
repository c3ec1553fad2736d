#ifndef RELIGHT_ILLUM_HPP
#define RELIGHT_ILLUM_HPP

#include "relight/raster.hpp"

namespace relight {

struct GammaParams {
    double gamma = 0.6;    // adjustment exponent, in (0,1]
    double s_floor = 1e-3; // illumination lower clamp; keeps division benign on black pixels
};

// Initial illumination: per-pixel max over the RGB channels.
ScalarField initial_illumination(const RgbImage& img);

// Per-pixel color-consistency lower bound (max channel)^(1/gamma), clamped
// below by s_floor. Recovering with any S >= this bound keeps every channel
// of the output inside [0,1].
ScalarField s_min_map(const RgbImage& img, const GammaParams& params);

struct RecoverResult {
    RgbImage image;
    long clamped_pixels = 0; // pixels clamped beyond fp tolerance; nonzero signals a solver bug
};

// Enhanced image R = I / S^gamma. S must lie in [s_floor, 1]. Output is
// clamped to [0,1]; pixels that needed clamping beyond 1e-6 are counted.
RecoverResult recover(const RgbImage& img, const ScalarField& S, const GammaParams& params);

// Per-pixel power S^gamma. All inputs must be strictly positive.
ScalarField gamma_map(const ScalarField& S, const GammaParams& params);

} // namespace relight

#endif
