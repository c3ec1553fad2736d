#ifndef RELIGHT_MULTISCALE_HPP
#define RELIGHT_MULTISCALE_HPP

#include "relight/illum.hpp"
#include "relight/raster.hpp"
#include "relight/solver.hpp"

namespace relight {

struct JbuParams {
    double sigma_d = 0.5; // spatial kernel std-dev, low-res pixels
    double sigma_r = 0.1; // range kernel std-dev, illumination units
    int window_radius = 2;
    int max_dim = 400;    // downsample target for the larger dimension
};

// Area-average resampling so the larger dimension equals max_dim; inputs
// already small enough are returned unchanged.
RgbImage downsample_max_dim(const RgbImage& img, int max_dim);

// Full-resolution illumination from the low-res solution S_low, guided by
// the full-res initial illumination: each output pixel is a normalized sum
// of low-res samples weighted by a spatial Gaussian on low-res distance and
// a range Gaussian on guide differences.
ScalarField joint_bilateral_upsample(const ScalarField& S_low, const ScalarField& guide_full,
                                     const JbuParams& params);

// Low-res illumination estimation upsampled with JBU and projected to the
// full-res box. Falls back to the full-resolution solve when no downsampling
// is needed.
IlluminationResult estimate_illumination_fast(const RgbImage& img, const SolverConfig& solver,
                                              const JbuParams& jbu);

struct EnhanceResult {
    RgbImage image;
    ScalarField S;
    SolveReport report;
};

// Downsample, solve, upsample, project, recover.
EnhanceResult enhance_fast(const RgbImage& img, const SolverConfig& solver, const JbuParams& jbu);

} // namespace relight

#endif
