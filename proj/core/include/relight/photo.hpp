#ifndef RELIGHT_PHOTO_HPP
#define RELIGHT_PHOTO_HPP

#include "relight/multiscale.hpp"

namespace relight {

enum class EnhanceMode { fast, naive };

// End-to-end photo enhancement: illumination estimation (full-resolution for
// naive, downsample+JBU for fast) followed by recovery with the Gamma
// adjustment.
EnhanceResult enhance_photo(const RgbImage& img, const SolverConfig& solver,
                            const JbuParams& jbu, EnhanceMode mode = EnhanceMode::fast);

// Color-constancy variant: the estimation runs independently on each RGB
// channel and each channel is recovered with its own illumination. When
// report is non-null it receives merged telemetry (max iterations, summed
// counts).
RgbImage enhance_per_channel(const RgbImage& img, const SolverConfig& solver,
                             const JbuParams& jbu, SolveReport* report = nullptr);

// Overexposure correction by inversion: 1 - enhance(1 - I).
RgbImage correct_overexposure(const RgbImage& img, const SolverConfig& solver,
                              const JbuParams& jbu, SolveReport* report = nullptr);

} // namespace relight

#endif
