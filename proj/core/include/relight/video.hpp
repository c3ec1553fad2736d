#ifndef RELIGHT_VIDEO_HPP
#define RELIGHT_VIDEO_HPP

#include <vector>

#include "relight/flow.hpp"
#include "relight/multiscale.hpp"
#include "relight/raster.hpp"
#include "relight/solver.hpp"

namespace relight {

struct KeyframeIndex {
    std::vector<int> indices; // strictly increasing, first element 0
};

struct PropagationConfig {
    int window_n = 30;                // side length of the search window Psi
    double parzen_d = 5.0;            // Parzen kernel width, 8-bit luminance units
    int bins = 16;
    double keyframe_ell = 0.1;        // normalized luminance difference threshold
    double keyframe_ratio = 0.3;      // a frame differing on strictly more than
                                      // this fraction of pixels starts a keyframe
    double keyframe_blur_sigma = 2.0;
    double min_distance_clamp = 1.0;  // lower clamp on the prior distance
};

// 16-bin histogram over [0,1] (last bin closed at 1.0) with per-bin pixel
// membership of the source field.
struct IlluminationHistogram {
    int width = 0, height = 0;
    int bins = 16;
    std::vector<long> counts;
    std::vector<std::vector<int>> members; // row-major pixel indices per bin
    std::vector<uint8_t> bin_of;           // per-pixel bin index

    int bin_index(double v) const {
        const int b = static_cast<int>(v * bins);
        return b >= bins ? bins - 1 : b;
    }
};

// Frame 0 plus every frame whose blurred Lab-L luminance differs from the
// previous keyframe by at least keyframe_ell on strictly more than
// keyframe_ratio of the pixels.
KeyframeIndex extract_keyframes(const VideoSequence& video, const PropagationConfig& config);

IlluminationHistogram illumination_histogram(const ScalarField& S, int bins = 16);

// Parzen likelihood that pixel p of the current frame belongs to bin_i of
// the previous frame's illumination histogram: window members of the bin
// around p' = p + v_p, kernel on the 8-bit luminance difference. Zero for
// empty bins.
double likelihood(int px, int py, int bin_i, const ScalarField& L_cur, const ScalarField& L_prev,
                  const IlluminationHistogram& hist, const FlowField& flow,
                  const PropagationConfig& config);

// Spatial-proximity prior 1/sqrt(D) with D the clamped minimum distance from
// p' to a window member of the bin; zero when the bin has no member there.
double prior(int ppx, int ppy, int bin_i, const IlluminationHistogram& hist,
             const PropagationConfig& config);

// Per-pixel MAP bin choice (ties toward the lower index); the propagated
// value is the windowed mean of the winning bin's members, or the warped
// previous illumination when every posterior is zero. Clamped to the current
// frame's box.
ScalarField propagate_illumination(const ScalarField& S_prev, const RgbImage& f_prev,
                                   const RgbImage& f_cur, const PropagationConfig& config,
                                   const GammaParams& gamma = GammaParams{});
ScalarField propagate_illumination(const ScalarField& S_prev, const RgbImage& f_prev,
                                   const RgbImage& f_cur, const FlowField& flow,
                                   const PropagationConfig& config,
                                   const GammaParams& gamma = GammaParams{});

// Motion-compensated exponential blend: out_t = (1-s) in_t + s warp(out_{t-1}).
// flows[t-1] aligns frame t to frame t-1. Stands in for a full video
// denoiser; strength 0 disables.
VideoSequence temporal_denoise(const VideoSequence& video, const std::vector<FlowField>& flows,
                               double strength);

// Keyframe extraction, per-keyframe illumination estimation (fast path),
// forward propagation, recovery, optional temporal denoise.
VideoSequence enhance_video(const VideoSequence& video, const SolverConfig& solver,
                            const JbuParams& jbu, const PropagationConfig& prop,
                            double denoise_strength);

} // namespace relight

#endif
