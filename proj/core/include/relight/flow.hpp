#ifndef RELIGHT_FLOW_HPP
#define RELIGHT_FLOW_HPP

#include "relight/raster.hpp"

namespace relight {

// Dense per-pixel displacement from the current frame to the previous one:
// f_cur(p) ~ f_prev(p + v_p).
struct FlowField {
    ScalarField vx, vy;

    FlowField() = default;
    FlowField(int w, int h) : vx(w, h, 0.0), vy(w, h, 0.0) {}
    int width() const { return vx.width; }
    int height() const { return vx.height; }
};

struct FlowParams {
    double alpha = 10.0;    // smoothness weight (classic Horn-Schunck scale,
                            // luminance treated as 8-bit internally)
    int iterations = 100;   // Jacobi updates per pyramid level
    int pyramid_levels = 3; // coarse-to-fine, factor 2
};

// Pyramidal Horn-Schunck: brightness constancy plus quadratic smoothness,
// solved coarse-to-fine with bilinear warping between levels.
FlowField estimate_flow(const ScalarField& f_cur, const ScalarField& f_prev,
                        const FlowParams& params);

// output(p) = bilinear sample of field at p + v_p; out-of-bounds coordinates
// clamp to the border.
ScalarField warp(const ScalarField& field, const FlowField& flow);

// Bilinear sample with border clamp (shared by warp and the propagation
// fallback).
double sample_bilinear(const ScalarField& field, double x, double y);

} // namespace relight

#endif
