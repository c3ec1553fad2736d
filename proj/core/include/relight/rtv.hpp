#ifndef RELIGHT_RTV_HPP
#define RELIGHT_RTV_HPP

#include "relight/raster.hpp"

namespace relight {

struct RtvParams {
    double sigma = 3.0;     // Gaussian std-dev, pixels
    double epsilon = 1e-3;  // division-by-zero guard
    int window_radius = 7;  // 15x15 window for the energy telemetry
};

// Per-pixel weight rasters of the relative-total-variation measure. Entries
// are strictly positive and bounded by 1/epsilon.
struct RtvWeights {
    ScalarField ux, wx, uy, wy;
};

enum class Axis { x, y };

// Forward difference f(p+e_d) - f(p); the far boundary column/row is zero.
ScalarField forward_diff(const ScalarField& field, Axis axis);

// Separable Gaussian convolution, kernel truncated at radius ceil(3*sigma),
// normalized to sum 1, replicate-padded boundaries.
ScalarField gaussian_convolve(const ScalarField& field, double sigma);

// ux = G_sigma * (|G_sigma * dxS| + eps)^-1, wx = (|dxS| + eps)^-1, and the
// y-direction analogues.
RtvWeights rtv_weights(const ScalarField& S, const RtvParams& params);

// Windowed RTV energy: sum over p of sum_{q in N_p} [ux wx (dxS)^2 +
// uy wy (dyS)^2](q). Telemetry only; the solver folds the window factor
// into its smoothness weight.
double rtv_energy(const ScalarField& S, const RtvParams& params);

} // namespace relight

#endif
