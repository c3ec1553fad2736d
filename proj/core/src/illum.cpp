#include "relight/illum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relight {

ScalarField initial_illumination(const RgbImage& img) {
    ScalarField out(img.width, img.height);
    for (size_t p = 0; p < img.pixel_count(); ++p) {
        out.data[p] = std::max({img.data[p * 3], img.data[p * 3 + 1], img.data[p * 3 + 2]});
    }
    return out;
}

ScalarField s_min_map(const RgbImage& img, const GammaParams& params) {
    ScalarField out = initial_illumination(img);
    const double inv_gamma = 1.0 / params.gamma;
    for (double& v : out.data) {
        v = std::max(std::pow(v, inv_gamma), params.s_floor);
    }
    return out;
}

RecoverResult recover(const RgbImage& img, const ScalarField& S, const GammaParams& params) {
    if (S.width != img.width || S.height != img.height)
        throw std::invalid_argument("illumination dimensions do not match image");
    RecoverResult res;
    res.image = RgbImage(img.width, img.height);
    const double clamp_tol = 1e-6;
    for (size_t p = 0; p < img.pixel_count(); ++p) {
        const double denom = std::pow(S.data[p], params.gamma);
        bool clamped = false;
        for (int c = 0; c < 3; ++c) {
            double v = img.data[p * 3 + c] / denom;
            if (v > 1.0) {
                if (v > 1.0 + clamp_tol) clamped = true;
                v = 1.0;
            } else if (v < 0.0) {
                if (v < -clamp_tol) clamped = true;
                v = 0.0;
            }
            res.image.data[p * 3 + c] = v;
        }
        if (clamped) ++res.clamped_pixels;
    }
    return res;
}

ScalarField gamma_map(const ScalarField& S, const GammaParams& params) {
    ScalarField out(S.width, S.height);
    for (size_t i = 0; i < S.size(); ++i) {
        if (!(S.data[i] > 0.0))
            throw std::invalid_argument("gamma_map requires strictly positive values");
        out.data[i] = std::pow(S.data[i], params.gamma);
    }
    return out;
}

} // namespace relight
