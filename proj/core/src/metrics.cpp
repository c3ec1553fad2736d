#include "relight/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relight {

double discrete_entropy(const RgbImage& img) {
    const ScalarField lum = luminance(img, LuminanceSpace::yuv_y);
    long hist[256] = {0};
    for (double v : lum.data) {
        const int level = std::clamp(static_cast<int>(std::floor(v * 255.0 + 0.5)), 0, 255);
        hist[level]++;
    }
    const double total = static_cast<double>(lum.size());
    double entropy = 0.0;
    for (long c : hist) {
        if (c == 0) continue;
        const double p = c / total;
        entropy -= p * std::log2(p);
    }
    return entropy;
}

double psnr(const RgbImage& a, const RgbImage& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("psnr inputs must share dimensions");
    double mse = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.data.size());
    if (mse == 0.0) return 99.0;
    return std::min(99.0, 10.0 * std::log10(1.0 / mse));
}

double mean_luminance(const RgbImage& img) {
    const ScalarField lum = luminance(img, LuminanceSpace::yuv_y);
    double sum = 0.0;
    for (double v : lum.data) sum += v;
    return sum / static_cast<double>(lum.size());
}

} // namespace relight
