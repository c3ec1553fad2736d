#include "relight/raster.hpp"

#include <cmath>
#include <stdexcept>

namespace relight {

RgbImage RgbImage::filled(int w, int h, double r, double g, double b) {
    RgbImage img(w, h);
    for (size_t p = 0; p < img.pixel_count(); ++p) {
        img.data[p * 3 + 0] = r;
        img.data[p * 3 + 1] = g;
        img.data[p * 3 + 2] = b;
    }
    return img;
}

namespace {

double srgb_to_linear(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

// CIE L* of an sRGB triple, D65 white (Yn = 1), scaled to [0,1].
double lab_l_of(double r, double g, double b) {
    const double y = 0.2126 * srgb_to_linear(r) + 0.7152 * srgb_to_linear(g) +
                     0.0722 * srgb_to_linear(b);
    const double t = 6.0 / 29.0;
    const double f = y > t * t * t ? std::cbrt(y) : y / (3.0 * t * t) + 4.0 / 29.0;
    return (116.0 * f - 16.0) / 100.0;
}

} // namespace

ScalarField luminance(const RgbImage& img, LuminanceSpace space) {
    ScalarField out(img.width, img.height);
    const size_t n = img.pixel_count();
    if (space == LuminanceSpace::yuv_y) {
        for (size_t p = 0; p < n; ++p) {
            out.data[p] = 0.299 * img.data[p * 3] + 0.587 * img.data[p * 3 + 1] +
                          0.114 * img.data[p * 3 + 2];
        }
    } else {
        for (size_t p = 0; p < n; ++p) {
            out.data[p] = lab_l_of(img.data[p * 3], img.data[p * 3 + 1], img.data[p * 3 + 2]);
        }
    }
    return out;
}

void check_image(const RgbImage& img) {
    if (img.width < 1 || img.height < 1)
        throw std::invalid_argument("image dimensions must be at least 1x1");
    if (img.data.size() != img.pixel_count() * 3)
        throw std::invalid_argument("image data length does not match dimensions");
    for (double v : img.data) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw std::invalid_argument("image channel value outside [0,1]");
    }
}

void check_video(const VideoSequence& video) {
    if (video.frames.empty())
        throw std::invalid_argument("video must contain at least one frame");
    const int w = video.frames.front().width;
    const int h = video.frames.front().height;
    for (const RgbImage& f : video.frames) {
        if (f.width != w || f.height != h)
            throw std::invalid_argument("video frames must share dimensions");
        check_image(f);
    }
}

} // namespace relight
