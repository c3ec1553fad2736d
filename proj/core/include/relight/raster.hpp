#ifndef RELIGHT_RASTER_HPP
#define RELIGHT_RASTER_HPP

#include <cstddef>
#include <vector>

namespace relight {

// Three-channel raster, row-major, interleaved r,g,b. Channel values are
// normalized radiance/reflectance in [0,1].
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<double> data; // size = width * height * 3

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0.0) {}

    double& at(int x, int y, int c) { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
    double at(int x, int y, int c) const { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }

    static RgbImage filled(int w, int h, double r, double g, double b);
};

// Single-channel float raster. Houses illumination maps and luminance fields.
struct ScalarField {
    int width = 0;
    int height = 0;
    std::vector<double> data; // size = width * height

    ScalarField() = default;
    ScalarField(int w, int h, double v = 0.0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, v) {}

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }

    size_t size() const { return data.size(); }
    bool same_shape(const ScalarField& o) const { return width == o.width && height == o.height; }
};

// Ordered frame sequence; fps is carried as metadata only.
struct VideoSequence {
    std::vector<RgbImage> frames;
    double fps = 30.0;
};

enum class LuminanceSpace {
    yuv_y, // BT.601 luma: 0.299 r + 0.587 g + 0.114 b
    lab_l, // CIE L* from sRGB (D65), normalized by 100
};

ScalarField luminance(const RgbImage& img, LuminanceSpace space);

// Throws std::invalid_argument if the container invariants do not hold
// (finite [0,1] channels, consistent dimensions).
void check_image(const RgbImage& img);
void check_video(const VideoSequence& video);

} // namespace relight

#endif
