#ifndef RELIGHT_IMAGE_IO_HPP
#define RELIGHT_IMAGE_IO_HPP

#include <string>

#include "relight/raster.hpp"

namespace relight {

// Reads an 8/16-bit PNG or a binary PPM (P6); channels are divided by the
// format's max value. No color management is applied. Throws
// std::runtime_error on unreadable files or unsupported formats.
RgbImage load_image(const std::string& path);

// Writes an 8-bit PNG or PPM depending on the file extension. Channels are
// scaled by 255 and rounded half up. Any channel outside [0,1] is an error.
void save_image(const RgbImage& img, const std::string& path);

// Writes two files: an 8-bit grayscale PNG at <stem>.png and a raw raster at
// <stem>.raw ("W H\n" header followed by little-endian 32-bit floats,
// row-major). Field values must be in [0,1].
void dump_scalar_field(const ScalarField& field, const std::string& path);

// Reads back a raw raster written by dump_scalar_field.
ScalarField load_scalar_raw(const std::string& path);

} // namespace relight

#endif
