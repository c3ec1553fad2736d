#include "relight/image_io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "raw raster I/O assumes a little-endian host");

namespace relight {

namespace {

uint8_t to_byte(double v) {
    return static_cast<uint8_t>(std::floor(v * 255.0 + 0.5)); // round half up
}

bool has_suffix(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail_unreadable(const std::string& path) {
    throw std::runtime_error("unreadable file: " + path);
}

// ---- PPM (P6) ----

int ppm_next_token(std::FILE* f, char* buf, int cap) {
    int c = std::fgetc(f);
    while (c != EOF) {
        if (c == '#') { // comment to end of line
            while (c != EOF && c != '\n') c = std::fgetc(f);
        } else if (!std::isspace(c)) {
            break;
        }
        c = std::fgetc(f);
    }
    if (c == EOF) return 0;
    int n = 0;
    while (c != EOF && !std::isspace(c) && n < cap - 1) {
        buf[n++] = static_cast<char>(c);
        c = std::fgetc(f);
    }
    buf[n] = '\0';
    return n;
}

RgbImage load_ppm(std::FILE* f, const std::string& path) {
    char tok[32];
    long vals[3];
    for (int i = 0; i < 3; ++i) {
        if (!ppm_next_token(f, tok, sizeof tok)) fail_unreadable(path);
        char* end = nullptr;
        vals[i] = std::strtol(tok, &end, 10);
        if (end == tok || *end != '\0') fail_unreadable(path);
    }
    const long w = vals[0], h = vals[1], maxval = vals[2];
    if (w < 1 || h < 1)
        throw std::runtime_error("zero-dimension image: " + path);
    if (maxval < 1 || maxval > 65535)
        throw std::runtime_error("unsupported format: PPM maxval " + std::to_string(maxval));

    RgbImage img(static_cast<int>(w), static_cast<int>(h));
    const size_t samples = img.pixel_count() * 3;
    const int bytes_per_sample = maxval < 256 ? 1 : 2;
    std::vector<uint8_t> raw(samples * bytes_per_sample);
    if (std::fread(raw.data(), 1, raw.size(), f) != raw.size()) fail_unreadable(path);

    const double scale = 1.0 / static_cast<double>(maxval);
    for (size_t i = 0; i < samples; ++i) {
        unsigned v = bytes_per_sample == 1
                         ? raw[i]
                         : (static_cast<unsigned>(raw[i * 2]) << 8) | raw[i * 2 + 1];
        img.data[i] = static_cast<double>(v) * scale;
    }
    return img;
}

// ---- PNG ----

RgbImage load_png(std::FILE* f, const std::string& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("png init failed");
    }
    std::vector<std::vector<uint8_t>> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail_unreadable(path);
    }
    png_init_io(png, f);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    if (w == 0 || h == 0) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("zero-dimension image: " + path);
    }

    // Normalize everything to 8- or 16-bit RGB.
    const int color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int depth = png_get_bit_depth(png, info);
    const size_t rowbytes = png_get_rowbytes(png, info);
    rows.assign(h, std::vector<uint8_t>(rowbytes));
    std::vector<png_bytep> row_ptrs(h);
    for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = rows[y].data();
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    RgbImage img(static_cast<int>(w), static_cast<int>(h));
    if (depth == 8) {
        for (png_uint_32 y = 0; y < h; ++y)
            for (png_uint_32 x = 0; x < w; ++x)
                for (int c = 0; c < 3; ++c)
                    img.at(static_cast<int>(x), static_cast<int>(y), c) =
                        rows[y][x * 3 + c] / 255.0;
    } else if (depth == 16) {
        for (png_uint_32 y = 0; y < h; ++y)
            for (png_uint_32 x = 0; x < w; ++x)
                for (int c = 0; c < 3; ++c) {
                    const unsigned hi = rows[y][(x * 3 + c) * 2];
                    const unsigned lo = rows[y][(x * 3 + c) * 2 + 1];
                    img.at(static_cast<int>(x), static_cast<int>(y), c) =
                        static_cast<double>((hi << 8) | lo) / 65535.0;
                }
    } else {
        throw std::runtime_error("unsupported format: PNG bit depth " + std::to_string(depth));
    }
    return img;
}

void write_png(const std::string& path, int w, int h, int channels,
               const std::vector<uint8_t>& bytes) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("png init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("png write failed: " + path);
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> row_ptrs(h);
    for (int y = 0; y < h; ++y)
        row_ptrs[y] = const_cast<png_bytep>(bytes.data() + static_cast<size_t>(y) * w * channels);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace

RgbImage load_image(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) fail_unreadable(path);
    uint8_t magic[8] = {0};
    const size_t got = std::fread(magic, 1, sizeof magic, f.get());
    std::rewind(f.get());
    if (got >= 8 && png_sig_cmp(magic, 0, 8) == 0) return load_png(f.get(), path);
    if (got >= 2 && magic[0] == 'P' && magic[1] == '6') return load_ppm(f.get(), path);
    throw std::runtime_error("unsupported format: " + path);
}

void save_image(const RgbImage& img, const std::string& path) {
    if (img.width < 1 || img.height < 1)
        throw std::invalid_argument("zero-dimension image");
    for (double v : img.data) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("out-of-range channel value");
    }
    std::vector<uint8_t> bytes(img.pixel_count() * 3);
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = to_byte(img.data[i]);

    if (has_suffix(path, ".ppm")) {
        FilePtr f(std::fopen(path.c_str(), "wb"));
        if (!f) throw std::runtime_error("cannot open for writing: " + path);
        std::fprintf(f.get(), "P6\n%d %d\n255\n", img.width, img.height);
        if (std::fwrite(bytes.data(), 1, bytes.size(), f.get()) != bytes.size())
            throw std::runtime_error("write failed: " + path);
    } else if (has_suffix(path, ".png")) {
        write_png(path, img.width, img.height, 3, bytes);
    } else {
        throw std::runtime_error("unsupported format: " + path);
    }
}

void dump_scalar_field(const ScalarField& field, const std::string& path) {
    for (double v : field.data) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("out-of-range field value");
    }
    std::string stem = path;
    if (has_suffix(stem, ".png") || has_suffix(stem, ".raw")) stem.resize(stem.size() - 4);

    std::vector<uint8_t> bytes(field.size());
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = to_byte(field.data[i]);
    write_png(stem + ".png", field.width, field.height, 1, bytes);

    std::ofstream raw(stem + ".raw", std::ios::binary);
    if (!raw) throw std::runtime_error("cannot open for writing: " + stem + ".raw");
    raw << field.width << " " << field.height << "\n";
    std::vector<float> f32(field.data.begin(), field.data.end());
    raw.write(reinterpret_cast<const char*>(f32.data()),
              static_cast<std::streamsize>(f32.size() * sizeof(float)));
    if (!raw) throw std::runtime_error("write failed: " + stem + ".raw");
}

ScalarField load_scalar_raw(const std::string& path) {
    std::ifstream raw(path, std::ios::binary);
    if (!raw) fail_unreadable(path);
    int w = 0, h = 0;
    raw >> w >> h;
    raw.get(); // the single newline after the header
    if (!raw || w < 1 || h < 1) fail_unreadable(path);
    ScalarField field(w, h);
    std::vector<float> f32(field.size());
    raw.read(reinterpret_cast<char*>(f32.data()),
             static_cast<std::streamsize>(f32.size() * sizeof(float)));
    if (!raw) fail_unreadable(path);
    for (size_t i = 0; i < f32.size(); ++i) field.data[i] = f32[i];
    return field;
}

} // namespace relight
