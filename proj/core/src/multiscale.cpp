#include "relight/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace relight {

namespace {

// Per-output-pixel coverage of input pixels along one axis: input span
// [o*scale, (o+1)*scale) split into (index, overlap length) pairs.
struct Tap {
    int index;
    double weight;
};

std::vector<std::vector<Tap>> box_taps(int in_size, int out_size) {
    const double scale = static_cast<double>(in_size) / out_size;
    std::vector<std::vector<Tap>> taps(out_size);
    for (int o = 0; o < out_size; ++o) {
        const double lo = o * scale;
        const double hi = (o + 1) * scale;
        int i0 = static_cast<int>(std::floor(lo));
        int i1 = static_cast<int>(std::ceil(hi));
        i1 = std::min(i1, in_size);
        for (int i = i0; i < i1; ++i) {
            const double overlap = std::min(hi, static_cast<double>(i + 1)) -
                                   std::max(lo, static_cast<double>(i));
            if (overlap > 0.0) taps[o].push_back({i, overlap});
        }
    }
    return taps;
}

} // namespace

RgbImage downsample_max_dim(const RgbImage& img, int max_dim) {
    const int larger = std::max(img.width, img.height);
    if (larger <= max_dim) return img;
    const double scale = static_cast<double>(max_dim) / larger;
    int out_w, out_h;
    if (img.width >= img.height) {
        out_w = max_dim;
        out_h = std::max(1, static_cast<int>(std::lround(img.height * scale)));
    } else {
        out_h = max_dim;
        out_w = std::max(1, static_cast<int>(std::lround(img.width * scale)));
    }

    const auto tx = box_taps(img.width, out_w);
    const auto ty = box_taps(img.height, out_h);

    // Horizontal pass, then vertical.
    RgbImage tmp(out_w, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int ox = 0; ox < out_w; ++ox) {
            double acc[3] = {0, 0, 0}, wsum = 0.0;
            for (const Tap& t : tx[ox]) {
                for (int c = 0; c < 3; ++c) acc[c] += t.weight * img.at(t.index, y, c);
                wsum += t.weight;
            }
            for (int c = 0; c < 3; ++c) tmp.at(ox, y, c) = acc[c] / wsum;
        }
    }
    RgbImage out(out_w, out_h);
    for (int oy = 0; oy < out_h; ++oy) {
        for (int ox = 0; ox < out_w; ++ox) {
            double acc[3] = {0, 0, 0}, wsum = 0.0;
            for (const Tap& t : ty[oy]) {
                for (int c = 0; c < 3; ++c) acc[c] += t.weight * tmp.at(ox, t.index, c);
                wsum += t.weight;
            }
            for (int c = 0; c < 3; ++c) out.at(ox, oy, c) = acc[c] / wsum;
        }
    }
    return out;
}

ScalarField joint_bilateral_upsample(const ScalarField& S_low, const ScalarField& guide_full,
                                     const JbuParams& params) {
    const int lw = S_low.width, lh = S_low.height;
    const int fw = guide_full.width, fh = guide_full.height;
    const double scale_x = static_cast<double>(lw) / fw;
    const double scale_y = static_cast<double>(lh) / fh;
    const int r = params.window_radius;
    const double inv_2sd2 = 1.0 / (2.0 * params.sigma_d * params.sigma_d);
    const double inv_2sr2 = 1.0 / (2.0 * params.sigma_r * params.sigma_r);

    // Full-res pixel nearest to each low-res sample, per axis.
    std::vector<int> full_x(lw), full_y(lh);
    for (int i = 0; i < lw; ++i)
        full_x[i] = std::clamp(static_cast<int>(std::llround((i + 0.5) / scale_x - 0.5)), 0, fw - 1);
    for (int i = 0; i < lh; ++i)
        full_y[i] = std::clamp(static_cast<int>(std::llround((i + 0.5) / scale_y - 0.5)), 0, fh - 1);

    ScalarField out(fw, fh);
    for (int y = 0; y < fh; ++y) {
        const double py = (y + 0.5) * scale_y - 0.5;
        const int cy = std::clamp(static_cast<int>(std::llround(py)), 0, lh - 1);
        const int y0 = std::max(cy - r, 0), y1 = std::min(cy + r, lh - 1);
        for (int x = 0; x < fw; ++x) {
            const double px = (x + 0.5) * scale_x - 0.5;
            const int cx = std::clamp(static_cast<int>(std::llround(px)), 0, lw - 1);
            const int x0 = std::max(cx - r, 0), x1 = std::min(cx + r, lw - 1);
            const double guide_p = guide_full.at(x, y);

            double acc = 0.0, z = 0.0;
            for (int qy = y0; qy <= y1; ++qy) {
                const double dy = py - qy;
                const double fy = std::exp(-dy * dy * inv_2sd2);
                for (int qx = x0; qx <= x1; ++qx) {
                    const double dx = px - qx;
                    const double f = fy * std::exp(-dx * dx * inv_2sd2);
                    const double dg = guide_p - guide_full.at(full_x[qx], full_y[qy]);
                    const double g = std::exp(-dg * dg * inv_2sr2);
                    const double w = f * g;
                    acc += w * S_low.at(qx, qy);
                    z += w;
                }
            }
            out.at(x, y) = acc / z;
        }
    }
    return out;
}

IlluminationResult estimate_illumination_fast(const RgbImage& img, const SolverConfig& solver,
                                              const JbuParams& jbu) {
    if (std::max(img.width, img.height) <= jbu.max_dim)
        return estimate_illumination(img, solver);

    const RgbImage low = downsample_max_dim(img, jbu.max_dim);
    IlluminationResult est = estimate_illumination(low, solver);
    const ScalarField guide = initial_illumination(img);
    ScalarField S_full = joint_bilateral_upsample(est.S, guide, jbu);
    est.S = project_box(S_full, s_min_map(img, solver.gamma));
    return est;
}

EnhanceResult enhance_fast(const RgbImage& img, const SolverConfig& solver, const JbuParams& jbu) {
    IlluminationResult est = estimate_illumination_fast(img, solver, jbu);
    RecoverResult rec = recover(img, est.S, solver.gamma);
    est.report.clamped_pixels = rec.clamped_pixels;
    return {std::move(rec.image), std::move(est.S), std::move(est.report)};
}

} // namespace relight
