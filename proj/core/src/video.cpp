#include "relight/video.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relight/illum.hpp"
#include "relight/rtv.hpp"

namespace relight {

KeyframeIndex extract_keyframes(const VideoSequence& video, const PropagationConfig& config) {
    check_video(video);
    KeyframeIndex keys;
    keys.indices.push_back(0);

    ScalarField ref = gaussian_convolve(luminance(video.frames[0], LuminanceSpace::lab_l),
                                        config.keyframe_blur_sigma);
    const double total = static_cast<double>(ref.size());
    for (size_t t = 1; t < video.frames.size(); ++t) {
        const ScalarField cur = gaussian_convolve(
            luminance(video.frames[t], LuminanceSpace::lab_l), config.keyframe_blur_sigma);
        long differing = 0;
        for (size_t i = 0; i < cur.size(); ++i) {
            if (std::abs(cur.data[i] - ref.data[i]) >= config.keyframe_ell) ++differing;
        }
        if (differing / total > config.keyframe_ratio) { // strictly over
            keys.indices.push_back(static_cast<int>(t));
            ref = cur;
        }
    }
    return keys;
}

IlluminationHistogram illumination_histogram(const ScalarField& S, int bins) {
    IlluminationHistogram hist;
    hist.width = S.width;
    hist.height = S.height;
    hist.bins = bins;
    hist.counts.assign(bins, 0);
    hist.members.assign(bins, {});
    hist.bin_of.resize(S.size());
    for (size_t i = 0; i < S.size(); ++i) {
        const int b = hist.bin_index(S.data[i]);
        hist.bin_of[i] = static_cast<uint8_t>(b);
        hist.counts[b]++;
        hist.members[b].push_back(static_cast<int>(i));
    }
    return hist;
}

namespace {

struct Window {
    int x0, x1, y0, y1; // inclusive
};

// N x N window centered at (cx, cy); for even N the extra cell goes to the
// positive side. Clamped to the frame.
Window window_around(int cx, int cy, int n, int w, int h) {
    const int left = (n - 1) / 2;
    const int right = n - 1 - left;
    return {std::max(cx - left, 0), std::min(cx + right, w - 1),
            std::max(cy - left, 0), std::min(cy + right, h - 1)};
}

int round_clamp(double v, int lo, int hi) {
    return std::clamp(static_cast<int>(std::llround(v)), lo, hi);
}

double parzen_kernel(double l_prev, double l_cur, double d) {
    const double delta = 255.0 * (l_prev - l_cur);
    return std::exp(-(delta * delta) / (2.0 * d * d));
}

} // namespace

double likelihood(int px, int py, int bin_i, const ScalarField& L_cur, const ScalarField& L_prev,
                  const IlluminationHistogram& hist, const FlowField& flow,
                  const PropagationConfig& config) {
    if (hist.counts[bin_i] == 0) return 0.0;
    const int w = hist.width, h = hist.height;
    const int ppx = round_clamp(px + flow.vx.at(px, py), 0, w - 1);
    const int ppy = round_clamp(py + flow.vy.at(px, py), 0, h - 1);
    const Window win = window_around(ppx, ppy, config.window_n, w, h);
    const double l_cur = L_cur.at(px, py);

    double sum = 0.0;
    for (int qy = win.y0; qy <= win.y1; ++qy) {
        for (int qx = win.x0; qx <= win.x1; ++qx) {
            const size_t q = static_cast<size_t>(qy) * w + qx;
            if (hist.bin_of[q] == bin_i)
                sum += parzen_kernel(L_prev.data[q], l_cur, config.parzen_d);
        }
    }
    return sum / static_cast<double>(hist.counts[bin_i]);
}

double prior(int ppx, int ppy, int bin_i, const IlluminationHistogram& hist,
             const PropagationConfig& config) {
    const int w = hist.width, h = hist.height;
    const Window win = window_around(ppx, ppy, config.window_n, w, h);
    double min_d2 = -1.0;
    for (int qy = win.y0; qy <= win.y1; ++qy) {
        for (int qx = win.x0; qx <= win.x1; ++qx) {
            const size_t q = static_cast<size_t>(qy) * w + qx;
            if (hist.bin_of[q] == bin_i) {
                const double d2 = static_cast<double>(qx - ppx) * (qx - ppx) +
                                  static_cast<double>(qy - ppy) * (qy - ppy);
                if (min_d2 < 0.0 || d2 < min_d2) min_d2 = d2;
            }
        }
    }
    if (min_d2 < 0.0) return 0.0;
    const double dist = std::max(std::sqrt(min_d2), config.min_distance_clamp);
    return 1.0 / std::sqrt(dist);
}

ScalarField propagate_illumination(const ScalarField& S_prev, const RgbImage& f_prev,
                                   const RgbImage& f_cur, const PropagationConfig& config,
                                   const GammaParams& gamma) {
    const FlowField flow = estimate_flow(luminance(f_cur, LuminanceSpace::yuv_y),
                                         luminance(f_prev, LuminanceSpace::yuv_y), FlowParams{});
    return propagate_illumination(S_prev, f_prev, f_cur, flow, config, gamma);
}

ScalarField propagate_illumination(const ScalarField& S_prev, const RgbImage& f_prev,
                                   const RgbImage& f_cur, const FlowField& flow,
                                   const PropagationConfig& config, const GammaParams& gamma) {
    const int w = f_cur.width, h = f_cur.height;
    if (S_prev.width != w || S_prev.height != h || f_prev.width != w || f_prev.height != h)
        throw std::invalid_argument("propagation inputs must share dimensions");

    const ScalarField L_prev = luminance(f_prev, LuminanceSpace::yuv_y);
    const ScalarField L_cur = luminance(f_cur, LuminanceSpace::yuv_y);
    const IlluminationHistogram hist = illumination_histogram(S_prev, config.bins);
    const ScalarField S_min = s_min_map(f_cur, gamma);
    const int bins = config.bins;

    ScalarField out(w, h);
    std::vector<double> like(bins), sum_s(bins), min_d2(bins);
    std::vector<long> cnt(bins);

    for (int py = 0; py < h; ++py) {
        for (int px = 0; px < w; ++px) {
            const int ppx = round_clamp(px + flow.vx.at(px, py), 0, w - 1);
            const int ppy = round_clamp(py + flow.vy.at(px, py), 0, h - 1);
            const Window win = window_around(ppx, ppy, config.window_n, w, h);
            const double l_cur = L_cur.at(px, py);

            std::fill(like.begin(), like.end(), 0.0);
            std::fill(sum_s.begin(), sum_s.end(), 0.0);
            std::fill(min_d2.begin(), min_d2.end(), -1.0);
            std::fill(cnt.begin(), cnt.end(), 0L);
            // Row-major accumulation keeps every per-bin partial sum in the
            // same order as the per-bin definition of the likelihood.
            for (int qy = win.y0; qy <= win.y1; ++qy) {
                for (int qx = win.x0; qx <= win.x1; ++qx) {
                    const size_t q = static_cast<size_t>(qy) * w + qx;
                    const int b = hist.bin_of[q];
                    like[b] += parzen_kernel(L_prev.data[q], l_cur, config.parzen_d);
                    sum_s[b] += S_prev.data[q];
                    cnt[b]++;
                    const double d2 = static_cast<double>(qx - ppx) * (qx - ppx) +
                                      static_cast<double>(qy - ppy) * (qy - ppy);
                    if (min_d2[b] < 0.0 || d2 < min_d2[b]) min_d2[b] = d2;
                }
            }

            int best = -1;
            double best_post = 0.0;
            for (int i = 0; i < bins; ++i) {
                if (hist.counts[i] == 0 || cnt[i] == 0) continue;
                const double dist = std::max(std::sqrt(min_d2[i]), config.min_distance_clamp);
                const double post =
                    (like[i] / static_cast<double>(hist.counts[i])) * (1.0 / std::sqrt(dist));
                if (post > best_post) {
                    best_post = post;
                    best = i;
                }
            }

            double value;
            if (best < 0) {
                value = sample_bilinear(S_prev, px + flow.vx.at(px, py), py + flow.vy.at(px, py));
            } else {
                value = sum_s[best] / static_cast<double>(cnt[best]);
            }
            out.at(px, py) = std::clamp(value, S_min.at(px, py), 1.0);
        }
    }
    return out;
}

VideoSequence temporal_denoise(const VideoSequence& video, const std::vector<FlowField>& flows,
                               double strength) {
    check_video(video);
    if (video.frames.size() > 1 && flows.size() + 1 < video.frames.size())
        throw std::invalid_argument("temporal_denoise needs one flow per frame transition");

    VideoSequence out;
    out.fps = video.fps;
    out.frames.push_back(video.frames[0]);
    for (size_t t = 1; t < video.frames.size(); ++t) {
        const RgbImage& in = video.frames[t];
        const RgbImage& prev = out.frames[t - 1];
        RgbImage blended(in.width, in.height);
        for (int c = 0; c < 3; ++c) {
            ScalarField plane(in.width, in.height);
            for (size_t p = 0; p < prev.pixel_count(); ++p) plane.data[p] = prev.data[p * 3 + c];
            const ScalarField warped = warp(plane, flows[t - 1]);
            for (size_t p = 0; p < in.pixel_count(); ++p)
                blended.data[p * 3 + c] =
                    (1.0 - strength) * in.data[p * 3 + c] + strength * warped.data[p];
        }
        out.frames.push_back(std::move(blended));
    }
    return out;
}

VideoSequence enhance_video(const VideoSequence& video, const SolverConfig& solver,
                            const JbuParams& jbu, const PropagationConfig& prop,
                            double denoise_strength) {
    check_video(video);
    const KeyframeIndex keys = extract_keyframes(video, prop);
    const size_t n = video.frames.size();

    std::vector<uint8_t> is_key(n, 0);
    for (int k : keys.indices) is_key[k] = 1;

    const bool denoising = denoise_strength > 0.0 && n > 1;
    std::vector<FlowField> flows; // flows[t-1] aligns frame t to t-1
    if (n > 1) flows.resize(n - 1);

    std::vector<ScalarField> lums(n);
    for (size_t t = 0; t < n; ++t) lums[t] = luminance(video.frames[t], LuminanceSpace::yuv_y);

    VideoSequence out;
    out.fps = video.fps;
    ScalarField S_prev;
    for (size_t t = 0; t < n; ++t) {
        ScalarField S_t;
        const bool need_flow = t > 0 && (!is_key[t] || denoising);
        if (need_flow) flows[t - 1] = estimate_flow(lums[t], lums[t - 1], FlowParams{});
        if (is_key[t]) {
            S_t = estimate_illumination_fast(video.frames[t], solver, jbu).S;
        } else {
            S_t = propagate_illumination(S_prev, video.frames[t - 1], video.frames[t], flows[t - 1],
                                         prop, solver.gamma);
        }
        out.frames.push_back(recover(video.frames[t], S_t, solver.gamma).image);
        S_prev = std::move(S_t);
    }

    if (denoising) out = temporal_denoise(out, flows, denoise_strength);
    return out;
}

} // namespace relight
