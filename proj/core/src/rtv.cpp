#include "relight/rtv.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace relight {

ScalarField forward_diff(const ScalarField& field, Axis axis) {
    const int w = field.width, h = field.height;
    ScalarField out(w, h);
    if (axis == Axis::x) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x + 1 < w; ++x)
                out.at(x, y) = field.at(x + 1, y) - field.at(x, y);
    } else {
        for (int y = 0; y + 1 < h; ++y)
            for (int x = 0; x < w; ++x)
                out.at(x, y) = field.at(x, y + 1) - field.at(x, y);
    }
    return out;
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    return k;
}

} // namespace

ScalarField gaussian_convolve(const ScalarField& field, double sigma) {
    const std::vector<double> k = gaussian_kernel(sigma);
    const int radius = static_cast<int>(k.size() / 2);
    const int w = field.width, h = field.height;

    ScalarField tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int xx = std::clamp(x + i, 0, w - 1);
                acc += k[i + radius] * field.at(xx, y);
            }
            tmp.at(x, y) = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int yy = std::clamp(y + i, 0, h - 1);
                acc += k[i + radius] * tmp.at(x, yy);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

namespace {

void direction_weights(const ScalarField& grad, double sigma, double eps,
                       ScalarField& u, ScalarField& w) {
    const size_t n = grad.size();
    w = ScalarField(grad.width, grad.height);
    for (size_t i = 0; i < n; ++i) w.data[i] = 1.0 / (std::abs(grad.data[i]) + eps);

    ScalarField smoothed = gaussian_convolve(grad, sigma);
    for (size_t i = 0; i < n; ++i) smoothed.data[i] = 1.0 / (std::abs(smoothed.data[i]) + eps);
    u = gaussian_convolve(smoothed, sigma);
}

} // namespace

RtvWeights rtv_weights(const ScalarField& S, const RtvParams& params) {
    RtvWeights weights;
    direction_weights(forward_diff(S, Axis::x), params.sigma, params.epsilon, weights.ux, weights.wx);
    direction_weights(forward_diff(S, Axis::y), params.sigma, params.epsilon, weights.uy, weights.wy);
    return weights;
}

double rtv_energy(const ScalarField& S, const RtvParams& params) {
    const RtvWeights weights = rtv_weights(S, params);
    const ScalarField dx = forward_diff(S, Axis::x);
    const ScalarField dy = forward_diff(S, Axis::y);
    const int w = S.width, h = S.height, r = params.window_radius;

    // Sum_{p} Sum_{q in N_p} t_q  ==  Sum_q t_q * |{p : q in N_p}|, and the
    // window is symmetric, so the multiplicity is the clamped window area at q.
    double energy = 0.0;
    for (int y = 0; y < h; ++y) {
        const double cy = std::min(y + r, h - 1) - std::max(y - r, 0) + 1;
        for (int x = 0; x < w; ++x) {
            const double cx = std::min(x + r, w - 1) - std::max(x - r, 0) + 1;
            const double t = weights.ux.at(x, y) * weights.wx.at(x, y) * dx.at(x, y) * dx.at(x, y) +
                             weights.uy.at(x, y) * weights.wy.at(x, y) * dy.at(x, y) * dy.at(x, y);
            energy += cx * cy * t;
        }
    }
    return energy;
}

} // namespace relight
