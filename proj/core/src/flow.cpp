#include "relight/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace relight {

double sample_bilinear(const ScalarField& field, double x, double y) {
    const int w = field.width, h = field.height;
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    int x0 = std::min(static_cast<int>(std::floor(x)), w - 2 >= 0 ? w - 2 : 0);
    int y0 = std::min(static_cast<int>(std::floor(y)), h - 2 >= 0 ? h - 2 : 0);
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double tx = x - x0;
    const double ty = y - y0;
    const double top = (1.0 - tx) * field.at(x0, y0) + tx * field.at(x1, y0);
    const double bot = (1.0 - tx) * field.at(x0, y1) + tx * field.at(x1, y1);
    return (1.0 - ty) * top + ty * bot;
}

ScalarField warp(const ScalarField& field, const FlowField& flow) {
    if (flow.width() != field.width || flow.height() != field.height)
        throw std::invalid_argument("flow dimensions do not match field");
    ScalarField out(field.width, field.height);
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x)
            out.at(x, y) = sample_bilinear(field, x + flow.vx.at(x, y), y + flow.vy.at(x, y));
    return out;
}

namespace {

// Area-average 2x reduction (odd sizes keep the trailing partial row/column).
ScalarField halve(const ScalarField& in) {
    const int w = std::max(1, (in.width + 1) / 2);
    const int h = std::max(1, (in.height + 1) / 2);
    ScalarField out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            int n = 0;
            for (int dy = 0; dy < 2; ++dy) {
                for (int dx = 0; dx < 2; ++dx) {
                    const int sx = 2 * x + dx, sy = 2 * y + dy;
                    if (sx < in.width && sy < in.height) {
                        acc += in.at(sx, sy);
                        ++n;
                    }
                }
            }
            out.at(x, y) = acc / n;
        }
    }
    return out;
}

ScalarField resize_bilinear(const ScalarField& in, int w, int h) {
    ScalarField out(w, h);
    const double sx = static_cast<double>(in.width) / w;
    const double sy = static_cast<double>(in.height) / h;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.at(x, y) = sample_bilinear(in, (x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5);
    return out;
}

ScalarField central_diff(const ScalarField& f, bool horizontal) {
    const int w = f.width, h = f.height;
    ScalarField out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (horizontal) {
                const int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
                out.at(x, y) = (f.at(xp, y) - f.at(xm, y)) / (xp - xm > 0 ? xp - xm : 1);
            } else {
                const int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
                out.at(x, y) = (f.at(x, yp) - f.at(x, ym)) / (yp - ym > 0 ? yp - ym : 1);
            }
        }
    }
    return out;
}

// Weighted 8-neighbor average from the classic Horn-Schunck scheme.
ScalarField hs_average(const ScalarField& f) {
    const int w = f.width, h = f.height;
    ScalarField out(w, h);
    auto at = [&](int x, int y) {
        return f.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double sides = at(x - 1, y) + at(x + 1, y) + at(x, y - 1) + at(x, y + 1);
            const double corners =
                at(x - 1, y - 1) + at(x + 1, y - 1) + at(x - 1, y + 1) + at(x + 1, y + 1);
            out.at(x, y) = sides / 6.0 + corners / 12.0;
        }
    }
    return out;
}

// One pyramid level: solve for the flow increment around the current flow
// using warped brightness constancy, Jacobi iterations.
void hs_level(const ScalarField& cur, const ScalarField& prev, const FlowParams& params,
              ScalarField& u, ScalarField& v) {
    const int w = cur.width, h = cur.height;
    FlowField current;
    current.vx = u;
    current.vy = v;
    const ScalarField prev_w = warp(prev, current);

    const ScalarField gx_prev = central_diff(prev_w, true);
    const ScalarField gy_prev = central_diff(prev_w, false);
    const ScalarField gx_cur = central_diff(cur, true);
    const ScalarField gy_cur = central_diff(cur, false);

    const size_t n = cur.size();
    ScalarField Ix(w, h), Iy(w, h), It(w, h);
    for (size_t i = 0; i < n; ++i) {
        Ix.data[i] = 0.5 * (gx_prev.data[i] + gx_cur.data[i]);
        Iy.data[i] = 0.5 * (gy_prev.data[i] + gy_cur.data[i]);
        It.data[i] = prev_w.data[i] - cur.data[i];
    }

    const double alpha2 = params.alpha * params.alpha;
    ScalarField du(w, h, 0.0), dv(w, h, 0.0);
    for (int it = 0; it < params.iterations; ++it) {
        const ScalarField du_bar = hs_average(du);
        const ScalarField dv_bar = hs_average(dv);
        for (size_t i = 0; i < n; ++i) {
            const double num = Ix.data[i] * du_bar.data[i] + Iy.data[i] * dv_bar.data[i] + It.data[i];
            const double den = alpha2 + Ix.data[i] * Ix.data[i] + Iy.data[i] * Iy.data[i];
            du.data[i] = du_bar.data[i] - Ix.data[i] * num / den;
            dv.data[i] = dv_bar.data[i] - Iy.data[i] * num / den;
        }
    }
    for (size_t i = 0; i < n; ++i) {
        u.data[i] += du.data[i];
        v.data[i] += dv.data[i];
    }
}

} // namespace

FlowField estimate_flow(const ScalarField& f_cur, const ScalarField& f_prev,
                        const FlowParams& params) {
    if (!f_cur.same_shape(f_prev))
        throw std::invalid_argument("flow input dimensions do not match");

    // The classic scheme operates on 8-bit intensities; scale up so the
    // default alpha keeps its usual meaning.
    ScalarField cur = f_cur, prev = f_prev;
    for (double& v : cur.data) v *= 255.0;
    for (double& v : prev.data) v *= 255.0;

    std::vector<ScalarField> pyr_cur{cur}, pyr_prev{prev};
    for (int l = 1; l < params.pyramid_levels; ++l) {
        if (pyr_cur.back().width <= 4 || pyr_cur.back().height <= 4) break;
        pyr_cur.push_back(halve(pyr_cur.back()));
        pyr_prev.push_back(halve(pyr_prev.back()));
    }

    const int levels = static_cast<int>(pyr_cur.size());
    ScalarField u(pyr_cur.back().width, pyr_cur.back().height, 0.0);
    ScalarField v(pyr_cur.back().width, pyr_cur.back().height, 0.0);
    for (int l = levels - 1; l >= 0; --l) {
        if (l < levels - 1) {
            const int w = pyr_cur[l].width, h = pyr_cur[l].height;
            const double rx = static_cast<double>(w) / u.width;
            const double ry = static_cast<double>(h) / u.height;
            u = resize_bilinear(u, w, h);
            v = resize_bilinear(v, w, h);
            for (double& d : u.data) d *= rx;
            for (double& d : v.data) d *= ry;
        }
        hs_level(pyr_cur[l], pyr_prev[l], params, u, v);
    }

    FlowField flow(f_cur.width, f_cur.height);
    flow.vx = std::move(u);
    flow.vy = std::move(v);
    return flow;
}

} // namespace relight
