#include "relight/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "amg.hpp"

namespace relight {

PairMasks flat_edge_masks(const ScalarField& I_lum, double tau) {
    const int w = I_lum.width, h = I_lum.height;
    PairMasks masks;
    masks.width = w;
    masks.height = h;
    const size_t n = I_lum.size();
    masks.flat_x.assign(n, 0);
    masks.flat_y.assign(n, 0);
    masks.edge_x.assign(n, 0);
    masks.edge_y.assign(n, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x + 1 < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            const bool flat = std::abs(I_lum.at(x + 1, y) - I_lum.at(x, y)) <= tau;
            masks.flat_x[i] = flat;
            masks.edge_x[i] = !flat;
        }
    }
    for (int y = 0; y + 1 < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            const bool flat = std::abs(I_lum.at(x, y + 1) - I_lum.at(x, y)) <= tau;
            masks.flat_y[i] = flat;
            masks.edge_y[i] = !flat;
        }
    }
    return masks;
}

void GridSystem::apply(const double* x, double* y) const {
    const int w = width, h = height;
    for (int row = 0; row < h; ++row) {
        const size_t base = static_cast<size_t>(row) * w;
        for (int col = 0; col < w; ++col) {
            const size_t i = base + col;
            const double v = x[i];
            double acc = v;
            if (col + 1 < w) acc += cx.data[i] * (v - x[i + 1]);
            if (col > 0) acc += cx.data[i - 1] * (v - x[i - 1]);
            if (row + 1 < h) acc += cy.data[i] * (v - x[i + w]);
            if (row > 0) acc += cy.data[i - w] * (v - x[i - w]);
            y[i] = acc;
        }
    }
}

std::vector<double> GridSystem::diagonal() const {
    const int w = width, h = height;
    std::vector<double> d(static_cast<size_t>(w) * h);
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const size_t i = static_cast<size_t>(row) * w + col;
            double acc = 1.0;
            if (col + 1 < w) acc += cx.data[i];
            if (col > 0) acc += cx.data[i - 1];
            if (row + 1 < h) acc += cy.data[i];
            if (row > 0) acc += cy.data[i - w];
            d[i] = acc;
        }
    }
    return d;
}

std::vector<std::vector<double>> GridSystem::dense() const {
    const size_t n = static_cast<size_t>(width) * height;
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    std::vector<double> unit(n, 0.0), col(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
        unit[j] = 1.0;
        apply(unit.data(), col.data());
        for (size_t i = 0; i < n; ++i) A[i][j] = col[i];
        unit[j] = 0.0;
    }
    return A;
}

GridSystem assemble_system(const ScalarField& S_init, const RtvWeights& weights,
                           const PairMasks& masks, const SolverConfig& config) {
    const int w = S_init.width, h = S_init.height;
    GridSystem sys;
    sys.width = w;
    sys.height = h;
    sys.cx = ScalarField(w, h, 0.0);
    sys.cy = ScalarField(w, h, 0.0);
    sys.rhs = S_init;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x + 1 < w) {
                double a = weights.ux.at(x, y) * weights.wx.at(x, y);
                if (!(a > 0.0)) throw std::runtime_error("nonpositive smoothness weight");
                if (masks.flat(Axis::x, x, y)) a *= config.w_flat;
                sys.cx.at(x, y) = config.lambda * a;
            }
            if (y + 1 < h) {
                double a = weights.uy.at(x, y) * weights.wy.at(x, y);
                if (!(a > 0.0)) throw std::runtime_error("nonpositive smoothness weight");
                if (masks.flat(Axis::y, x, y)) a *= config.w_flat;
                sys.cy.at(x, y) = config.lambda * a;
            }
        }
    }
    return sys;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

amg::Csr to_csr(const GridSystem& sys) {
    const int w = sys.width, h = sys.height;
    const int n = w * h;
    amg::Csr A;
    A.n = n;
    A.ptr.resize(n + 1, 0);
    A.col.reserve(static_cast<size_t>(n) * 5);
    A.val.reserve(static_cast<size_t>(n) * 5);
    const std::vector<double> diag = sys.diagonal();
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const int i = row * w + col;
            if (row > 0) {
                A.col.push_back(i - w);
                A.val.push_back(-sys.cy.data[i - w]);
            }
            if (col > 0) {
                A.col.push_back(i - 1);
                A.val.push_back(-sys.cx.data[i - 1]);
            }
            A.col.push_back(i);
            A.val.push_back(diag[i]);
            if (col + 1 < w) {
                A.col.push_back(i + 1);
                A.val.push_back(-sys.cx.data[i]);
            }
            if (row + 1 < h) {
                A.col.push_back(i + w);
                A.val.push_back(-sys.cy.data[i]);
            }
            A.ptr[i + 1] = static_cast<int>(A.col.size());
        }
    }
    return A;
}

} // namespace

CgResult solve_quadratic(const GridSystem& system, const ScalarField& warm_start,
                         double tol, int max_iter) {
    const size_t n = static_cast<size_t>(system.width) * system.height;
    CgResult res;
    res.x = warm_start;

    const double b_norm = std::sqrt(dot(system.rhs.data, system.rhs.data));
    if (b_norm == 0.0) {
        res.x = ScalarField(system.width, system.height, 0.0);
        return res;
    }

    const amg::Preconditioner precond(to_csr(system));
    std::vector<double> r(n), z(n), p(n), Ap(n);
    system.apply(res.x.data.data(), Ap.data());
    for (size_t i = 0; i < n; ++i) r[i] = system.rhs.data[i] - Ap[i];
    precond.apply(r, z);
    p = z;
    double rz = dot(r, z);
    double r_norm = std::sqrt(dot(r, r));

    int it = 0;
    while (r_norm > tol * b_norm) {
        if (it >= max_iter) {
            std::ostringstream msg;
            msg << "conjugate gradient failed to reach tol " << tol << " in " << max_iter
                << " iterations (relative residual " << r_norm / b_norm << ")";
            throw std::runtime_error(msg.str());
        }
        system.apply(p.data(), Ap.data());
        const double alpha = rz / dot(p, Ap);
        for (size_t i = 0; i < n; ++i) res.x.data[i] += alpha * p[i];
        for (size_t i = 0; i < n; ++i) r[i] -= alpha * Ap[i];
        r_norm = std::sqrt(dot(r, r));
        precond.apply(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        rz = rz_new;
        ++it;
    }
    res.iterations = it;
    res.rel_residual = r_norm / b_norm;
    return res;
}

ScalarField project_box(const ScalarField& S, const ScalarField& S_min) {
    ScalarField out(S.width, S.height);
    for (size_t i = 0; i < S.size(); ++i) {
        if (S_min.data[i] > 1.0)
            throw std::invalid_argument("box lower bound exceeds 1");
        out.data[i] = std::clamp(S.data[i], S_min.data[i], 1.0);
    }
    return out;
}

namespace {

double pair_ratio(double Ip, double Iq, double Sp, double Sq) {
    return (Iq / Sq - Ip / Sp) / (Iq - Ip);
}

struct SweepContext {
    ScalarField& S;
    const ScalarField& I;
    const ScalarField& S_min;
    const PairMasks& masks;
    const SolverConfig& config;
    bool changed = false;
};

// Flat pair: both endpoints move to the clamped mean.
void handle_flat(SweepContext& ctx, int px, int py, int qx, int qy) {
    double& Sp = ctx.S.at(px, py);
    double& Sq = ctx.S.at(qx, qy);
    const double m = 0.5 * (Sp + Sq);
    const double np = std::clamp(m, ctx.S_min.at(px, py), 1.0);
    const double nq = std::clamp(m, ctx.S_min.at(qx, qy), 1.0);
    if (np != Sp || nq != Sq) ctx.changed = true;
    Sp = np;
    Sq = nq;
}

// Edge pair: the movable endpoint is bisected toward the anchor until the
// enhancement ratio clears the target (the ratio is monotone along that path
// and reaches 1/S_anchor >= 1 at equality, so the target is reachable unless
// the box binds). Violations are judged against 1 - delta_slack but the
// bisection aims at ratio 1, so a satisfied pair keeps a slack cushion
// against later moves of its neighbors.
void handle_edge(SweepContext& ctx, int px, int py, int qx, int qy, bool move_q) {
    double& Sp = ctx.S.at(px, py);
    double& Sq = ctx.S.at(qx, qy);
    const double Ip = ctx.I.at(px, py), Iq = ctx.I.at(qx, qy);
    if (pair_ratio(Ip, Iq, Sp, Sq) >= 1.0 - ctx.config.delta_slack) return;
    const double target = 1.0;

    double& movable = move_q ? Sq : Sp;
    const double anchor = move_q ? Sp : Sq;
    const double start = movable;
    const double lo_bound = move_q ? ctx.S_min.at(qx, qy) : ctx.S_min.at(px, py);

    double t_lo = 0.0, t_hi = 1.0;
    for (int step = 0; step < 30 && t_hi - t_lo > 1e-12; ++step) {
        const double t = 0.5 * (t_lo + t_hi);
        const double v = start + t * (anchor - start);
        const double r = move_q ? pair_ratio(Ip, Iq, Sp, v) : pair_ratio(Ip, Iq, v, Sq);
        if (r >= target)
            t_hi = t;
        else
            t_lo = t;
    }
    const double v = std::clamp(start + t_hi * (anchor - start), lo_bound, 1.0);
    if (v != movable) ctx.changed = true;
    movable = v;
}

} // namespace

ProjectionResult enforce_detail_consistency(const ScalarField& S, const ScalarField& I_lum,
                                            const ScalarField& S_min, const PairMasks& masks,
                                            const SolverConfig& config) {
    ProjectionResult res;
    res.S = S;
    const int w = S.width, h = S.height;
    SweepContext ctx{res.S, I_lum, S_min, masks, config};

    // Each pass settles the flat pairs first, then lets the edge fixes
    // cascade along the sweeps; an edge fix made late in the pass is not
    // undone by flat averaging until the next pass.
    for (int pass = 0; pass < config.max_projection_passes; ++pass) {
        ctx.changed = false;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x + 1 < w; ++x)
                if (ctx.masks.flat(Axis::x, x, y)) handle_flat(ctx, x, y, x + 1, y);
        for (int y = h - 1; y >= 0; --y)
            for (int x = w - 2; x >= 0; --x)
                if (ctx.masks.flat(Axis::x, x, y)) handle_flat(ctx, x, y, x + 1, y);
        for (int y = 0; y + 1 < h; ++y)
            for (int x = 0; x < w; ++x)
                if (ctx.masks.flat(Axis::y, x, y)) handle_flat(ctx, x, y, x, y + 1);
        for (int y = h - 2; y >= 0; --y)
            for (int x = w - 1; x >= 0; --x)
                if (ctx.masks.flat(Axis::y, x, y)) handle_flat(ctx, x, y, x, y + 1);

        for (int y = 0; y < h; ++y)
            for (int x = 0; x + 1 < w; ++x)
                if (ctx.masks.edge(Axis::x, x, y))
                    handle_edge(ctx, x, y, x + 1, y, /*move_q=*/true);
        for (int y = h - 1; y >= 0; --y)
            for (int x = w - 2; x >= 0; --x)
                if (ctx.masks.edge(Axis::x, x, y))
                    handle_edge(ctx, x, y, x + 1, y, /*move_q=*/false);
        for (int y = 0; y + 1 < h; ++y)
            for (int x = 0; x < w; ++x)
                if (ctx.masks.edge(Axis::y, x, y))
                    handle_edge(ctx, x, y, x, y + 1, /*move_q=*/true);
        for (int y = h - 2; y >= 0; --y)
            for (int x = w - 1; x >= 0; --x)
                if (ctx.masks.edge(Axis::y, x, y))
                    handle_edge(ctx, x, y, x, y + 1, /*move_q=*/false);
        if (!ctx.changed) break;
    }

    const double target = 1.0 - config.delta_slack;
    long violations = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x + 1 < w; ++x) {
            if (masks.edge(Axis::x, x, y) &&
                pair_ratio(I_lum.at(x, y), I_lum.at(x + 1, y), res.S.at(x, y),
                           res.S.at(x + 1, y)) < target)
                ++violations;
        }
    }
    for (int y = 0; y + 1 < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (masks.edge(Axis::y, x, y) &&
                pair_ratio(I_lum.at(x, y), I_lum.at(x, y + 1), res.S.at(x, y),
                           res.S.at(x, y + 1)) < target)
                ++violations;
        }
    }
    res.residual_edge_violations = violations;
    return res;
}

namespace {

double rtv_energy_with(const RtvWeights& weights, const ScalarField& dx, const ScalarField& dy,
                       const RtvParams& params) {
    const int w = dx.width, h = dx.height, r = params.window_radius;
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

double objective_value(const ScalarField& S, const ScalarField& S_init, const RtvWeights& weights,
                       const SolverConfig& config) {
    double data = 0.0;
    for (size_t i = 0; i < S.size(); ++i) {
        const double d = S.data[i] - S_init.data[i];
        data += d * d;
    }
    return data + config.lambda * rtv_energy_with(weights, forward_diff(S, Axis::x),
                                                  forward_diff(S, Axis::y), config.rtv);
}

} // namespace

IlluminationResult estimate_illumination(const RgbImage& img, const SolverConfig& config) {
    check_image(img);
    const ScalarField S_init = initial_illumination(img);
    const ScalarField S_min = s_min_map(img, config.gamma);
    const PairMasks masks = flat_edge_masks(S_init, config.tau);

    IlluminationResult res;
    res.S = project_box(S_init, S_min);

    for (int it = 1; it <= config.max_outer; ++it) {
        const RtvWeights weights = rtv_weights(res.S, config.rtv);
        if (it > 1)
            res.report.objective_values.push_back(objective_value(res.S, S_init, weights, config));

        const GridSystem sys = assemble_system(S_init, weights, masks, config);
        CgResult cg = solve_quadratic(sys, res.S, config.cg_tol, config.cg_max_iter);
        ScalarField S_new = project_box(cg.x, S_min);
        ProjectionResult proj = enforce_detail_consistency(S_new, S_init, S_min, masks, config);

        double change = 0.0;
        for (size_t i = 0; i < proj.S.size(); ++i)
            change = std::max(change, std::abs(proj.S.data[i] - res.S.data[i]));

        res.S = std::move(proj.S);
        res.report.iterate_changes.push_back(change);
        res.report.residual_edge_violations = proj.residual_edge_violations;
        res.report.outer_iterations = it;
        if (change < config.conv_tol) break;
    }
    // Objective of the final iterate, with its own (not lagged) weights.
    const RtvWeights final_weights = rtv_weights(res.S, config.rtv);
    res.report.objective_values.push_back(objective_value(res.S, S_init, final_weights, config));
    return res;
}

} // namespace relight
