#ifndef RELIGHT_SOLVER_HPP
#define RELIGHT_SOLVER_HPP

#include <cstdint>
#include <vector>

#include "relight/illum.hpp"
#include "relight/raster.hpp"
#include "relight/rtv.hpp"

namespace relight {

struct SolverConfig {
    double lambda = 0.8;          // smoothness weight
    double tau = 1e-5;            // edge threshold on the initial illumination
    double conv_tol = 1e-3;       // outer-loop stop: max-abs iterate change
    int max_outer = 20;           // outer iteration cap
    double cg_tol = 1e-5;         // relative residual for the linear solve
    int cg_max_iter = 500;
    double w_flat = 1e3;          // extra quadratic weight on flat pairs
    double delta_slack = 1e-3;    // edge-ratio slack: enforce r >= 1 - delta_slack
    int max_projection_passes = 5;
    RtvParams rtv;
    GammaParams gamma;
};

struct SolveReport {
    int outer_iterations = 0;
    std::vector<double> iterate_changes;     // max-abs change per outer iteration
    std::vector<double> objective_values;    // data term + lambda * windowed RTV energy
    long residual_edge_violations = 0;       // edge pairs still below 1 - delta_slack
    long clamped_pixels = 0;                 // filled by the recovery step
};

// Directed-pair classification along each axis: entry (x,y) of the x masks
// describes the pair ((x,y),(x+1,y)); the far boundary column/row carries no
// pair and is false in both masks. flat and edge are complementary on pairs.
struct PairMasks {
    int width = 0, height = 0;
    std::vector<uint8_t> flat_x, flat_y, edge_x, edge_y;

    bool flat(Axis axis, int x, int y) const {
        const size_t i = static_cast<size_t>(y) * width + x;
        return axis == Axis::x ? flat_x[i] != 0 : flat_y[i] != 0;
    }
    bool edge(Axis axis, int x, int y) const {
        const size_t i = static_cast<size_t>(y) * width + x;
        return axis == Axis::x ? edge_x[i] != 0 : edge_y[i] != 0;
    }
};

// Pairs with |forward difference| <= tau are flat, the rest are edges.
PairMasks flat_edge_masks(const ScalarField& I_lum, double tau);

// Normal equations (I + lambda L) S = rhs, with L the weighted graph
// Laplacian of the 4-neighbor grid. cx/cy hold the per-pair coefficients
// (lambda folded in); the far boundary entries are zero.
struct GridSystem {
    int width = 0, height = 0;
    ScalarField cx, cy;
    ScalarField rhs;

    // y = A x over row-major vectors of width*height doubles.
    void apply(const double* x, double* y) const;
    std::vector<double> diagonal() const;
    // Dense row-major matrix, for small test instances only.
    std::vector<std::vector<double>> dense() const;
};

GridSystem assemble_system(const ScalarField& S_init, const RtvWeights& weights,
                           const PairMasks& masks, const SolverConfig& config);

struct CgResult {
    ScalarField x;
    int iterations = 0;
    double rel_residual = 0.0;
};

// Jacobi-preconditioned conjugate gradient. Throws std::runtime_error if the
// relative residual does not reach tol within max_iter iterations.
CgResult solve_quadratic(const GridSystem& system, const ScalarField& warm_start,
                         double tol, int max_iter);

// Per-pixel clamp of S to [S_min, 1]. S_min above 1 is an error.
ScalarField project_box(const ScalarField& S, const ScalarField& S_min);

struct ProjectionResult {
    ScalarField S;
    long residual_edge_violations = 0;
};

// Alternating sweeps enforcing the detail constraints on R = I/S: flat pairs
// are averaged toward equality, edge pairs with discrete enhancement ratio
// below 1 - delta_slack are bisected toward the anchor pixel. All moves stay
// inside the box [S_min, 1]; violations that survive clamping are counted.
ProjectionResult enforce_detail_consistency(const ScalarField& S, const ScalarField& I_lum,
                                            const ScalarField& S_min, const PairMasks& masks,
                                            const SolverConfig& config);

struct IlluminationResult {
    ScalarField S;
    SolveReport report;
};

// PBS-constrained illumination estimation: lagged-weight quadratic solves
// alternated with box and detail-consistency projections, stopping when the
// max-abs iterate change drops below conv_tol or max_outer is reached.
IlluminationResult estimate_illumination(const RgbImage& img, const SolverConfig& config);

} // namespace relight

#endif
