#include "relight/photo.hpp"

#include <algorithm>

namespace relight {

EnhanceResult enhance_photo(const RgbImage& img, const SolverConfig& solver,
                            const JbuParams& jbu, EnhanceMode mode) {
    if (mode == EnhanceMode::fast) return enhance_fast(img, solver, jbu);
    IlluminationResult est = estimate_illumination(img, solver);
    RecoverResult rec = recover(img, est.S, solver.gamma);
    est.report.clamped_pixels = rec.clamped_pixels;
    return {std::move(rec.image), std::move(est.S), std::move(est.report)};
}

namespace {

void merge_report(SolveReport& into, const SolveReport& r) {
    into.outer_iterations = std::max(into.outer_iterations, r.outer_iterations);
    into.residual_edge_violations += r.residual_edge_violations;
    into.clamped_pixels += r.clamped_pixels;
    if (r.iterate_changes.size() > into.iterate_changes.size()) {
        into.iterate_changes = r.iterate_changes;
        into.objective_values = r.objective_values;
    }
}

} // namespace

RgbImage enhance_per_channel(const RgbImage& img, const SolverConfig& solver,
                             const JbuParams& jbu, SolveReport* report) {
    check_image(img);
    RgbImage out(img.width, img.height);
    SolveReport merged;
    for (int c = 0; c < 3; ++c) {
        RgbImage gray(img.width, img.height);
        for (size_t p = 0; p < img.pixel_count(); ++p) {
            const double v = img.data[p * 3 + c];
            gray.data[p * 3 + 0] = v;
            gray.data[p * 3 + 1] = v;
            gray.data[p * 3 + 2] = v;
        }
        EnhanceResult res = enhance_fast(gray, solver, jbu);
        for (size_t p = 0; p < img.pixel_count(); ++p)
            out.data[p * 3 + c] = res.image.data[p * 3 + c];
        merge_report(merged, res.report);
    }
    if (report) *report = std::move(merged);
    return out;
}

RgbImage correct_overexposure(const RgbImage& img, const SolverConfig& solver,
                              const JbuParams& jbu, SolveReport* report) {
    check_image(img);
    RgbImage inverted(img.width, img.height);
    for (size_t i = 0; i < img.data.size(); ++i) inverted.data[i] = 1.0 - img.data[i];
    EnhanceResult res = enhance_fast(inverted, solver, jbu);
    RgbImage out(img.width, img.height);
    for (size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = std::clamp(1.0 - res.image.data[i], 0.0, 1.0);
    if (report) *report = std::move(res.report);
    return out;
}

} // namespace relight
