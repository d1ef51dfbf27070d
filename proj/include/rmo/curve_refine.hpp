#pragma once

// Slope-constrained refinement: a Nadaraya-Watson slope field built from
// windowed slope samples, then a per-point locally weighted linear fit whose
// slope is pulled toward the field value. Also hosts the full picking cascade.

#include "rmo/config.hpp"
#include "rmo/curve_cluster.hpp"
#include "rmo/grid_io.hpp"

#include <span>
#include <vector>

namespace rmo {

/// Cells with total kernel weight below this take the nearest sample's slope.
inline constexpr double kMinFieldWeight = 1e-12;

/// Kernel-weighted average of sample slopes on a grid covering an
/// n_depth x n_offset gather (cells of cell_offset x cell_depth pixels,
/// bandwidth h_prior). Throws std::invalid_argument on an empty sample set.
SlopeField slope_field(std::span<const SlopeSample> samples, std::size_t n_depth,
                       std::size_t n_offset, const RefineConfig& config);

/// Windowed slope samples of every curve, pooled in curve order.
std::vector<SlopeSample> pooled_slopes(std::span<const Curve> curves, const ClusterConfig& config);

/// slope_field over pooled_slopes; a zero field when the curves yield no samples.
SlopeField slope_field_for(std::span<const Curve> curves, std::size_t n_depth, std::size_t n_offset,
                           const PipelineConfig& config);

struct LocalFit {
    double depth = 0.0;    // fitted depth at the query offset
    double slope = 0.0;
    bool singular = false; // system not solvable; depth is the query depth unchanged
};

/// Minimises sum_i K(o*, o_i; h_data) (d_i - (s o_i + b))^2 + lambda/(2 h_para^2) (s - prior)^2
/// and evaluates the line at o*.
LocalFit fit_point(std::span<const CurvePoint> points, double o_star, double d_star,
                   double prior_slope, const RefineConfig& config);

/// fit_point with the prior slope read from `field` at (o*, d*).
LocalFit refine_point(std::span<const CurvePoint> points, double o_star, double d_star,
                      const SlopeField& field, const RefineConfig& config);

/// Same offsets, each depth replaced by its refined value (clamped into [0, n_depth)).
Curve refine_curve(const Curve& curve, const SlopeField& field, const RefineConfig& config,
                   std::size_t n_depth);

/// Curves with at least n_min points, order preserved.
std::vector<Curve> filter_short(std::span<const Curve> curves, int n_min);

struct CascadeResult {
    std::vector<Curve> raw;      // one per traced blob
    std::vector<Curve> merged;   // after clustering
    SlopeField field;            // prior built from merged curves
    std::vector<Curve> refined;  // before the length filter
    std::vector<Curve> picks;    // final output
};

/// Extraction, clustering, slope field, refinement, and length filter.
CascadeResult run_cascade(const SegMap& segmap, const PipelineConfig& config);

std::vector<Curve> pick_pipeline(const SegMap& segmap, const PipelineConfig& config);

}  // namespace rmo
