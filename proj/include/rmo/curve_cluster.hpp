#pragma once

// Merges preliminary curves that belong to one event: windowed slopes, the
// slope/endpoint mixed distance, and DBSCAN on the precomputed distances.

#include "rmo/config.hpp"
#include "rmo/grid_io.hpp"

#include <span>
#include <vector>

namespace rmo {

struct SlopeSample {
    double offset = 0.0;  // window centroid
    double depth = 0.0;
    double slope = 0.0;   // depth samples per offset trace
};

/// Least-squares slope of depth against offset for one set of points; 0 when
/// fewer than two points.
double ls_slope(std::span<const CurvePoint> points);

/// Windows of `win` consecutive points advancing by `stride`; a trailing
/// window shorter than `win` is kept when it has at least 2 points.
/// Curves with fewer than 2 points give no samples.
std::vector<SlopeSample> local_slopes(const Curve& curve, int win, int stride);

/// Mean of the local slopes; 0 when the curve yields no window.
double mean_slope(const Curve& curve, const ClusterConfig& config);

/// alpha |s1 - s2| + (1 - alpha) min(|(right1 - left2) w|, |(left1 - right2) w|)
/// with endpoints as (offset, depth) and w = (w_offset, w_depth).
double curve_distance(const Curve& a, const Curve& b, const ClusterConfig& config);

/// Same, with mean slopes supplied by the caller.
double curve_distance(const Curve& a, double slope_a, const Curve& b, double slope_b,
                      const ClusterConfig& config);

/// Symmetric matrix of curve_distance, row-major.
std::vector<double> distance_matrix(std::span<const Curve> curves, const ClusterConfig& config);

/// DBSCAN over a precomputed n x n matrix. Returns clusters of indices, each
/// sorted, ordered by smallest member. Noise points form singleton clusters.
std::vector<std::vector<std::size_t>> dbscan(std::span<const double> distances, std::size_t n,
                                             double eps, int min_pts);

std::vector<std::vector<std::size_t>> cluster_curves(std::span<const Curve> curves,
                                                     const ClusterConfig& config);

/// Union of points ordered by offset; depths at shared offsets are averaged.
Curve merge_group(std::span<const Curve> curves);

/// cluster_curves followed by merge_group per cluster.
std::vector<Curve> merge_curves(std::span<const Curve> curves, const ClusterConfig& config);

}  // namespace rmo
