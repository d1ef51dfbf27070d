#pragma once

// Splits a segmentation map into preliminary curves: threshold, trace the
// outer border of every 8-connected blob, fill it into a region mask, and
// take the per-column maximum of the masked map.

#include "rmo/grid_io.hpp"

#include <vector>

namespace rmo {

struct Pixel {
    std::size_t row = 0;
    std::size_t col = 0;

    friend bool operator==(const Pixel&, const Pixel&) = default;
    friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Closed outer border of one blob; consecutive pixels are 8-adjacent and the
/// last pixel is 8-adjacent to the first. Thin blobs revisit pixels.
struct Contour {
    std::vector<Pixel> pixels;
};

/// 0 where value < t_seg, 1 otherwise.
BinaryMask binarize(const SegMap& segmap, double t_seg);

/// 8-connected components of set pixels, ordered by their first pixel in
/// row-major scan order; pixels within a component are in row-major order.
std::vector<std::vector<Pixel>> connected_components(const BinaryMask& mask);

/// Outer border of the blob whose row-major first pixel is `start`
/// (border following with an 8-neighbourhood; pixels outside the raster count as 0).
Contour trace_outer_border(const BinaryMask& mask, Pixel start);

/// One outer contour per 8-connected component, ordered by top-left-most pixel.
std::vector<Contour> find_contours(const BinaryMask& binary);

/// Contour pixels plus everything they enclose (holes are filled).
BinaryMask region_mask(const Contour& contour, std::size_t rows, std::size_t cols);

/// Per offset column, the depth of the largest masked segmap value (shallowest
/// on ties); columns whose masked values are all zero are skipped.
Curve extract_raw_curve(const SegMap& segmap, const BinaryMask& region);

/// binarize -> find_contours -> region_mask -> extract_raw_curve, in contour order.
/// Empty curves are dropped.
std::vector<Curve> extract_all(const SegMap& segmap, double t_seg);

}  // namespace rmo
