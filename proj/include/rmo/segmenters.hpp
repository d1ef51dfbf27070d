#pragma once

// Interchangeable segmentation strategies producing a SegMap: a ground-truth
// oracle, a non-learned threshold baseline, and a loader for maps produced
// by an external network.

#include "rmo/features.hpp"
#include "rmo/grid_io.hpp"

#include <filesystem>
#include <string>
#include <variant>

namespace rmo {

/// Label mask blurred by an isotropic Gaussian of std `blur_sigma`, with each
/// 8-connected label component rescaled to peak 1 (components combine by max).
/// blur_sigma == 0 returns the mask itself.
SegMap segment_oracle(const BinaryMask& label, double blur_sigma);

/// Peaks channel gated by |agc1| strictly above its per-gather 80th percentile.
SegMap segment_baseline(const FeatureStack& stack);

/// Reads an externally produced CIGR probability map. Values outside
/// [-0.01, 1.01] or a dimension mismatch are rejected; the rest is clamped.
SegMap load_segmentation(const std::filesystem::path& path, std::size_t rows, std::size_t cols);

/// Linear-interpolated percentile (0..100) of |values|.
double abs_percentile(std::span<const float> values, double percentile);

/// Map path for a gather: "<dir>/<gather stem><suffix>.cigr".
std::filesystem::path external_map_path(const std::filesystem::path& gather_path,
                                        const std::filesystem::path& map_dir,
                                        const std::string& suffix = "_seg");

struct OracleSegmenter {
    double blur_sigma = 1.0;
};
struct BaselineSegmenter {
};
struct ExternalSegmenter {
    std::filesystem::path map_dir;
    std::string suffix = "_seg";
};

using SegmenterKind = std::variant<OracleSegmenter, BaselineSegmenter, ExternalSegmenter>;

/// Inputs a strategy may need for one gather. `label` is required by the oracle only.
struct SegmentInput {
    std::filesystem::path gather_path;
    const Gather* gather = nullptr;
    const BinaryMask* label = nullptr;
};

/// Dispatches to the strategy. Throws std::runtime_error when a needed input is missing.
SegMap segment(const SegmenterKind& kind, const SegmentInput& input, const FeatureConfig& features);

}  // namespace rmo
