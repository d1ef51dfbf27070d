#pragma once

// Four-channel feature stack for the segmentation network: two trace-wise
// AGC maps, a depth-axis band-pass map, and a local-peak mask.

#include "rmo/config.hpp"
#include "rmo/grid_io.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rmo {

/// AGC with a trailing window of `h` samples; the first h-1 samples use the
/// available prefix.
std::vector<double> agc_trace(std::span<const double> trace, int h, double epsilon);

/// Zeroes every DFT bin whose |frequency| (cycles per sample) lies outside
/// [f_min, f_max] and returns the real part of the inverse transform.
std::vector<double> bandpass_trace(std::span<const double> trace, double f_min, double f_max);

/// 1 where a sample is strictly greater than both depth neighbours; first and
/// last rows are 0.
BinaryMask peak_mask(const Gather& gather);

struct FeatureStack {
    Raster agc1;
    Raster agc2;
    Raster bandpass;
    BinaryMask peaks;

    /// Channels in network order: agc1, agc2, bandpass, peaks.
    std::array<Raster, 4> channels() const;
};

FeatureStack feature_stack(const Gather& gather, const FeatureConfig& config);

inline constexpr std::array<const char*, 4> kFeatureSuffixes = {"_agc1", "_agc2", "_bandpass", "_peaks"};

/// Writes the four channels as CIGR rasters named <stem><suffix>.cigr in `dir`.
void export_feature_stack(const FeatureStack& stack, const std::filesystem::path& dir,
                          const std::string& stem);

}  // namespace rmo
