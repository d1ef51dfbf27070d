#pragma once

// Evaluation of RMO picks: semblance along a curve, track rate against
// reference picks, and the mean squared difference of slope fields.

#include "rmo/config.hpp"
#include "rmo/grid_io.hpp"

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace rmo {

/// Coherence of the gather along `curve` over a +-h_s sample window; depths
/// are rounded to the nearest sample and window samples outside the raster
/// are skipped. Zero energy gives 0. Throws on an empty curve.
double semblance(const Gather& gather, const Curve& curve, int h_s);

/// Mean |depth difference| over shared offsets; +infinity without overlap.
double curve_error(const Curve& automatic, const Curve& manual);

/// Number of manual curves matched by some automatic curve with curve_error < d_t.
std::size_t tracked_count(std::span<const Curve> autos, std::span<const Curve> manuals, double d_t);

/// tracked_count / manual count; 1 when there are no manual curves.
double track_rate(std::span<const Curve> autos, std::span<const Curve> manuals, double d_t);

/// Mean squared difference of two slope fields on the same grid.
double field_mse(const SlopeField& a, const SlopeField& b);

/// Slope fields of both pick sets on the gather grid, then field_mse.
double slope_mse(std::span<const Curve> autos, std::span<const Curve> manuals, std::size_t n_depth,
                 std::size_t n_offset, const PipelineConfig& config);

struct GatherMetrics {
    std::string name;
    std::size_t n_auto = 0;
    std::size_t n_manual = 0;
    std::size_t n_tracked = 0;
    double semblance_auto = 0.0;    // mean over curves; 0 without curves
    double semblance_manual = 0.0;
    double track_rate = 0.0;
    double slope_mse = 0.0;
};

struct MetricReport {
    std::vector<GatherMetrics> rows;
    GatherMetrics aggregate;  // curve-weighted semblance, pooled track rate, mean MSE
};

struct GatherPicks {
    std::string name;
    const Gather* gather = nullptr;
    std::span<const Curve> autos;
    std::span<const Curve> manuals;
};

GatherMetrics evaluate_gather(const GatherPicks& picks, const PipelineConfig& config);

MetricReport report(std::span<const GatherPicks> gathers, const PipelineConfig& config);

/// Report rows plus an "ALL" aggregate row.
inline constexpr const char* kReportHeader =
    "gather,n_auto,n_manual,n_tracked,semblance_auto,semblance_manual,track_rate,slope_mse";
std::string format_report(const MetricReport& report);

}  // namespace rmo
