#pragma once

// Inference hyperparameters for the whole picking cascade, with the three
// dataset presets and a flat key=value text form.

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rmo {

struct FeatureConfig {
    int h1 = 15;              // AGC window lengths (samples)
    int h2 = 31;
    double epsilon = 1e-8;    // AGC stabilizer
    double f_min = 2.0 / 1000.0;   // pass band, cycles per depth sample
    double f_max = 60.0 / 1000.0;

    void validate() const;
};

struct ClusterConfig {
    double alpha = 0.5;       // slope term weight in the mixed distance
    double w_offset = 1.5;    // anisotropic endpoint weights
    double w_depth = 1.0;
    double d_eps = 8.0;       // merge radius
    int n_min_pts = 1;        // core-point neighbourhood size (self included)
    int slope_win = 11;       // points per slope window
    int slope_stride = 5;

    void validate() const;
};

struct RefineConfig {
    double h_prior = 5.0;     // slope-field kernel bandwidth (pixels)
    double h_data = 5.0;      // regression kernel bandwidth along offset
    double h_para = 50.0;     // prior bandwidth; penalty weight is lambda / (2 h_para^2)
    double lambda = 1e4;
    int n_min = 20;           // shortest surviving curve (points)
    double cell_offset = 2.0; // slope-field cell size in pixels
    double cell_depth = 10.0;

    void validate() const;
};

struct MetricConfig {
    int h_s = 5;              // semblance half window (samples)
    double d_t = 3.0;         // tracking threshold (pixels)

    void validate() const;
};

struct PipelineConfig {
    FeatureConfig feature;
    double t_seg = 0.5;
    ClusterConfig cluster;
    RefineConfig refine;
    MetricConfig metric;

    /// Throws InvariantError on the first violated constraint.
    void validate() const;

    /// Sets one field by its flat key (e.g. "d_eps", "h1"). Throws std::invalid_argument
    /// for unknown keys or unparsable values.
    void set(std::string_view key, std::string_view value);
    /// Value of one field formatted as text.
    std::string get(std::string_view key) const;

    static const std::vector<std::string>& keys();
};

/// Named rows of the inference-hyperparameter table: "bp", "fa", "fb".
PipelineConfig preset(std::string_view name);

/// Applies "key = value" lines (blank lines and '#' comments ignored).
void apply_config_text(PipelineConfig& config, std::string_view text);
/// All keys, one "key=value" per line, in keys() order.
std::string to_config_text(const PipelineConfig& config);

}  // namespace rmo
