#pragma once

// Batch commands behind the rmopick executable. Each command takes a plain
// options struct so it can be driven from tests as well as from argv.

#include "rmo/config.hpp"
#include "rmo/metrics.hpp"
#include "rmo/segmenters.hpp"
#include "rmo/synthgen.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rmo::cli {

namespace fs = std::filesystem;

/// Fatal command error (bad arguments, unreadable inputs); the executable
/// prints it and exits with status 1.
class CommandError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Preset, then config file, then key=value overrides.
struct ConfigSources {
    std::string preset = "fa";
    std::optional<fs::path> config_file;
    std::vector<std::string> overrides;  // "key=value"
};

PipelineConfig resolve_config(const ConfigSources& sources);

// ---------------------------------------------------------------- synth

struct SynthOptions {
    SynthSpec spec;
    std::map<int, int> counts;    // curves per gather -> gather count
    fs::path out_dir;
    int jobs = 1;
};

/// Parses "K=N" into counts; throws CommandError on malformed text.
void add_count(std::map<int, int>& counts, const std::string& text);

DatasetManifest cmd_synth(const SynthOptions& options);

// ---------------------------------------------------------------- pick

struct PickOptions {
    std::vector<fs::path> gathers;
    SegmenterKind segmenter = OracleSegmenter{};
    ConfigSources config;
    fs::path out_dir;
    int jobs = 1;
};

struct PickRecord {
    fs::path gather;
    bool ok = false;
    std::string message;
    fs::path picks_file;
    fs::path field_file;
    std::size_t n_raw = 0;
    std::size_t n_merged = 0;
    std::size_t n_picks = 0;
    double seconds = 0.0;
};

/// Gathers listed in a synthetic manifest, resolved against its directory.
std::vector<fs::path> manifest_gathers(const fs::path& manifest_or_dir);

/// Label-mask path the oracle uses for a gather: "<stem>_mask.cigr" next to it.
fs::path mask_path_for(const fs::path& gather);

/// Writes <stem>_picks.csv and <stem>_field.cigr per gather plus
/// run_manifest.csv (deterministic) and run_timing.csv. Per-gather failures
/// are recorded and do not stop the run.
std::vector<PickRecord> cmd_pick(const PickOptions& options);

// ---------------------------------------------------------------- eval

struct EvalOptions {
    fs::path auto_dir;
    fs::path manual_dir;
    fs::path gather_dir;
    std::string manual_suffix = "_truth";
    std::string auto_suffix = "_picks";
    ConfigSources config;
    std::optional<fs::path> out_file;
};

/// One row per "<stem><manual_suffix>.csv" in manual_dir, sorted by stem.
/// A missing automatic file counts as an empty pick set.
MetricReport cmd_eval(const EvalOptions& options, std::ostream& out);

// ---------------------------------------------------------------- plot

struct PlotOptions {
    fs::path gather;
    std::optional<fs::path> curves;
    std::optional<fs::path> field;
    fs::path out_image;
};

/// Binary PPM (P6): grayscale gather with red curve overlays, and when a
/// field is given a blue-white-red slope panel on the right.
void cmd_plot(const PlotOptions& options);

// ---------------------------------------------------------------- sweep

struct SweepOptions {
    std::string param;
    std::vector<std::string> values;
    std::vector<fs::path> gathers;     // must have label masks and truth curves next to them
    SegmenterKind segmenter = OracleSegmenter{};
    ConfigSources config;
    std::optional<fs::path> out_file;
    int jobs = 1;
};

struct SweepRow {
    std::string value;
    std::size_t n_raw = 0;
    std::size_t n_merged = 0;
    std::size_t n_picks = 0;
    MetricReport metrics;
};

inline constexpr const char* kSweepHeader =
    "param,value,n_raw,n_merged,n_picks,semblance_auto,track_rate,slope_mse";

/// Truth-curve path for a gather: "<stem>_truth.csv" next to it.
fs::path truth_path_for(const fs::path& gather);

/// Re-runs the cascade and evaluation once per value, all other parameters fixed.
std::vector<SweepRow> cmd_sweep(const SweepOptions& options, std::ostream& out);

/// Entry point used by the executable; returns the process exit status.
int run(int argc, char** argv);

}  // namespace rmo::cli
