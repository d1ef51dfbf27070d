#pragma once

// Labeled synthetic gathers: ladder of zero-offset depths, quartic moveout
// curves with depth-dependent shape boxes, far-offset cropping, Ricker
// rendering with a depth-decreasing frequency, and uniform noise.

#include "rmo/grid_io.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace rmo {

/// Seeded random stream. Uniform draws use the top 53 bits of a 64-bit
/// Mersenne twister so results do not depend on the standard library's
/// distribution implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Independent stream seed for item `index` of a run seeded with `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

struct SynthSpec {
    int k_c = 60;                 // curves per gather
    double d_max = 1000.0;        // depth span of the ladder (samples)
    std::size_t n_depth = 1000;
    std::size_t n_offset = 100;
    double r_c = 0.2;             // cropping rate
    std::optional<double> o_0;    // initial offset for cropping; n_offset / 2 when unset
    double f_start = 16.0 / 1000.0;  // wavelet frequency at depth 0 (cycles per sample)
    double f_end = 4.0 / 1000.0;     // ... at depth d_max
    double noise_frac = 0.05;     // noise power as a fraction of signal power
    double eps_d_scale = 1.0;     // multiplies the ladder-step jitter range
    std::uint64_t seed = 0;

    double crop_offset() const { return o_0 ? *o_0 : static_cast<double>(n_offset) / 2.0; }
    void validate() const;
};

struct CurveParams {
    double z0 = 1.0;
    double beta = 0.0;
    double gamma = 0.0;
};

/// Uniform box for (beta, gamma) of one depth part.
struct ShapeBox {
    double beta_lo, beta_hi;
    double gamma_lo, gamma_hi;
};

/// Shape box for curve `k` (1-based) of `k_c`; part boundaries are
/// floor(k_c/3), floor(k_c/2), floor(2 k_c/3).
ShapeBox shape_box(int k, int k_c);

/// z0(k) = eps_z + (d_max / k_c + eps_d[k-1]) * k for k = 1..k_c.
std::vector<double> ladder_depths(int k_c, double d_max, double eps_z,
                                  std::span<const double> eps_d);

/// Draws eps_z ~ U(10, 200) once and eps_d ~ U(-0.0125, 0.0125) * eps_d_scale per curve.
std::vector<double> initial_depths(int k_c, double d_max, Rng& rng, double eps_d_scale = 1.0);

/// (beta, gamma) drawn from shape_box(k, k_c).
CurveParams sample_curve_params(int k, int k_c, Rng& rng);

/// z(o) = sqrt(z0^2 + beta o^2 + gamma o^4); offsets with a non-positive radicand are skipped.
std::vector<CurvePoint> curve_depths(const CurveParams& params, std::span<const int> offsets);

/// Keeps points with offset <= depth * r_c + o_0.
std::vector<CurvePoint> crop_points(std::span<const CurvePoint> points, double r_c, double o_0);

/// Zero-phase Ricker amplitude at `dz` samples from the centre for frequency `f`.
double ricker(double dz, double f);

/// Wavelet frequency for an event at depth `z`.
double wavelet_frequency(double z, const SynthSpec& spec);

struct Rendered {
    Gather gather;
    BinaryMask label;
};

/// Superposes one Ricker wavelet per curve point, adds noise drawn from a
/// stream derived from spec.seed, and marks rounded curve pixels in the label.
/// Points outside the raster are dropped.
Rendered render_gather(std::span<const std::vector<CurvePoint>> curves, const SynthSpec& spec);

struct SyntheticSample {
    Gather gather;
    BinaryMask label;
    std::vector<Curve> truth;          // in-bounds analytic curves, ladder order
    std::vector<CurveParams> params;   // one per ladder index, including dropped curves
};

/// Full generator for one gather, deterministic in spec.seed.
SyntheticSample synthesize(const SynthSpec& spec);

struct ManifestEntry {
    std::string gather_file;
    std::string mask_file;
    std::string truth_file;
    int k_c = 0;
    std::uint64_t seed = 0;
};

struct DatasetManifest {
    SynthSpec spec;   // template; k_c and seed vary per entry
    std::vector<ManifestEntry> entries;
};

/// Training and validation compositions (curves per gather -> gather count).
std::map<int, int> dataset_recipe(const std::string& split);

/// Writes gather, label mask, and truth-curve files for every requested
/// gather plus `manifest.csv`. Entry i uses seed derive_seed(template.seed, i);
/// counts are expanded in ascending k_c order. `jobs` bounds worker threads.
DatasetManifest generate_dataset(const SynthSpec& spec_template, const std::map<int, int>& counts,
                                 const std::filesystem::path& out_dir, int jobs = 1);

inline constexpr const char* kManifestName = "manifest.csv";

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace rmo
