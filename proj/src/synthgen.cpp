#include "rmo/synthgen.hpp"

#include "rmo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rmo {

double Rng::uniform(double lo, double hi)
{
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index)
{
    // splitmix64 finalizer over a combined key
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void SynthSpec::validate() const
{
    auto require = [](bool ok, const char* msg) {
        if (!ok) {
            throw InvariantError(msg);
        }
    };
    require(k_c >= 1, "k_c must be >= 1");
    require(n_depth >= 2 && n_offset >= 2, "gather must be at least 2x2");
    require(d_max > 0.0 && d_max <= static_cast<double>(n_depth), "d_max must lie in (0, n_depth]");
    require(f_end > 0.0 && f_start >= f_end, "need f_start >= f_end > 0");
    require(noise_frac >= 0.0 && noise_frac < 1.0, "noise_frac must lie in [0, 1)");
    require(r_c >= 0.0, "r_c must be >= 0");
    require(eps_d_scale >= 0.0, "eps_d_scale must be >= 0");
}

ShapeBox shape_box(int k, int k_c)
{
    if (k_c < 1 || k < 1 || k > k_c) {
        throw std::out_of_range("curve index " + std::to_string(k) + " outside [1, " +
                                std::to_string(k_c) + "]");
    }
    const int third = k_c / 3;
    const int half = k_c / 2;
    const int two_thirds = 2 * k_c / 3;
    if (k < third) {
        return {0.275, 1.125, 2.75e-4, 6.25e-4};
    }
    if (k < half) {
        return {0.125, 0.50, 2.00e-4, 3.75e-4};
    }
    if (k < two_thirds) {
        return {-0.50, 0.125, -2.50e-4, -1.25e-4};
    }
    return {0.275, 1.125, 2.75e-4, 6.25e-4};
}

std::vector<double> ladder_depths(int k_c, double d_max, double eps_z, std::span<const double> eps_d)
{
    if (k_c < 1) {
        throw std::invalid_argument("k_c must be >= 1");
    }
    if (eps_d.size() != static_cast<std::size_t>(k_c)) {
        throw std::invalid_argument("need one ladder jitter per curve");
    }
    std::vector<double> z0(static_cast<std::size_t>(k_c));
    const double step = d_max / k_c;
    for (int k = 1; k <= k_c; ++k) {
        z0[k - 1] = eps_z + (step + eps_d[k - 1]) * k;
    }
    return z0;
}

std::vector<double> initial_depths(int k_c, double d_max, Rng& rng, double eps_d_scale)
{
    if (k_c < 1) {
        throw std::invalid_argument("k_c must be >= 1");
    }
    const double eps_z = rng.uniform(10.0, 200.0);
    std::vector<double> eps_d(static_cast<std::size_t>(k_c));
    for (auto& e : eps_d) {
        e = rng.uniform(-0.0125, 0.0125) * eps_d_scale;
    }
    return ladder_depths(k_c, d_max, eps_z, eps_d);
}

CurveParams sample_curve_params(int k, int k_c, Rng& rng)
{
    const ShapeBox box = shape_box(k, k_c);
    CurveParams p;
    p.beta = rng.uniform(box.beta_lo, box.beta_hi);
    p.gamma = rng.uniform(box.gamma_lo, box.gamma_hi);
    return p;
}

std::vector<CurvePoint> curve_depths(const CurveParams& params, std::span<const int> offsets)
{
    std::vector<CurvePoint> out;
    out.reserve(offsets.size());
    for (int o : offsets) {
        const double o2 = static_cast<double>(o) * o;
        const double radicand = params.z0 * params.z0 + params.beta * o2 + params.gamma * o2 * o2;
        if (radicand > 0.0) {
            out.push_back({o, std::sqrt(radicand)});
        }
    }
    return out;
}

std::vector<CurvePoint> crop_points(std::span<const CurvePoint> points, double r_c, double o_0)
{
    std::vector<CurvePoint> out;
    for (const auto& p : points) {
        if (!(p.offset > p.depth * r_c + o_0)) {
            out.push_back(p);
        }
    }
    return out;
}

double ricker(double dz, double f)
{
    const double a = std::numbers::pi * dz * f;
    const double h = a * a;
    return (1.0 - 2.0 * h) * std::exp(-h);
}

double wavelet_frequency(double z, const SynthSpec& spec)
{
    const double t = std::clamp(z / spec.d_max, 0.0, 1.0);
    return spec.f_start + (spec.f_end - spec.f_start) * t;
}

namespace {

bool in_depth_range(double z, std::size_t n_depth)
{
    // the rounded label pixel must exist
    return z >= 0.0 && z < static_cast<double>(n_depth) - 0.5;
}

}  // namespace

Rendered render_gather(std::span<const std::vector<CurvePoint>> curves, const SynthSpec& spec)
{
    spec.validate();
    const std::size_t nz = spec.n_depth;
    const std::size_t nk = spec.n_offset;
    std::vector<double> amp(nz * nk, 0.0);
    BinaryMask label(nz, nk);

    for (const auto& curve : curves) {
        for (const auto& p : curve) {
            if (p.offset < 0 || static_cast<std::size_t>(p.offset) >= nk ||
                !in_depth_range(p.depth, nz)) {
                continue;
            }
            const auto k = static_cast<std::size_t>(p.offset);
            const double f = wavelet_frequency(p.depth, spec);
            for (std::size_t z = 0; z < nz; ++z) {
                amp[z * nk + k] += ricker(static_cast<double>(z) - p.depth, f);
            }
            label.set(static_cast<std::size_t>(std::lround(p.depth)), k);
        }
    }

    if (spec.noise_frac > 0.0) {
        double power = 0.0;
        for (double v : amp) {
            power += v * v;
        }
        power /= static_cast<double>(amp.size());
        const double a = std::sqrt(3.0 * spec.noise_frac * power);
        Rng noise(derive_seed(spec.seed, 0x6e6f697365ULL));
        for (double& v : amp) {
            v += noise.uniform(-a, a);
        }
    }

    std::vector<float> values(amp.size());
    std::transform(amp.begin(), amp.end(), values.begin(), [](double v) { return static_cast<float>(v); });
    return {Gather(Raster(nz, nk, std::move(values))), std::move(label)};
}

SyntheticSample synthesize(const SynthSpec& spec)
{
    spec.validate();
    Rng rng(spec.seed);
    const auto z0 = initial_depths(spec.k_c, spec.d_max, rng, spec.eps_d_scale);

    std::vector<int> offsets(spec.n_offset);
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        offsets[i] = static_cast<int>(i);
    }

    SyntheticSample sample;
    std::vector<std::vector<CurvePoint>> point_sets;
    for (int k = 1; k <= spec.k_c; ++k) {
        CurveParams params = sample_curve_params(k, spec.k_c, rng);
        params.z0 = z0[k - 1];
        sample.params.push_back(params);

        auto points = crop_points(curve_depths(params, offsets), spec.r_c, spec.crop_offset());
        std::erase_if(points, [&](const CurvePoint& p) { return !in_depth_range(p.depth, spec.n_depth); });
        if (points.empty()) {
            continue;
        }
        sample.truth.emplace_back(points);
        point_sets.push_back(std::move(points));
    }

    auto rendered = render_gather(point_sets, spec);
    sample.gather = std::move(rendered.gather);
    sample.label = std::move(rendered.label);
    return sample;
}

std::map<int, int> dataset_recipe(const std::string& split)
{
    if (split == "train") {
        return {{50, 1000}, {60, 1000}, {80, 1000}, {100, 1000}};
    }
    if (split == "val" || split == "validation") {
        return {{60, 500}, {80, 500}};
    }
    throw std::invalid_argument("unknown recipe split '" + split + "' (train, val)");
}

DatasetManifest generate_dataset(const SynthSpec& spec_template, const std::map<int, int>& counts,
                                 const std::filesystem::path& out_dir, int jobs)
{
    spec_template.validate();
    std::filesystem::create_directories(out_dir);

    DatasetManifest manifest;
    manifest.spec = spec_template;
    for (const auto& [k_c, count] : counts) {
        if (k_c < 1 || count < 0) {
            throw std::invalid_argument("dataset counts need k_c >= 1 and count >= 0");
        }
        for (int i = 0; i < count; ++i) {
            const std::size_t index = manifest.entries.size();
            char stem[32];
            std::snprintf(stem, sizeof stem, "gather_%05zu", index);
            ManifestEntry e;
            e.gather_file = std::string(stem) + ".cigr";
            e.mask_file = std::string(stem) + "_mask.cigr";
            e.truth_file = std::string(stem) + "_truth.csv";
            e.k_c = k_c;
            e.seed = derive_seed(spec_template.seed, index);
            manifest.entries.push_back(std::move(e));
        }
    }

    parallel_for(manifest.entries.size(), jobs, [&](std::size_t i) {
        const auto& e = manifest.entries[i];
        SynthSpec spec = spec_template;
        spec.k_c = e.k_c;
        spec.seed = e.seed;
        const auto sample = synthesize(spec);
        write_raster(sample.gather.raster(), out_dir / e.gather_file);
        write_raster(sample.label.to_raster(), out_dir / e.mask_file);
        write_curves(sample.truth, out_dir / e.truth_file);
    });

    write_manifest(manifest, out_dir / kManifestName);
    return manifest;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError(IoErrorKind::write_failed, path.string());
    }
    const auto& s = manifest.spec;
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "# rmo synthetic manifest v1\n"
                  "# n_depth=%zu\n# n_offset=%zu\n# d_max=%.17g\n# r_c=%.17g\n# o_0=%.17g\n"
                  "# f_start=%.17g\n# f_end=%.17g\n# noise_frac=%.17g\n# eps_d_scale=%.17g\n"
                  "# base_seed=%llu\n",
                  s.n_depth, s.n_offset, s.d_max, s.r_c, s.crop_offset(), s.f_start, s.f_end,
                  s.noise_frac, s.eps_d_scale, static_cast<unsigned long long>(s.seed));
    out << buf << "gather,mask,truth,k_c,seed\n";
    for (const auto& e : manifest.entries) {
        out << e.gather_file << ',' << e.mask_file << ',' << e.truth_file << ',' << e.k_c << ','
            << e.seed << '\n';
    }
    if (!out) {
        throw IoError(IoErrorKind::write_failed, path.string());
    }
}

DatasetManifest read_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError(IoErrorKind::open_failed, path.string());
    }
    DatasetManifest m;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                continue;
            }
            const std::string key = line.substr(2, eq - 2);
            const std::string value = line.substr(eq + 1);
            auto& s = m.spec;
            if (key == "n_depth") s.n_depth = std::stoul(value);
            else if (key == "n_offset") s.n_offset = std::stoul(value);
            else if (key == "d_max") s.d_max = std::stod(value);
            else if (key == "r_c") s.r_c = std::stod(value);
            else if (key == "o_0") s.o_0 = std::stod(value);
            else if (key == "f_start") s.f_start = std::stod(value);
            else if (key == "f_end") s.f_end = std::stod(value);
            else if (key == "noise_frac") s.noise_frac = std::stod(value);
            else if (key == "eps_d_scale") s.eps_d_scale = std::stod(value);
            else if (key == "base_seed") s.seed = std::stoull(value);
            continue;
        }
        if (!header_seen) {
            if (line != "gather,mask,truth,k_c,seed") {
                throw IoError(IoErrorKind::malformed_row, "manifest header in " + path.string());
            }
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        ManifestEntry e;
        std::string k_c, seed;
        if (!std::getline(row, e.gather_file, ',') || !std::getline(row, e.mask_file, ',') ||
            !std::getline(row, e.truth_file, ',') || !std::getline(row, k_c, ',') ||
            !std::getline(row, seed)) {
            throw IoError(IoErrorKind::malformed_row, line);
        }
        e.k_c = std::stoi(k_c);
        e.seed = std::stoull(seed);
        m.entries.push_back(std::move(e));
    }
    return m;
}

}  // namespace rmo
