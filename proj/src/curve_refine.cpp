#include "rmo/curve_refine.hpp"

#include "rmo/curve_extract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rmo {

namespace {

std::size_t cell_count(std::size_t pixels, double cell)
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(static_cast<double>(pixels) / cell)));
}

}  // namespace

SlopeField slope_field(std::span<const SlopeSample> samples, std::size_t n_depth,
                       std::size_t n_offset, const RefineConfig& config)
{
    if (samples.empty()) {
        throw std::invalid_argument("slope_field: no slope samples");
    }
    config.validate();
    const std::size_t no = cell_count(n_offset, config.cell_offset);
    const std::size_t nd = cell_count(n_depth, config.cell_depth);
    std::vector<double> values(no * nd);
    // Placeholder field only to reuse the cell-centre geometry.
    const SlopeField grid(no, nd, config.cell_offset, config.cell_depth, config.h_prior, values);

    const double inv2h2 = 1.0 / (2.0 * config.h_prior * config.h_prior);
    const std::size_t ns = samples.size();
    // The Gaussian kernel factorises over offset and depth.
    std::vector<double> k_off(ns * no), k_dep(ns * nd);
    for (std::size_t k = 0; k < ns; ++k) {
        for (std::size_t io = 0; io < no; ++io) {
            const double d = grid.center_offset(io) - samples[k].offset;
            k_off[k * no + io] = std::exp(-d * d * inv2h2);
        }
        for (std::size_t id = 0; id < nd; ++id) {
            const double d = grid.center_depth(id) - samples[k].depth;
            k_dep[k * nd + id] = std::exp(-d * d * inv2h2);
        }
    }

    std::vector<double> num(nd), den(nd);
    for (std::size_t io = 0; io < no; ++io) {
        std::fill(num.begin(), num.end(), 0.0);
        std::fill(den.begin(), den.end(), 0.0);
        for (std::size_t k = 0; k < ns; ++k) {
            const double a = k_off[k * no + io];
            if (a == 0.0) {
                continue;
            }
            const double* kd = &k_dep[k * nd];
            for (std::size_t id = 0; id < nd; ++id) {
                const double w = a * kd[id];
                num[id] += w * samples[k].slope;
                den[id] += w;
            }
        }
        for (std::size_t id = 0; id < nd; ++id) {
            if (den[id] >= kMinFieldWeight) {
                values[io * nd + id] = num[id] / den[id];
                continue;
            }
            const double o = grid.center_offset(io);
            const double z = grid.center_depth(id);
            double best = std::numeric_limits<double>::infinity();
            double slope = 0.0;
            for (const auto& s : samples) {
                const double d2 = (s.offset - o) * (s.offset - o) + (s.depth - z) * (s.depth - z);
                if (d2 < best) {
                    best = d2;
                    slope = s.slope;
                }
            }
            values[io * nd + id] = slope;
        }
    }
    return SlopeField(no, nd, config.cell_offset, config.cell_depth, config.h_prior, std::move(values));
}

std::vector<SlopeSample> pooled_slopes(std::span<const Curve> curves, const ClusterConfig& config)
{
    std::vector<SlopeSample> samples;
    for (const auto& c : curves) {
        const auto s = local_slopes(c, config.slope_win, config.slope_stride);
        samples.insert(samples.end(), s.begin(), s.end());
    }
    return samples;
}

SlopeField slope_field_for(std::span<const Curve> curves, std::size_t n_depth, std::size_t n_offset,
                           const PipelineConfig& config)
{
    const auto samples = pooled_slopes(curves, config.cluster);
    if (!samples.empty()) {
        return slope_field(samples, n_depth, n_offset, config.refine);
    }
    const std::size_t no = cell_count(n_offset, config.refine.cell_offset);
    const std::size_t nd = cell_count(n_depth, config.refine.cell_depth);
    return SlopeField(no, nd, config.refine.cell_offset, config.refine.cell_depth,
                      config.refine.h_prior, std::vector<double>(no * nd, 0.0));
}

LocalFit fit_point(std::span<const CurvePoint> points, double o_star, double d_star,
                   double prior_slope, const RefineConfig& config)
{
    if (points.empty()) {
        throw std::invalid_argument("fit_point: no regression points");
    }
    // Offsets are centred on o*, so the intercept is the fitted depth.
    const double inv2h2 = 1.0 / (2.0 * config.h_data * config.h_data);
    const double prior_weight = config.lambda / (2.0 * config.h_para * config.h_para);
    double sw = 0.0, swx = 0.0, swxx = 0.0, swd = 0.0, swxd = 0.0;
    for (const auto& p : points) {
        const double x = p.offset - o_star;
        const double w = std::exp(-x * x * inv2h2);
        sw += w;
        swx += w * x;
        swxx += w * x * x;
        swd += w * p.depth;
        swxd += w * x * p.depth;
    }
    const double a00 = sw;
    const double a01 = swx;
    const double a11 = swxx + prior_weight;
    const double r0 = swd;
    const double r1 = swxd + prior_weight * prior_slope;
    const double det = a00 * a11 - a01 * a01;
    if (!(a00 > 0.0) || !(det > 1e-12 * a00 * a11)) {
        return {d_star, 0.0, true};
    }
    return {(a11 * r0 - a01 * r1) / det, (a00 * r1 - a01 * r0) / det, false};
}

LocalFit refine_point(std::span<const CurvePoint> points, double o_star, double d_star,
                      const SlopeField& field, const RefineConfig& config)
{
    return fit_point(points, o_star, d_star, field.at(o_star, d_star), config);
}

Curve refine_curve(const Curve& curve, const SlopeField& field, const RefineConfig& config,
                   std::size_t n_depth)
{
    const double top = std::nextafter(static_cast<double>(n_depth), 0.0);
    std::vector<CurvePoint> out;
    out.reserve(curve.size());
    for (const auto& p : curve) {
        const auto fit = refine_point(curve.points(), p.offset, p.depth, field, config);
        out.push_back({p.offset, std::clamp(fit.depth, 0.0, top)});
    }
    return Curve(std::move(out));
}

std::vector<Curve> filter_short(std::span<const Curve> curves, int n_min)
{
    std::vector<Curve> out;
    for (const auto& c : curves) {
        if (c.size() >= static_cast<std::size_t>(std::max(n_min, 0))) {
            out.push_back(c);
        }
    }
    return out;
}

CascadeResult run_cascade(const SegMap& segmap, const PipelineConfig& config)
{
    config.validate();
    CascadeResult r;
    r.raw = extract_all(segmap, config.t_seg);
    r.merged = merge_curves(r.raw, config.cluster);
    r.field = slope_field_for(r.merged, segmap.rows(), segmap.cols(), config);
    r.refined.reserve(r.merged.size());
    for (const auto& c : r.merged) {
        r.refined.push_back(refine_curve(c, r.field, config.refine, segmap.rows()));
    }
    r.picks = filter_short(r.refined, config.refine.n_min);
    return r;
}

std::vector<Curve> pick_pipeline(const SegMap& segmap, const PipelineConfig& config)
{
    return run_cascade(segmap, config).picks;
}

}  // namespace rmo
