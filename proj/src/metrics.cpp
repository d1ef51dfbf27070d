#include "rmo/metrics.hpp"

#include "rmo/curve_refine.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace rmo {

double semblance(const Gather& gather, const Curve& curve, int h_s)
{
    if (curve.empty()) {
        throw std::invalid_argument("semblance: empty curve");
    }
    const long n_depth = static_cast<long>(gather.n_depth());
    double numerator = 0.0;
    double energy = 0.0;
    for (int m = -h_s; m <= h_s; ++m) {
        double stack = 0.0;
        for (const auto& p : curve) {
            if (p.offset < 0 || static_cast<std::size_t>(p.offset) >= gather.n_offset()) {
                continue;
            }
            const long z = std::lround(p.depth) + m;
            if (z < 0 || z >= n_depth) {
                continue;
            }
            const double g = gather(static_cast<std::size_t>(z), static_cast<std::size_t>(p.offset));
            stack += g;
            energy += g * g;
        }
        numerator += stack * stack;
    }
    const double denominator = static_cast<double>(curve.size()) * energy;
    return denominator > 0.0 ? numerator / denominator : 0.0;
}

double curve_error(const Curve& automatic, const Curve& manual)
{
    if (automatic.empty() || manual.empty()) {
        throw std::invalid_argument("curve_error: empty curve");
    }
    // Both are sorted by offset: merge walk.
    double sum = 0.0;
    std::size_t shared = 0;
    auto a = automatic.begin();
    auto b = manual.begin();
    while (a != automatic.end() && b != manual.end()) {
        if (a->offset < b->offset) {
            ++a;
        } else if (b->offset < a->offset) {
            ++b;
        } else {
            sum += std::fabs(a->depth - b->depth);
            ++shared;
            ++a;
            ++b;
        }
    }
    return shared == 0 ? std::numeric_limits<double>::infinity() : sum / static_cast<double>(shared);
}

std::size_t tracked_count(std::span<const Curve> autos, std::span<const Curve> manuals, double d_t)
{
    std::size_t tracked = 0;
    for (const auto& m : manuals) {
        for (const auto& a : autos) {
            if (curve_error(a, m) < d_t) {
                ++tracked;
                break;
            }
        }
    }
    return tracked;
}

double track_rate(std::span<const Curve> autos, std::span<const Curve> manuals, double d_t)
{
    if (manuals.empty()) {
        return 1.0;
    }
    return static_cast<double>(tracked_count(autos, manuals, d_t)) / static_cast<double>(manuals.size());
}

double field_mse(const SlopeField& a, const SlopeField& b)
{
    if (a.n_offset_cells() != b.n_offset_cells() || a.n_depth_cells() != b.n_depth_cells()) {
        throw std::invalid_argument("field_mse: grids differ");
    }
    const auto va = a.values();
    const auto vb = b.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        sum += (va[i] - vb[i]) * (va[i] - vb[i]);
    }
    return sum / static_cast<double>(va.size());
}

double slope_mse(std::span<const Curve> autos, std::span<const Curve> manuals, std::size_t n_depth,
                 std::size_t n_offset, const PipelineConfig& config)
{
    return field_mse(slope_field_for(autos, n_depth, n_offset, config),
                     slope_field_for(manuals, n_depth, n_offset, config));
}

namespace {

double mean_semblance(const Gather& gather, std::span<const Curve> curves, int h_s)
{
    double sum = 0.0;
    for (const auto& c : curves) {
        if (!c.empty()) {
            sum += semblance(gather, c, h_s);
        }
    }
    return curves.empty() ? 0.0 : sum / static_cast<double>(curves.size());
}

}  // namespace

GatherMetrics evaluate_gather(const GatherPicks& picks, const PipelineConfig& config)
{
    if (picks.gather == nullptr) {
        throw std::invalid_argument("evaluate_gather: missing gather");
    }
    const Gather& g = *picks.gather;
    GatherMetrics row;
    row.name = picks.name;
    row.n_auto = picks.autos.size();
    row.n_manual = picks.manuals.size();
    row.n_tracked = tracked_count(picks.autos, picks.manuals, config.metric.d_t);
    row.track_rate = track_rate(picks.autos, picks.manuals, config.metric.d_t);
    row.semblance_auto = mean_semblance(g, picks.autos, config.metric.h_s);
    row.semblance_manual = mean_semblance(g, picks.manuals, config.metric.h_s);
    row.slope_mse = slope_mse(picks.autos, picks.manuals, g.n_depth(), g.n_offset(), config);
    return row;
}

MetricReport report(std::span<const GatherPicks> gathers, const PipelineConfig& config)
{
    MetricReport out;
    GatherMetrics& all = out.aggregate;
    all.name = "ALL";
    double sem_auto = 0.0, sem_manual = 0.0, mse = 0.0;
    for (const auto& picks : gathers) {
        const GatherMetrics row = evaluate_gather(picks, config);
        all.n_auto += row.n_auto;
        all.n_manual += row.n_manual;
        all.n_tracked += row.n_tracked;
        sem_auto += row.semblance_auto * static_cast<double>(row.n_auto);
        sem_manual += row.semblance_manual * static_cast<double>(row.n_manual);
        mse += row.slope_mse;
        out.rows.push_back(row);
    }
    all.semblance_auto = all.n_auto ? sem_auto / static_cast<double>(all.n_auto) : 0.0;
    all.semblance_manual = all.n_manual ? sem_manual / static_cast<double>(all.n_manual) : 0.0;
    all.track_rate = all.n_manual ? static_cast<double>(all.n_tracked) / static_cast<double>(all.n_manual) : 1.0;
    all.slope_mse = gathers.empty() ? 0.0 : mse / static_cast<double>(gathers.size());
    return out;
}

std::string format_report(const MetricReport& report)
{
    std::string out = kReportHeader;
    out += '\n';
    char buf[512];
    auto emit = [&](const GatherMetrics& r) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%zu,%.6f,%.6f,%.6f,%.8f\n", r.name.c_str(), r.n_auto,
                      r.n_manual, r.n_tracked, r.semblance_auto, r.semblance_manual, r.track_rate,
                      r.slope_mse);
        out += buf;
    };
    for (const auto& r : report.rows) {
        emit(r);
    }
    emit(report.aggregate);
    return out;
}

}  // namespace rmo
