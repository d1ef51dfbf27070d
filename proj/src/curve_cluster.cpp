#include "rmo/curve_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace rmo {

double ls_slope(std::span<const CurvePoint> points)
{
    const auto n = static_cast<double>(points.size());
    if (points.size() < 2) {
        return 0.0;
    }
    double so = 0.0, sd = 0.0, sod = 0.0, soo = 0.0;
    for (const auto& p : points) {
        so += p.offset;
        sd += p.depth;
        sod += p.offset * p.depth;
        soo += static_cast<double>(p.offset) * p.offset;
    }
    const double den = n * soo - so * so;
    return den == 0.0 ? 0.0 : (n * sod - so * sd) / den;
}

std::vector<SlopeSample> local_slopes(const Curve& curve, int win, int stride)
{
    if (win < 2 || stride < 1) {
        throw std::invalid_argument("local_slopes: need win >= 2 and stride >= 1");
    }
    std::vector<SlopeSample> out;
    const auto pts = curve.points();
    const auto w = static_cast<std::size_t>(win);
    const auto s = static_cast<std::size_t>(stride);
    for (std::size_t start = 0; start + 1 < pts.size(); start += s) {
        const std::size_t len = std::min(w, pts.size() - start);
        const auto window = pts.subspan(start, len);
        SlopeSample sample;
        for (const auto& p : window) {
            sample.offset += p.offset;
            sample.depth += p.depth;
        }
        sample.offset /= static_cast<double>(len);
        sample.depth /= static_cast<double>(len);
        sample.slope = ls_slope(window);
        out.push_back(sample);
        if (start + len == pts.size()) {
            break;
        }
    }
    return out;
}

double mean_slope(const Curve& curve, const ClusterConfig& config)
{
    const auto samples = local_slopes(curve, config.slope_win, config.slope_stride);
    if (samples.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& s : samples) {
        sum += s.slope;
    }
    return sum / static_cast<double>(samples.size());
}

double curve_distance(const Curve& a, double slope_a, const Curve& b, double slope_b,
                      const ClusterConfig& config)
{
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("curve_distance: empty curve");
    }
    auto weighted = [&](const CurvePoint& p, const CurvePoint& q) {
        const double dx = (p.offset - q.offset) * config.w_offset;
        const double dz = (p.depth - q.depth) * config.w_depth;
        return std::hypot(dx, dz);
    };
    const double endpoint = std::min(weighted(a.back(), b.front()), weighted(a.front(), b.back()));
    return config.alpha * std::fabs(slope_a - slope_b) + (1.0 - config.alpha) * endpoint;
}

double curve_distance(const Curve& a, const Curve& b, const ClusterConfig& config)
{
    return curve_distance(a, mean_slope(a, config), b, mean_slope(b, config), config);
}

std::vector<double> distance_matrix(std::span<const Curve> curves, const ClusterConfig& config)
{
    const std::size_t n = curves.size();
    std::vector<double> slopes(n);
    for (std::size_t i = 0; i < n; ++i) {
        slopes[i] = mean_slope(curves[i], config);
    }
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d[i * n + j] = d[j * n + i] = curve_distance(curves[i], slopes[i], curves[j], slopes[j], config);
        }
    }
    return d;
}

std::vector<std::vector<std::size_t>> dbscan(std::span<const double> distances, std::size_t n,
                                             double eps, int min_pts)
{
    if (distances.size() != n * n) {
        throw std::invalid_argument("dbscan: distance matrix must be n x n");
    }
    auto neighbours = [&](std::size_t i) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n; ++j) {
            if (distances[i * n + j] <= eps) {
                out.push_back(j);  // includes i itself
            }
        }
        return out;
    };

    constexpr long unvisited = -1;
    std::vector<long> label(n, unvisited);
    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        core[i] = neighbours(i).size() >= static_cast<std::size_t>(min_pts);
    }

    long next_label = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] != unvisited || !core[i]) {
            continue;
        }
        const long id = next_label++;
        label[i] = id;
        std::vector<std::size_t> frontier = {i};
        while (!frontier.empty()) {
            const std::size_t p = frontier.back();
            frontier.pop_back();
            if (!core[p]) {
                continue;  // border point: joins, does not expand
            }
            for (std::size_t q : neighbours(p)) {
                if (label[q] == unvisited) {
                    label[q] = id;
                    frontier.push_back(q);
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] == unvisited) {
            label[i] = next_label++;  // noise
        }
    }

    std::map<long, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        groups[label[i]].push_back(i);
    }
    std::vector<std::vector<std::size_t>> clusters;
    for (auto& [id, members] : groups) {
        clusters.push_back(std::move(members));
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return clusters;
}

std::vector<std::vector<std::size_t>> cluster_curves(std::span<const Curve> curves,
                                                     const ClusterConfig& config)
{
    config.validate();
    return dbscan(distance_matrix(curves, config), curves.size(), config.d_eps, config.n_min_pts);
}

Curve merge_group(std::span<const Curve> curves)
{
    std::map<int, std::pair<double, int>> acc;
    for (const auto& c : curves) {
        for (const auto& p : c) {
            auto& [sum, count] = acc[p.offset];
            sum += p.depth;
            ++count;
        }
    }
    std::vector<CurvePoint> points;
    points.reserve(acc.size());
    for (const auto& [offset, sc] : acc) {
        points.push_back({offset, sc.first / sc.second});
    }
    return Curve(std::move(points));
}

std::vector<Curve> merge_curves(std::span<const Curve> curves, const ClusterConfig& config)
{
    std::vector<Curve> merged;
    for (const auto& group : cluster_curves(curves, config)) {
        std::vector<Curve> members;
        members.reserve(group.size());
        for (auto i : group) {
            members.push_back(curves[i]);
        }
        merged.push_back(merge_group(members));
    }
    return merged;
}

}  // namespace rmo
