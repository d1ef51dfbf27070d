// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "rmo/cli.hpp"
#include "rmo/curve_cluster.hpp"
#include "rmo/curve_extract.hpp"
#include "rmo/curve_refine.hpp"
#include "rmo/metrics.hpp"
#include "rmo/parallel.hpp"
#include "rmo/segmenters.hpp"
#include "rmo/synthgen.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

using namespace rmo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int g_failures = 0;

void report_line(const char* name, const Outcome& o)
{
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) {
        ++g_failures;
    }
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int worker_count()
{
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// ------------------------------------------------------------------ 1

Outcome oracle_end_to_end()
{
    constexpr int n_gathers = 50;
    const PipelineConfig config = preset("fa");
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<SyntheticSample> samples(n_gathers);
    std::vector<std::vector<Curve>> picks(n_gathers);
    parallel_for(n_gathers, worker_count(), [&](std::size_t i) {
        SynthSpec spec;
        spec.k_c = 60;
        spec.seed = derive_seed(1001, i);
        samples[i] = synthesize(spec);
        picks[i] = pick_pipeline(segment_oracle(samples[i].label, 1.0), config);
    });
    std::vector<GatherPicks> rows;
    for (int i = 0; i < n_gathers; ++i) {
        rows.push_back({std::to_string(i), &samples[i].gather, picks[i], samples[i].truth});
    }
    const MetricReport rep = report(rows, config);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto& a = rep.aggregate;
    const bool pass = a.track_rate >= 0.85 && a.slope_mse <= 0.01 && seconds <= 60.0;
    return {pass, fmt("TR=%.4f (need >= 0.85, %zu/%zu tracked), MSE=%.5f (need <= 0.01), %.1f s (need <= 60)",
                      a.track_rate, a.n_tracked, a.n_manual, a.slope_mse, seconds)};
}

// ------------------------------------------------------------------ 2

using PointSet = std::set<std::pair<int, long>>;

PointSet integer_points(const Curve& c)
{
    PointSet s;
    for (const auto& p : c) {
        s.insert({p.offset, std::lround(p.depth)});
    }
    return s;
}

/// True when no labelled pixel of one curve touches (8-neighbourhood) a pixel of another.
bool labels_separated(const std::vector<Curve>& truth, std::size_t rows, std::size_t cols)
{
    std::vector<int> owner(rows * cols, -1);
    for (std::size_t k = 0; k < truth.size(); ++k) {
        for (const auto& p : truth[k]) {
            const long r = std::lround(p.depth);
            int& o = owner[static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(p.offset)];
            if (o >= 0 && o != static_cast<int>(k)) {
                return false;
            }
            o = static_cast<int>(k);
        }
    }
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const int o = owner[r * cols + c];
            if (o < 0) {
                continue;
            }
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    const long rr = static_cast<long>(r) + dr, cc = static_cast<long>(c) + dc;
                    if (rr < 0 || cc < 0 || rr >= static_cast<long>(rows) || cc >= static_cast<long>(cols)) {
                        continue;
                    }
                    const int q = owner[static_cast<std::size_t>(rr) * cols + static_cast<std::size_t>(cc)];
                    if (q >= 0 && q != o) {
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

Outcome exact_round_trip()
{
    constexpr int n_gathers = 20;
    const PipelineConfig config = preset("fa");
    int checked = 0;
    int skipped = 0;
    std::string problem;
    for (std::uint64_t i = 0; checked < n_gathers && problem.empty(); ++i) {
        SynthSpec spec;
        spec.k_c = 10;
        spec.seed = derive_seed(2002, i);
        const auto sample = synthesize(spec);
        if (!labels_separated(sample.truth, spec.n_depth, spec.n_offset)) {
            ++skipped;
            continue;
        }
        const auto merged = merge_curves(extract_all(segment_oracle(sample.label, 0.0), config.t_seg),
                                         config.cluster);
        std::multiset<PointSet> got, want;
        for (const auto& c : merged) {
            got.insert(integer_points(c));
            for (const auto& p : c) {
                if (p.depth != std::round(p.depth)) {
                    problem = fmt("seed index %zu: non-integer extracted depth %.6f", static_cast<std::size_t>(i), p.depth);
                }
            }
        }
        for (const auto& c : sample.truth) {
            want.insert(integer_points(c));
        }
        if (problem.empty() && got != want) {
            problem = fmt("seed index %zu: %zu extracted vs %zu truth curves, point sets differ",
                          static_cast<std::size_t>(i), merged.size(), sample.truth.size());
        }
        ++checked;
    }
    if (!problem.empty()) {
        return {false, problem};
    }
    return {true, fmt("%d gathers (%d with touching labels skipped), extracted point sets identical to rounded truth",
                      checked, skipped)};
}

// ------------------------------------------------------------------ 3

/// Direct weighted least squares in raw (uncentred) coordinates plus the
/// ridge row sqrt(lambda') (s - m) = 0, solved by Householder QR.
Eigen::Vector2d direct_fit(const std::vector<CurvePoint>& pts, double o_star, double prior,
                           const RefineConfig& cfg)
{
    const int n = static_cast<int>(pts.size());
    Eigen::MatrixXd A(n + 1, 2);
    Eigen::VectorXd y(n + 1);
    for (int i = 0; i < n; ++i) {
        const double dx = pts[i].offset - o_star;
        const double w = std::sqrt(std::exp(-dx * dx / (2.0 * cfg.h_data * cfg.h_data)));
        A(i, 0) = w;
        A(i, 1) = w * pts[i].offset;
        y(i) = w * pts[i].depth;
    }
    const double r = std::sqrt(cfg.lambda / (2.0 * cfg.h_para * cfg.h_para));
    A(n, 0) = 0.0;
    A(n, 1) = r;
    y(n) = r * prior;
    return A.colPivHouseholderQr().solve(y);  // (b, s)
}

Outcome regression_oracle()
{
    Rng rng(3003);
    double worst = 0.0;
    int monotone_failures = 0;
    for (int t = 0; t < 100; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform(0.0, 40.0));
        std::set<int> offsets;
        const int base = static_cast<int>(rng.uniform(0.0, 60.0));
        while (static_cast<int>(offsets.size()) < n) {
            offsets.insert(base + static_cast<int>(rng.uniform(0.0, 2.0 * n + 2.0)));
        }
        std::vector<CurvePoint> pts;
        const double z0 = rng.uniform(50.0, 900.0);
        const double slope = rng.uniform(-3.0, 3.0);
        for (int o : offsets) {
            pts.push_back({o, z0 + slope * (o - base) + rng.uniform(-4.0, 4.0)});
        }
        const auto& pick = pts[static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(n)))];
        const double prior = rng.uniform(-3.0, 3.0);

        RefineConfig cfg;
        cfg.h_data = rng.uniform(2.0, 8.0);
        cfg.lambda = 0.0;
        const LocalFit fit = fit_point(pts, pick.offset, pick.depth, prior, cfg);
        const Eigen::Vector2d ref = direct_fit(pts, pick.offset, prior, cfg);
        const double ref_depth = ref(0) + ref(1) * pick.offset;
        worst = std::max({worst, std::fabs(fit.depth - ref_depth), std::fabs(fit.slope - ref(1))});
        if (fit.singular) {
            worst = std::max(worst, 1.0);
        }

        double gap = std::fabs(fit.slope - prior);
        for (double lambda : {1.0, 10.0, 1e3}) {
            cfg.lambda = lambda;
            const double g = std::fabs(fit_point(pts, pick.offset, pick.depth, prior, cfg).slope - prior);
            if (g > gap + 1e-12) {
                ++monotone_failures;
                break;
            }
            gap = g;
        }
    }
    const bool pass = worst <= 1e-9 && monotone_failures == 0;
    return {pass, fmt("max |closed form - QR| = %.3g (need <= 1e-9), lambda-monotonicity failures %d/100",
                      worst, monotone_failures)};
}

// ------------------------------------------------------------------ 4

Outcome clustering_oracle()
{
    Rng rng(4004);
    int mismatches = 0;
    for (int t = 0; t < 200; ++t) {
        const int n = static_cast<int>(rng.uniform(0.0, 11.0));
        std::vector<Curve> curves;
        for (int i = 0; i < n; ++i) {
            const int len = 1 + static_cast<int>(rng.uniform(0.0, 25.0));
            const int start = static_cast<int>(rng.uniform(0.0, 60.0));
            double z = rng.uniform(0.0, 60.0);
            const double s = rng.uniform(-2.0, 2.0);
            std::vector<CurvePoint> pts;
            for (int k = 0; k < len; ++k) {
                pts.push_back({start + k, z});
                z += s + rng.uniform(-0.5, 0.5);
            }
            curves.emplace_back(std::move(pts));
        }
        ClusterConfig cfg;
        cfg.d_eps = rng.uniform(1.0, 20.0);
        cfg.alpha = rng.uniform(0.0, 1.0);
        cfg.n_min_pts = 1;

        // Depth-first search over the <= d_eps graph.
        std::vector<int> comp(n, -1);
        int n_comp = 0;
        for (int i = 0; i < n; ++i) {
            if (comp[i] >= 0) {
                continue;
            }
            std::vector<int> stack{i};
            comp[i] = n_comp;
            while (!stack.empty()) {
                const int u = stack.back();
                stack.pop_back();
                for (int v = 0; v < n; ++v) {
                    if (comp[v] < 0 && curve_distance(curves[u], curves[v], cfg) <= cfg.d_eps) {
                        comp[v] = n_comp;
                        stack.push_back(v);
                    }
                }
            }
            ++n_comp;
        }
        std::set<std::set<std::size_t>> want;
        for (int c = 0; c < n_comp; ++c) {
            std::set<std::size_t> members;
            for (int i = 0; i < n; ++i) {
                if (comp[i] == c) {
                    members.insert(static_cast<std::size_t>(i));
                }
            }
            want.insert(members);
        }
        std::set<std::set<std::size_t>> got;
        for (const auto& cluster : cluster_curves(curves, cfg)) {
            got.insert(std::set<std::size_t>(cluster.begin(), cluster.end()));
        }
        if (got != want) {
            ++mismatches;
        }
    }
    return {mismatches == 0, fmt("%d/200 partitions differ from brute-force components", mismatches)};
}

// ------------------------------------------------------------------ 5

Outcome metric_identities()
{
    std::vector<std::string> failures;
    Rng rng(5005);

    // Flat curve over identical traces.
    const std::size_t nd = 120, no = 16;
    std::vector<float> trace(nd);
    for (auto& v : trace) {
        v = static_cast<float>(rng.uniform(-1.0, 1.0));
    }
    std::vector<float> same(nd * no);
    for (std::size_t r = 0; r < nd; ++r) {
        for (std::size_t c = 0; c < no; ++c) {
            same[r * no + c] = trace[r];
        }
    }
    const Gather flat_gather(Raster(nd, no, same));
    std::vector<CurvePoint> flat;
    for (int o = 0; o < static_cast<int>(no); ++o) {
        flat.push_back({o, 60.0});
    }
    const double s_flat = semblance(flat_gather, Curve(flat), 5);
    if (std::fabs(s_flat - 1.0) > 1e-9) {
        failures.push_back(fmt("flat semblance %.12f", s_flat));
    }

    // Random picks on a synthetic gather.
    SynthSpec spec;
    spec.k_c = 30;
    spec.seed = 55;
    const auto sample = synthesize(spec);
    const PipelineConfig cfg = preset("fa");
    const auto& X = sample.truth;
    if (track_rate(X, X, cfg.metric.d_t) != 1.0) {
        failures.push_back("track_rate(X,X) != 1");
    }
    const double mse = slope_mse(X, X, spec.n_depth, spec.n_offset, cfg);
    if (mse != 0.0) {
        failures.push_back(fmt("slope_mse(X,X) = %.3g", mse));
    }

    // Scale invariance. Power-of-two factors keep the float32 gather exact.
    double worst = 0.0;
    for (double scale : {0.0078125, 0.5, 4.0, 1024.0}) {
        auto v = std::vector<float>(sample.gather.raster().values().begin(),
                                    sample.gather.raster().values().end());
        for (auto& x : v) {
            x = static_cast<float>(x * scale);
        }
        const Gather scaled(Raster(spec.n_depth, spec.n_offset, std::move(v)));
        for (const auto& c : X) {
            worst = std::max(worst, std::fabs(semblance(scaled, c, 5) - semblance(sample.gather, c, 5)));
        }
    }
    if (worst > 1e-9) {
        failures.push_back(fmt("scale invariance deviation %.3g", worst));
    }

    std::string detail = fmt("flat semblance %.12f, scale deviation %.2g, TR(X,X)=1, MSE(X,X)=0", s_flat, worst);
    if (!failures.empty()) {
        detail.clear();
        for (const auto& f : failures) {
            detail += f + "; ";
        }
    }
    return {failures.empty(), detail};
}

// ------------------------------------------------------------------ 6

struct Box {
    double b_lo, b_hi, g_lo, g_hi;
};

/// Shape table with floor part boundaries.
Box table_box(int k, int k_c)
{
    if (k < k_c / 3) {
        return {0.275, 1.125, 2.75e-4, 6.25e-4};
    }
    if (k < k_c / 2) {
        return {0.125, 0.50, 2.00e-4, 3.75e-4};
    }
    if (k < 2 * k_c / 3) {
        return {-0.50, 0.125, -2.50e-4, -1.25e-4};
    }
    return {0.275, 1.125, 2.75e-4, 6.25e-4};
}

std::vector<char> file_bytes(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome synthetic_generator()
{
    Rng pick(6006);
    Rng draws(6007);
    int outside = 0;
    for (int t = 0; t < 10000; ++t) {
        const int k_c = 1 + static_cast<int>(pick.uniform(0.0, 120.0));
        const int k = 1 + static_cast<int>(pick.uniform(0.0, static_cast<double>(k_c)));
        const CurveParams p = sample_curve_params(k, k_c, draws);
        const Box b = table_box(k, k_c);
        if (!(p.beta >= b.b_lo && p.beta <= b.b_hi && p.gamma >= b.g_lo && p.gamma <= b.g_hi)) {
            ++outside;
        }
    }

    int differing = 0;
    const fs::path root = fs::temp_directory_path() / "rmo_acceptance_synth";
    fs::remove_all(root);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        SynthSpec spec;
        spec.seed = seed;
        for (const char* run : {"a", "b"}) {
            generate_dataset(spec, {{60, 2}, {80, 1}}, root / std::to_string(seed) / run, 1);
        }
        for (const auto& entry : fs::directory_iterator(root / std::to_string(seed) / "a")) {
            const fs::path other = root / std::to_string(seed) / "b" / entry.path().filename();
            if (file_bytes(entry.path()) != file_bytes(other)) {
                ++differing;
            }
        }
    }
    fs::remove_all(root);
    return {outside == 0 && differing == 0,
            fmt("%d/10000 draws outside their box, %d files differ across repeated runs", outside, differing)};
}

// ------------------------------------------------------------------ 7

Outcome sweep_monotone()
{
    const fs::path root = fs::temp_directory_path() / "rmo_acceptance_sweep";
    fs::remove_all(root);
    SynthSpec spec;
    spec.seed = 7007;
    generate_dataset(spec, {{60, 4}}, root, worker_count());

    cli::SweepOptions o;
    o.param = "d_eps";
    o.values = {"2", "4", "8", "16"};
    o.gathers = cli::manifest_gathers(root);
    o.jobs = worker_count();
    std::ostringstream table;
    const auto rows = cli::cmd_sweep(o, table);
    fs::remove_all(root);

    bool monotone = rows.size() == 4;
    std::string counts;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        counts += (i ? "," : "") + std::to_string(rows[i].n_merged);
        if (i > 0 && rows[i].n_merged > rows[i - 1].n_merged) {
            monotone = false;
        }
    }
    return {monotone, "merged counts for d_eps 2,4,8,16: " + counts};
}

Outcome guarded(const std::function<Outcome()>& f)
{
    try {
        return f();
    } catch (const std::exception& e) {
        return {false, std::string("exception: ") + e.what()};
    }
}

}  // namespace

int main()
{
    report_line("oracle end-to-end (50 gathers, K_c=60, blur 1, F-A)", guarded(oracle_end_to_end));
    report_line("exact round-trip (blur 0, non-adjacent labels, 20 gathers)", guarded(exact_round_trip));
    report_line("regression oracle (lambda=0 vs direct least squares, 100 instances)",
                guarded(regression_oracle));
    report_line("clustering oracle (200 random sets of <= 10 curves)", guarded(clustering_oracle));
    report_line("metric identities", guarded(metric_identities));
    report_line("synthetic generator (10^4 box draws, byte-identical reruns)", guarded(synthetic_generator));
    report_line("sweep d_eps {2,4,8,16} merged counts non-increasing", guarded(sweep_monotone));
    std::printf("%d criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
