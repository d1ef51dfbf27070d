#include "rmo/curve_refine.hpp"
#include "rmo/segmenters.hpp"
#include "rmo/synthgen.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace rmo;

namespace {

std::vector<CurvePoint> linear_points(int from, int to, double slope, double intercept)
{
    std::vector<CurvePoint> pts;
    for (int o = from; o <= to; ++o) {
        pts.push_back({o, slope * o + intercept});
    }
    return pts;
}

}  // namespace

TEST_CASE("slope field of constant samples is constant")
{
    RefineConfig cfg;
    const std::vector<SlopeSample> one{{30.0, 200.0, 0.3}};
    const auto f = slope_field(one, 500, 60, cfg);
    CHECK(f.n_offset_cells() == 30);
    CHECK(f.n_depth_cells() == 50);
    for (double v : f.values()) {
        CHECK(v == doctest::Approx(0.3));
    }

    std::vector<SlopeSample> many;
    Rng rng(2);
    for (int i = 0; i < 40; ++i) {
        many.push_back({rng.uniform(0, 60), rng.uniform(0, 500), -1.25});
    }
    const auto uniform = slope_field(many, 500, 60, cfg);
    for (double v : uniform.values()) {
        CHECK(v == doctest::Approx(-1.25));
    }
    CHECK_THROWS(slope_field({}, 500, 60, cfg));
}

TEST_CASE("slope field averages symmetric samples")
{
    RefineConfig cfg;
    // Cell (1, 1) is centred at offset 2.5, depth 14.5.
    const std::vector<SlopeSample> pair{{0.5, 14.5, 0.0}, {4.5, 14.5, 1.0}};
    const auto f = slope_field(pair, 40, 6, cfg);
    CHECK(f.cell(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("slope field stays within the sample range and falls back to the nearest sample")
{
    RefineConfig cfg;
    std::vector<SlopeSample> s{{10.0, 50.0, -0.4}, {12.0, 58.0, 1.7}, {40.0, 900.0, 3.0}};
    const auto f = slope_field(s, 1000, 60, cfg);
    for (double v : f.values()) {
        CHECK(v >= -0.4 - 1e-12);
        CHECK(v <= 3.0 + 1e-12);
    }
    // Far from every sample within kernel reach: nearest sample decides.
    CHECK(f.at(59, 999) == doctest::Approx(3.0));
    CHECK(f.at(0, 400) == doctest::Approx(1.7).epsilon(0.5));
}

TEST_CASE("slope field matches a brute-force kernel average")
{
    RefineConfig cfg;
    Rng rng(8);
    std::vector<SlopeSample> s;
    for (int i = 0; i < 25; ++i) {
        s.push_back({rng.uniform(0, 30), rng.uniform(0, 100), rng.uniform(-2, 2)});
    }
    const auto f = slope_field(s, 100, 30, cfg);
    for (std::size_t io = 0; io < f.n_offset_cells(); io += 3) {
        for (std::size_t id = 0; id < f.n_depth_cells(); ++id) {
            const double o = (io + 0.5) * 2.0 - 0.5;
            const double z = (id + 0.5) * 10.0 - 0.5;
            double num = 0.0, den = 0.0;
            for (const auto& x : s) {
                const double w = std::exp(-((x.offset - o) * (x.offset - o) + (x.depth - z) * (x.depth - z)) / 50.0);
                num += w * x.slope;
                den += w;
            }
            if (den >= 1e-12) {
                CHECK(f.cell(io, id) == doctest::Approx(num / den).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("fit_point closed-form cases")
{
    RefineConfig cfg;
    cfg.lambda = 0.0;
    const auto line = linear_points(0, 20, 2.0, 5.0);
    for (double o : {0.0, 3.0, 7.5, 20.0}) {
        const auto fit = fit_point(line, o, 0.0, -9.0, cfg);
        CHECK(!fit.singular);
        CHECK(fit.depth == doctest::Approx(2.0 * o + 5.0).epsilon(1e-12));
        CHECK(fit.slope == doctest::Approx(2.0));
    }

    cfg.lambda = 1e12;
    const std::vector<CurvePoint> two{{0, 10.0}, {2, 14.0}};
    const auto pulled = fit_point(two, 1.0, 12.0, 0.0, cfg);
    CHECK(std::fabs(pulled.slope) < 1e-6);
    CHECK(pulled.depth == doctest::Approx(12.0));

    cfg.lambda = 3.0;
    const std::vector<CurvePoint> single{{4, 33.0}};
    const auto anchored = fit_point(single, 4.0, 33.0, 0.7, cfg);
    CHECK(!anchored.singular);
    CHECK(anchored.depth == doctest::Approx(33.0));
    CHECK(anchored.slope == doctest::Approx(0.7));

    cfg.lambda = 0.0;
    const auto singular = fit_point(single, 4.0, 33.0, 0.7, cfg);
    CHECK(singular.singular);
    CHECK(singular.depth == 33.0);
    CHECK_THROWS(fit_point({}, 0.0, 0.0, 0.0, cfg));
}

TEST_CASE("refinement is exact on lines when the prior equals the true slope")
{
    for (double lambda : {0.0, 1.0, 1e4, 1e9}) {
        RefineConfig cfg;
        cfg.lambda = lambda;
        const auto pts = linear_points(10, 60, -0.75, 300.0);
        for (const auto& p : pts) {
            CHECK(std::fabs(fit_point(pts, p.offset, p.depth, -0.75, cfg).depth - p.depth) <= 1e-7);
        }
    }
}

TEST_CASE("larger lambda pulls the slope toward the prior")
{
    Rng rng(12);
    std::vector<CurvePoint> pts;
    for (int o = 0; o < 15; ++o) {
        pts.push_back({o, 100 + 1.3 * o + rng.uniform(-2, 2)});
    }
    RefineConfig cfg;
    double previous = 1e300;
    for (double lambda : {0.0, 1.0, 10.0, 1e3, 1e5}) {
        cfg.lambda = lambda;
        const double gap = std::fabs(fit_point(pts, 7.0, 0.0, -0.5, cfg).slope + 0.5);
        CHECK(gap <= previous);
        previous = gap;
    }
}

TEST_CASE("refine_curve keeps offsets and clamps depths")
{
    const SlopeField zero(5, 1, 2.0, 10.0, 5.0, std::vector<double>(5, 0.0));
    RefineConfig cfg;
    cfg.lambda = 0.0;
    const Curve c(linear_points(0, 9, -1.0, 3.0));
    const Curve r = refine_curve(c, zero, cfg, 10);
    REQUIRE(r.size() == c.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(r[i].offset == c[i].offset);
        CHECK(r[i].depth >= 0.0);
        CHECK(r[i].depth < 10.0);
    }
    CHECK(r[0].depth == doctest::Approx(3.0));
    CHECK(r[9].depth == 0.0);
}

TEST_CASE("filter_short")
{
    std::vector<Curve> curves{Curve(linear_points(0, 18, 0, 1)), Curve(linear_points(0, 19, 0, 1)),
                              Curve(linear_points(0, 0, 0, 1))};
    CHECK(filter_short(curves, 1) == curves);
    const auto kept = filter_short(curves, 20);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].size() == 20);
    CHECK(filter_short({}, 20).empty());
}

TEST_CASE("cascade on well separated oracle labels recovers the events")
{
    BinaryMask label(300, 60);
    for (int o = 0; o < 60; ++o) {
        label.set(static_cast<std::size_t>(std::lround(50 + 0.5 * o)), static_cast<std::size_t>(o));
        label.set(200, static_cast<std::size_t>(o));
    }
    const auto r = run_cascade(segment_oracle(label, 1.0), preset("fa"));
    REQUIRE(r.picks.size() == 2);
    CHECK(r.picks[0].size() == 60);
    for (const auto& p : r.picks[0]) {
        CHECK(p.depth == doctest::Approx(50 + 0.5 * p.offset).epsilon(0.02));
    }
    for (const auto& p : r.picks[1]) {
        CHECK(p.depth == doctest::Approx(200.0).epsilon(1e-9));
    }
    CHECK(pick_pipeline(segment_oracle(BinaryMask(30, 30), 1.0), preset("fa")).empty());
}
