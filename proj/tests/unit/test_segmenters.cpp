#include "rmo/segmenters.hpp"
#include "rmo/synthgen.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace rmo;
namespace fs = std::filesystem;

TEST_CASE("oracle without blur returns the mask")
{
    BinaryMask m(6, 5);
    m.set(1, 1);
    m.set(4, 3);
    const auto s = segment_oracle(m, 0.0);
    CHECK(s.raster() == m.to_raster());
    const auto z = segment_oracle(BinaryMask(6, 5), 1.0);
    for (float v : z.raster().values()) {
        CHECK(v == 0.0f);
    }
}

TEST_CASE("oracle blur of a single pixel is a unit-peak Gaussian")
{
    BinaryMask m(21, 21);
    m.set(10, 10);
    const auto s = segment_oracle(m, 1.0);
    CHECK(s(10, 10) == 1.0f);
    // Kernel support is a square of half-width 4 sigma.
    for (int dr = -4; dr <= 4; ++dr) {
        for (int dc = -4; dc <= 4; ++dc) {
            const double expected = std::exp(-(dr * dr + dc * dc) / 2.0);
            CHECK(s(static_cast<std::size_t>(10 + dr), static_cast<std::size_t>(10 + dc)) ==
                  doctest::Approx(expected).epsilon(1e-6).scale(1.0));
            CHECK(s(static_cast<std::size_t>(10 + dr), static_cast<std::size_t>(10 + dc)) ==
                  s(static_cast<std::size_t>(10 + dc), static_cast<std::size_t>(10 - dr)));
        }
    }
}

TEST_CASE("oracle normalizes each component separately")
{
    BinaryMask m(30, 30);
    for (std::size_t c = 2; c < 28; ++c) {
        m.set(5, c);  // long line: large blurred sum
    }
    m.set(20, 15);    // isolated pixel
    const auto s = segment_oracle(m, 1.0);
    CHECK(s(20, 15) == 1.0f);
    float line_peak = 0.0f;
    for (std::size_t c = 0; c < 30; ++c) {
        line_peak = std::max(line_peak, s(5, c));
    }
    CHECK(line_peak == 1.0f);
}

TEST_CASE("baseline segmentation")
{
    const Gather zero(Raster(30, 4));
    const auto zero_map = segment_baseline(feature_stack(zero, FeatureConfig{}));
    for (float v : zero_map.raster().values()) {
        CHECK(v == 0.0f);
    }

    // Monotone traces: no peaks anywhere, so nothing survives the gate.
    std::vector<float> ramp(30 * 4);
    for (std::size_t i = 0; i < ramp.size(); ++i) {
        ramp[i] = static_cast<float>(i / 4);
    }
    const auto ramp_map = segment_baseline(feature_stack(Gather(Raster(30, 4, ramp)), FeatureConfig{}));
    for (float v : ramp_map.raster().values()) {
        CHECK(v == 0.0f);
    }

    // Noise-free flat event: crest row only. The trace must be long enough
    // that the AGC-amplified rising tail stays under 20% of the samples.
    SynthSpec s;
    s.n_depth = 1000;
    s.d_max = 1000;
    s.n_offset = 10;
    s.noise_frac = 0.0;
    std::vector<CurvePoint> pts;
    for (int o = 0; o < 10; ++o) {
        pts.push_back({o, 500.0});
    }
    const std::vector<std::vector<CurvePoint>> curves{pts};
    const auto g = render_gather(curves, s).gather;
    const auto seg = segment_baseline(feature_stack(g, FeatureConfig{}));
    std::size_t on = 0;
    for (std::size_t r = 0; r < 1000; ++r) {
        for (std::size_t c = 0; c < 10; ++c) {
            on += seg(r, c) > 0.0f;
            if (r == 500) {
                CHECK(seg(r, c) == 1.0f);
            }
        }
    }
    CHECK(on == 10);
}

TEST_CASE("percentile of absolute values")
{
    const std::vector<float> v{-4.f, 1.f, -2.f, 3.f, 0.f};
    CHECK(abs_percentile(v, 0.0) == 0.0);
    CHECK(abs_percentile(v, 100.0) == 4.0);
    CHECK(abs_percentile(v, 50.0) == 2.0);
    CHECK(abs_percentile(v, 80.0) == doctest::Approx(3.2));
}

TEST_CASE("external maps")
{
    const fs::path dir = fs::temp_directory_path() / "rmopick_unit" / "maps";
    fs::create_directories(dir);
    CHECK(external_map_path("/data/gather_00001.cigr", dir) == dir / "gather_00001_seg.cigr");
    CHECK(external_map_path("g.cigr", dir, "_prob") == dir / "g_prob.cigr");

    write_raster(Raster(2, 2, {-0.005f, 0.5f, 1.005f, 1.0f}), dir / "ok.cigr");
    const auto m = load_segmentation(dir / "ok.cigr", 2, 2);
    CHECK(m(0, 0) == 0.0f);
    CHECK(m(1, 0) == 1.0f);
    CHECK_THROWS(load_segmentation(dir / "ok.cigr", 3, 2));

    write_raster(Raster(2, 2, {0.f, 0.5f, 1.2f, 1.0f}), dir / "bad.cigr");
    CHECK_THROWS(load_segmentation(dir / "bad.cigr", 2, 2));
    CHECK_THROWS(load_segmentation(dir / "missing.cigr", 2, 2));
}

TEST_CASE("strategy dispatch")
{
    BinaryMask label(10, 4);
    label.set(3, 1);
    const Gather g(Raster(10, 4));
    SegmentInput in;
    in.gather = &g;
    CHECK_THROWS(segment(OracleSegmenter{}, in, FeatureConfig{}));
    in.label = &label;
    CHECK(segment(OracleSegmenter{0.0}, in, FeatureConfig{}).raster() == label.to_raster());
    CHECK_NOTHROW(segment(BaselineSegmenter{}, in, FeatureConfig{}));
    in.gather_path = "nowhere/g.cigr";
    CHECK_THROWS(segment(ExternalSegmenter{"nowhere"}, in, FeatureConfig{}));
}
