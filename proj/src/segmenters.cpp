#include "rmo/segmenters.hpp"

#include "rmo/curve_extract.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rmo {

SegMap segment_oracle(const BinaryMask& label, double blur_sigma)
{
    if (blur_sigma < 0.0) {
        throw std::invalid_argument("segment_oracle: blur_sigma must be >= 0");
    }
    const std::size_t rows = label.rows();
    const std::size_t cols = label.cols();
    if (blur_sigma == 0.0) {
        return SegMap(label.to_raster());
    }

    const int radius = static_cast<int>(std::ceil(4.0 * blur_sigma));
    std::vector<double> kernel(static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1)));
    for (int dr = -radius; dr <= radius; ++dr) {
        for (int dc = -radius; dc <= radius; ++dc) {
            kernel[static_cast<std::size_t>((dr + radius) * (2 * radius + 1) + dc + radius)] =
                std::exp(-(dr * dr + dc * dc) / (2.0 * blur_sigma * blur_sigma));
        }
    }

    Raster out(rows, cols);
    std::vector<double> scratch(rows * cols, 0.0);
    std::vector<std::size_t> touched;
    for (const auto& component : connected_components(label)) {
        touched.clear();
        for (const auto& px : component) {
            for (int dr = -radius; dr <= radius; ++dr) {
                const long r = static_cast<long>(px.row) + dr;
                if (r < 0 || r >= static_cast<long>(rows)) {
                    continue;
                }
                for (int dc = -radius; dc <= radius; ++dc) {
                    const long c = static_cast<long>(px.col) + dc;
                    if (c < 0 || c >= static_cast<long>(cols)) {
                        continue;
                    }
                    const auto idx = static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c);
                    if (scratch[idx] == 0.0) {
                        touched.push_back(idx);
                    }
                    scratch[idx] +=
                        kernel[static_cast<std::size_t>((dr + radius) * (2 * radius + 1) + dc + radius)];
                }
            }
        }
        double peak = 0.0;
        for (auto idx : touched) {
            peak = std::max(peak, scratch[idx]);
        }
        auto values = out.values();
        for (auto idx : touched) {
            values[idx] = std::max(values[idx], static_cast<float>(scratch[idx] / peak));
            scratch[idx] = 0.0;
        }
    }
    return SegMap(std::move(out));
}

double abs_percentile(std::span<const float> values, double percentile)
{
    if (values.empty()) {
        return 0.0;
    }
    std::vector<double> mags(values.size());
    std::transform(values.begin(), values.end(), mags.begin(),
                   [](float v) { return std::fabs(static_cast<double>(v)); });
    std::sort(mags.begin(), mags.end());
    const double pos = percentile / 100.0 * static_cast<double>(mags.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, mags.size() - 1);
    return mags[lo] + (mags[hi] - mags[lo]) * (pos - static_cast<double>(lo));
}

SegMap segment_baseline(const FeatureStack& stack)
{
    const Raster& agc = stack.agc1;
    const double gate = abs_percentile(agc.values(), 80.0);
    Raster out(agc.rows(), agc.cols());
    for (std::size_t r = 0; r < agc.rows(); ++r) {
        for (std::size_t c = 0; c < agc.cols(); ++c) {
            if (stack.peaks(r, c) && std::fabs(static_cast<double>(agc(r, c))) > gate) {
                out(r, c) = 1.0f;
            }
        }
    }
    return SegMap(std::move(out));
}

SegMap load_segmentation(const std::filesystem::path& path, std::size_t rows, std::size_t cols)
{
    Raster raster = read_raster(path);
    if (raster.rows() != rows || raster.cols() != cols) {
        throw InvariantError(path.string() + ": segmentation is " + std::to_string(raster.rows()) +
                             "x" + std::to_string(raster.cols()) + ", gather is " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    }
    for (float v : raster.values()) {
        if (v < -0.01f || v > 1.01f) {
            throw InvariantError(path.string() + ": value " + std::to_string(v) +
                                 " is not a probability; wrong file?");
        }
    }
    return SegMap(std::move(raster));
}

std::filesystem::path external_map_path(const std::filesystem::path& gather_path,
                                        const std::filesystem::path& map_dir,
                                        const std::string& suffix)
{
    return map_dir / (gather_path.stem().string() + suffix + ".cigr");
}

SegMap segment(const SegmenterKind& kind, const SegmentInput& input, const FeatureConfig& features)
{
    struct Visitor {
        const SegmentInput& in;
        const FeatureConfig& features;

        SegMap operator()(const OracleSegmenter& s) const
        {
            if (in.label == nullptr) {
                throw std::runtime_error("oracle segmenter needs a label mask");
            }
            return segment_oracle(*in.label, s.blur_sigma);
        }
        SegMap operator()(const BaselineSegmenter&) const
        {
            if (in.gather == nullptr) {
                throw std::runtime_error("baseline segmenter needs the gather");
            }
            return segment_baseline(feature_stack(*in.gather, features));
        }
        SegMap operator()(const ExternalSegmenter& s) const
        {
            if (in.gather == nullptr) {
                throw std::runtime_error("external segmenter needs the gather dimensions");
            }
            return load_segmentation(external_map_path(in.gather_path, s.map_dir, s.suffix),
                                     in.gather->n_depth(), in.gather->n_offset());
        }
    };
    return std::visit(Visitor{input, features}, kind);
}

}  // namespace rmo
