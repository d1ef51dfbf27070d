#include "rmo/features.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace rmo {

std::vector<double> agc_trace(std::span<const double> trace, int h, double epsilon)
{
    if (trace.empty()) {
        throw std::invalid_argument("agc_trace: empty trace");
    }
    if (h < 1) {
        throw std::invalid_argument("agc_trace: window must be >= 1");
    }
    const auto window = static_cast<std::size_t>(h);
    std::vector<double> out(trace.size());
    // Recomputing each window sum keeps results independent of summation history.
    for (std::size_t t = 0; t < trace.size(); ++t) {
        const std::size_t first = t + 1 >= window ? t + 1 - window : 0;
        double energy = 0.0;
        for (std::size_t i = first; i <= t; ++i) {
            energy += trace[i] * trace[i];
        }
        energy /= static_cast<double>(t - first + 1);
        out[t] = trace[t] / (std::sqrt(energy) + epsilon);
    }
    return out;
}

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

std::vector<double> bandpass_trace(std::span<const double> trace, double f_min, double f_max)
{
    if (trace.size() < 2) {
        throw std::invalid_argument("bandpass_trace: trace needs at least 2 samples");
    }
    if (!(f_min < f_max)) {
        throw std::invalid_argument("bandpass_trace: f_min must be below f_max");
    }
    const int n = static_cast<int>(trace.size());
    const int n_bins = n / 2 + 1;
    std::unique_ptr<double, FftwFree> real(fftw_alloc_real(static_cast<std::size_t>(n)));
    std::unique_ptr<fftw_complex, FftwFree> spectrum(fftw_alloc_complex(static_cast<std::size_t>(n_bins)));

    Plan forward, inverse;
    {
        std::lock_guard lock(planner_mutex());
        forward.reset(fftw_plan_dft_r2c_1d(n, real.get(), spectrum.get(), FFTW_ESTIMATE));
        inverse.reset(fftw_plan_dft_c2r_1d(n, spectrum.get(), real.get(), FFTW_ESTIMATE));
    }
    if (!forward || !inverse) {
        throw std::runtime_error("bandpass_trace: FFT planning failed");
    }

    std::copy(trace.begin(), trace.end(), real.get());
    fftw_execute(forward.get());
    for (int j = 0; j < n_bins; ++j) {
        // bin j and its mirror n-j share |frequency| = j/n
        const double f = static_cast<double>(j) / n;
        if (f < f_min || f > f_max) {
            spectrum.get()[j][0] = 0.0;
            spectrum.get()[j][1] = 0.0;
        }
    }
    fftw_execute(inverse.get());

    std::vector<double> out(trace.size());
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = real.get()[i] / n;
    }
    return out;
}

BinaryMask peak_mask(const Gather& gather)
{
    BinaryMask mask(gather.n_depth(), gather.n_offset());
    for (std::size_t k = 0; k < gather.n_offset(); ++k) {
        for (std::size_t z = 1; z + 1 < gather.n_depth(); ++z) {
            const float v = gather(z, k);
            if (v > gather(z - 1, k) && v > gather(z + 1, k)) {
                mask.set(z, k);
            }
        }
    }
    return mask;
}

std::array<Raster, 4> FeatureStack::channels() const
{
    return {agc1, agc2, bandpass, peaks.to_raster()};
}

FeatureStack feature_stack(const Gather& gather, const FeatureConfig& config)
{
    config.validate();
    const Raster& raw = gather.raster();
    FeatureStack stack{Raster(raw.rows(), raw.cols()), Raster(raw.rows(), raw.cols()),
                       Raster(raw.rows(), raw.cols()), peak_mask(gather)};
    for (std::size_t k = 0; k < raw.cols(); ++k) {
        const auto trace = raw.column(k);
        stack.agc1.set_column(k, agc_trace(trace, config.h1, config.epsilon));
        stack.agc2.set_column(k, agc_trace(trace, config.h2, config.epsilon));
        stack.bandpass.set_column(k, bandpass_trace(trace, config.f_min, config.f_max));
    }
    return stack;
}

void export_feature_stack(const FeatureStack& stack, const std::filesystem::path& dir,
                          const std::string& stem)
{
    const auto channels = stack.channels();
    for (std::size_t i = 0; i < channels.size(); ++i) {
        write_raster(channels[i], dir / (stem + kFeatureSuffixes[i] + ".cigr"));
    }
}

}  // namespace rmo
