#pragma once

// Core data model shared by every stage: float rasters and their strong
// wrappers (Gather, SegMap), binary masks, curves, slope fields, and the
// CIGR raster / curve CSV file formats.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmo {

/// Raised for malformed input data that violates a type invariant.
class InvariantError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class IoErrorKind {
    open_failed,
    truncated_header,
    bad_magic,
    unsupported_version,
    dimension_overflow,
    truncated_payload,
    non_finite_value,
    malformed_row,
    non_monotone_offsets,
    write_failed,
};

const char* to_string(IoErrorKind kind);

class IoError : public std::runtime_error {
public:
    IoError(IoErrorKind kind, const std::string& what);
    IoErrorKind kind() const noexcept { return kind_; }

private:
    IoErrorKind kind_;
};

/// Row-major float32 raster. Rows are depth samples, columns are offset traces.
class Raster {
public:
    Raster() = default;
    /// Zero-filled raster.
    Raster(std::size_t rows, std::size_t cols);
    /// Takes ownership of `values`; throws InvariantError on size mismatch or non-finite values.
    Raster(std::size_t rows, std::size_t cols, std::vector<float> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    float operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    float& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

    std::span<const float> values() const noexcept { return values_; }
    std::span<float> values() noexcept { return values_; }

    /// Copy of column `c` (one trace) promoted to double.
    std::vector<double> column(std::size_t c) const;
    void set_column(std::size_t c, std::span<const double> trace);

    bool same_dims(const Raster& other) const noexcept
    {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<float> values_;
};

/// One common-image gather: depth rows x offset columns of amplitudes.
class Gather {
public:
    Gather() = default;
    /// Requires at least 2x2 samples.
    explicit Gather(Raster amplitudes);

    std::size_t n_depth() const noexcept { return data_.rows(); }
    std::size_t n_offset() const noexcept { return data_.cols(); }
    float operator()(std::size_t depth, std::size_t offset) const { return data_(depth, offset); }
    const Raster& raster() const noexcept { return data_; }

private:
    Raster data_;
};

/// Per-pixel curvature probability aligned with a Gather. Values are clamped to [0, 1].
class SegMap {
public:
    SegMap() = default;
    explicit SegMap(Raster probabilities);

    std::size_t rows() const noexcept { return data_.rows(); }
    std::size_t cols() const noexcept { return data_.cols(); }
    float operator()(std::size_t r, std::size_t c) const { return data_(r, c); }
    const Raster& raster() const noexcept { return data_; }

private:
    Raster data_;
};

/// Binary raster (label masks, binarized maps, region masks, peak masks).
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(std::size_t rows, std::size_t cols);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool operator()(std::size_t r, std::size_t c) const { return bits_[r * cols_ + c] != 0; }
    void set(std::size_t r, std::size_t c, bool on = true) { bits_[r * cols_ + c] = on ? 1 : 0; }
    std::size_t count() const;

    /// Rejects any value other than exactly 0 or 1.
    static BinaryMask from_raster(const Raster& raster);
    Raster to_raster() const;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> bits_;
};

struct CurvePoint {
    int offset = 0;      // column index
    double depth = 0.0;  // row coordinate, fractional after refinement

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// An RMO pick: at most one depth per offset column, offsets strictly increasing.
class Curve {
public:
    Curve() = default;
    /// Throws InvariantError unless offsets are strictly increasing and depths finite.
    explicit Curve(std::vector<CurvePoint> points);

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const CurvePoint& operator[](std::size_t i) const { return points_[i]; }
    const CurvePoint& front() const { return points_.front(); }
    const CurvePoint& back() const { return points_.back(); }
    std::span<const CurvePoint> points() const noexcept { return points_; }
    auto begin() const noexcept { return points_.begin(); }
    auto end() const noexcept { return points_.end(); }

    /// Throws InvariantError if any depth lies outside [0, n_depth).
    void check_bounds(std::size_t n_depth) const;

    friend bool operator==(const Curve&, const Curve&) = default;

private:
    std::vector<CurvePoint> points_;
};

/// Local slope estimates (depth samples per offset trace) on a regular grid
/// of cells covering the gather.
class SlopeField {
public:
    SlopeField() = default;
    /// `values` is indexed [offset_cell * n_depth_cells + depth_cell].
    SlopeField(std::size_t n_offset_cells, std::size_t n_depth_cells, double cell_offset,
               double cell_depth, double bandwidth, std::vector<double> values);

    std::size_t n_offset_cells() const noexcept { return n_offset_cells_; }
    std::size_t n_depth_cells() const noexcept { return n_depth_cells_; }
    double cell_offset() const noexcept { return cell_offset_; }
    double cell_depth() const noexcept { return cell_depth_; }
    double bandwidth() const noexcept { return bandwidth_; }

    double cell(std::size_t io, std::size_t id) const { return values_[io * n_depth_cells_ + id]; }
    std::span<const double> values() const noexcept { return values_; }

    /// Pixel coordinate of a cell centre.
    double center_offset(std::size_t io) const;
    double center_depth(std::size_t id) const;

    /// Value of the cell containing pixel (offset, depth), clamped to the grid.
    double at(double offset, double depth) const;

    /// Depth cells as rows, offset cells as columns.
    Raster to_raster() const;

private:
    std::size_t n_offset_cells_ = 0;
    std::size_t n_depth_cells_ = 0;
    double cell_offset_ = 1.0;
    double cell_depth_ = 1.0;
    double bandwidth_ = 1.0;
    std::vector<double> values_;
};

// CIGR raster format: "CIGR", u32 version (=1), u32 rows, u32 cols, then
// rows*cols float32 values, row-major, everything little-endian.
inline constexpr std::uint32_t kRasterVersion = 1;
inline constexpr std::size_t kRasterHeaderBytes = 16;

void write_raster(const Raster& raster, const std::filesystem::path& path);
Raster read_raster(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_raster(const Raster& raster);
Raster decode_raster(std::span<const std::uint8_t> bytes);

// Curve CSV: header "curve_id,offset_index,depth", one record per point,
// depth with 9 significant digits (float32 precision).
inline constexpr const char* kCurveHeader = "curve_id,offset_index,depth";

void write_curves(std::span<const Curve> curves, const std::filesystem::path& path);
std::vector<Curve> read_curves(const std::filesystem::path& path);

std::string format_curves(std::span<const Curve> curves);
std::vector<Curve> parse_curves(const std::string& text);

}  // namespace rmo
