#include "rmo/grid_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>

namespace rmo {

static_assert(std::endian::native == std::endian::little,
              "CIGR encoding assumes a little-endian host");

const char* to_string(IoErrorKind kind)
{
    switch (kind) {
    case IoErrorKind::open_failed: return "open failed";
    case IoErrorKind::truncated_header: return "truncated header";
    case IoErrorKind::bad_magic: return "bad magic";
    case IoErrorKind::unsupported_version: return "unsupported version";
    case IoErrorKind::dimension_overflow: return "dimension overflow";
    case IoErrorKind::truncated_payload: return "truncated payload";
    case IoErrorKind::non_finite_value: return "non-finite value";
    case IoErrorKind::malformed_row: return "malformed row";
    case IoErrorKind::non_monotone_offsets: return "non-monotone offsets";
    case IoErrorKind::write_failed: return "write failed";
    }
    return "unknown";
}

IoError::IoError(IoErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
{
}

// ---------------------------------------------------------------- Raster

Raster::Raster(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0f)
{
}

Raster::Raster(std::size_t rows, std::size_t cols, std::vector<float> values)
    : rows_(rows), cols_(cols), values_(std::move(values))
{
    if (values_.size() != rows_ * cols_) {
        throw InvariantError("raster payload size does not match dimensions");
    }
    for (float v : values_) {
        if (!std::isfinite(v)) {
            throw InvariantError("raster contains a non-finite value");
        }
    }
}

std::vector<double> Raster::column(std::size_t c) const
{
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        out[r] = values_[r * cols_ + c];
    }
    return out;
}

void Raster::set_column(std::size_t c, std::span<const double> trace)
{
    if (trace.size() != rows_) {
        throw InvariantError("trace length does not match raster rows");
    }
    for (std::size_t r = 0; r < rows_; ++r) {
        const auto v = static_cast<float>(trace[r]);
        if (!std::isfinite(v)) {
            throw InvariantError("trace contains a non-finite value");
        }
        values_[r * cols_ + c] = v;
    }
}

Gather::Gather(Raster amplitudes) : data_(std::move(amplitudes))
{
    if (data_.rows() < 2 || data_.cols() < 2) {
        throw InvariantError("a gather needs at least 2 depth samples and 2 offsets");
    }
}

SegMap::SegMap(Raster probabilities) : data_(std::move(probabilities))
{
    for (float& v : data_.values()) {
        v = std::clamp(v, 0.0f, 1.0f);
    }
}

// ---------------------------------------------------------------- BinaryMask

BinaryMask::BinaryMask(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), bits_(rows * cols, 0)
{
}

std::size_t BinaryMask::count() const
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::from_raster(const Raster& raster)
{
    BinaryMask mask(raster.rows(), raster.cols());
    const auto values = raster.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == 1.0f) {
            mask.bits_[i] = 1;
        } else if (values[i] != 0.0f) {
            throw InvariantError("mask raster holds a value other than 0 or 1");
        }
    }
    return mask;
}

Raster BinaryMask::to_raster() const
{
    std::vector<float> values(bits_.size());
    std::transform(bits_.begin(), bits_.end(), values.begin(),
                   [](std::uint8_t b) { return b ? 1.0f : 0.0f; });
    return Raster(rows_, cols_, std::move(values));
}

// ---------------------------------------------------------------- Curve

Curve::Curve(std::vector<CurvePoint> points) : points_(std::move(points))
{
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i].depth)) {
            throw InvariantError("curve depth is not finite");
        }
        if (i > 0 && points_[i].offset <= points_[i - 1].offset) {
            throw InvariantError("curve offsets must be strictly increasing");
        }
    }
}

void Curve::check_bounds(std::size_t n_depth) const
{
    for (const auto& p : points_) {
        if (p.depth < 0.0 || p.depth >= static_cast<double>(n_depth)) {
            throw InvariantError("curve depth outside the raster");
        }
    }
}

// ---------------------------------------------------------------- SlopeField

SlopeField::SlopeField(std::size_t n_offset_cells, std::size_t n_depth_cells, double cell_offset,
                       double cell_depth, double bandwidth, std::vector<double> values)
    : n_offset_cells_(n_offset_cells),
      n_depth_cells_(n_depth_cells),
      cell_offset_(cell_offset),
      cell_depth_(cell_depth),
      bandwidth_(bandwidth),
      values_(std::move(values))
{
    if (n_offset_cells_ < 1 || n_depth_cells_ < 1) {
        throw InvariantError("slope field needs at least one cell");
    }
    if (!(cell_offset_ > 0.0) || !(cell_depth_ > 0.0) || !(bandwidth_ > 0.0)) {
        throw InvariantError("slope field cell sizes and bandwidth must be positive");
    }
    if (values_.size() != n_offset_cells_ * n_depth_cells_) {
        throw InvariantError("slope field value count does not match its grid");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw InvariantError("slope field contains a non-finite value");
        }
    }
}

double SlopeField::center_offset(std::size_t io) const
{
    return (static_cast<double>(io) + 0.5) * cell_offset_ - 0.5;
}

double SlopeField::center_depth(std::size_t id) const
{
    return (static_cast<double>(id) + 0.5) * cell_depth_ - 0.5;
}

double SlopeField::at(double offset, double depth) const
{
    auto index = [](double coord, double cell, std::size_t n) {
        const double f = std::floor((coord + 0.5) / cell);
        if (!(f > 0.0)) {
            return std::size_t{0};
        }
        return std::min(static_cast<std::size_t>(f), n - 1);
    };
    return cell(index(offset, cell_offset_, n_offset_cells_),
                index(depth, cell_depth_, n_depth_cells_));
}

Raster SlopeField::to_raster() const
{
    Raster out(n_depth_cells_, n_offset_cells_);
    for (std::size_t io = 0; io < n_offset_cells_; ++io) {
        for (std::size_t id = 0; id < n_depth_cells_; ++id) {
            out(id, io) = static_cast<float>(cell(io, id));
        }
    }
    return out;
}

// ---------------------------------------------------------------- CIGR

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(bytes[at + i]) << (8 * i);
    }
    return v;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(IoErrorKind::open_failed, path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::vector<std::uint8_t> encode_raster(const Raster& raster)
{
    constexpr auto max_dim = std::numeric_limits<std::uint32_t>::max();
    if (raster.rows() > max_dim || raster.cols() > max_dim) {
        throw IoError(IoErrorKind::dimension_overflow, "raster too large for CIGR");
    }
    std::vector<std::uint8_t> out;
    out.reserve(kRasterHeaderBytes + 4 * raster.size());
    for (char ch : {'C', 'I', 'G', 'R'}) {
        out.push_back(static_cast<std::uint8_t>(ch));
    }
    put_u32(out, kRasterVersion);
    put_u32(out, static_cast<std::uint32_t>(raster.rows()));
    put_u32(out, static_cast<std::uint32_t>(raster.cols()));
    for (float v : raster.values()) {
        put_u32(out, std::bit_cast<std::uint32_t>(v));
    }
    return out;
}

Raster decode_raster(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kRasterHeaderBytes) {
        throw IoError(IoErrorKind::truncated_header,
                      "expected 16 header bytes, got " + std::to_string(bytes.size()));
    }
    if (std::memcmp(bytes.data(), "CIGR", 4) != 0) {
        throw IoError(IoErrorKind::bad_magic, "not a CIGR raster");
    }
    const std::uint32_t version = get_u32(bytes, 4);
    if (version != kRasterVersion) {
        throw IoError(IoErrorKind::unsupported_version, std::to_string(version));
    }
    const std::uint64_t rows = get_u32(bytes, 8);
    const std::uint64_t cols = get_u32(bytes, 12);
    const std::uint64_t count = rows * cols;  // cannot overflow: both < 2^32
    if (count > (std::numeric_limits<std::size_t>::max() - kRasterHeaderBytes) / 4 ||
        count > std::numeric_limits<std::uint32_t>::max()) {
        throw IoError(IoErrorKind::dimension_overflow,
                      std::to_string(rows) + "x" + std::to_string(cols));
    }
    const std::size_t expected = kRasterHeaderBytes + 4 * static_cast<std::size_t>(count);
    if (bytes.size() < expected) {
        throw IoError(IoErrorKind::truncated_payload,
                      "expected " + std::to_string(expected) + " bytes, got " +
                          std::to_string(bytes.size()));
    }
    std::vector<float> values(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = std::bit_cast<float>(get_u32(bytes, kRasterHeaderBytes + 4 * i));
        if (!std::isfinite(values[i])) {
            throw IoError(IoErrorKind::non_finite_value, "payload index " + std::to_string(i));
        }
    }
    return Raster(rows, cols, std::move(values));
}

void write_raster(const Raster& raster, const std::filesystem::path& path)
{
    const auto bytes = encode_raster(raster);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(IoErrorKind::write_failed, path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError(IoErrorKind::write_failed, path.string());
    }
}

Raster read_raster(const std::filesystem::path& path)
{
    const auto bytes = slurp(path);
    try {
        return decode_raster(bytes);
    } catch (const IoError& e) {
        throw IoError(e.kind(), path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------- curves CSV

std::string format_curves(std::span<const Curve> curves)
{
    std::string out = kCurveHeader;
    out += '\n';
    char buf[64];
    for (std::size_t id = 0; id < curves.size(); ++id) {
        for (const auto& p : curves[id]) {
            std::snprintf(buf, sizeof buf, "%zu,%d,%.9g\n", id, p.offset, p.depth);
            out += buf;
        }
    }
    return out;
}

std::vector<Curve> parse_curves(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCurveHeader) {
        throw IoError(IoErrorKind::malformed_row, "missing curve header");
    }
    std::map<long, std::vector<CurvePoint>> by_id;
    std::vector<long> order;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        long id = 0;
        int offset = 0;
        double depth = 0.0;
        char tail = 0;
        if (std::sscanf(line.c_str(), "%ld,%d,%lf%c", &id, &offset, &depth, &tail) != 3 ||
            id < 0 || !std::isfinite(depth)) {
            throw IoError(IoErrorKind::malformed_row, "line " + std::to_string(line_no));
        }
        auto [it, inserted] = by_id.try_emplace(id);
        if (inserted) {
            order.push_back(id);
        }
        auto& pts = it->second;
        if (!pts.empty() && offset <= pts.back().offset) {
            throw IoError(IoErrorKind::non_monotone_offsets,
                          "curve " + std::to_string(id) + " at line " + std::to_string(line_no));
        }
        // Depths are stored at float32 precision.
        pts.push_back({offset, static_cast<double>(static_cast<float>(depth))});
    }
    std::vector<Curve> curves;
    curves.reserve(order.size());
    for (long id : order) {
        curves.emplace_back(std::move(by_id[id]));
    }
    return curves;
}

void write_curves(std::span<const Curve> curves, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError(IoErrorKind::write_failed, path.string());
    }
    out << format_curves(curves);
    if (!out) {
        throw IoError(IoErrorKind::write_failed, path.string());
    }
}

std::vector<Curve> read_curves(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError(IoErrorKind::open_failed, path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_curves(ss.str());
}

}  // namespace rmo
