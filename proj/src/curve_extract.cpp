#include "rmo/curve_extract.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace rmo {

namespace {

// Clockwise in image coordinates (row grows downward), starting east.
constexpr std::array<int, 8> kDRow = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDCol = {1, 1, 0, -1, -1, -1, 0, 1};

bool is_set(const BinaryMask& mask, long r, long c)
{
    return r >= 0 && c >= 0 && r < static_cast<long>(mask.rows()) &&
           c < static_cast<long>(mask.cols()) &&
           mask(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
}

int direction(Pixel from, long to_row, long to_col)
{
    const long dr = to_row - static_cast<long>(from.row);
    const long dc = to_col - static_cast<long>(from.col);
    for (int d = 0; d < 8; ++d) {
        if (kDRow[d] == dr && kDCol[d] == dc) {
            return d;
        }
    }
    throw std::logic_error("trace_outer_border: pixels are not 8-adjacent");
}

Pixel step(Pixel p, int d)
{
    return {static_cast<std::size_t>(static_cast<long>(p.row) + kDRow[d]),
            static_cast<std::size_t>(static_cast<long>(p.col) + kDCol[d])};
}

}  // namespace

BinaryMask binarize(const SegMap& segmap, double t_seg)
{
    BinaryMask out(segmap.rows(), segmap.cols());
    for (std::size_t r = 0; r < segmap.rows(); ++r) {
        for (std::size_t c = 0; c < segmap.cols(); ++c) {
            if (!(static_cast<double>(segmap(r, c)) < t_seg)) {
                out.set(r, c);
            }
        }
    }
    return out;
}

std::vector<std::vector<Pixel>> connected_components(const BinaryMask& mask)
{
    const std::size_t rows = mask.rows();
    const std::size_t cols = mask.cols();
    std::vector<std::uint8_t> seen(rows * cols, 0);
    std::vector<std::vector<Pixel>> components;
    std::vector<Pixel> stack;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (!mask(r, c) || seen[r * cols + c]) {
                continue;
            }
            std::vector<Pixel> component;
            seen[r * cols + c] = 1;
            stack.push_back({r, c});
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                component.push_back(p);
                for (int d = 0; d < 8; ++d) {
                    const long nr = static_cast<long>(p.row) + kDRow[d];
                    const long nc = static_cast<long>(p.col) + kDCol[d];
                    if (is_set(mask, nr, nc)) {
                        const auto idx = static_cast<std::size_t>(nr) * cols + static_cast<std::size_t>(nc);
                        if (!seen[idx]) {
                            seen[idx] = 1;
                            stack.push_back({static_cast<std::size_t>(nr), static_cast<std::size_t>(nc)});
                        }
                    }
                }
            }
            std::sort(component.begin(), component.end());
            components.push_back(std::move(component));
        }
    }
    return components;
}

Contour trace_outer_border(const BinaryMask& mask, Pixel start)
{
    if (!mask(start.row, start.col)) {
        throw std::invalid_argument("trace_outer_border: start pixel is not set");
    }
    Contour contour;
    contour.pixels.push_back(start);

    // The scan reached `start` from its west neighbour, which is background.
    int first_dir = -1;
    for (int i = 0; i < 8; ++i) {
        const int d = (4 + i) % 8;
        if (is_set(mask, static_cast<long>(start.row) + kDRow[d], static_cast<long>(start.col) + kDCol[d])) {
            first_dir = d;
            break;
        }
    }
    if (first_dir < 0) {
        return contour;  // isolated pixel
    }

    const Pixel first = step(start, first_dir);
    Pixel prev = first;
    Pixel cur = start;
    while (true) {
        // Counter-clockwise sweep around `cur`, starting just past `prev`.
        const int back = direction(cur, static_cast<long>(prev.row), static_cast<long>(prev.col));
        Pixel next = cur;
        for (int i = 1; i <= 8; ++i) {
            const int d = ((back - i) % 8 + 8) % 8;
            if (is_set(mask, static_cast<long>(cur.row) + kDRow[d], static_cast<long>(cur.col) + kDCol[d])) {
                next = step(cur, d);
                break;
            }
        }
        if (next == start && cur == first) {
            break;
        }
        prev = cur;
        cur = next;
        contour.pixels.push_back(cur);
    }
    return contour;
}

std::vector<Contour> find_contours(const BinaryMask& binary)
{
    std::vector<Contour> contours;
    for (const auto& component : connected_components(binary)) {
        contours.push_back(trace_outer_border(binary, component.front()));
    }
    return contours;
}

BinaryMask region_mask(const Contour& contour, std::size_t rows, std::size_t cols)
{
    BinaryMask mask(rows, cols);
    if (contour.pixels.empty()) {
        return mask;
    }
    std::size_t r0 = rows, r1 = 0, c0 = cols, c1 = 0;
    for (const auto& p : contour.pixels) {
        if (p.row >= rows || p.col >= cols) {
            throw std::invalid_argument("region_mask: contour outside the raster");
        }
        r0 = std::min(r0, p.row);
        r1 = std::max(r1, p.row);
        c0 = std::min(c0, p.col);
        c1 = std::max(c1, p.col);
    }
    // Local frame with a one-pixel background margin; flood the outside with
    // 4-connectivity so it cannot slip between diagonal contour pixels.
    const std::size_t h = r1 - r0 + 3;
    const std::size_t w = c1 - c0 + 3;
    enum : std::uint8_t { open = 0, wall = 1, outside = 2 };
    std::vector<std::uint8_t> local(h * w, open);
    for (const auto& p : contour.pixels) {
        local[(p.row - r0 + 1) * w + (p.col - c0 + 1)] = wall;
    }
    std::vector<std::size_t> stack = {0};
    local[0] = outside;
    while (!stack.empty()) {
        const std::size_t idx = stack.back();
        stack.pop_back();
        const std::size_t r = idx / w;
        const std::size_t c = idx % w;
        auto visit = [&](std::size_t nidx) {
            if (local[nidx] == open) {
                local[nidx] = outside;
                stack.push_back(nidx);
            }
        };
        if (r > 0) visit(idx - w);
        if (r + 1 < h) visit(idx + w);
        if (c > 0) visit(idx - 1);
        if (c + 1 < w) visit(idx + 1);
    }
    for (std::size_t r = 1; r + 1 < h; ++r) {
        for (std::size_t c = 1; c + 1 < w; ++c) {
            if (local[r * w + c] != outside) {
                mask.set(r + r0 - 1, c + c0 - 1);
            }
        }
    }
    return mask;
}

Curve extract_raw_curve(const SegMap& segmap, const BinaryMask& region)
{
    if (segmap.rows() != region.rows() || segmap.cols() != region.cols()) {
        throw std::invalid_argument("extract_raw_curve: mask and segmap dimensions differ");
    }
    std::vector<CurvePoint> points;
    for (std::size_t c = 0; c < segmap.cols(); ++c) {
        float best = 0.0f;
        std::size_t best_row = 0;
        for (std::size_t r = 0; r < segmap.rows(); ++r) {
            if (region(r, c) && segmap(r, c) > best) {
                best = segmap(r, c);
                best_row = r;
            }
        }
        if (best > 0.0f) {
            points.push_back({static_cast<int>(c), static_cast<double>(best_row)});
        }
    }
    return Curve(std::move(points));
}

std::vector<Curve> extract_all(const SegMap& segmap, double t_seg)
{
    const BinaryMask binary = binarize(segmap, t_seg);
    std::vector<Curve> curves;
    for (const auto& contour : find_contours(binary)) {
        Curve curve = extract_raw_curve(segmap, region_mask(contour, segmap.rows(), segmap.cols()));
        if (!curve.empty()) {
            curves.push_back(std::move(curve));
        }
    }
    return curves;
}

}  // namespace rmo
