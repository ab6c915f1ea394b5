#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "tdm/field.hpp"
#include "tdm/image.hpp"
#include "tdm/parallel.hpp"

namespace tdm {

struct FlowParams {
    int block = 9;    // odd block side, px
    int search = 6;   // +- search radius, px
    int stride = 4;   // node spacing, px
    // Minimum SSD curvature at the minimum; flat (textureless) responses
    // below this are marked invalid.
    double min_curvature = 1e-6;
};

namespace detail {

inline double block_ssd(const GrayFrame& ref, const GrayFrame& cur, int rx, int ry,
                        int cx, int cy, int half) {
    double ssd = 0;
    for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) {
            const double d = static_cast<double>(ref.at(rx + dx, ry + dy)) -
                             static_cast<double>(cur.at(cx + dx, cy + dy));
            ssd += d * d;
        }
    }
    return ssd;
}

// Parabolic sub-pixel offset from three SSD samples around the minimum.
// Returns 0 when the curvature is degenerate.
inline double parabolic_offset(double lo, double mid, double hi, double* curvature) {
    *curvature = lo - 2.0 * mid + hi;
    if (*curvature <= 0) return 0.0;
    return 0.5 * (lo - hi) / *curvature;
}

}  // namespace detail

/// Exhaustive block matching with SSD and parabolic sub-pixel refinement.
/// Output grid is in pixel units (pitch = stride, origin = first node
/// center); nodes whose window would leave either frame are invalid.
inline DisplacementField block_flow(const GrayFrame& ref, const GrayFrame& cur,
                                    const FlowParams& p = {}) {
    if (ref.width != cur.width || ref.height != cur.height)
        throw SizeMismatch("block_flow: frame sizes differ");
    const int half = p.block / 2;
    const int margin = half + p.search;
    if (2 * margin + 1 > ref.width || 2 * margin + 1 > ref.height)
        throw InputError("block_flow: block + 2*search does not fit inside frame");

    const int x0 = margin, y0 = margin;
    const int nx = (ref.width - 1 - 2 * margin) / p.stride + 1;
    const int ny = (ref.height - 1 - 2 * margin) / p.stride + 1;
    if (nx < 2 || ny < 2) throw InputError("block_flow: too few nodes, reduce stride");

    GridSpec grid(nx, ny, static_cast<double>(p.stride),
                  {static_cast<double>(x0), static_cast<double>(y0)});
    DisplacementField out(grid, false);
    out.frame_index = cur.index;
    out.timestamp = cur.timestamp;

    parallel_for(ny, [&](int iy) {
        const int cy = y0 + iy * p.stride;
        for (int ix = 0; ix < nx; ++ix) {
            const int cx = x0 + ix * p.stride;
            double best = std::numeric_limits<double>::infinity();
            int bx = 0, by = 0;
            for (int sy = -p.search; sy <= p.search; ++sy) {
                for (int sx = -p.search; sx <= p.search; ++sx) {
                    const double ssd =
                        detail::block_ssd(ref, cur, cx, cy, cx + sx, cy + sy, half);
                    // ties resolve toward the smaller displacement
                    if (ssd < best ||
                        (ssd == best && sx * sx + sy * sy < bx * bx + by * by)) {
                        best = ssd;
                        bx = sx;
                        by = sy;
                    }
                }
            }
            double fx = static_cast<double>(bx), fy = static_cast<double>(by);
            double curv_x = 0, curv_y = 0;
            // an exact match (SSD 0) is already pinned to the integer minimum;
            // refining it would only inject neighbor asymmetry
            if (std::abs(bx) < p.search) {
                const double lo = detail::block_ssd(ref, cur, cx, cy, cx + bx - 1, cy + by, half);
                const double hi = detail::block_ssd(ref, cur, cx, cy, cx + bx + 1, cy + by, half);
                const double off = detail::parabolic_offset(lo, best, hi, &curv_x);
                if (best > 0.0) fx += off;
            }
            if (std::abs(by) < p.search) {
                const double lo = detail::block_ssd(ref, cur, cx, cy, cx + bx, cy + by - 1, half);
                const double hi = detail::block_ssd(ref, cur, cx, cy, cx + bx, cy + by + 1, half);
                const double off = detail::parabolic_offset(lo, best, hi, &curv_y);
                if (best > 0.0) fy += off;
            }
            if (std::max(curv_x, curv_y) > p.min_curvature) {
                out.at(ix, iy) = {fx, fy};
                out.set_valid(ix, iy, true);
            }
        }
    });
    if (out.valid_count() == 0) throw DegenerateField("block_flow: no textured nodes");
    return out;
}

}  // namespace tdm
