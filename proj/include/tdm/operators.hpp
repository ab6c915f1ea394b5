#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "tdm/field.hpp"

namespace tdm {

struct Marker {
    Vec2 position;      // mm
    Vec2 displacement;  // mm
};

/// Scattered marker tracks -> grid field. Each node averages markers within
/// one pitch radius, weighted by inverse distance; a marker sitting exactly
/// on a node wins outright. Nodes with no marker in radius come out invalid.
/// Out-of-bounds markers are skipped; the count is reported through
/// `out_of_bounds` when given.
inline DisplacementField rasterize(const std::vector<Marker>& markers,
                                   const GridSpec& grid,
                                   std::size_t* out_of_bounds = nullptr) {
    if (markers.empty()) throw EmptyInput("rasterize: no markers");
    if (markers.size() < 4) throw EmptyInput("rasterize: need at least 4 markers");

    std::vector<Marker> inside;
    inside.reserve(markers.size());
    std::size_t skipped = 0;
    for (const auto& m : markers) {
        if (grid.contains(m.position))
            inside.push_back(m);
        else
            ++skipped;
    }
    if (out_of_bounds) *out_of_bounds = skipped;
    if (inside.empty()) throw EmptyInput("rasterize: all markers out of bounds");

    const double radius = grid.pitch;
    const double exact_eps = 1e-9 * grid.pitch;
    DisplacementField out(grid, false);
    for (int iy = 0; iy < grid.height; ++iy) {
        for (int ix = 0; ix < grid.width; ++ix) {
            const Vec2 p = grid.node_pos(ix, iy);
            Vec2 acc{0, 0};
            double wsum = 0.0;
            Vec2 exact_acc{0, 0};
            int exact_n = 0;
            for (const auto& m : inside) {
                const double d = (m.position - p).norm();
                if (d <= exact_eps) {
                    exact_acc = exact_acc + m.displacement;
                    ++exact_n;
                } else if (d <= radius) {
                    const double w = 1.0 / d;
                    acc = acc + w * m.displacement;
                    wsum += w;
                }
            }
            if (exact_n > 0) {
                out.at(ix, iy) = exact_acc * (1.0 / exact_n);
                out.set_valid(ix, iy, true);
            } else if (wsum > 0.0) {
                out.at(ix, iy) = acc * (1.0 / wsum);
                out.set_valid(ix, iy, true);
            }
        }
    }
    return out;
}

namespace detail {

// d(component)/d(axis) with mask-aware stencil: central where both neighbors
// are valid, one-sided where exactly one is. Returns false when the node has
// no valid neighbor pair on this axis.
template <typename GetV, typename GetM>
bool axis_derivative(int i, int n, double pitch, GetV value, GetM valid, double* out) {
    const bool has_lo = i > 0 && valid(i - 1);
    const bool has_hi = i + 1 < n && valid(i + 1);
    if (has_lo && has_hi) {
        *out = (value(i + 1) - value(i - 1)) / (2.0 * pitch);
        return true;
    }
    if (!valid(i)) return false;
    if (has_hi) {
        *out = (value(i + 1) - value(i)) / pitch;
        return true;
    }
    if (has_lo) {
        *out = (value(i) - value(i - 1)) / pitch;
        return true;
    }
    return false;
}

// Generic first-order operator combining an x-derivative of one component
// with a y-derivative of the other: div = du/dx + dv/dy, curl = dv/dx - du/dy.
inline ScalarMap first_order_op(const DisplacementField& f, bool x_uses_u, double sign_y) {
    const GridSpec& g = f.grid;
    ScalarMap out(g);
    std::size_t supported = 0;
    for (int iy = 0; iy < g.height; ++iy) {
        for (int ix = 0; ix < g.width; ++ix) {
            double dx_term = 0.0, dy_term = 0.0;
            const bool ok_x = axis_derivative(
                ix, g.width, g.pitch,
                [&](int i) { const Vec2& v = f.at(i, iy); return x_uses_u ? v.x : v.y; },
                [&](int i) { return f.is_valid(i, iy); }, &dx_term);
            const bool ok_y = axis_derivative(
                iy, g.height, g.pitch,
                [&](int i) { const Vec2& v = f.at(ix, i); return x_uses_u ? v.y : v.x; },
                [&](int i) { return f.is_valid(ix, i); }, &dy_term);
            if (ok_x && ok_y && f.is_valid(ix, iy)) {
                out.at(ix, iy) = dx_term + sign_y * dy_term;
                out.valid[g.index(ix, iy)] = 1;
                ++supported;
            }
        }
    }
    if (supported == 0) throw DegenerateField("no node has stencil support");
    return out;
}

}  // namespace detail

/// Discrete divergence du/dx + dv/dy.
inline DivergenceMap divergence(const DisplacementField& f) {
    return detail::first_order_op(f, /*x_uses_u=*/true, +1.0);
}

/// Discrete curl dv/dx - du/dy (scalar in 2D), same stencil policy.
inline ScalarMap curl(const DisplacementField& f) {
    return detail::first_order_op(f, /*x_uses_u=*/false, -1.0);
}

/// Subtract the post-grasp reference: out = current - reference node-wise,
/// valid where both are.
inline DisplacementField zero(const DisplacementField& current, const ZeroReference& ref) {
    if (!current.grid.same_as(ref.reference.grid))
        throw GridMismatch("zero: current and reference grids differ");
    DisplacementField out(current.grid, false);
    out.frame_index = current.frame_index;
    out.timestamp = current.timestamp;
    for (std::size_t i = 0; i < out.vectors.size(); ++i) {
        if (current.valid[i] && ref.reference.valid[i]) {
            out.vectors[i] = current.vectors[i] - ref.reference.vectors[i];
            out.valid[i] = 1;
        }
    }
    return out;
}

}  // namespace tdm
