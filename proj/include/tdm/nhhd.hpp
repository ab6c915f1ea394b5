#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "tdm/field.hpp"
#include "tdm/operators.hpp"
#include "tdm/parallel.hpp"

namespace tdm {

/// Natural Helmholtz-Hodge split: source = diverging + rotational + harmonic,
/// exact node-wise on the valid mask by construction of the harmonic part.
struct FieldDecomposition {
    DisplacementField diverging;
    DisplacementField rotational;
    DisplacementField harmonic;
    DisplacementField source;
};

namespace detail {

// (1/2pi) * integral of ln|r| over the unit square centered at the origin.
// Closing the singular self-cell of the log kernel with its exact cell
// average; value from the polar-coordinate quadrature of the square.
inline constexpr double kCellLogAverage = -0.16889131467600588;

/// Free-space potential of a gridded source: D(x_i) = sum_j G(x_i - x_j) *
/// s_j * pitch^2 with G(r) = ln|r| / 2pi, self-term cell-averaged. Direct
/// O(N^2) summation through a relative-offset kernel table.
inline std::vector<double> log_potential(const ScalarMap& src) {
    const GridSpec& g = src.grid;
    const int W = g.width, H = g.height;
    const double h = g.pitch;
    const double inv2pi = 1.0 / (2.0 * std::numbers::pi);

    // kernel[(dy + H - 1) * (2W - 1) + (dx + W - 1)]
    const int kw = 2 * W - 1;
    std::vector<double> kernel(static_cast<std::size_t>(kw) * (2 * H - 1));
    for (int dy = -(H - 1); dy <= H - 1; ++dy) {
        for (int dx = -(W - 1); dx <= W - 1; ++dx) {
            double gval;
            if (dx == 0 && dy == 0)
                gval = inv2pi * std::log(h) + kCellLogAverage;
            else
                gval = inv2pi * std::log(h * std::hypot(double(dx), double(dy)));
            kernel[static_cast<std::size_t>(dy + H - 1) * kw + (dx + W - 1)] = gval;
        }
    }

    // Only valid source nodes contribute.
    struct Charge { int ix, iy; double q; };
    std::vector<Charge> charges;
    charges.reserve(src.valid_count());
    const double cell = h * h;
    for (int iy = 0; iy < H; ++iy)
        for (int ix = 0; ix < W; ++ix)
            if (src.is_valid(ix, iy) && src.at(ix, iy) != 0.0)
                charges.push_back({ix, iy, src.at(ix, iy) * cell});

    std::vector<double> pot(g.size(), 0.0);
    parallel_for(H, [&](int iy) {
        for (int ix = 0; ix < W; ++ix) {
            double acc = 0.0;
            for (const auto& c : charges) {
                acc += kernel[static_cast<std::size_t>(iy - c.iy + H - 1) * kw +
                              (ix - c.ix + W - 1)] * c.q;
            }
            pot[g.index(ix, iy)] = acc;
        }
    });
    return pot;
}

// Central-difference gradient of a full-support scalar array, one-sided at
// the grid border. Matches the stencil the divergence/curl operators use, so
// discrete curl(grad D) and div(rotated-grad R) vanish identically at
// interior nodes.
inline void gradient(const GridSpec& g, const std::vector<double>& s,
                     std::vector<Vec2>* out) {
    out->assign(g.size(), Vec2{});
    for (int iy = 0; iy < g.height; ++iy) {
        for (int ix = 0; ix < g.width; ++ix) {
            Vec2 gr;
            if (ix > 0 && ix + 1 < g.width)
                gr.x = (s[g.index(ix + 1, iy)] - s[g.index(ix - 1, iy)]) / (2.0 * g.pitch);
            else if (ix + 1 < g.width)
                gr.x = (s[g.index(ix + 1, iy)] - s[g.index(ix, iy)]) / g.pitch;
            else
                gr.x = (s[g.index(ix, iy)] - s[g.index(ix - 1, iy)]) / g.pitch;
            if (iy > 0 && iy + 1 < g.height)
                gr.y = (s[g.index(ix, iy + 1)] - s[g.index(ix, iy - 1)]) / (2.0 * g.pitch);
            else if (iy + 1 < g.height)
                gr.y = (s[g.index(ix, iy + 1)] - s[g.index(ix, iy)]) / g.pitch;
            else
                gr.y = (s[g.index(ix, iy)] - s[g.index(ix, iy - 1)]) / g.pitch;
            (*out)[g.index(ix, iy)] = gr;
        }
    }
}

inline bool has_3x3_valid_interior(const DisplacementField& f) {
    for (int iy = 1; iy + 1 < f.grid.height; ++iy)
        for (int ix = 1; ix + 1 < f.grid.width; ++ix) {
            bool ok = true;
            for (int dy = -1; dy <= 1 && ok; ++dy)
                for (int dx = -1; dx <= 1 && ok; ++dx)
                    ok = f.is_valid(ix + dx, iy + dy);
            if (ok) return true;
        }
    return false;
}

}  // namespace detail

/// Open-boundary Helmholtz-Hodge decomposition. The diverging part is the
/// gradient of the log-kernel potential of the discrete divergence; the
/// rotational part the rotated gradient of the stream potential built from
/// the discrete curl; the harmonic part is the residual.
inline FieldDecomposition decompose(const DisplacementField& field) {
    if (!detail::has_3x3_valid_interior(field))
        throw DegenerateField("decompose: needs a 3x3 valid interior");
    const GridSpec& g = field.grid;

    const ScalarMap rho = divergence(field);
    const ScalarMap omega = curl(field);
    const std::vector<double> D = detail::log_potential(rho);
    const std::vector<double> R = detail::log_potential(omega);

    std::vector<Vec2> gd, gr;
    detail::gradient(g, D, &gd);
    detail::gradient(g, R, &gr);

    FieldDecomposition dec;
    dec.source = field;
    dec.diverging = DisplacementField(g, false);
    dec.rotational = DisplacementField(g, false);
    dec.harmonic = DisplacementField(g, false);
    for (auto* f : {&dec.diverging, &dec.rotational, &dec.harmonic}) {
        f->frame_index = field.frame_index;
        f->timestamp = field.timestamp;
        f->valid = field.valid;
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!field.valid[i]) continue;
        dec.diverging.vectors[i] = gd[i];
        // Rotated gradient: (dR/dy, -dR/dx).
        dec.rotational.vectors[i] = {gr[i].y, -gr[i].x};
        dec.harmonic.vectors[i] =
            field.vectors[i] - dec.diverging.vectors[i] - dec.rotational.vectors[i];
    }
    return dec;
}

}  // namespace tdm
