#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "tdm/calibration.hpp"
#include "tdm/field.hpp"

namespace tdm {

/// Torque from the norm-based point-wise force model, with the moment arm
/// fixed at the full-grid image center.
struct BaselineWrench {
    std::array<double, 3> tau{0.0, 0.0, 0.0};  // N*mm surrogate
    // Raw tilt moment sums before any calibration scale, stored with the
    // same sign convention as the dipole estimate's p slots so both
    // estimators share one fit path: tau_x = c * raw_p.y, tau_y = -c * raw_p.x.
    Vec2 raw_p;
    std::size_t n_valid = 0;
};

/// f_i = [c_x u, c_y v, c_z |v_i|], tau = (1/N) sum l_i x f_i with l_i the
/// in-plane offset from the grid center.
inline BaselineWrench baseline_torque(const DisplacementField& field,
                                      const CalibrationModel& cal) {
    const GridSpec& g = field.grid;
    const Vec2 center = g.center();
    BaselineWrench out;
    double tx = 0, ty = 0, tz = 0, mx = 0, my = 0;
    for (int iy = 0; iy < g.height; ++iy) {
        for (int ix = 0; ix < g.width; ++ix) {
            if (!field.is_valid(ix, iy)) continue;
            ++out.n_valid;
            const Vec2 v = field.at(ix, iy);
            const Vec2 l = g.node_pos(ix, iy) - center;
            const double fx = cal.c_x * v.x;
            const double fy = cal.c_y * v.y;
            const double fz = cal.c_z * v.norm();
            // l lifted to 3D with zero z: l x f = (l_y f_z, -l_x f_z, l_x f_y - l_y f_x)
            tx += l.y * fz;
            ty += -l.x * fz;
            tz += l.x * fy - l.y * fx;
            mx += l.x * v.norm();
            my += l.y * v.norm();
        }
    }
    if (out.n_valid == 0) throw DegenerateField("baseline_torque: no valid nodes");
    const double inv_n = 1.0 / static_cast<double>(out.n_valid);
    out.tau = {tx * inv_n, ty * inv_n, tz * inv_n};
    out.raw_p = {mx * inv_n, my * inv_n};
    return out;
}

struct PlanarWrench {
    Vec2 shear;          // mean displacement over valid nodes
    double tau_z = 0.0;  // in-plane moment about the valid-mask centroid
};

/// Rough shear / in-plane torque companion: shear is the mean displacement,
/// tau_z the mean z-component of l_i x v_i with l_i from the mask centroid.
inline PlanarWrench planar_wrench(const DisplacementField& field) {
    const GridSpec& g = field.grid;
    Vec2 sum{0, 0}, pos_sum{0, 0};
    std::size_t n = 0;
    for (int iy = 0; iy < g.height; ++iy) {
        for (int ix = 0; ix < g.width; ++ix) {
            if (!field.is_valid(ix, iy)) continue;
            ++n;
            sum = sum + field.at(ix, iy);
            pos_sum = pos_sum + g.node_pos(ix, iy);
        }
    }
    if (n == 0) throw DegenerateField("planar_wrench: no valid nodes");
    const double inv_n = 1.0 / static_cast<double>(n);
    PlanarWrench out;
    out.shear = sum * inv_n;
    const Vec2 centroid = pos_sum * inv_n;
    double tz = 0;
    for (int iy = 0; iy < g.height; ++iy) {
        for (int ix = 0; ix < g.width; ++ix) {
            if (!field.is_valid(ix, iy)) continue;
            const Vec2 l = g.node_pos(ix, iy) - centroid;
            const Vec2 v = field.at(ix, iy);
            tz += l.x * v.y - l.y * v.x;
        }
    }
    out.tau_z = tz * inv_n;
    return out;
}

}  // namespace tdm
