#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include "tdm/calibration.hpp"
#include "tdm/field.hpp"
#include "tdm/operators.hpp"

namespace tdm {

/// Centroids of the positive and negative divergence regions with their
/// total masses.
struct CentroidPair {
    Vec2 c_plus;
    Vec2 c_minus;
    double w_plus = 0.0;
    double w_minus = 0.0;
};

struct DipoleEstimate {
    Vec2 p_tilt;         // mm * divergence units
    Vec2 midpoint;       // mm
    std::size_t n_valid = 0;
    bool no_contact = false;  // both sign masks empty
};

struct TiltTorque {
    double tau_x = 0.0;  // N*mm (raw dipole units when uncalibrated)
    double tau_y = 0.0;
    bool calibrated = false;
};

struct DipoleConfig {
    // Nodes with |rho| below this fraction of the frame's peak |rho| are
    // excluded from the centroid masses.
    double noise_floor_rel = 1e-4;
};

/// Mass-weighted centroids of the sign-partitioned divergence. An empty sign
/// mask falls back to the other mask's centroid; if both are empty, both
/// centroids sit at the valid-mask geometric center and the caller sees a
/// no-contact frame.
inline CentroidPair signed_centroids(const DivergenceMap& div,
                                     const DipoleConfig& cfg = {}) {
    const GridSpec& g = div.grid;
    double peak = 0.0;
    std::size_t n_valid = 0;
    for (std::size_t i = 0; i < div.values.size(); ++i) {
        if (!div.valid[i]) continue;
        ++n_valid;
        peak = std::max(peak, std::abs(div.values[i]));
    }
    if (n_valid == 0) throw DegenerateField("signed_centroids: no valid nodes");
    const double floor = cfg.noise_floor_rel * peak;

    CentroidPair out;
    Vec2 acc_p{0, 0}, acc_m{0, 0}, acc_c{0, 0};
    for (int iy = 0; iy < g.height; ++iy) {
        for (int ix = 0; ix < g.width; ++ix) {
            if (!div.is_valid(ix, iy)) continue;
            const Vec2 pos = g.node_pos(ix, iy);
            acc_c = acc_c + pos;
            const double rho = div.at(ix, iy);
            if (std::abs(rho) <= floor) continue;
            if (rho > 0) {
                acc_p = acc_p + rho * pos;
                out.w_plus += rho;
            } else {
                acc_m = acc_m + (-rho) * pos;
                out.w_minus += -rho;
            }
        }
    }
    const Vec2 mask_center = acc_c * (1.0 / static_cast<double>(n_valid));
    if (out.w_plus > 0 && out.w_minus > 0) {
        out.c_plus = acc_p * (1.0 / out.w_plus);
        out.c_minus = acc_m * (1.0 / out.w_minus);
    } else if (out.w_plus > 0) {
        out.c_plus = acc_p * (1.0 / out.w_plus);
        out.c_minus = out.c_plus;
    } else if (out.w_minus > 0) {
        out.c_minus = acc_m * (1.0 / out.w_minus);
        out.c_plus = out.c_minus;
    } else {
        out.c_plus = mask_center;
        out.c_minus = mask_center;
    }
    return out;
}

/// p_tilt = (1/N) sum r_i * rho_i with r_i taken from the centroid midpoint.
/// N counts all valid nodes.
inline DipoleEstimate dipole_moment(const DivergenceMap& div,
                                    const CentroidPair& centroids) {
    const GridSpec& g = div.grid;
    DipoleEstimate out;
    out.midpoint = (centroids.c_plus + centroids.c_minus) * 0.5;
    out.no_contact = centroids.w_plus == 0.0 && centroids.w_minus == 0.0;
    Vec2 acc{0, 0};
    for (int iy = 0; iy < g.height; ++iy) {
        for (int ix = 0; ix < g.width; ++ix) {
            if (!div.is_valid(ix, iy)) continue;
            ++out.n_valid;
            const Vec2 r = g.node_pos(ix, iy) - out.midpoint;
            acc = acc + r * div.at(ix, iy);
        }
    }
    if (out.n_valid == 0) throw DegenerateField("dipole_moment: no valid nodes");
    out.p_tilt = acc * (1.0 / static_cast<double>(out.n_valid));
    return out;
}

/// tau = [c_x * p_y, -c_y * p_x]: a scaled 90-degree rotation of the dipole.
inline TiltTorque tilt_torque(const DipoleEstimate& p, const CalibrationModel& cal) {
    TiltTorque t;
    t.tau_x = cal.c_x * p.p_tilt.y;
    t.tau_y = -cal.c_y * p.p_tilt.x;
    t.calibrated = cal.fitted;
    return t;
}

/// Full pipeline: zero -> divergence -> centroids -> moment -> torque.
/// A no-contact frame (both sign masks empty) reads as zero torque.
inline std::pair<TiltTorque, DipoleEstimate> estimate(
    const DisplacementField& field, const ZeroReference* ref,
    const CalibrationModel& cal, const DipoleConfig& cfg = {}) {
    if (ref == nullptr) throw NotZeroed("estimate: no zero reference established");
    const DisplacementField zeroed = zero(field, *ref);
    const DivergenceMap div = divergence(zeroed);
    const CentroidPair cen = signed_centroids(div, cfg);
    const DipoleEstimate p = dipole_moment(div, cen);
    TiltTorque t = tilt_torque(p, cal);
    if (p.no_contact) {
        t.tau_x = 0.0;
        t.tau_y = 0.0;
    }
    return {t, p};
}

}  // namespace tdm
