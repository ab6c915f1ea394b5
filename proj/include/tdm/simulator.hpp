#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <variant>
#include <vector>

#include "tdm/calibration.hpp"
#include "tdm/field.hpp"

namespace tdm {

struct DiscShape {
    double radius = 0.0;  // mm
};
struct RectShape {
    double width = 0.0;   // mm
    double height = 0.0;  // mm
};
struct MaskShape {
    GridSpec grid;
    std::vector<std::uint8_t> inside;  // grid.size()
};

struct ContactPatch {
    std::variant<DiscShape, RectShape, MaskShape> shape = DiscShape{6.0};
    Vec2 center;
    double pressure_scale = 1.0;  // divergence units per N
};

struct AppliedWrench {
    double fx = 0.0, fy = 0.0, fz = 0.0;  // N
    double tx = 0.0, ty = 0.0, tz = 0.0;  // N*mm
    double timestamp = 0.0;               // s
};

namespace sim {

// Linear-elastic response scales. Absorbed by calibration downstream; only
// their ratios matter for the benchmark geometry.
inline constexpr double kShearCompliance = 0.2;   // mm per N of in-plane force
inline constexpr double kNormalCharge = 0.05;     // divergence units per N of f_z
inline constexpr double kTiltCharge = 0.01;       // divergence units per (N*mm * mm of axis distance)
inline constexpr double kTwistVorticity = 0.002;  // curl units per N*mm of tau_z

inline bool point_in_patch(const ContactPatch& patch, const Vec2& p) {
    if (const auto* d = std::get_if<DiscShape>(&patch.shape)) {
        const Vec2 r = p - patch.center;
        return r.x * r.x + r.y * r.y <= d->radius * d->radius;
    }
    if (const auto* r = std::get_if<RectShape>(&patch.shape)) {
        return std::abs(p.x - patch.center.x) <= r->width * 0.5 &&
               std::abs(p.y - patch.center.y) <= r->height * 0.5;
    }
    const auto& m = std::get<MaskShape>(patch.shape);
    const int ix = static_cast<int>(std::lround((p.x - m.grid.origin.x) / m.grid.pitch));
    const int iy = static_cast<int>(std::lround((p.y - m.grid.origin.y) / m.grid.pitch));
    if (ix < 0 || iy < 0 || ix >= m.grid.width || iy >= m.grid.height) return false;
    return m.inside[m.grid.index(ix, iy)] != 0;
}

inline void check_patch_in_grid(const ContactPatch& patch, const GridSpec& grid) {
    double half_w = 0, half_h = 0;
    if (const auto* d = std::get_if<DiscShape>(&patch.shape)) {
        if (!(d->radius > 0)) throw PatchOutOfBounds("patch area must be > 0");
        half_w = half_h = d->radius;
    } else if (const auto* r = std::get_if<RectShape>(&patch.shape)) {
        if (!(r->width > 0 && r->height > 0)) throw PatchOutOfBounds("patch area must be > 0");
        half_w = r->width * 0.5;
        half_h = r->height * 0.5;
    } else {
        return;  // explicit masks are validated against their own grid
    }
    const Vec2 lo{patch.center.x - half_w, patch.center.y - half_h};
    const Vec2 hi{patch.center.x + half_w, patch.center.y + half_h};
    if (!grid.contains(lo) || !grid.contains(hi))
        throw PatchOutOfBounds("contact patch extends outside the grid");
}

// Charge per patch cell for a given wrench. The tilt terms are linear in the
// signed distance from the rotation axis through the patch center, so the
// charge integrates to zero over any center-symmetric patch.
inline double cell_charge(const AppliedWrench& w, const ContactPatch& patch, const Vec2& p) {
    double q = kNormalCharge * w.fz;
    q += kTiltCharge * w.tx * (p.y - patch.center.y);
    q += -kTiltCharge * w.ty * (p.x - patch.center.x);
    return q * patch.pressure_scale;
}

}  // namespace sim

/// Synthesize the marker field for one applied wrench: superposition of a
/// uniform shear translation, the gradient of the log-kernel potential of
/// the patch charge (normal force and tilt terms), a rotational field from
/// tau_z, and optional isotropic Gaussian node noise.
inline DisplacementField synth_field(const AppliedWrench& w, const ContactPatch& patch,
                                     const GridSpec& grid, double noise_sigma,
                                     std::mt19937_64* rng = nullptr) {
    sim::check_patch_in_grid(patch, grid);
    if (noise_sigma > 0 && rng == nullptr)
        throw InputError("synth_field: noise requires a seeded RNG");

    struct Cell { Vec2 pos; double q; double omega; };
    std::vector<Cell> cells;
    for (int iy = 0; iy < grid.height; ++iy) {
        for (int ix = 0; ix < grid.width; ++ix) {
            const Vec2 p = grid.node_pos(ix, iy);
            if (!sim::point_in_patch(patch, p)) continue;
            cells.push_back({p, sim::cell_charge(w, patch, p),
                             sim::kTwistVorticity * w.tz * patch.pressure_scale});
        }
    }

    const double inv2pi = 1.0 / (2.0 * std::numbers::pi);
    const double cell_area = grid.pitch * grid.pitch;
    DisplacementField out(grid, true);
    out.timestamp = w.timestamp;
    for (int iy = 0; iy < grid.height; ++iy) {
        for (int ix = 0; ix < grid.width; ++ix) {
            const Vec2 p = grid.node_pos(ix, iy);
            Vec2 v{sim::kShearCompliance * w.fx, sim::kShearCompliance * w.fy};
            for (const auto& c : cells) {
                const Vec2 r = p - c.pos;
                const double r2 = r.x * r.x + r.y * r.y;
                if (r2 == 0.0) continue;  // symmetric self-cell contributes no gradient
                const double gq = c.q * cell_area * inv2pi / r2;
                v.x += gq * r.x;
                v.y += gq * r.y;
                // rotated kernel for the stream potential of the vorticity
                const double go = c.omega * cell_area * inv2pi / r2;
                v.x += go * r.y;
                v.y += -go * r.x;
            }
            out.at(ix, iy) = v;
        }
    }
    if (noise_sigma > 0) {
        std::normal_distribution<double> noise(0.0, noise_sigma);
        for (auto& v : out.vectors) {
            v.x += noise(*rng);
            v.y += noise(*rng);
        }
    }
    return out;
}

struct GraspSequence {
    std::vector<DisplacementField> frames;
    WrenchTimeSeries truth;
    std::size_t zero_frame = 1;  // post-grasp frame designated for zeroing
};

/// Scripted sequence: frame 0 pre-grasp (all zero), frame 1 post-grasp
/// (f_z of the first script entry only), then one frame per script entry.
inline GraspSequence grasp_sequence(const std::vector<AppliedWrench>& script,
                                    const ContactPatch& patch, const GridSpec& grid,
                                    double noise_sigma, std::mt19937_64* rng = nullptr) {
    if (script.empty()) throw EmptyInput("grasp_sequence: empty script");
    for (std::size_t i = 1; i < script.size(); ++i)
        if (!(script[i].timestamp > script[i - 1].timestamp))
            throw NonMonotoneTime("grasp_sequence: timestamps must be strictly increasing");

    const double dt = script.size() > 1
                          ? script[1].timestamp - script[0].timestamp
                          : 1.0;

    GraspSequence seq;
    auto push = [&](const AppliedWrench& w, std::int64_t idx) {
        DisplacementField f = synth_field(w, patch, grid, noise_sigma, rng);
        f.frame_index = idx;
        f.timestamp = w.timestamp;
        seq.frames.push_back(std::move(f));
        seq.truth.samples.push_back(
            {w.timestamp, {w.fx, w.fy, w.fz, w.tx, w.ty, w.tz}});
    };

    AppliedWrench pre{};
    pre.timestamp = script.front().timestamp - 2.0 * dt;
    push(pre, 0);
    AppliedWrench grasp{};
    grasp.fz = script.front().fz;
    grasp.timestamp = script.front().timestamp - dt;
    push(grasp, 1);
    std::int64_t idx = 2;
    for (const auto& w : script) push(w, idx++);
    seq.truth.rate_hint = dt > 0 ? 1.0 / dt : 0.0;
    return seq;
}

/// Quasi-static alternating triangle profile on one tilt axis, riding on a
/// constant grasp force.
inline std::vector<AppliedWrench> triangle_profile(char axis, double peak_torque,
                                                   int frames, double rate_hz,
                                                   double grasp_fz,
                                                   int cycles = 2) {
    if (frames < 2) throw InputError("triangle_profile: need at least 2 frames");
    if (!(rate_hz > 0)) throw InputError("triangle_profile: rate must be > 0");
    std::vector<AppliedWrench> script(frames);
    for (int i = 0; i < frames; ++i) {
        const double phase = static_cast<double>(i) / (frames - 1) * cycles;
        const double saw = phase - std::floor(phase);
        // triangle in [-1, 1]: 0 -> 1 -> -1 -> 0 per cycle
        double tri;
        if (saw < 0.25)
            tri = 4.0 * saw;
        else if (saw < 0.75)
            tri = 2.0 - 4.0 * saw;
        else
            tri = -4.0 + 4.0 * saw;
        AppliedWrench& w = script[i];
        w.fz = grasp_fz;
        w.timestamp = static_cast<double>(i) / rate_hz;
        if (axis == 'x')
            w.tx = peak_torque * tri;
        else if (axis == 'y')
            w.ty = peak_torque * tri;
        else if (axis == 'z')
            w.tz = peak_torque * tri;
        else
            throw InputError("triangle_profile: axis must be x, y, or z");
    }
    return script;
}

}  // namespace tdm
