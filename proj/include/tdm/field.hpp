#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdm {

// Error hierarchy. Exit-code mapping in the CLI: InputError -> 1,
// anything else escaping main -> 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputError : Error {
    using Error::Error;
};
struct EmptyInput : InputError {
    using InputError::InputError;
};
struct OutOfBounds : InputError {
    using InputError::InputError;
};
struct GridMismatch : InputError {
    using InputError::InputError;
};
struct DegenerateField : InputError {
    using InputError::InputError;
};
struct NotZeroed : InputError {
    using InputError::InputError;
};
struct PatchOutOfBounds : InputError {
    using InputError::InputError;
};
struct NonMonotoneTime : InputError {
    using InputError::InputError;
};
struct EmptySeries : InputError {
    using InputError::InputError;
};
struct NoOverlap : InputError {
    using InputError::InputError;
};
struct RankDeficient : InputError {
    using InputError::InputError;
};
struct SizeMismatch : InputError {
    using InputError::InputError;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Regular node lattice in physical coordinates. Node (ix, iy) sits at
/// origin + pitch * (ix, iy); rows are stored y-major.
struct GridSpec {
    int width = 0;    // node count along x, >= 2
    int height = 0;   // node count along y, >= 2
    double pitch = 1.0;  // mm per node spacing
    Vec2 origin{0.0, 0.0};

    GridSpec() = default;
    GridSpec(int w, int h, double p, Vec2 o = {0.0, 0.0})
        : width(w), height(h), pitch(p), origin(o) {
        if (w < 2 || h < 2) throw InputError("GridSpec: width and height must be >= 2");
        if (!(p > 0.0)) throw InputError("GridSpec: pitch must be > 0");
    }

    std::size_t size() const { return static_cast<std::size_t>(width) * height; }
    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * width + ix;
    }
    Vec2 node_pos(int ix, int iy) const {
        return {origin.x + pitch * ix, origin.y + pitch * iy};
    }
    Vec2 center() const {
        return {origin.x + pitch * (width - 1) * 0.5,
                origin.y + pitch * (height - 1) * 0.5};
    }
    bool contains(const Vec2& p) const {
        return p.x >= origin.x && p.x <= origin.x + pitch * (width - 1) &&
               p.y >= origin.y && p.y <= origin.y + pitch * (height - 1);
    }
    bool same_as(const GridSpec& o) const {
        return width == o.width && height == o.height && pitch == o.pitch &&
               origin.x == o.origin.x && origin.y == o.origin.y;
    }
};

/// Per-node 2D displacement samples with a validity mask.
struct DisplacementField {
    GridSpec grid;
    std::vector<Vec2> vectors;   // width * height, y-major
    std::vector<std::uint8_t> valid;
    std::int64_t frame_index = 0;
    double timestamp = 0.0;

    DisplacementField() = default;
    explicit DisplacementField(const GridSpec& g, bool all_valid = true)
        : grid(g), vectors(g.size()), valid(g.size(), all_valid ? 1 : 0) {}

    Vec2& at(int ix, int iy) { return vectors[grid.index(ix, iy)]; }
    const Vec2& at(int ix, int iy) const { return vectors[grid.index(ix, iy)]; }
    bool is_valid(int ix, int iy) const { return valid[grid.index(ix, iy)] != 0; }
    void set_valid(int ix, int iy, bool v) { valid[grid.index(ix, iy)] = v ? 1 : 0; }

    std::size_t valid_count() const {
        std::size_t n = 0;
        for (auto v : valid) n += v != 0;
        return n;
    }

    /// Non-finite components on valid nodes violate the type invariant.
    void check_finite() const {
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            if (valid[i] && (!std::isfinite(vectors[i].x) || !std::isfinite(vectors[i].y)))
                throw InputError("DisplacementField: non-finite component on valid node");
        }
    }
};

/// Scalar per-node map sharing the grid layout; used for divergence and curl.
struct ScalarMap {
    GridSpec grid;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;

    ScalarMap() = default;
    explicit ScalarMap(const GridSpec& g)
        : grid(g), values(g.size(), 0.0), valid(g.size(), 0) {}

    double& at(int ix, int iy) { return values[grid.index(ix, iy)]; }
    double at(int ix, int iy) const { return values[grid.index(ix, iy)]; }
    bool is_valid(int ix, int iy) const { return valid[grid.index(ix, iy)] != 0; }

    std::size_t valid_count() const {
        std::size_t n = 0;
        for (auto v : valid) n += v != 0;
        return n;
    }
};

using DivergenceMap = ScalarMap;

/// Snapshot of the post-grasp field subtracted from later frames.
struct ZeroReference {
    DisplacementField reference;
    std::int64_t established_at = 0;

    ZeroReference() = default;
    explicit ZeroReference(DisplacementField ref)
        : reference(std::move(ref)), established_at(reference.frame_index) {}

    /// Nodes valid in `f` but not covered by the reference mask.
    std::size_t coverage_violations(const DisplacementField& f) const {
        if (!f.grid.same_as(reference.grid)) throw GridMismatch("ZeroReference: grid mismatch");
        std::size_t n = 0;
        for (std::size_t i = 0; i < f.valid.size(); ++i)
            n += (f.valid[i] && !reference.valid[i]) ? 1 : 0;
        return n;
    }
};

}  // namespace tdm
