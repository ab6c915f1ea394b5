#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "tdm/field.hpp"
#include "tdm/image.hpp"

namespace tdm {

struct BlobParams {
    int threshold = 128;
    int min_area = 4;    // px^2
    int max_area = 400;  // px^2
    bool dark_markers = true;  // polarity is explicit, never guessed
};

/// Connected components (8-connectivity) of marker-polarity pixels, reduced
/// to intensity-weighted sub-pixel centroids. Components outside the area
/// range are discarded.
inline std::vector<Vec2> detect_blobs(const GrayFrame& frame, const BlobParams& p = {}) {
    const int W = frame.width, H = frame.height;
    auto is_marker = [&](int x, int y) {
        return p.dark_markers ? frame.at(x, y) < p.threshold : frame.at(x, y) >= p.threshold;
    };
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(W) * H, 0);
    std::vector<Vec2> centroids;
    std::vector<std::pair<int, int>> stack;
    for (int y0 = 0; y0 < H; ++y0) {
        for (int x0 = 0; x0 < W; ++x0) {
            if (seen[static_cast<std::size_t>(y0) * W + x0] || !is_marker(x0, y0)) continue;
            stack.assign(1, {x0, y0});
            seen[static_cast<std::size_t>(y0) * W + x0] = 1;
            double wx = 0, wy = 0, wsum = 0;
            int area = 0;
            while (!stack.empty()) {
                const auto [x, y] = stack.back();
                stack.pop_back();
                ++area;
                // weight by contrast against the background side of the threshold
                const double w = p.dark_markers ? 255.0 - frame.at(x, y)
                                                : static_cast<double>(frame.at(x, y));
                wx += w * x;
                wy += w * y;
                wsum += w;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
                        auto& s = seen[static_cast<std::size_t>(ny) * W + nx];
                        if (s || !is_marker(nx, ny)) continue;
                        s = 1;
                        stack.push_back({nx, ny});
                    }
                }
            }
            if (area < p.min_area || area > p.max_area || wsum <= 0) continue;
            centroids.push_back({wx / wsum, wy / wsum});
        }
    }
    return centroids;
}

struct MarkerTrack {
    int id = 0;
    std::vector<Vec2> positions;  // one per observed frame, sub-pixel px
    bool alive = true;

    Vec2 last() const { return positions.back(); }
    Vec2 displacement() const {
        if (positions.size() < 2) return {0, 0};
        return positions.back() - positions[positions.size() - 2];
    }
};

struct TrackerParams {
    double max_disp = 5.0;           // px per frame
    double ambiguity_margin = 1e-9;  // equidistant candidates kill the match
};

struct Tracker {
    TrackerParams params;
    std::vector<MarkerTrack> tracks;
    int next_id = 0;

    /// Mutual-nearest-neighbor assignment within max_disp. Ambiguous nearest
    /// candidates (ties within the margin) match nothing, so crossing markers
    /// kill their tracks instead of being misassigned. Unmatched detections
    /// spawn tracks; unmatched live tracks die.
    void update(const std::vector<Vec2>& detections) {
        const double INF = std::numeric_limits<double>::infinity();
        std::vector<int> live;
        for (std::size_t i = 0; i < tracks.size(); ++i)
            if (tracks[i].alive) live.push_back(static_cast<int>(i));

        auto nearest = [&](const Vec2& p, auto&& positions, std::size_t n) {
            int best = -1;
            double best_d = INF, second_d = INF;
            for (std::size_t k = 0; k < n; ++k) {
                const double d = (positions(k) - p).norm();
                if (d < best_d) {
                    second_d = best_d;
                    best_d = d;
                    best = static_cast<int>(k);
                } else if (d < second_d) {
                    second_d = d;
                }
            }
            if (best < 0 || best_d > params.max_disp) return -1;
            if (second_d - best_d <= params.ambiguity_margin) return -1;
            return best;
        };

        std::vector<int> track_pick(live.size(), -1), det_pick(detections.size(), -1);
        for (std::size_t li = 0; li < live.size(); ++li)
            track_pick[li] = nearest(tracks[live[li]].last(),
                                     [&](std::size_t k) { return detections[k]; },
                                     detections.size());
        for (std::size_t di = 0; di < detections.size(); ++di)
            det_pick[di] = nearest(detections[di],
                                   [&](std::size_t k) { return tracks[live[k]].last(); },
                                   live.size());

        std::vector<std::uint8_t> det_used(detections.size(), 0);
        for (std::size_t li = 0; li < live.size(); ++li) {
            const int di = track_pick[li];
            if (di >= 0 && det_pick[di] == static_cast<int>(li)) {
                tracks[live[li]].positions.push_back(detections[di]);
                det_used[di] = 1;
            } else {
                tracks[live[li]].alive = false;
            }
        }
        for (std::size_t di = 0; di < detections.size(); ++di) {
            if (det_used[di]) continue;
            MarkerTrack t;
            t.id = next_id++;
            t.positions.push_back(detections[di]);
            tracks.push_back(std::move(t));
        }
    }
};

}  // namespace tdm
