#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tdm/field.hpp"

namespace tdm {

/// Timestamped 6D wrench stream (fx, fy, fz, tx, ty, tz).
struct WrenchSample {
    double t = 0.0;
    std::array<double, 6> w{};
};

struct WrenchTimeSeries {
    std::vector<WrenchSample> samples;
    double rate_hint = 0.0;  // Hz, informational

    void check_monotone() const {
        for (std::size_t i = 1; i < samples.size(); ++i)
            if (!(samples[i].t > samples[i - 1].t))
                throw NonMonotoneTime("WrenchTimeSeries: timestamps must be strictly increasing");
    }
};

/// Per-axis linear scale from dipole units to N*mm, plus the fit diagnostics
/// reported alongside it.
struct CalibrationModel {
    double c_x = 1.0;
    double c_y = 1.0;
    double c_z = 1.0;  // baseline-only scale
    std::array<double, 2> fit_slope{1.0, 1.0};
    std::array<double, 2> rmse{0.0, 0.0};
    std::array<std::size_t, 2> n_points{0, 0};
    bool fitted_with_intercept = false;
    std::array<double, 2> intercept{0.0, 0.0};
    std::string method = "dipole";
    std::string created_from;
    bool fitted = false;

    static CalibrationModel identity() { return CalibrationModel{}; }
};

struct ResampleResult {
    WrenchTimeSeries series;
    std::size_t dropped = 0;  // query times outside the truth span
};

/// Linear interpolation of the truth stream onto the query timestamps.
/// Queries outside [first, last] are dropped and counted.
inline ResampleResult resample(const WrenchTimeSeries& truth,
                               const std::vector<double>& query_times) {
    if (truth.samples.empty()) throw EmptySeries("resample: empty truth series");
    truth.check_monotone();

    ResampleResult out;
    out.series.rate_hint = truth.rate_hint;
    const auto& s = truth.samples;
    std::size_t lo = 0;
    for (double t : query_times) {
        if (t < s.front().t || t > s.back().t) {
            ++out.dropped;
            continue;
        }
        while (lo + 1 < s.size() && s[lo + 1].t < t) ++lo;
        // exact hits are returned verbatim
        if (t == s[lo].t) {
            out.series.samples.push_back({t, s[lo].w});
            continue;
        }
        std::size_t hi = lo + 1;
        while (hi < s.size() && s[hi].t < t) ++hi;
        if (hi >= s.size()) { ++out.dropped; continue; }
        if (t == s[hi].t) {
            out.series.samples.push_back({t, s[hi].w});
            continue;
        }
        const double a = (t - s[hi - 1].t) / (s[hi].t - s[hi - 1].t);
        WrenchSample q;
        q.t = t;
        for (int k = 0; k < 6; ++k)
            q.w[k] = s[hi - 1].w[k] + a * (s[hi].w[k] - s[hi - 1].w[k]);
        out.series.samples.push_back(q);
    }
    if (out.series.samples.empty())
        throw NoOverlap("resample: no query time overlaps the truth span");
    return out;
}

/// One calibration point: raw estimator abscissa vs ground-truth torque.
struct FitPoint {
    double raw = 0.0;    // dipole-unit abscissa (p component, sign-adjusted)
    double truth = 0.0;  // N*mm
};

namespace detail {

// Canonical ordering so fits are bit-identical under input permutation.
inline std::vector<FitPoint> sorted_points(std::vector<FitPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const FitPoint& a, const FitPoint& b) {
        if (a.raw != b.raw) return a.raw < b.raw;
        return a.truth < b.truth;
    });
    return pts;
}

struct AxisFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rmse = 0.0;
};

inline AxisFit fit_axis(const std::vector<FitPoint>& points, bool with_intercept) {
    if (points.size() < 2) throw InputError("fit: need at least 2 points per axis");
    const auto pts = sorted_points(points);
    double sxx = 0, sxy = 0, sx = 0, sy = 0;
    const double n = static_cast<double>(pts.size());
    for (const auto& p : pts) {
        sxx += p.raw * p.raw;
        sxy += p.raw * p.truth;
        sx += p.raw;
        sy += p.truth;
    }
    AxisFit out;
    if (with_intercept) {
        const double det = n * sxx - sx * sx;
        if (det == 0.0) throw RankDeficient("fit: all abscissae equal");
        out.slope = (n * sxy - sx * sy) / det;
        out.intercept = (sy - out.slope * sx) / n;
    } else {
        if (sxx == 0.0) throw RankDeficient("fit: all abscissae zero");
        out.slope = sxy / sxx;
    }
    double ss = 0;
    for (const auto& p : pts) {
        const double r = p.truth - (out.slope * p.raw + out.intercept);
        ss += r * r;
    }
    out.rmse = std::sqrt(ss / n);
    return out;
}

}  // namespace detail

/// Per-axis least-squares calibration (through the origin by default).
/// Axis 0 pairs tau_x truth against p_y; axis 1 pairs tau_y truth against
/// -p_x, so the recovered slopes are c_x and c_y with the Eq.-style sign
/// structure already folded in by the caller.
inline CalibrationModel fit(const std::vector<FitPoint>& axis_x,
                            const std::vector<FitPoint>& axis_y,
                            bool with_intercept = false) {
    const auto fx = detail::fit_axis(axis_x, with_intercept);
    const auto fy = detail::fit_axis(axis_y, with_intercept);
    CalibrationModel m;
    m.c_x = fx.slope;
    m.c_y = fy.slope;
    m.fit_slope = {fx.slope, fy.slope};
    m.rmse = {fx.rmse, fy.rmse};
    m.n_points = {axis_x.size(), axis_y.size()};
    m.fitted_with_intercept = with_intercept;
    m.intercept = {fx.intercept, fy.intercept};
    m.fitted = true;
    return m;
}

struct AxisReport {
    double slope = 0.0;   // calibrated estimate vs truth
    double rmse = 0.0;    // N*mm
    double r2 = 0.0;
    std::size_t n = 0;
};

struct EvalPoint {
    double truth = 0.0;
    double estimate = 0.0;  // already calibrated, N*mm
};

/// Held-out metrics for one axis of calibrated estimates.
inline AxisReport evaluate_axis(const std::vector<EvalPoint>& pts) {
    if (pts.empty()) throw EmptySeries("evaluate: empty held-out set");
    AxisReport rep;
    rep.n = pts.size();
    const double n = static_cast<double>(pts.size());
    double st = 0;
    for (const auto& p : pts) st += p.truth;
    const double mean_t = st / n;
    double ss_res = 0, ss_tot = 0, sxx = 0, sxy = 0;
    for (const auto& p : pts) {
        const double r = p.truth - p.estimate;
        ss_res += r * r;
        ss_tot += (p.truth - mean_t) * (p.truth - mean_t);
        sxx += p.truth * p.truth;
        sxy += p.truth * p.estimate;
    }
    rep.rmse = std::sqrt(ss_res / n);
    rep.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res == 0 ? 1.0 : 0.0);
    rep.slope = sxx > 0 ? sxy / sxx : 0.0;
    return rep;
}

}  // namespace tdm
