#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tdm/calibration.hpp"
#include "tdm/field.hpp"

namespace tdm {
namespace io {

/// Shortest round-trip decimal rendering; deterministic and locale-free.
inline std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) throw InputError("bad numeric field: '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace io

/// Field CSV: header `x_mm,y_mm,u,v,valid`, one row per node, row-major by
/// y then x, LF newlines.
inline void write_field_csv(const DisplacementField& f, std::ostream& os) {
    os << "x_mm,y_mm,u,v,valid\n";
    for (int iy = 0; iy < f.grid.height; ++iy) {
        for (int ix = 0; ix < f.grid.width; ++ix) {
            const Vec2 p = f.grid.node_pos(ix, iy);
            const Vec2& v = f.at(ix, iy);
            os << io::fmt(p.x) << ',' << io::fmt(p.y) << ',' << io::fmt(v.x) << ','
               << io::fmt(v.y) << ',' << (f.is_valid(ix, iy) ? '1' : '0') << '\n';
        }
    }
}

inline void write_field_csv(const DisplacementField& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open for writing: " + path);
    write_field_csv(f, os);
}

inline DisplacementField read_field_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InputError("field CSV: empty file");
    if (line != "x_mm,y_mm,u,v,valid")
        throw InputError("field CSV: bad header '" + line + "'");

    struct Row { double x, y, u, v; bool valid; };
    std::vector<Row> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto c = io::split(line);
        if (c.size() != 5) throw InputError("field CSV: expected 5 columns");
        rows.push_back({io::parse_double(c[0]), io::parse_double(c[1]),
                        io::parse_double(c[2]), io::parse_double(c[3]),
                        io::parse_double(c[4]) != 0.0});
    }
    if (rows.empty()) throw InputError("field CSV: no data rows");

    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        xs.push_back(r.x);
        ys.push_back(r.y);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    if (xs.size() < 2 || ys.size() < 2) throw InputError("field CSV: grid must be >= 2x2");
    const double pitch = xs[1] - xs[0];
    GridSpec grid(static_cast<int>(xs.size()), static_cast<int>(ys.size()), pitch,
                  {xs.front(), ys.front()});
    if (rows.size() != grid.size()) throw InputError("field CSV: row count does not match grid");

    DisplacementField f(grid, false);
    std::size_t i = 0;
    for (int iy = 0; iy < grid.height; ++iy) {
        for (int ix = 0; ix < grid.width; ++ix, ++i) {
            f.at(ix, iy) = {rows[i].u, rows[i].v};
            f.set_valid(ix, iy, rows[i].valid);
        }
    }
    return f;
}

inline DisplacementField read_field_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open: " + path);
    return read_field_csv(is);
}

/// Wrench CSV: `t,fx,fy,fz,tx,ty,tz`.
inline void write_wrench_csv(const WrenchTimeSeries& s, std::ostream& os) {
    os << "t,fx,fy,fz,tx,ty,tz\n";
    for (const auto& sm : s.samples) {
        os << io::fmt(sm.t);
        for (double v : sm.w) os << ',' << io::fmt(v);
        os << '\n';
    }
}

inline void write_wrench_csv(const WrenchTimeSeries& s, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open for writing: " + path);
    write_wrench_csv(s, os);
}

inline WrenchTimeSeries read_wrench_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InputError("wrench CSV: empty file");
    if (line != "t,fx,fy,fz,tx,ty,tz")
        throw InputError("wrench CSV: bad header '" + line + "'");
    WrenchTimeSeries out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto c = io::split(line);
        if (c.size() != 7) throw InputError("wrench CSV: expected 7 columns");
        WrenchSample s;
        s.t = io::parse_double(c[0]);
        for (int k = 0; k < 6; ++k) s.w[k] = io::parse_double(c[k + 1]);
        out.samples.push_back(s);
    }
    if (out.samples.empty()) throw EmptySeries("wrench CSV: no data rows");
    return out;
}

inline WrenchTimeSeries read_wrench_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open: " + path);
    return read_wrench_csv(is);
}

/// Estimate CSV: `t,tau_x,tau_y,p_x,p_y,m_x,m_y,method`.
struct EstimateRow {
    double t = 0.0;
    double tau_x = 0.0, tau_y = 0.0;
    double p_x = 0.0, p_y = 0.0;
    double m_x = 0.0, m_y = 0.0;
    std::string method = "dipole";
};

inline void write_estimate_csv(const std::vector<EstimateRow>& rows, std::ostream& os) {
    os << "t,tau_x,tau_y,p_x,p_y,m_x,m_y,method\n";
    for (const auto& r : rows) {
        os << io::fmt(r.t) << ',' << io::fmt(r.tau_x) << ',' << io::fmt(r.tau_y) << ','
           << io::fmt(r.p_x) << ',' << io::fmt(r.p_y) << ',' << io::fmt(r.m_x) << ','
           << io::fmt(r.m_y) << ',' << r.method << '\n';
    }
}

inline std::vector<EstimateRow> read_estimate_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InputError("estimate CSV: empty file");
    if (line != "t,tau_x,tau_y,p_x,p_y,m_x,m_y,method")
        throw InputError("estimate CSV: bad header '" + line + "'");
    std::vector<EstimateRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto c = io::split(line);
        if (c.size() != 8) throw InputError("estimate CSV: expected 8 columns");
        EstimateRow r;
        r.t = io::parse_double(c[0]);
        r.tau_x = io::parse_double(c[1]);
        r.tau_y = io::parse_double(c[2]);
        r.p_x = io::parse_double(c[3]);
        r.p_y = io::parse_double(c[4]);
        r.m_x = io::parse_double(c[5]);
        r.m_y = io::parse_double(c[6]);
        r.method = std::string(c[7]);
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<EstimateRow> read_estimate_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open: " + path);
    return read_estimate_csv(is);
}

/// Calibration JSON with fixed key names.
inline nlohmann::ordered_json calibration_to_json(const CalibrationModel& m) {
    nlohmann::ordered_json j;
    j["c_x"] = m.c_x;
    j["c_y"] = m.c_y;
    j["c_z"] = m.c_z;
    j["intercepts"] = {m.intercept[0], m.intercept[1]};
    j["rmse"] = {m.rmse[0], m.rmse[1]};
    j["n_points"] = {m.n_points[0], m.n_points[1]};
    j["method"] = m.method;
    j["created_from"] = m.created_from;
    return j;
}

inline void write_calibration_json(const CalibrationModel& m, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open for writing: " + path);
    os << calibration_to_json(m).dump(2) << '\n';
}

inline CalibrationModel read_calibration_json(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("calibration JSON parse error: " + std::string(e.what()));
    }
    CalibrationModel m;
    m.c_x = j.at("c_x").get<double>();
    m.c_y = j.at("c_y").get<double>();
    m.c_z = j.at("c_z").get<double>();
    m.intercept = {j.at("intercepts")[0].get<double>(), j.at("intercepts")[1].get<double>()};
    m.rmse = {j.at("rmse")[0].get<double>(), j.at("rmse")[1].get<double>()};
    m.n_points = {j.at("n_points")[0].get<std::size_t>(), j.at("n_points")[1].get<std::size_t>()};
    m.method = j.at("method").get<std::string>();
    m.created_from = j.at("created_from").get<std::string>();
    m.fit_slope = {m.c_x, m.c_y};
    m.fitted_with_intercept = m.intercept[0] != 0.0 || m.intercept[1] != 0.0;
    m.fitted = true;
    return m;
}

}  // namespace tdm
