// tdm: tilt-torque estimation from visuotactile marker displacement fields.
//
// Subcommands: simulate | estimate | decompose | calibrate | evaluate |
//              flow | track | rezero-demo
// Exit codes: 0 success, 1 input/usage error, 2 internal failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdm/tdm.hpp"

namespace fs = std::filesystem;
using namespace tdm;

namespace {

// ---- small argument parsers -------------------------------------------------

std::map<std::string, std::string> parse_kv(const std::string& s) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw InputError("expected key=value in '" + item + "'");
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return kv;
}

double kv_num(const std::map<std::string, std::string>& kv, const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw InputError("missing '" + key + "' parameter");
    return io::parse_double(it->second);
}

// "32x32:pitch=0.5"
GridSpec parse_grid(const std::string& s) {
    const auto colon = s.find(':');
    const std::string dims = s.substr(0, colon);
    const auto x = dims.find('x');
    if (x == std::string::npos) throw InputError("grid: expected WxH");
    const int w = std::stoi(dims.substr(0, x));
    const int h = std::stoi(dims.substr(x + 1));
    double pitch = 1.0;
    if (colon != std::string::npos) {
        const auto kv = parse_kv(s.substr(colon + 1));
        if (kv.count("pitch")) pitch = io::parse_double(kv.at("pitch"));
    }
    return GridSpec(w, h, pitch);
}

// "disc:r=6" or "rect:w=10,h=15", optionally with cx=,cy= (defaults to grid center)
ContactPatch parse_patch(const std::string& s, const GridSpec& grid) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw InputError("patch: expected shape:params");
    const std::string shape = s.substr(0, colon);
    const auto kv = parse_kv(s.substr(colon + 1));
    ContactPatch patch;
    patch.center = grid.center();
    if (kv.count("cx")) patch.center.x = io::parse_double(kv.at("cx"));
    if (kv.count("cy")) patch.center.y = io::parse_double(kv.at("cy"));
    if (shape == "disc")
        patch.shape = DiscShape{kv_num(kv, "r")};
    else if (shape == "rect")
        patch.shape = RectShape{kv_num(kv, "w"), kv_num(kv, "h")};
    else
        throw InputError("patch: unknown shape '" + shape + "'");
    return patch;
}

// "triangle:axis=x,peak=20,frames=200,rate=19"
struct ProfileSpec {
    char axis = 'x';
    double peak = 20.0;
    int frames = 200;
    double rate = 19.0;
};

ProfileSpec parse_profile(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos || s.substr(0, colon) != "triangle")
        throw InputError("profile: only 'triangle:...' is supported");
    const auto kv = parse_kv(s.substr(colon + 1));
    ProfileSpec p;
    if (kv.count("axis")) p.axis = kv.at("axis")[0];
    if (kv.count("peak")) p.peak = io::parse_double(kv.at("peak"));
    if (kv.count("frames")) p.frames = static_cast<int>(kv_num(kv, "frames"));
    if (kv.count("rate")) p.rate = io::parse_double(kv.at("rate"));
    return p;
}

std::string frame_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%06zu.csv", i);
    return buf;
}

// ---- subcommand bodies ------------------------------------------------------

struct SimulateArgs {
    std::string grid_spec = "32x32:pitch=0.5";
    std::string patch_spec = "disc:r=6";
    std::string profile_spec = "triangle:axis=x,peak=20,frames=200,rate=19";
    double noise = 0.0;
    double fz = 30.0;
    std::uint64_t seed = 0;
    std::string out_dir;
};

int run_simulate(const SimulateArgs& a) {
    const GridSpec grid = parse_grid(a.grid_spec);
    const ContactPatch patch = parse_patch(a.patch_spec, grid);
    const ProfileSpec prof = parse_profile(a.profile_spec);
    std::mt19937_64 rng(a.seed);

    const auto script =
        triangle_profile(prof.axis, prof.peak, prof.frames, prof.rate, a.fz);
    const GraspSequence seq = grasp_sequence(script, patch, grid, a.noise, &rng);

    fs::create_directories(a.out_dir);
    std::ofstream manifest(fs::path(a.out_dir) / "frames.csv", std::ios::binary);
    manifest << "t,file\n";
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        const std::string name = frame_name(i);
        write_field_csv(seq.frames[i], (fs::path(a.out_dir) / name).string());
        manifest << io::fmt(seq.frames[i].timestamp) << ',' << name << '\n';
    }
    write_wrench_csv(seq.truth, (fs::path(a.out_dir) / "truth.csv").string());
    std::cout << "wrote " << seq.frames.size() << " frames to " << a.out_dir
              << " (zero reference: " << frame_name(seq.zero_frame) << ")\n";
    return 0;
}

struct EstimateArgs {
    std::string ref_path;
    std::string cal_path;
    std::string method = "dipole";
    std::string manifest_path;
    std::vector<std::string> frames;
    double rate = 19.0;
    double t0 = 0.0;
    std::string out_path;
};

std::vector<EstimateRow> run_estimate_rows(const EstimateArgs& a) {
    std::vector<std::pair<double, std::string>> inputs;
    if (!a.manifest_path.empty()) {
        std::ifstream is(a.manifest_path, std::ios::binary);
        if (!is) throw InputError("cannot open: " + a.manifest_path);
        std::string line;
        std::getline(is, line);
        if (line != "t,file") throw InputError("manifest: bad header");
        const fs::path base = fs::path(a.manifest_path).parent_path();
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            const auto c = io::split(line);
            if (c.size() != 2) throw InputError("manifest: expected 2 columns");
            inputs.emplace_back(io::parse_double(c[0]), (base / std::string(c[1])).string());
        }
    }
    for (std::size_t i = 0; i < a.frames.size(); ++i)
        inputs.emplace_back(a.t0 + static_cast<double>(i) / a.rate, a.frames[i]);
    if (inputs.empty()) throw EmptyInput("no input frames");

    const ZeroReference ref(read_field_csv(a.ref_path));
    CalibrationModel cal = CalibrationModel::identity();
    if (!a.cal_path.empty()) cal = read_calibration_json(a.cal_path);

    std::vector<EstimateRow> rows;
    rows.reserve(inputs.size());
    for (const auto& [t, path] : inputs) {
        DisplacementField f = read_field_csv(path);
        f.timestamp = t;
        EstimateRow row;
        row.t = t;
        row.method = a.method;
        if (a.method == "dipole") {
            const auto [torque, dip] = estimate(f, &ref, cal);
            row.tau_x = torque.tau_x;
            row.tau_y = torque.tau_y;
            row.p_x = dip.p_tilt.x;
            row.p_y = dip.p_tilt.y;
            row.m_x = dip.midpoint.x;
            row.m_y = dip.midpoint.y;
        } else if (a.method == "baseline") {
            const DisplacementField zeroed = zero(f, ref);
            const BaselineWrench w = baseline_torque(zeroed, cal);
            row.tau_x = w.tau[0];
            row.tau_y = w.tau[1];
            row.p_x = w.raw_p.x;
            row.p_y = w.raw_p.y;
            const Vec2 c = f.grid.center();
            row.m_x = c.x;
            row.m_y = c.y;
        } else {
            throw InputError("unknown method '" + a.method + "'");
        }
        rows.push_back(row);
    }
    return rows;
}

int run_estimate(const EstimateArgs& a) {
    const auto rows = run_estimate_rows(a);
    if (a.out_path.empty()) {
        write_estimate_csv(rows, std::cout);
    } else {
        std::ofstream os(a.out_path, std::ios::binary);
        if (!os) throw InputError("cannot open for writing: " + a.out_path);
        write_estimate_csv(rows, os);
    }
    return 0;
}

int run_decompose(const std::string& in_path, std::string out_prefix) {
    if (out_prefix.empty()) {
        out_prefix = in_path;
        if (out_prefix.size() > 4 && out_prefix.ends_with(".csv"))
            out_prefix.resize(out_prefix.size() - 4);
    }
    const DisplacementField f = read_field_csv(in_path);
    const FieldDecomposition dec = decompose(f);
    write_field_csv(dec.diverging, out_prefix + ".div.csv");
    write_field_csv(dec.rotational, out_prefix + ".rot.csv");
    write_field_csv(dec.harmonic, out_prefix + ".harm.csv");
    std::cout << "wrote " << out_prefix << ".{div,rot,harm}.csv\n";
    return 0;
}

// Pairs estimator raws against time-aligned truth torques.
struct CalPairs {
    std::vector<FitPoint> axis_x, axis_y;
    std::string method;
};

CalPairs build_pairs(const std::string& truth_path, const std::string& est_path) {
    const WrenchTimeSeries truth = read_wrench_csv(truth_path);
    const auto est = read_estimate_csv(est_path);
    if (est.empty()) throw EmptySeries("estimate CSV has no rows");

    std::vector<double> times;
    for (const auto& r : est) times.push_back(r.t);
    const ResampleResult rs = resample(truth, times);

    CalPairs out;
    out.method = est.front().method;
    std::size_t k = 0;
    for (const auto& r : est) {
        if (r.t < truth.samples.front().t || r.t > truth.samples.back().t) continue;
        const auto& w = rs.series.samples[k++].w;
        out.axis_x.push_back({r.p_y, w[3]});
        out.axis_y.push_back({-r.p_x, w[4]});
    }
    return out;
}

int run_calibrate(const std::string& truth_path, const std::string& est_path,
                  const std::string& out_path, bool with_intercept) {
    const CalPairs pairs = build_pairs(truth_path, est_path);
    CalibrationModel cal = fit(pairs.axis_x, pairs.axis_y, with_intercept);
    cal.method = pairs.method;
    cal.created_from = est_path;
    if (pairs.method == "baseline") cal.c_z = 0.5 * (cal.c_x + cal.c_y);
    write_calibration_json(cal, out_path);
    std::cout << "c_x=" << io::fmt(cal.c_x) << " c_y=" << io::fmt(cal.c_y)
              << " rmse=[" << io::fmt(cal.rmse[0]) << ',' << io::fmt(cal.rmse[1])
              << "] n=[" << cal.n_points[0] << ',' << cal.n_points[1] << "]\n";
    return 0;
}

int run_evaluate(const std::string& cal_path, const std::string& truth_path,
                 const std::string& est_path, const std::string& scatter_path) {
    const CalibrationModel cal = read_calibration_json(cal_path);
    const CalPairs pairs = build_pairs(truth_path, est_path);

    std::vector<EvalPoint> ex, ey;
    for (const auto& p : pairs.axis_x)
        ex.push_back({p.truth, cal.c_x * p.raw + cal.intercept[0]});
    for (const auto& p : pairs.axis_y)
        ey.push_back({p.truth, cal.c_y * p.raw + cal.intercept[1]});
    const AxisReport rx = evaluate_axis(ex);
    const AxisReport ry = evaluate_axis(ey);

    if (!scatter_path.empty()) {
        std::ofstream os(scatter_path, std::ios::binary);
        if (!os) throw InputError("cannot open for writing: " + scatter_path);
        os << "truth,estimate,axis,method\n";
        for (const auto& p : ex)
            os << io::fmt(p.truth) << ',' << io::fmt(p.estimate) << ",x," << pairs.method << '\n';
        for (const auto& p : ey)
            os << io::fmt(p.truth) << ',' << io::fmt(p.estimate) << ",y," << pairs.method << '\n';
    }
    std::cout << "axis x: slope=" << io::fmt(rx.slope) << " rmse=" << io::fmt(rx.rmse)
              << " r2=" << io::fmt(rx.r2) << " n=" << rx.n << '\n';
    std::cout << "axis y: slope=" << io::fmt(ry.slope) << " rmse=" << io::fmt(ry.rmse)
              << " r2=" << io::fmt(ry.r2) << " n=" << ry.n << '\n';
    return 0;
}

int run_flow(const std::string& ref_path, const std::vector<std::string>& frames,
             const FlowParams& params, const std::string& out_dir) {
    if (frames.empty()) throw EmptyInput("no input frames");
    const GrayFrame ref = read_pgm(ref_path);
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        GrayFrame cur = read_pgm(frames[i]);
        cur.index = static_cast<std::int64_t>(i);
        const DisplacementField field = block_flow(ref, cur, params);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "flow_%06zu.csv", i);
        write_field_csv(field, (fs::path(out_dir) / buf).string());
    }
    std::cout << "wrote " << frames.size() << " flow fields to " << out_dir << '\n';
    return 0;
}

struct TrackArgs {
    std::vector<std::string> frames;
    BlobParams blob;
    TrackerParams tracker;
    std::string grid_spec;  // empty: pixel-native grid from first frame
    std::string out_dir;
};

int run_track(const TrackArgs& a) {
    if (a.frames.empty()) throw EmptyInput("no input frames");
    Tracker tracker;
    tracker.params = a.tracker;
    std::optional<GridSpec> grid;
    if (!a.grid_spec.empty()) grid = parse_grid(a.grid_spec);

    fs::create_directories(a.out_dir);
    // Marker site = first observed position; displacement accumulates from it.
    std::map<int, Vec2> anchors;
    for (std::size_t i = 0; i < a.frames.size(); ++i) {
        const GrayFrame frame = read_pgm(a.frames[i]);
        if (!grid) {
            // pixel-native: pitch 1, one node per blob-pitch is unknowable, so
            // use a 16-node-wide lattice spanning the frame
            const double pitch = std::max(1.0, frame.width / 16.0);
            grid = GridSpec(static_cast<int>(frame.width / pitch),
                            static_cast<int>(frame.height / pitch), pitch);
        }
        tracker.update(detect_blobs(frame, a.blob));
        std::vector<Marker> markers;
        for (const auto& t : tracker.tracks) {
            if (!t.alive) continue;
            auto [it, fresh] = anchors.try_emplace(t.id, t.positions.front());
            markers.push_back({it->second, t.last() - it->second});
        }
        if (markers.size() < 4) {
            std::cerr << "frame " << i << ": only " << markers.size()
                      << " live tracks, skipping\n";
            continue;
        }
        DisplacementField field = rasterize(markers, *grid);
        field.frame_index = static_cast<std::int64_t>(i);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "track_%06zu.csv", i);
        write_field_csv(field, (fs::path(a.out_dir) / buf).string());
    }
    std::cout << "tracked " << tracker.tracks.size() << " markers over "
              << a.frames.size() << " frames\n";
    return 0;
}

// Demonstrates why re-zeroing matters after a grip change: a stale reference
// degrades the estimate, swapping in a fresh post-change frame restores it.
int run_rezero_demo(std::uint64_t seed, const std::string& out_path) {
    const GridSpec grid(32, 32, 0.5);
    ContactPatch patch;
    patch.center = grid.center();
    patch.shape = DiscShape{6.0};
    std::mt19937_64 rng(seed);

    const int n = 120;
    const double rate = 19.0;
    auto script = triangle_profile('x', 15.0, n, rate, 30.0);
    for (int i = n / 2; i < n; ++i) script[i].fz = 45.0;  // grip change mid-run
    const GraspSequence seq = grasp_sequence(script, patch, grid, 0.01, &rng);

    const ZeroReference stale(seq.frames[seq.zero_frame]);
    AppliedWrench regrasp{};
    regrasp.fz = 45.0;
    regrasp.timestamp = script[n / 2].timestamp;
    const ZeroReference fresh(synth_field(regrasp, patch, grid, 0.01, &rng));

    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw InputError("cannot open for writing: " + out_path);
    os << "t,truth_tx,stale_p_y,rezeroed_p_y\n";
    double err_stale = 0, err_fresh = 0;
    int count = 0;
    for (std::size_t i = 2; i < seq.frames.size(); ++i) {
        const bool after = seq.frames[i].timestamp >= regrasp.timestamp;
        const auto [t1, d1] = estimate(seq.frames[i], &stale, CalibrationModel::identity());
        const auto& ref2 = after ? fresh : stale;
        const auto [t2, d2] = estimate(seq.frames[i], &ref2, CalibrationModel::identity());
        os << io::fmt(seq.frames[i].timestamp) << ',' << io::fmt(seq.truth.samples[i].w[3])
           << ',' << io::fmt(d1.p_tilt.y) << ',' << io::fmt(d2.p_tilt.y) << '\n';
        if (after) {
            // compare against a per-branch linear fit would need calibration;
            // report raw dipole consistency instead
            ++count;
            err_stale += std::abs(d1.p_tilt.x);
            err_fresh += std::abs(d2.p_tilt.x);
        }
    }
    std::cout << "post-change mean |off-axis dipole|: stale ref "
              << io::fmt(err_stale / std::max(1, count)) << ", re-zeroed "
              << io::fmt(err_fresh / std::max(1, count)) << '\n';
    std::cout << "wrote " << out_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tilt-torque estimation from visuotactile marker displacement fields"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Generate synthetic grasp/tilt frames");
    c_sim->add_option("--grid", sim.grid_spec, "WxH:pitch=P (default 32x32:pitch=0.5)");
    c_sim->add_option("--patch", sim.patch_spec, "disc:r=R | rect:w=W,h=H");
    c_sim->add_option("--profile", sim.profile_spec,
                      "triangle:axis=A,peak=T,frames=N,rate=HZ");
    c_sim->add_option("--noise", sim.noise, "isotropic node noise sigma, mm");
    c_sim->add_option("--fz", sim.fz, "grasp normal force, N");
    c_sim->add_option("--seed", sim.seed, "RNG seed")->required();
    c_sim->add_option("--out", sim.out_dir, "output directory")->required();

    EstimateArgs est;
    auto* c_est = app.add_subcommand("estimate", "Estimate tilt torque per frame");
    c_est->add_option("--ref", est.ref_path, "zero-reference field CSV")->required();
    c_est->add_option("--cal", est.cal_path, "calibration JSON (identity if absent)");
    c_est->add_option("--method", est.method, "dipole | baseline");
    c_est->add_option("--manifest", est.manifest_path, "frames.csv manifest (t,file)");
    c_est->add_option("--rate", est.rate, "frame rate for positional frames, Hz");
    c_est->add_option("--t0", est.t0, "timestamp of first positional frame, s");
    c_est->add_option("--out", est.out_path, "output CSV (stdout if absent)");
    c_est->add_option("frames", est.frames, "field CSV frames");

    std::string dec_in, dec_prefix;
    auto* c_dec = app.add_subcommand("decompose", "Helmholtz-Hodge decomposition");
    c_dec->add_option("input", dec_in, "field CSV")->required();
    c_dec->add_option("--out-prefix", dec_prefix, "output prefix (default: input stem)");

    std::string cal_truth, cal_est, cal_out;
    bool cal_intercept = false;
    auto* c_cal = app.add_subcommand("calibrate", "Fit per-axis calibration factors");
    c_cal->add_option("--truth", cal_truth, "ground-truth wrench CSV")->required();
    c_cal->add_option("--est", cal_est, "estimate CSV")->required();
    c_cal->add_option("--out", cal_out, "calibration JSON")->required();
    c_cal->add_flag("--intercept", cal_intercept, "fit with intercept");

    std::string ev_cal, ev_truth, ev_est, ev_scatter;
    auto* c_ev = app.add_subcommand("evaluate", "Held-out metrics for a calibration");
    c_ev->add_option("--cal", ev_cal, "calibration JSON")->required();
    c_ev->add_option("--truth", ev_truth, "ground-truth wrench CSV")->required();
    c_ev->add_option("--est", ev_est, "estimate CSV")->required();
    c_ev->add_option("--scatter", ev_scatter, "scatter CSV (truth,estimate,axis,method)");

    std::string flow_ref, flow_out;
    std::vector<std::string> flow_frames;
    FlowParams flow_params;
    auto* c_flow = app.add_subcommand("flow", "Block-matching optical flow on PGM frames");
    c_flow->add_option("--ref", flow_ref, "reference PGM")->required();
    c_flow->add_option("frames", flow_frames, "PGM frames");
    c_flow->add_option("--block", flow_params.block, "block side, px (odd)");
    c_flow->add_option("--search", flow_params.search, "search radius, px");
    c_flow->add_option("--stride", flow_params.stride, "node spacing, px");
    c_flow->add_option("--out", flow_out, "output directory")->required();

    TrackArgs trk;
    auto* c_trk = app.add_subcommand("track", "Blob detection + tracking on PGM frames");
    c_trk->add_option("frames", trk.frames, "PGM frames");
    c_trk->add_option("--threshold", trk.blob.threshold, "intensity threshold");
    c_trk->add_option("--min-area", trk.blob.min_area, "min blob area, px^2");
    c_trk->add_option("--max-area", trk.blob.max_area, "max blob area, px^2");
    c_trk->add_flag("!--bright", trk.blob.dark_markers, "markers darker than background");
    c_trk->add_option("--max-disp", trk.tracker.max_disp, "max displacement px/frame");
    c_trk->add_option("--grid", trk.grid_spec, "WxH:pitch=P rasterization grid");
    c_trk->add_option("--out", trk.out_dir, "output directory")->required();

    std::uint64_t rz_seed = 0;
    std::string rz_out = "rezero_demo.csv";
    auto* c_rz = app.add_subcommand("rezero-demo",
                                    "Show the effect of re-zeroing after a grip change");
    c_rz->add_option("--seed", rz_seed, "RNG seed")->required();
    c_rz->add_option("--out", rz_out, "output CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_sim) return run_simulate(sim);
        if (*c_est) return run_estimate(est);
        if (*c_dec) return run_decompose(dec_in, dec_prefix);
        if (*c_cal) return run_calibrate(cal_truth, cal_est, cal_out, cal_intercept);
        if (*c_ev) return run_evaluate(ev_cal, ev_truth, ev_est, ev_scatter);
        if (*c_flow) return run_flow(flow_ref, flow_frames, flow_params, flow_out);
        if (*c_trk) return run_track(trk);
        if (*c_rz) return run_rezero_demo(rz_seed, rz_out);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
