#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "tdm/dipole.hpp"
#include "tdm/io.hpp"
#include "tdm/simulator.hpp"

using namespace tdm;

TEST_CASE("resample: verbatim hits, interpolation, and dropped queries") {
    WrenchTimeSeries truth;
    truth.samples = {{0.0, {1, 0, 0, 0, 0, 0}},
                     {1.0, {3, 0, 10, 0, 0, 0}},
                     {3.0, {7, 0, 30, 0, 0, 0}}};

    const ResampleResult r = resample(truth, {-0.5, 0.0, 0.5, 2.0, 3.0, 3.5});
    CHECK(r.dropped == 2);
    REQUIRE(r.series.samples.size() == 4);
    CHECK(r.series.samples[0].w[0] == 1.0);   // exact hit, copied verbatim
    CHECK(r.series.samples[1].w[0] == doctest::Approx(2.0));
    CHECK(r.series.samples[1].w[2] == doctest::Approx(5.0));
    CHECK(r.series.samples[2].w[0] == doctest::Approx(5.0));
    CHECK(r.series.samples[3].w[0] == 7.0);
}

TEST_CASE("resample error paths") {
    WrenchTimeSeries empty;
    CHECK_THROWS_AS(resample(empty, {0.0}), EmptySeries);

    WrenchTimeSeries bad;
    bad.samples = {{1.0, {}}, {1.0, {}}};
    CHECK_THROWS_AS(resample(bad, {1.0}), NonMonotoneTime);

    WrenchTimeSeries truth;
    truth.samples = {{0.0, {}}, {1.0, {}}};
    CHECK_THROWS_AS(resample(truth, {5.0, 6.0}), NoOverlap);
}

TEST_CASE("through-origin fit recovers an exact linear relation") {
    std::vector<FitPoint> pts;
    for (int i = -5; i <= 5; ++i)
        pts.push_back({0.1 * i, 0.7 * 0.1 * i});
    const CalibrationModel m = fit(pts, pts);
    CHECK(m.c_x == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(m.c_y == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(m.rmse[0] == doctest::Approx(0.0));
    CHECK(m.n_points[0] == pts.size());
    CHECK(m.fitted);
    CHECK(!m.fitted_with_intercept);
}

TEST_CASE("intercept fit recovers slope and offset") {
    std::vector<FitPoint> pts;
    for (int i = 0; i < 10; ++i)
        pts.push_back({0.2 * i, 1.5 * 0.2 * i - 0.3});
    const CalibrationModel m = fit(pts, pts, /*with_intercept=*/true);
    CHECK(m.c_x == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(m.intercept[0] == doctest::Approx(-0.3).epsilon(1e-9));
    CHECK(m.fitted_with_intercept);
}

TEST_CASE("fit is bit-identical under input permutation") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<FitPoint> pts;
    for (int i = 0; i < 40; ++i) {
        const double x = u(rng);
        pts.push_back({x, 2.0 * x + 0.05 * u(rng)});
    }
    auto shuffled = pts;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const CalibrationModel a = fit(pts, pts);
    const CalibrationModel b = fit(shuffled, shuffled);
    CHECK(a.c_x == b.c_x);  // bitwise
    CHECK(a.rmse[0] == b.rmse[0]);
}

TEST_CASE("fit error paths") {
    std::vector<FitPoint> one = {{1.0, 2.0}};
    CHECK_THROWS_AS(fit(one, one), InputError);
    std::vector<FitPoint> flat = {{0.0, 1.0}, {0.0, 2.0}, {0.0, 3.0}};
    CHECK_THROWS_AS(fit(flat, flat), RankDeficient);
    CHECK_THROWS_AS(fit(flat, flat, true), RankDeficient);
}

TEST_CASE("evaluate_axis metrics") {
    std::vector<EvalPoint> perfect;
    for (int i = -4; i <= 4; ++i) perfect.push_back({1.0 * i, 1.0 * i});
    const AxisReport rp = evaluate_axis(perfect);
    CHECK(rp.r2 == doctest::Approx(1.0));
    CHECK(rp.rmse == doctest::Approx(0.0));
    CHECK(rp.slope == doctest::Approx(1.0));
    CHECK(rp.n == perfect.size());

    // constant-zero truth against a nonzero estimate must not score well
    std::vector<EvalPoint> zeros;
    for (int i = 0; i < 5; ++i) zeros.push_back({0.0, 0.5});
    const AxisReport rz = evaluate_axis(zeros);
    CHECK(rz.r2 <= 0.0);

    CHECK_THROWS_AS(evaluate_axis({}), EmptySeries);
}

TEST_CASE("calibration JSON round trip preserves the model") {
    CalibrationModel m;
    m.c_x = 1234.5;
    m.c_y = -987.25;
    m.c_z = 55.5;
    m.intercept = {0.125, -0.5};
    m.rmse = {0.03125, 0.0625};
    m.n_points = {120, 118};
    m.method = "dipole";
    m.created_from = "run_0001";
    m.fitted = true;

    const auto dir = std::filesystem::temp_directory_path() / "tdm_cal_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "cal.json").string();
    write_calibration_json(m, path);
    const CalibrationModel r = read_calibration_json(path);
    CHECK(r.c_x == m.c_x);
    CHECK(r.c_y == m.c_y);
    CHECK(r.c_z == m.c_z);
    CHECK(r.intercept[0] == m.intercept[0]);
    CHECK(r.intercept[1] == m.intercept[1]);
    CHECK(r.rmse[0] == m.rmse[0]);
    CHECK(r.n_points[0] == m.n_points[0]);
    CHECK(r.method == m.method);
    CHECK(r.created_from == m.created_from);

    const auto j = calibration_to_json(m);
    for (const char* key : {"c_x", "c_y", "c_z", "intercepts", "rmse",
                            "n_points", "method", "created_from"})
        CHECK(j.contains(key));
    CHECK(j.size() == 8);
}

TEST_CASE("end-to-end calibration against the simulator recovers the scale") {
    GridSpec g(32, 32, 0.5);
    ContactPatch patch;
    patch.shape = DiscShape{6.0};
    patch.center = g.center();

    const auto script = triangle_profile('x', 20.0, 60, 19.0, 30.0);
    const GraspSequence seq = grasp_sequence(script, patch, g, 0.0);
    const ZeroReference ref(seq.frames[seq.zero_frame]);

    std::vector<FitPoint> ax, ay;
    std::vector<double> times;
    std::vector<Vec2> moments;
    for (std::size_t i = seq.zero_frame + 1; i < seq.frames.size(); ++i) {
        const auto [t, p] =
            estimate(seq.frames[i], &ref, CalibrationModel::identity());
        times.push_back(seq.frames[i].timestamp);
        moments.push_back(p.p_tilt);
    }
    const ResampleResult rs = resample(seq.truth, times);
    REQUIRE(rs.series.samples.size() == times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        ax.push_back({moments[i].y, rs.series.samples[i].w[3]});
        ay.push_back({-moments[i].x, rs.series.samples[i].w[4]});
    }

    const CalibrationModel cal = fit(ax, ax);
    CHECK(cal.c_x > 0.0);

    // calibrated replay of the same run should sit on the identity line
    std::vector<EvalPoint> eval;
    for (std::size_t i = 0; i < times.size(); ++i)
        eval.push_back({rs.series.samples[i].w[3], cal.c_x * moments[i].y});
    const AxisReport rep = evaluate_axis(eval);
    CHECK(rep.r2 > 0.999);
    CHECK(rep.slope == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(rep.rmse < 0.01 * 20.0);
}
