#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ffr/lti.hpp"
#include "ffr/turbine.hpp"

using namespace ffr;
using turbine::Mode;
using turbine::TurbineParams;
using turbine::TurbineState;

namespace {

struct Run {
    std::vector<double> t, p_e, x;
    TurbineState final_state;
    bool protection_seen = false;
};

Run run_ref_step(double v, double k, double step_frac, double t_end, double dt = 0.01,
                 double t_step = 1.0) {
    TurbineParams p;
    p.k = k;
    double p_mpp = turbine::mpp(v, p).p_mpp_mw;
    TurbineState s = turbine::init_state(v, p);
    Run r;
    for (double t = 0.0; t < t_end - 0.5 * dt; t += dt) {
        double p_ref = p_mpp * (t >= t_step ? 1.0 + step_frac : 1.0);
        auto step = turbine::step_nonlinear(s, p_ref, v, dt, p);
        s = step.state;
        r.t.push_back(t + dt);
        r.p_e.push_back(step.p_e_mw);
        r.x.push_back(step.x);
        r.protection_seen = r.protection_seen || s.mode == Mode::low_speed_protection;
    }
    r.final_state = s;
    return r;
}

}  // namespace

TEST_CASE("default inertia equals the rotor plus geared generator inertia") {
    // 35 444 067 + 97^2 * 534.116, quoted rounded to 40.47e6
    double composed = 35444067.0 + 97.0 * 97.0 * 534.116;
    TurbineParams p;
    CHECK(p.inertia_kgm2 == doctest::Approx(composed).epsilon(2e-5));
}

TEST_CASE("mpp: benchmark operating points within 2%") {
    TurbineParams p;
    auto m8 = turbine::mpp(8.0, p);
    CHECK(m8.omega_mpp_rad_s == doctest::Approx(0.95).epsilon(0.02));
    CHECK(m8.p_mpp_mw == doctest::Approx(1.8).epsilon(0.02));
    auto m10 = turbine::mpp(10.0, p);
    CHECK(m10.omega_mpp_rad_s == doctest::Approx(1.19).epsilon(0.02));
    CHECK(m10.p_mpp_mw == doctest::Approx(3.5).epsilon(0.02));
}

TEST_CASE("mpp: cubic/linear scaling toward zero wind and validity limits") {
    TurbineParams p;
    auto a = turbine::mpp(0.1, p);
    auto b = turbine::mpp(0.2, p);
    CHECK(b.omega_mpp_rad_s / a.omega_mpp_rad_s == doctest::Approx(2.0));
    CHECK(b.p_wind_mw / a.p_wind_mw == doctest::Approx(8.0));
    CHECK(a.p_mpp_mw < 1e-4);
    CHECK_THROWS_AS((void)turbine::mpp(-1.0, p), std::invalid_argument);
    CHECK_THROWS_AS((void)turbine::mpp(11.0, p), std::invalid_argument);  // above rated speed
}

TEST_CASE("cp curve: pinned maximum, floor slope, bounds, monotonicity") {
    TurbineParams p;
    CHECK(turbine::cp(1.0) == doctest::Approx(p.c_opt));
    CHECK(turbine::cp_slope(1.0) == doctest::Approx(0.0));
    CHECK(turbine::cp_slope(0.8) == doctest::Approx(0.36));
    for (double x = 0.0; x <= 2.0; x += 0.001) {
        double c = turbine::cp(x);
        CHECK(c >= 0.0);
        CHECK(c < 0.593);
        CHECK(c <= turbine::cp(1.0) + 1e-12);  // global maximum at the MPP
    }
    for (double x = 0.70; x < 1.0; x += 0.001) CHECK(turbine::cp_slope(x) > 0.0);
    for (double x = 1.001; x < 1.4; x += 0.001) CHECK(turbine::cp_slope(x) < 0.0);
}

TEST_CASE("linearize: zero/pole bounds and the scaling constant") {
    TurbineParams p;
    auto l8 = turbine::linearize(8.0, p);
    CHECK(l8.zero_bound_rad_s == doctest::Approx(0.048).epsilon(0.02));
    CHECK(l8.pole_floor_rad_s == doctest::Approx(0.048).epsilon(0.02));
    auto l10 = turbine::linearize(10.0, p);
    CHECK(l10.zero_bound_rad_s == doctest::Approx(0.060).epsilon(0.02));
    CHECK(l10.pole_floor_rad_s == doctest::Approx(0.060).epsilon(0.02));
    TurbineParams hot = p;
    hot.k = 1.08;
    auto lhot = turbine::linearize(8.0, hot);
    CHECK(lhot.zero_bound_rad_s == doctest::Approx(0.048).epsilon(0.02));
    CHECK(lhot.pole_floor_rad_s == doctest::Approx(0.096).epsilon(0.02));
    CHECK(p.speed_constant() == doctest::Approx(0.013).epsilon(5e-4 / 0.013));

    // dimensional form carries the farm MPP power as gain
    TurbineParams farm = p;
    farm.scale = 4.0;
    auto lf = turbine::linearize(8.0, farm);
    CHECK(lf.h_dimensional.gain() == doctest::Approx(4.0 * 1.8).epsilon(0.02));
    CHECK(lti::dc_gain(lf.h_allpass) == doctest::Approx(-1.0));
}

TEST_CASE("open_loop_pole: sign structure and linearity in wind speed") {
    TurbineParams p;
    CHECK(turbine::open_loop_pole(8.0, 1.0, p) == doctest::Approx(0.0));
    CHECK(turbine::open_loop_pole(8.0, 0.8, p) == doctest::Approx(0.048).epsilon(0.02));
    CHECK(turbine::open_loop_pole(8.0, 1.1, p) < 0.0);
    for (double x0 : {0.8, 0.9, 0.95, 1.1}) {
        double ratio = turbine::open_loop_pole(10.0, x0, p) / turbine::open_loop_pole(5.0, x0, p);
        CHECK(ratio == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("property: closed-loop zero does not move with the feedback gain") {
    TurbineParams p;
    for (double v : {6.0, 8.0, 10.0}) {
        for (double x0 : {0.8, 0.9, 1.0, 1.2}) {
            double want = turbine::open_loop_pole(v, x0, p);
            for (double k = 0.4; k <= 2.0; k += 0.2) {
                TurbineParams pk = p;
                pk.k = k;
                auto pz = turbine::linearize_at(v, x0, pk);
                CHECK(pz.zero_rad_s == doctest::Approx(want).epsilon(1e-12));
                CHECK(pz.pole_rad_s > 0.0);
            }
        }
    }
}

TEST_CASE("equilibrium: MPP reference holds the operating point for 100 s") {
    TurbineParams p;
    double v = 8.0;
    double p_mpp = turbine::mpp(v, p).p_mpp_mw;
    TurbineState s = turbine::init_state(v, p);
    for (int i = 0; i < 10000; ++i) {
        auto step = turbine::step_nonlinear(s, p_mpp, v, 0.01, p);
        s = step.state;
        CHECK(step.p_e_mw == doctest::Approx(p_mpp).epsilon(1e-6));
        CHECK(step.x == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("+20% reference step: monotone slowdown, settles above the floor") {
    Run r = run_ref_step(8.0, 0.72, 0.20, 120.0);
    TurbineParams p;
    double p_mpp = turbine::mpp(8.0, p).p_mpp_mw;
    double peak = *std::max_element(r.p_e.begin(), r.p_e.end());
    CHECK(peak > 1.15 * p_mpp);   // output first jumps toward the request
    CHECK(peak < 1.21 * p_mpp);
    CHECK(r.p_e.back() < p_mpp);  // sustained output ends below the MPP value
    for (std::size_t i = 1; i < r.x.size(); ++i) CHECK(r.x[i] <= r.x[i - 1] + 1e-12);
    CHECK(r.x.back() > 0.8);
    CHECK(r.x.back() < 0.9);      // almost reaches the speed limit
    CHECK_FALSE(r.protection_seen);
}

TEST_CASE("+30% reference step: low-speed protection pins x near the floor") {
    Run r = run_ref_step(8.0, 0.72, 0.30, 200.0);
    CHECK(r.protection_seen);
    CHECK(r.x.back() == doctest::Approx(0.80).epsilon(0.0125));  // 0.80 +- 0.01
    double x_min = *std::min_element(r.x.begin(), r.x.end());
    CHECK(x_min >= 0.78);
}

TEST_CASE("protection releases when the request falls back below the set point") {
    TurbineParams p;
    double v = 8.0;
    double p_mpp = turbine::mpp(v, p).p_mpp_mw;
    TurbineState s = turbine::init_state(v, p);
    bool prot = false;
    for (int i = 0; i < 6000; ++i) {  // 60 s of +30% demand
        auto step = turbine::step_nonlinear(s, 1.3 * p_mpp, v, 0.01, p);
        s = step.state;
        prot = prot || s.mode == Mode::low_speed_protection;
    }
    CHECK(prot);
    CHECK(s.mode == Mode::low_speed_protection);
    for (int i = 0; i < 20000; ++i) {  // back to MPP tracking
        auto step = turbine::step_nonlinear(s, p_mpp, v, 0.01, p);
        s = step.state;
    }
    CHECK(s.mode == Mode::normal);
    double x_end = s.omega / turbine::mpp(v, p).omega_mpp_rad_s;
    CHECK(x_end == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("property: worst-case linear model underestimates the output") {
    TurbineParams p;
    for (double v : {6.0, 8.0, 10.0}) {
        auto lin = turbine::linearize(v, p);
        TimeSeries ap = lti::step_response(lin.h_allpass, 120.0, 0.01);
        const auto& y = ap.col("y");
        double p_mpp = turbine::mpp(v, p).p_mpp_mw;
        for (double frac : {0.05, 0.10, 0.20}) {
            Run r = run_ref_step(v, p.k, frac, 120.0, 0.01, 0.0);
            for (std::size_t i = 0; i < r.t.size(); ++i) {
                if (r.t[i] < 1.0) continue;  // skip the torque-ramp transient
                std::size_t j = static_cast<std::size_t>(std::llround(r.t[i] / 0.01));
                double linear_prediction = p_mpp * (1.0 + frac * y[j]);
                CHECK(r.p_e[i] >= linear_prediction - 1e-3 * p_mpp);
            }
        }
    }
}

TEST_CASE("property: steady-state gain ordering against the worst-case bound") {
    TurbineParams p;
    auto bound = turbine::linearize_at(8.0, p.x_floor, p);
    double worst = bound.zero_rad_s / bound.pole_rad_s;
    for (double x0 = 0.8; x0 < 1.0; x0 += 0.025) {
        auto pz = turbine::linearize_at(8.0, x0, p);
        double ratio = pz.zero_rad_s / pz.pole_rad_s;
        CHECK(ratio >= 0.0);
        CHECK(ratio <= worst + 1e-12);
    }
}

TEST_CASE("property: protection keeps the speed ratio above 0.78 for bounded references") {
    std::mt19937 rng(23);
    TurbineParams p;
    for (double v : {6.0, 8.0, 10.0}) {
        double p_mpp = turbine::mpp(v, p).p_mpp_mw;
        std::uniform_real_distribution<double> ref_d(0.0, 1.5 * p_mpp);
        for (int trial = 0; trial < 8; ++trial) {
            TurbineState s = turbine::init_state(v, p);
            double p_ref = p_mpp;
            for (int i = 0; i < 9000; ++i) {  // 90 s, new demand every 5 s
                if (i % 500 == 0) p_ref = ref_d(rng);
                auto step = turbine::step_nonlinear(s, p_ref, v, 0.01, p);
                s = step.state;
                CHECK(step.x >= 0.78);
            }
        }
    }
}

TEST_CASE("property: output power never exceeds wind capture plus kinetic release") {
    TurbineParams p;
    double v = 8.0;
    double cap_mw = p.eta * turbine::mpp(v, p).p_wind_mw * 0.593;
    Run r = run_ref_step(v, 0.72, 0.25, 60.0);
    double prev_omega = turbine::init_state(v, p).omega;
    for (std::size_t i = 0; i < r.t.size(); ++i) {
        double omega = r.x[i] * turbine::mpp(v, p).omega_mpp_rad_s;
        double release_mw = p.inertia_kgm2 * omega * std::abs(omega - prev_omega) / 0.01 / 1e6;
        CHECK(r.p_e[i] <= cap_mw + release_mw + 1e-9);
        prev_omega = omega;
    }
}

TEST_CASE("property: settled operating point balances mechanical and electric power") {
    TurbineParams p;
    double v = 8.0;
    Run r = run_ref_step(v, 0.72, 0.20, 400.0);
    const TurbineState& s = r.final_state;
    double p_m = turbine::mech_power_mw(v, s.omega, p);
    double drain = r.p_e.back() / p.eta;
    CHECK(p_m == doctest::Approx(drain).epsilon(1e-6));
}

TEST_CASE("varying wind: baseline-relative response matches the constant-speed run") {
    TurbineParams p;
    std::istringstream trace_text("0 8.0\n20 8.6\n40 7.5\n60 8.2\n80 7.9\n100 8.0\n");
    auto trace = turbine::WindTrace::parse(trace_text);
    double dt = 0.01, t_end = 100.0, t_step = 10.0;
    double frac = 0.15;

    auto run_trace = [&](bool with_step) {
        TurbineState s = turbine::init_state(trace.at(0.0), p);
        std::vector<double> out;
        for (double t = 0.0; t < t_end - 0.5 * dt; t += dt) {
            double v = trace.at(t);
            double base = turbine::mpp_power_estimate_mw(s.v_hat, p);
            double p_ref = base * (with_step && t >= t_step ? 1.0 + frac : 1.0);
            auto step = turbine::step_nonlinear(s, p_ref, v, dt, p);
            s = step.state;
            out.push_back(step.p_e_mw);
        }
        return out;
    };
    auto with_step = run_trace(true);
    auto baseline = run_trace(false);
    Run fixed = run_ref_step(8.0, p.k, frac, t_end, dt, t_step);
    double p_mpp = turbine::mpp(8.0, p).p_mpp_mw;
    for (std::size_t i = 0; i < with_step.size(); ++i) {
        double t = (i + 1) * dt;
        if (t < t_step + 1.0) continue;
        double rel = with_step[i] - baseline[i];
        double rel_fixed = fixed.p_e[i] - p_mpp;
        CHECK(std::abs(rel - rel_fixed) <= 0.08 * p_mpp);
    }
}

TEST_CASE("wind trace parsing rejects malformed input") {
    std::istringstream bad_order("0 8\n-1 9\n");
    CHECK_THROWS(turbine::WindTrace::parse(bad_order));
    std::istringstream bad_speed("0 8\n1 -2\n");
    CHECK_THROWS(turbine::WindTrace::parse(bad_speed));
    std::istringstream empty("# only a comment\n");
    CHECK_THROWS(turbine::WindTrace::parse(empty));
    std::istringstream good("# t v\n0 8\n10 9 # gust\n");
    auto tr = turbine::WindTrace::parse(good);
    CHECK(tr.at(5.0) == doctest::Approx(8.5));
    CHECK(tr.at(-1.0) == doctest::Approx(8.0));
    CHECK(tr.at(99.0) == doctest::Approx(9.0));
}

TEST_CASE("rotor stall guard: absurd drain without protection trips the error") {
    TurbineParams p;
    p.x_floor = 0.05;  // effectively disable the protection floor
    p.k = 0.5;
    double v = 8.0;
    TurbineState s = turbine::init_state(v, p);
    bool threw = false;
    try {
        for (int i = 0; i < 200000; ++i) {
            auto step = turbine::step_nonlinear(s, 5.0 * turbine::mpp(v, p).p_mpp_mw, v, 0.01, p);
            s = step.state;
        }
    } catch (const std::runtime_error&) {
        threw = true;
    }
    CHECK(threw);
}
