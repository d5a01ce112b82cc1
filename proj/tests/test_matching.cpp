#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ffr/fcrd.hpp"
#include "ffr/hydro.hpp"
#include "ffr/lti.hpp"
#include "ffr/matching.hpp"
#include "ffr/turbine.hpp"

using namespace ffr;
using lti::Complex;
using lti::RationalTF;
using matching::ActuatorKind;
using matching::ActuatorSpec;

namespace {

RationalTF dvpp_target() { return fcrd::design_target(fcrd::FcrdSpec{}, 20.0); }

// two-actuator coordination plant: 100 MVA hydro and a 4-unit wind park,
// wind model written with the published rounded zero
std::vector<ActuatorSpec> dvpp_actuators() {
    hydro::HydroParams hp;
    hp.rating_mw = 100.0;
    hp.t_y = 0.2;
    hp.t_w = 2.0;
    hp.g0 = 0.8;
    RationalTF h1 = hydro::linearize(hp);
    RationalTF h2(4.0 * 1.8, {Complex(0.048, 0.0)}, {Complex(-0.048, 0.0)});
    return {{"hydro", h1, 1.0, ActuatorKind::hydro}, {"wind", h2, 1.0, ActuatorKind::wind}};
}

std::vector<ActuatorSpec> n5_actuators() {
    auto mk_hydro = [](double rating, double t_w, double share) {
        hydro::HydroParams p;
        p.rating_mw = rating;
        p.t_y = 0.2;
        p.t_w = t_w;
        p.g0 = 0.8;
        return ActuatorSpec{"hydro" + std::to_string(int(rating)), hydro::linearize(p), share,
                            ActuatorKind::hydro};
    };
    auto mk_wind = [](double p_nom, double v, double share) {
        turbine::TurbineParams p;
        p.scale = p_nom / p.p_nom_mw;
        return ActuatorSpec{"wind" + std::to_string(int(p_nom)), turbine::linearize(v, p).h_dimensional,
                            share, ActuatorKind::wind};
    };
    return {mk_hydro(9000.0, 0.7, 0.60), mk_hydro(6000.0, 1.4, 0.30), mk_hydro(2000.0, 1.4, 0.10),
            mk_wind(500.0, 10.0, 0.33), mk_wind(1500.0, 8.0, 0.67)};
}

RationalTF sum_factors(const std::vector<RationalTF>& fs) {
    RationalTF sum;
    for (const auto& f : fs) sum = lti::parallel(sum, f);
    return sum;
}

// output of a state-space system driven by a sampled input, RK4
std::vector<double> drive(const lti::StateSpace& ss, const std::vector<double>& u, double dt) {
    std::vector<double> x(ss.n, 0.0), k1(ss.n), k2(ss.n), k3(ss.n), k4(ss.n), tmp(ss.n);
    std::vector<double> y(u.size());
    y[0] = ss.output(x.data(), u[0]);
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        double um = 0.5 * (u[i] + u[i + 1]);
        ss.deriv(x.data(), u[i], k1.data());
        for (int j = 0; j < ss.n; ++j) tmp[j] = x[j] + 0.5 * dt * k1[j];
        ss.deriv(tmp.data(), um, k2.data());
        for (int j = 0; j < ss.n; ++j) tmp[j] = x[j] + 0.5 * dt * k2[j];
        ss.deriv(tmp.data(), um, k3.data());
        for (int j = 0; j < ss.n; ++j) tmp[j] = x[j] + dt * k3[j];
        ss.deriv(tmp.data(), u[i + 1], k4.data());
        for (int j = 0; j < ss.n; ++j) x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        y[i + 1] = ss.output(x.data(), u[i + 1]);
    }
    return y;
}

}  // namespace

TEST_CASE("worked two-actuator example: factor sum, residual, controller orders") {
    auto acts = dvpp_actuators();
    auto set = matching::synthesize(acts, dvpp_target());
    CHECK(set.normalized);
    CHECK(set.warnings.empty());

    // unnormalized sum expands to (s^2 + 0.481 s + 0.03)/(s^2 + 0.673 s + 0.03)
    auto num = lti::numerator(set.factor_sum);
    auto den = lti::denominator(set.factor_sum);
    REQUIRE(num.size() == 3);
    CHECK(num[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(num[1] == doctest::Approx(0.481).epsilon(1e-9));
    CHECK(num[2] == doctest::Approx(0.03).epsilon(1e-9));
    CHECK(den[1] == doctest::Approx(0.673).epsilon(1e-9));
    CHECK(den[2] == doctest::Approx(0.03).epsilon(1e-9));

    auto rep = matching::verify_matching(set, acts);
    CHECK(rep.residual_inf_norm <= 1e-9);
    CHECK(rep.internal_stability);
    for (const auto& k : set.controllers) {
        CHECK(lti::classify(k).stable);
        CHECK(k.order() == 4);
    }
}

TEST_CASE("worked example: factors sum to one exactly after simplification") {
    auto set = matching::synthesize(dvpp_actuators(), dvpp_target());
    RationalTF sum = sum_factors(set.factors);
    CHECK(sum.order() == 0);
    CHECK(sum.zeros().empty());
    CHECK(sum.gain() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("single minimum-phase actuator takes the whole target") {
    RationalTF plant = RationalTF::first_order_lag(50.0, 0.3);
    auto target = dvpp_target();
    auto set = matching::synthesize({{"battery", plant, 1.0, ActuatorKind::hydro}}, target);
    CHECK(set.normalized);
    REQUIRE(set.factors.size() == 1);
    CHECK(set.factors[0].order() == 0);
    CHECK(set.factors[0].gain() == doctest::Approx(1.0));
    RationalTF want = lti::divide(target, plant);
    for (double w : lti::log_grid(1e-3, 1e2, 50)) {
        Complex s(0.0, w);
        CHECK(std::abs(set.controllers[0].eval(s) - want.eval(s)) <= 1e-9 * std::abs(want.eval(s)));
    }
}

TEST_CASE("five-actuator configuration: exact matching and stable controllers") {
    auto acts = n5_actuators();
    auto target = fcrd::design_target(fcrd::FcrdSpec{});
    auto set = matching::synthesize(acts, target);
    CHECK(set.normalized);

    RationalTF sum = sum_factors(set.factors);
    CHECK(sum.order() == 0);
    CHECK(sum.gain() == doctest::Approx(1.0).epsilon(1e-9));

    auto rep = matching::verify_matching(set, acts);
    CHECK(rep.residual_inf_norm <= 1e-9);
    CHECK(rep.internal_stability);

    for (std::size_t i = 0; i < acts.size(); ++i) {
        auto cls = lti::classify(set.controllers[i]);
        CHECK(cls.stable);
        CHECK(set.controllers[i].zeros().size() <= set.controllers[i].order());
        // every RHP plant zero must reappear among the factor's zeros
        for (const auto& z : lti::classify(acts[i].plant).nmp_zeros) {
            bool found = false;
            for (const auto& cz : set.factors[i].zeros())
                found = found || std::abs(cz - z) <= 1e-9 * std::max(1.0, std::abs(z));
            CHECK(found);
        }
        // normalization by the fourth-order factor sum plus the second-order
        // target makes every coordinated controller sixth order here
        CHECK(set.controllers[i].order() == 6);
    }

    // hydro factors keep their steady shares; wind factors carry none
    for (std::size_t i = 0; i < acts.size(); ++i) {
        double dc = lti::dc_gain(set.factors[i]);
        CHECK(dc == doctest::Approx(acts[i].kind == ActuatorKind::hydro ? acts[i].share : 0.0)
                        .epsilon(1e-9));
    }
}

TEST_CASE("closed-loop equivalence: coordinated ensemble behaves as the target") {
    auto acts = n5_actuators();
    auto target = fcrd::design_target(fcrd::FcrdSpec{});
    auto set = matching::synthesize(acts, target);

    double dt = 0.002, t_end = 60.0;
    std::size_t n = static_cast<std::size_t>(t_end / dt) + 1;
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = i * dt;  // smooth synthetic frequency-error trace
        u[i] = 0.8 * (1.0 - std::exp(-t / 4.0)) + 0.15 * std::exp(-t / 25.0) * std::sin(0.4 * t);
    }
    std::vector<double> total(n, 0.0);
    for (std::size_t i = 0; i < acts.size(); ++i) {
        auto y = drive(lti::realize(lti::series(set.controllers[i], acts[i].plant)), u, dt);
        for (std::size_t j = 0; j < n; ++j) total[j] += y[j];
    }
    auto ideal = drive(lti::realize(target), u, dt);
    double peak = 0.0;
    for (double v : ideal) peak = std::max(peak, std::abs(v));
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(total[j] - ideal[j]) <= 1e-6 * peak);
}

TEST_CASE("sustained tier alone: normalization refused with a diagnostic") {
    auto acts = n5_actuators();
    acts.resize(3);  // hydro only
    acts[0].share = 0.6;
    acts[1].share = 0.3;
    acts[2].share = 0.1;
    auto target = fcrd::design_target(fcrd::FcrdSpec{});
    auto set = matching::synthesize(acts, target);
    CHECK_FALSE(set.normalized);
    CHECK_FALSE(set.diagnostic.empty());
    auto sum_cls = lti::classify(set.factor_sum);
    CHECK_FALSE(sum_cls.minimum_phase());  // the share-weighted all-pass sum picks up an RHP zero

    auto rep = matching::verify_matching(set, acts);
    CHECK(rep.internal_stability);          // still internally sound
    CHECK(rep.residual_inf_norm > 0.05);    // but matching is only approximate
    for (const auto& k : set.controllers) CHECK(lti::classify(k).stable);
}

TEST_CASE("unnormalized residual peaks in the hand-off band") {
    auto acts = dvpp_actuators();
    auto target = dvpp_target();
    auto full = matching::synthesize(acts, target);

    // rebuild the set without the final normalization step
    matching::ParticipationSet raw;
    raw.target = target;
    raw.factors = {RationalTF(-1.0, {Complex(0.625, 0.0)}, {Complex(-0.625, 0.0)}),
                   lti::series(RationalTF(2.0, {Complex(0.0, 0.0)}, {Complex(-0.625, 0.0)}),
                               RationalTF(1.0, {Complex(0.048, 0.0)}, {Complex(-0.048, 0.0)}))};
    raw.controllers = {lti::divide(lti::series(raw.factors[0], target), acts[0].plant),
                       lti::divide(lti::series(raw.factors[1], target), acts[1].plant)};
    auto rep = matching::verify_matching(raw, acts);
    CHECK(rep.internal_stability);

    // residual equals |sum - 1| of the unnormalized factor quotient, and its
    // peak sits between the wind and hydro RHP zeros
    double worst = 0.0, worst_w = 0.0;
    RationalTF sum = full.factor_sum;
    for (double w : lti::log_grid(1e-4, 1e3, 600)) {
        double r = std::abs(sum.eval(Complex(0.0, w)) - Complex(1.0, 0.0));
        if (r > worst) {
            worst = r;
            worst_w = w;
        }
    }
    CHECK(rep.residual_inf_norm == doctest::Approx(worst).epsilon(1e-6));
    CHECK(worst_w > 0.08);
    CHECK(worst_w < 0.25);
}

TEST_CASE("dropping the transient tier's RHP factor breaks internal stability") {
    auto acts = dvpp_actuators();
    auto target = dvpp_target();
    matching::ParticipationSet bad;
    bad.target = target;
    RationalTF c1(-1.0, {Complex(0.625, 0.0)}, {Complex(-0.625, 0.0)});
    RationalTF c2_naive(2.0, {Complex(0.0, 0.0)}, {Complex(-0.625, 0.0)});  // 1 - c1, no RHP factor
    bad.factors = {c1, c2_naive};
    bad.controllers = {lti::divide(lti::series(c1, target), acts[0].plant),
                       lti::divide(lti::series(c2_naive, target), acts[1].plant)};
    auto rep = matching::verify_matching(bad, acts);
    CHECK_FALSE(rep.internal_stability);
    CHECK_FALSE(lti::classify(bad.controllers[1]).stable);  // unstable pole at the wind zero
}

TEST_CASE("allocate_shares: class mapping, sums, and edge cases") {
    auto acts = n5_actuators();
    for (auto& a : acts) a.share = 0.0;
    auto shared = matching::allocate_shares(acts, {0.6, 0.3, 0.1}, {0.33, 0.67});
    CHECK(shared[0].share == doctest::Approx(0.6));
    CHECK(shared[1].share == doctest::Approx(0.3));
    CHECK(shared[2].share == doctest::Approx(0.1));
    CHECK(shared[3].share == doctest::Approx(0.33));
    CHECK(shared[4].share == doctest::Approx(0.67));

    CHECK_THROWS_AS((void)matching::allocate_shares(acts, {0.6, 0.3, 0.2}, {0.33, 0.67}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)matching::allocate_shares(acts, {0.6, 0.4}, {0.33, 0.67}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)matching::allocate_shares(acts, {0.6, 0.5, -0.1}, {0.33, 0.67}),
                    std::invalid_argument);

    auto single = matching::allocate_shares({acts[0]}, {1.0}, {});
    CHECK(single[0].share == doctest::Approx(1.0));
}

TEST_CASE("tier-speed warning when the sustained zeros are not the fast ones") {
    hydro::HydroParams slow;
    slow.rating_mw = 100.0;
    slow.t_y = 0.2;
    slow.t_w = 30.0;  // penstock zero at 0.042, slower than the wind zero
    slow.g0 = 0.8;
    RationalTF h1 = hydro::linearize(slow);
    RationalTF h2(7.2, {Complex(0.048, 0.0)}, {Complex(-0.048, 0.0)});
    auto set = matching::synthesize(
        {{"hydro", h1, 1.0, ActuatorKind::hydro}, {"wind", h2, 1.0, ActuatorKind::wind}}, dvpp_target());
    CHECK_FALSE(set.warnings.empty());
}
