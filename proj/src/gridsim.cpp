#include "ffr/gridsim.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace ffr::gridsim {

void Scenario::validate() const {
    if (dt_s <= 0.0 || t_end_s < dt_s) throw std::invalid_argument("Scenario: need dt > 0 and t_end >= dt");
    if (total_w_kin_gws() <= 0.0) throw std::invalid_argument("Scenario: total kinetic energy must be > 0");
    if (load_damping_mw_hz < 0.0) throw std::invalid_argument("Scenario: negative load damping");
    if (f0_hz <= 0.0) throw std::invalid_argument("Scenario: f0 must be > 0");
    fcrd.validate();
    for (const auto& b : buses) {
        if (b.w_kin_gws < 0.0) throw std::invalid_argument("Scenario: negative kinetic energy at bus " + b.id);
        if (b.hydro) b.hydro->params.validate();
        if (b.wind) {
            b.wind->params.validate();
            if (!b.wind->trace && b.wind->v_m_s <= 0.0)
                throw std::invalid_argument("Scenario: wind speed must be > 0 at bus " + b.id);
        }
    }
    if (event_t_s < 0.0 || event_t_s > t_end_s) throw std::invalid_argument("Scenario: event time outside horizon");
}

double Scenario::total_w_kin_gws() const {
    double sum = 0.0;
    for (const auto& b : buses) sum += b.w_kin_gws;
    return sum;
}

lti::RationalTF Scenario::target() const { return fcrd::design_target(fcrd, r_fcr_override); }

std::vector<matching::ActuatorSpec> actuators_for(const Scenario& sc) {
    std::vector<matching::ActuatorSpec> acts;
    for (const auto& b : sc.buses) {
        if (b.hydro) {
            acts.push_back({"hydro" + b.id, hydro::linearize(b.hydro->params), b.hydro->fcr_share,
                            matching::ActuatorKind::hydro});
        }
    }
    for (const auto& b : sc.buses) {
        if (b.wind) {
            double v = b.wind->trace ? b.wind->trace->at(0.0) : b.wind->v_m_s;
            acts.push_back({"wind" + b.id, turbine::linearize(v, b.wind->params).h_dimensional,
                            b.wind->ffr_share, matching::ActuatorKind::wind});
        }
    }
    return acts;
}

matching::ParticipationSet synthesize_for(const Scenario& sc) {
    sc.validate();
    auto acts = actuators_for(sc);
    std::vector<double> fcr, ffr;
    for (const auto& b : sc.buses)
        if (b.hydro) fcr.push_back(b.hydro->fcr_share);
    for (const auto& b : sc.buses)
        if (b.wind) ffr.push_back(b.wind->ffr_share);
    acts = matching::allocate_shares(std::move(acts), fcr, ffr);
    return matching::synthesize(acts, sc.target());
}

double coi(std::span<const double> freqs_hz, std::span<const double> w_kins_gws) {
    if (freqs_hz.empty() || freqs_hz.size() != w_kins_gws.size())
        throw std::invalid_argument("coi: need equal-length non-empty inputs");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
        num += w_kins_gws[i] * freqs_hz[i];
        den += w_kins_gws[i];
    }
    if (den <= 0.0) throw std::invalid_argument("coi: total kinetic energy must be > 0");
    return num / den;
}

namespace {

struct ActRt {
    std::string id;
    bool is_wind = false;
    lti::StateSpace ctrl;
    int c_off = 0;
    // nonlinear physical states (g,q) or (omega, v_hat)
    int p_off = 0;
    hydro::HydroParams hp;
    turbine::TurbineParams wp;
    double v_const = 0.0;
    const turbine::WindTrace* trace = nullptr;
    double ref_gain_mw = 0.0;
    double p0_mw = 0.0;
    // frozen per step
    double tau_nm = 0.0;
    turbine::Mode mode = turbine::Mode::normal;
    // linear variant
    lti::StateSpace plant_ss;
    int h_off = 0;
};

double wind_speed_at(const ActRt& a, double t) { return a.trace ? a.trace->at(t) : a.v_const; }

TimeSeries simulate_impl(const Scenario& sc, const matching::ParticipationSet& ctrl, bool linear) {
    sc.validate();
    const bool ref_drive = sc.drive == DriveMode::reference_step;
    const bool fault_drive = sc.drive == DriveMode::fault;
    if (ref_drive && linear) throw std::invalid_argument("simulate_linear: reference_step drive not supported");

    auto specs = actuators_for(sc);
    if (!ref_drive && ctrl.controllers.size() != specs.size())
        throw std::invalid_argument("simulate: controller count does not match actuator count");

    // state layout: [0] frequency deviation, then per-actuator slices
    int nx = 1;
    std::vector<ActRt> acts;
    {
        std::size_t ai = 0;
        for (const auto& b : sc.buses) {
            if (b.hydro) {
                ActRt a;
                a.id = "hydro" + b.id;
                a.is_wind = false;
                a.hp = b.hydro->params;
                a.p0_mw = a.hp.rating_mw * a.hp.g0;
                acts.push_back(std::move(a));
                ++ai;
            }
        }
        for (const auto& b : sc.buses) {
            if (b.wind) {
                ActRt a;
                a.id = "wind" + b.id;
                a.is_wind = true;
                a.wp = b.wind->params;
                a.trace = b.wind->trace ? &*b.wind->trace : nullptr;
                a.v_const = b.wind->v_m_s;
                double v0 = a.trace ? a.trace->at(0.0) : a.v_const;
                a.ref_gain_mw = turbine::mpp(v0, a.wp).p_mpp_mw;
                a.p0_mw = a.ref_gain_mw;
                acts.push_back(std::move(a));
                ++ai;
            }
        }
    }
    // attach controllers in the canonical order used by actuators_for
    for (std::size_t i = 0; i < acts.size(); ++i) {
        if (!ref_drive) acts[i].ctrl = lti::realize(ctrl.controllers[i]);
        acts[i].c_off = nx;
        nx += acts[i].ctrl.n;
        if (linear) {
            acts[i].plant_ss = lti::realize(specs[i].plant);
            acts[i].h_off = nx;
            nx += acts[i].plant_ss.n;
        } else {
            acts[i].p_off = nx;
            nx += 2;
        }
    }
    lti::StateSpace target_ss = lti::realize(sc.target());
    int f_off = nx;
    nx += target_ss.n;

    std::vector<double> x(nx, 0.0);
    for (auto& a : acts) {
        if (linear) continue;
        if (a.is_wind) {
            double v0 = wind_speed_at(a, 0.0);
            auto st = turbine::init_state(v0, a.wp);
            x[a.p_off] = st.omega;
            x[a.p_off + 1] = st.v_hat;
            a.tau_nm = st.tau_set;
        } else {
            x[a.p_off] = a.hp.g0;
            x[a.p_off + 1] = a.hp.g0;
        }
    }

    const double m_sw = 2.0 * sc.total_w_kin_gws() * 1000.0 / sc.f0_hz;  // MW per Hz/s
    const double t_event = sc.event_t_s;

    auto input_u = [&](double t, const double* xs) -> double {
        switch (sc.drive) {
            case DriveMode::fault: return -xs[0];
            case DriveMode::frequency_step: return t >= t_event - 1e-12 ? sc.event_freq_step_hz : 0.0;
            case DriveMode::reference_step: return 0.0;
        }
        return 0.0;
    };

    auto hydro_power_mw = [](const ActRt& a, const double* xs) {
        double g = std::max(xs[a.p_off], 1e-4), q = xs[a.p_off + 1];
        double ratio = q / g;
        return a.hp.rating_mw * q * ratio * ratio;
    };
    auto wind_power_mw = [](const ActRt& a, const double* xs) {
        return a.wp.eta * a.tau_nm * xs[a.p_off] / 1e6;
    };

    auto deriv = [&](double t, const double* xs, double* dxs) {
        double u = input_u(t, xs);
        double p_net_mw = 0.0;
        for (auto& a : acts) {
            double y = 0.0;
            if (a.ctrl.n > 0 || a.ctrl.d != 0.0) {
                a.ctrl.deriv(xs + a.c_off, u, dxs + a.c_off);
                y = a.ctrl.output(xs + a.c_off, u);
            }
            if (linear) {
                a.plant_ss.deriv(xs + a.h_off, y, dxs + a.h_off);
                p_net_mw += a.plant_ss.output(xs + a.h_off, y);
                continue;
            }
            if (!a.is_wind) {
                double g = xs[a.p_off], q = xs[a.p_off + 1];
                double g_eff = std::max(g, 1e-4);
                double g_cmd = a.hp.g0 + y;
                dxs[a.p_off] =
                    std::clamp((g_cmd - g) / a.hp.t_y, -a.hp.servo_rate_pu_s, a.hp.servo_rate_pu_s);
                double ratio = q / g_eff;
                dxs[a.p_off + 1] = (1.0 - ratio * ratio) / a.hp.t_w;
                p_net_mw += a.hp.rating_mw * q * ratio * ratio - a.p0_mw;
            } else {
                double omega = xs[a.p_off], vh = xs[a.p_off + 1];
                double v = wind_speed_at(a, t);
                double p_m_w = turbine::mech_power_mw(v, omega, a.wp) * 1e6;
                dxs[a.p_off] = (p_m_w - a.tau_nm * omega) / (a.wp.inertia_kgm2 * a.wp.scale * omega);
                dxs[a.p_off + 1] = (v - vh) / a.wp.v_filter_s;
                p_net_mw += a.wp.eta * a.tau_nm * omega / 1e6 - a.p0_mw;
            }
        }
        if (target_ss.n > 0) target_ss.deriv(xs + f_off, u, dxs + f_off);
        if (acts.empty() && linear) p_net_mw = target_ss.output(xs + f_off, u);
        if (fault_drive) {
            double dist = t >= t_event - 1e-12 ? sc.event_dp_mw : 0.0;
            dxs[0] = (p_net_mw - sc.load_damping_mw_hz * xs[0] - dist) / m_sw;
        } else {
            dxs[0] = 0.0;
        }
    };

    TimeSeries ts;
    const std::size_t f_ch = ts.add_channel("f_hz");
    std::vector<std::size_t> p_ch(acts.size());
    std::vector<std::size_t> x_ch(acts.size(), SIZE_MAX);
    std::vector<std::size_t> prot_ch(acts.size(), SIZE_MAX);
    for (std::size_t i = 0; i < acts.size(); ++i) p_ch[i] = ts.add_channel("P_" + acts[i].id + "_mw");
    for (std::size_t i = 0; i < acts.size(); ++i) {
        if (acts[i].is_wind && !linear) {
            x_ch[i] = ts.add_channel("x_" + acts[i].id);
            prot_ch[i] = ts.add_channel("prot_" + acts[i].id);
        }
    }
    const std::size_t reserve_ch = ts.add_channel("P_reserve_mw");
    const std::size_t ideal_ch = ts.add_channel("P_ideal_mw");

    auto record = [&](double t, const double* xs) {
        double u = input_u(t, xs);
        double f = sc.f_start_hz;
        if (sc.drive == DriveMode::fault)
            f += xs[0];
        else if (sc.drive == DriveMode::frequency_step)
            f -= u;
        ts.time.push_back(t);
        ts[f_ch].push_back(f);
        double reserve = 0.0;
        for (std::size_t i = 0; i < acts.size(); ++i) {
            const auto& a = acts[i];
            double p_abs;
            if (linear) {
                double y = (a.ctrl.n > 0 || a.ctrl.d != 0.0) ? a.ctrl.output(xs + a.c_off, u) : 0.0;
                double dp = a.plant_ss.output(xs + a.h_off, y);
                p_abs = a.p0_mw + dp;
                reserve += dp;
            } else if (a.is_wind) {
                p_abs = wind_power_mw(a, xs);
                reserve += p_abs - a.p0_mw;
                double v = wind_speed_at(a, t);
                ts[x_ch[i]].push_back(xs[a.p_off] * a.wp.rotor_radius_m / (a.wp.lambda_opt * v));
                ts[prot_ch[i]].push_back(a.mode == turbine::Mode::low_speed_protection ? 1.0 : 0.0);
            } else {
                p_abs = hydro_power_mw(a, xs);
                reserve += p_abs - a.p0_mw;
            }
            ts[p_ch[i]].push_back(p_abs);
        }
        double ideal = target_ss.output(xs + f_off, u);
        if (acts.empty() && linear) reserve = ideal;
        ts[reserve_ch].push_back(reserve);
        ts[ideal_ch].push_back(ideal);
    };

    const double dt = sc.dt_s;
    const std::size_t steps = static_cast<std::size_t>(std::llround(sc.t_end_s / dt));
    std::vector<double> k1(nx), k2(nx), k3(nx), k4(nx), tmp(nx);

    record(0.0, x.data());
    for (std::size_t k = 0; k < steps; ++k) {
        double t = double(k) * dt;
        // limiter/protection decisions frozen for the coming step
        if (!linear) {
            double u = input_u(t, x.data());
            for (auto& a : acts) {
                if (!a.is_wind) continue;
                turbine::TurbineState st{x[a.p_off], a.tau_nm, x[a.p_off + 1], a.mode};
                double p_mpp_hat = turbine::mpp_power_estimate_mw(st.v_hat, a.wp);
                double p_ref;
                if (ref_drive)
                    p_ref = p_mpp_hat * (1.0 + (t >= t_event - 1e-12 ? sc.event_ref_step_frac : 0.0));
                else
                    p_ref = p_mpp_hat +
                            ((a.ctrl.n > 0 || a.ctrl.d != 0.0) ? a.ctrl.output(x.data() + a.c_off, u) : 0.0) *
                                a.ref_gain_mw;
                auto cmd = turbine::set_point(st, p_ref, dt, a.wp);
                a.tau_nm = cmd.tau_nm;
                a.mode = cmd.mode;
            }
        }

        deriv(t, x.data(), k1.data());
        for (int i = 0; i < nx; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
        deriv(t + 0.5 * dt, tmp.data(), k2.data());
        for (int i = 0; i < nx; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
        deriv(t + 0.5 * dt, tmp.data(), k3.data());
        for (int i = 0; i < nx; ++i) tmp[i] = x[i] + dt * k3[i];
        deriv(t + dt, tmp.data(), k4.data());
        for (int i = 0; i < nx; ++i) x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        for (auto& a : acts) {
            if (linear) continue;
            if (a.is_wind) {
                if (!(x[a.p_off] > 0.0))
                    throw std::runtime_error(sc.name + ": turbine " + a.id +
                                             " driven to standstill at t = " + std::to_string(t + dt));
            } else {
                x[a.p_off] = std::clamp(x[a.p_off], 1e-4, 1.0);
                x[a.p_off + 1] = std::max(x[a.p_off + 1], 1e-6);
            }
        }
        for (int i = 0; i < nx; ++i) {
            if (!std::isfinite(x[i]))
                throw std::runtime_error(sc.name + ": simulation diverged at t = " + std::to_string(t + dt));
        }
        if (fault_drive && std::abs(x[0]) > sc.f0_hz)
            throw std::runtime_error(sc.name + ": frequency left the physical range at t = " +
                                     std::to_string(t + dt));
        record(t + dt, x.data());
    }
    return ts;
}

}  // namespace

TimeSeries simulate(const Scenario& sc, const matching::ParticipationSet& ctrl) {
    return simulate_impl(sc, ctrl, /*linear=*/false);
}

TimeSeries simulate_linear(const Scenario& sc, const matching::ParticipationSet& ctrl) {
    return simulate_impl(sc, ctrl, /*linear=*/true);
}

fcrd::Verdict check(const Scenario& sc, const TimeSeries& ts) {
    if (sc.drive != DriveMode::fault) {
        fcrd::Verdict v;
        v.overall = fcrd::VerdictState::inconclusive;
        v.details = "open-loop drive; reserve product requirements not applicable";
        return v;
    }
    fcrd::FcrdSpec spec = sc.fcrd;
    spec.load_damping_mw_hz = sc.load_damping_mw_hz;
    double r = lti::dc_gain(sc.target());
    return fcrd::check_fcrd(ts, "f_hz", ts, "P_reserve_mw", spec, r, sc.event_dp_mw);
}

}  // namespace ffr::gridsim
