#include "ffr/presets.hpp"

#include <stdexcept>

namespace ffr::presets {

namespace {

using gridsim::BusSpec;
using gridsim::HydroUnit;
using gridsim::Scenario;
using gridsim::WindUnit;

HydroUnit hydro_unit(double rating_mw, double t_y, double t_w, double g0, double share) {
    HydroUnit u;
    u.params.rating_mw = rating_mw;
    u.params.t_y = t_y;
    u.params.t_w = t_w;
    u.params.g0 = g0;
    u.fcr_share = share;
    return u;
}

WindUnit wind_farm(double p_nom_total_mw, double v, double share) {
    WindUnit u;
    u.params.scale = p_nom_total_mw / u.params.p_nom_mw;
    u.v_m_s = v;
    u.ffr_share = share;
    return u;
}

// Five-area low-inertia test case: 110 GWs of kinetic energy, reserves
// from the three hydro buses, dimensioning fault 1400 MW of lost import.
// Simulations start at the upper edge of the normal band.
Scenario n5_base() {
    Scenario sc;
    sc.f0_hz = 50.0;
    sc.f_start_hz = 49.9;
    sc.load_damping_mw_hz = 400.0;
    sc.drive = gridsim::DriveMode::fault;
    sc.event_t_s = 1.0;
    sc.event_dp_mw = 1400.0;
    sc.t_end_s = 120.0;
    sc.dt_s = 0.01;
    sc.buses = {
        {"1", 34.0, hydro_unit(9000.0, 0.2, 0.7, 0.8, 0.60), std::nullopt},
        {"2", 22.5, hydro_unit(6000.0, 0.2, 1.4, 0.8, 0.30), std::nullopt},
        {"3", 7.5, hydro_unit(2000.0, 0.2, 1.4, 0.8, 0.10), std::nullopt},
        {"4", 33.0, std::nullopt, std::nullopt},
        {"5", 13.0, std::nullopt, std::nullopt},
    };
    return sc;
}

Scenario n5_hydro_only() {
    Scenario sc = n5_base();
    sc.name = "n5_hydro_only";
    return sc;
}

Scenario n5_wind_hydro() {
    Scenario sc = n5_base();
    sc.name = "n5_wind_hydro";
    sc.buses[1].wind = wind_farm(500.0, 10.0, 0.33);
    sc.buses[3].wind = wind_farm(1500.0, 8.0, 0.67);
    return sc;
}

Scenario n5_sensitivity_50pct() {
    Scenario sc = n5_base();
    sc.name = "n5_sensitivity_50pct";
    sc.buses[1].wind = wind_farm(250.0, 10.0, 0.33);
    sc.buses[3].wind = wind_farm(750.0, 8.0, 0.67);
    return sc;
}

// Reduced-scale coordinated plant: one 100 MVA hydro unit and a 20 MW wind
// park share a 20 MW/Hz reserve target; driven open loop by a 0.5 Hz
// frequency-error step.
Scenario dvpp_step() {
    Scenario sc;
    sc.name = "dvpp_step";
    sc.f0_hz = 50.0;
    sc.f_start_hz = 50.0;
    sc.drive = gridsim::DriveMode::frequency_step;
    sc.event_t_s = 1.0;
    sc.event_freq_step_hz = 0.5;
    sc.r_fcr_override = 20.0;
    sc.t_end_s = 90.0;
    sc.dt_s = 0.01;
    sc.buses = {
        {"1", 1.0, hydro_unit(100.0, 0.2, 2.0, 0.8, 1.0), wind_farm(20.0, 8.0, 1.0)},
    };
    return sc;
}

Scenario turbine_step() {
    Scenario sc;
    sc.name = "turbine_step";
    sc.drive = gridsim::DriveMode::reference_step;
    sc.event_t_s = 1.0;
    sc.event_ref_step_frac = 0.2;
    sc.t_end_s = 100.0;
    sc.dt_s = 0.01;
    sc.buses = {{"1", 1.0, std::nullopt, wind_farm(5.0, 8.0, 1.0)}};
    return sc;
}

}  // namespace

std::vector<std::string> names() {
    return {"n5_hydro_only", "n5_wind_hydro", "n5_sensitivity_50pct", "dvpp_step", "turbine_step"};
}

bool exists(const std::string& name) {
    for (const auto& n : names())
        if (n == name) return true;
    return false;
}

gridsim::Scenario get(const std::string& name) {
    if (name == "n5_hydro_only") return n5_hydro_only();
    if (name == "n5_wind_hydro") return n5_wind_hydro();
    if (name == "n5_sensitivity_50pct") return n5_sensitivity_50pct();
    if (name == "dvpp_step") return dvpp_step();
    if (name == "turbine_step") return turbine_step();
    throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace ffr::presets
