#ifndef FFR_GRIDSIM_HPP
#define FFR_GRIDSIM_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ffr/fcrd.hpp"
#include "ffr/hydro.hpp"
#include "ffr/matching.hpp"
#include "ffr/timeseries.hpp"
#include "ffr/turbine.hpp"

namespace ffr::gridsim {

struct HydroUnit {
    hydro::HydroParams params;
    double fcr_share = 0.0;
};

struct WindUnit {
    turbine::TurbineParams params;
    double v_m_s = 8.0;  // design/constant wind speed
    double ffr_share = 0.0;
    std::optional<turbine::WindTrace> trace;  // overrides the constant speed
    std::string trace_path;                   // provenance for serialization
};

struct BusSpec {
    std::string id;
    double w_kin_gws = 0.0;
    std::optional<HydroUnit> hydro;
    std::optional<WindUnit> wind;
};

enum class DriveMode {
    fault,           // power-balance step through the swing dynamics
    frequency_step,  // prescribed frequency error driving the controllers
    reference_step,  // direct turbine reference step, no controllers
};

/// Declarative description of one experiment on the aggregated
/// uniform-frequency system.
struct Scenario {
    std::string name = "scenario";
    double f0_hz = 50.0;
    double f_start_hz = 50.0;
    double load_damping_mw_hz = 400.0;
    std::vector<BusSpec> buses;
    fcrd::FcrdSpec fcrd;
    std::optional<double> r_fcr_override;
    DriveMode drive = DriveMode::fault;
    double event_t_s = 1.0;
    double event_dp_mw = 1400.0;       // fault mode: lost import
    double event_freq_step_hz = 0.5;   // frequency_step mode
    double event_ref_step_frac = 0.2;  // reference_step mode, fraction of MPP power
    double t_end_s = 120.0;
    double dt_s = 0.01;

    void validate() const;
    double total_w_kin_gws() const;
    lti::RationalTF target() const;
};

/// Linearized plants in canonical order: hydro units in bus order, then
/// wind units in bus order, with shares attached.
std::vector<matching::ActuatorSpec> actuators_for(const Scenario& sc);

/// actuators_for + participation-factor synthesis against the scenario target.
matching::ParticipationSet synthesize_for(const Scenario& sc);

/// Kinetic-energy-weighted mean frequency.
double coi(std::span<const double> freqs_hz, std::span<const double> w_kins_gws);

/// Fixed-step (RK4) closed-loop simulation with the nonlinear actuator
/// models. Limiter and protection decisions run once per step. Channels:
/// f_hz, P_<id>_mw (absolute output), x_<id>/prot_<id> per wind unit,
/// P_reserve_mw (total deviation from the pre-event output), P_ideal_mw
/// (target filter driven by the same frequency error). Throws
/// std::runtime_error with the offending time on divergence.
TimeSeries simulate(const Scenario& sc, const matching::ParticipationSet& ctrl);

/// Same loop with every actuator replaced by its linearization. With no
/// actuators at all the target itself acts as the (ideal) reserve.
TimeSeries simulate_linear(const Scenario& sc, const matching::ParticipationSet& ctrl);

/// Wires the scenario's fault size, damping, and target gain into the
/// reserve-product check of the simulated traces.
fcrd::Verdict check(const Scenario& sc, const TimeSeries& ts);

}  // namespace ffr::gridsim

#endif
