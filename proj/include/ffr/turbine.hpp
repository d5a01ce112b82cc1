#ifndef FFR_TURBINE_HPP
#define FFR_TURBINE_HPP

#include <vector>

#include "ffr/lti.hpp"

namespace ffr::turbine {

/// Physical constants of one (possibly lumped) variable-speed turbine.
/// Defaults are the 5 MW benchmark machine; `scale` lumps a farm of
/// identical units behind one rotor state.
struct TurbineParams {
    double p_nom_mw = 5.0;                 // rated electric power per unit
    double torque_rate_limit_knm_s = 15.0; // generator-side, per unit machine
    double eta = 0.944;                    // electric efficiency
    double omega_nom_rpm = 12.1;
    double gear_ratio = 97.0;
    double inertia_kgm2 = 40.47e6;         // total, low-speed shaft
    double rho_kg_m3 = 1.225;
    double rotor_radius_m = 63.0;
    double lambda_opt = 7.5;
    double c_opt = 0.486;                  // peak power coefficient at beta = 0
    double x_floor = 0.8;                  // low-speed protection floor
    double k = 0.72;                       // stabilizing feedback gain
    double scale = 1.0;                    // number of lumped units
    double v_filter_s = 4.0;               // wind measurement filter

    void validate() const;
    double omega_nom_rad_s() const;
    /// Pole/zero scaling constant (pi r^2 / J)(r^2 / lambda_opt^2)(rho / 2).
    double speed_constant() const;
};

enum class Mode { normal, low_speed_protection };

struct TurbineState {
    double omega = 0.0;    // rotor speed [rad/s], low-speed shaft
    double tau_set = 0.0;  // applied electric torque [Nm], LSS, whole farm
    double v_hat = 0.0;    // filtered wind speed [m/s]
    Mode mode = Mode::normal;
};

/// Power coefficient c_p(x) at zero pitch as a function of the normalized
/// speed ratio x = lambda/lambda_opt, and its derivative. Monotone cubic
/// Hermite fit pinned at the maximum c_p(1) = 0.486 (zero slope) and at
/// the protection floor slope c_p'(0.8) = 0.36; the shape between knots is
/// a declared approximation of the zero-pitch efficiency curve.
double cp(double x);
double cp_slope(double x);

struct MppPoint {
    double omega_mpp_rad_s = 0.0;
    double p_mpp_mw = 0.0;   // electric, whole farm
    double p_wind_mw = 0.0;  // available wind power, whole farm
};

/// Maximum power point for wind speed v (below-rated region only).
MppPoint mpp(double v, const TurbineParams& p);

/// Mechanical power captured at rotor speed omega under true wind v [MW, farm].
double mech_power_mw(double v, double omega, const TurbineParams& p);

/// MPP electric power target computed from a (filtered) wind measurement.
double mpp_power_estimate_mw(double v_hat, const TurbineParams& p);

/// State at the MPP equilibrium for constant wind speed v.
TurbineState init_state(double v, const TurbineParams& p);

struct TurbineStep {
    TurbineState state;
    double p_e_mw = 0.0;  // electric output, whole farm
    double x = 0.0;       // normalized speed ratio at true wind speed
};

/// One set-point evaluation: the torque the converter will hold for the
/// coming step (already rate-limited and saturated) and the protection mode
/// it was computed under. Exposed so composite simulations can run the
/// limiter logic at step granularity while integrating states elsewhere.
struct TorqueCommand {
    double tau_nm = 0.0;  // low-speed shaft, whole farm
    Mode mode = Mode::normal;
};

TorqueCommand set_point(const TurbineState& s, double p_ref_mw, double dt, const TurbineParams& p);

/// Advances the closed-loop turbine one step. The power set-point follows
/// the stabilizing feedback law with the low-speed override:
///   P' = P_ref + eta k P^_wind (x^ - 1)                    x^ >= x_floor
///   P  = min(P_floor (1 - 100 (x^ - x_floor)^2), P')       x^ <  x_floor
/// then saturates to [0, rated], converts to torque, rate-limits the torque
/// (set-point logic runs once per step), and integrates the rotor with RK4:
///   J Omega dOmega/dt = P_wind(v) c_p(x) - P_e / eta.
/// Throws if the rotor is driven to standstill.
TurbineStep step_nonlinear(const TurbineState& s, double p_ref_mw, double v, double dt,
                           const TurbineParams& p);

struct Linearization {
    lti::RationalTF h_allpass;      // (s - z)/(s + p), unit gain
    lti::RationalTF h_dimensional;  // scaled by the farm MPP power [MW]
    double zero_bound_rad_s = 0.0;  // worst-case NMP zero over x >= x_floor
    double pole_floor_rad_s = 0.0;  // stabilized pole lower bound
    double speed_constant = 0.0;
};

/// Worst-case first-order model of the reference-to-output dynamics,
/// evaluated at the protection floor.
Linearization linearize(double v, const TurbineParams& p);

struct PoleZero {
    double zero_rad_s = 0.0;
    double pole_rad_s = 0.0;
};

/// Closed-loop zero/pole of the linearization at an explicit operating
/// point x0. The zero equals the open-loop pole and does not move with k.
PoleZero linearize_at(double v, double x0, const TurbineParams& p);

/// Open-loop rotor pole at operating point x0: positive below the MPP,
/// negative above, zero at the MPP.
double open_loop_pole(double v, double x0, const TurbineParams& p);

/// Two-column (seconds, m/s) wind record with linear interpolation.
struct WindTrace {
    std::vector<double> time_s;
    std::vector<double> speed_m_s;

    double at(double t) const;
    static WindTrace parse(std::istream& is);
};

}  // namespace ffr::turbine

#endif
