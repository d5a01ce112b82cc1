#ifndef FFR_HYDRO_HPP
#define FFR_HYDRO_HPP

#include "ffr/lti.hpp"

namespace ffr::hydro {

/// Governor/penstock constants of one lumped hydro plant. Gate and flow are
/// per-unit on `rating_mw`; megawatts appear only at the output.
struct HydroParams {
    double rating_mw = 100.0;
    double t_y = 0.2;   // gate servo time constant [s]
    double t_w = 2.0;   // water time constant [s]
    double g0 = 0.8;    // initial gate opening [pu]
    double servo_rate_pu_s = 0.1;

    /// Penstock zero 1/(g0*t_w) [rad/s].
    double nmp_zero() const { return 1.0 / (g0 * t_w); }
    void validate() const;
};

struct HydroState {
    double g = 0.0;  // gate opening [pu]
    double q = 0.0;  // penstock flow [pu]
};

struct HydroStep {
    HydroState state;
    double p_m_mw = 0.0;
    bool gate_floored = false;  // numerical guard engaged (g held at 1e-4)
};

/// Equilibrium at the initial gate opening: g = q = g0, unit head.
HydroState init_state(const HydroParams& p);

/// Advances the nonlinear second-order model one step (RK4):
///   dg/dt = clamp((g_cmd - g)/T_y, +-servo rate),  g in [0, 1]
///   dq/dt = (1 - (q/g)^2)/T_w
/// and reports mechanical power P = rating * q * (q/g)^2.
HydroStep step_nonlinear(const HydroState& s, double g_cmd, double dt, const HydroParams& p);

/// Small-signal model around the operating point:
///   rating * [1/(s T_y + 1)] * [2 (z - s)/(s + 2z)],  z = 1/(g0 T_w)
/// in MW per pu of gate command.
lti::RationalTF linearize(const HydroParams& p);

}  // namespace ffr::hydro

#endif
