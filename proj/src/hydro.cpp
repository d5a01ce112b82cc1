#include "ffr/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ffr::hydro {

namespace {
constexpr double kGateFloor = 1e-4;
constexpr double kFlowFloor = 1e-6;
}

void HydroParams::validate() const {
    if (rating_mw <= 0.0) throw std::invalid_argument("HydroParams: rating must be > 0");
    if (t_y <= 0.0 || t_w <= 0.0) throw std::invalid_argument("HydroParams: time constants must be > 0");
    if (g0 <= 0.0 || g0 > 1.0) throw std::invalid_argument("HydroParams: g0 must be in (0, 1]");
    if (servo_rate_pu_s <= 0.0) throw std::invalid_argument("HydroParams: servo rate must be > 0");
}

HydroState init_state(const HydroParams& p) {
    p.validate();
    return {p.g0, p.g0};
}

HydroStep step_nonlinear(const HydroState& s, double g_cmd, double dt, const HydroParams& p) {
    if (dt <= 0.0) throw std::invalid_argument("hydro step: dt must be > 0");
    if (s.q <= 0.0) throw std::invalid_argument("hydro step: flow must be > 0");

    auto deriv = [&](const double gate, const double flow, double* dg, double* dq) {
        double g = std::max(gate, kGateFloor);
        *dg = std::clamp((g_cmd - gate) / p.t_y, -p.servo_rate_pu_s, p.servo_rate_pu_s);
        double ratio = flow / g;
        *dq = (1.0 - ratio * ratio) / p.t_w;
    };

    double g = s.g, q = s.q;
    double k1g, k1q, k2g, k2q, k3g, k3q, k4g, k4q;
    deriv(g, q, &k1g, &k1q);
    deriv(g + 0.5 * dt * k1g, q + 0.5 * dt * k1q, &k2g, &k2q);
    deriv(g + 0.5 * dt * k2g, q + 0.5 * dt * k2q, &k3g, &k3q);
    deriv(g + dt * k3g, q + dt * k3q, &k4g, &k4q);
    g += dt / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
    q += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);

    HydroStep out;
    out.gate_floored = g < kGateFloor || q < kFlowFloor;
    g = std::clamp(g, kGateFloor, 1.0);
    q = std::max(q, kFlowFloor);  // keeps the water column model finite on full closure
    out.state = {g, q};
    double head = (q / g) * (q / g);
    out.p_m_mw = p.rating_mw * q * head;
    return out;
}

lti::RationalTF linearize(const HydroParams& p) {
    p.validate();
    double z = p.nmp_zero();
    // servo: (1/t_y)/(s + 1/t_y); penstock: -2 (s - z)/(s + 2z)
    return lti::RationalTF(p.rating_mw * (1.0 / p.t_y) * (-2.0),
                           {lti::Complex(z, 0.0)},
                           {lti::Complex(-1.0 / p.t_y, 0.0), lti::Complex(-2.0 * z, 0.0)});
}

}  // namespace ffr::hydro
