#include "ffr/turbine.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ffr::turbine {

namespace {

// Knots (x, c_p, dc_p/dx) of the zero-pitch efficiency curve. Slopes grow
// quickly below the protection floor and the curve rolls off above the MPP.
struct Knot {
    double x, value, slope;
};
constexpr Knot kCpKnots[] = {
    {0.30, 0.000, 0.00},
    {0.50, 0.239, 1.05},
    {0.60, 0.331, 0.80},
    {0.70, 0.399, 0.55},
    {0.80, 0.445, 0.36},
    {1.00, 0.486, 0.00},
    {1.10, 0.475, -0.30},
    {1.20, 0.440, -0.42},
    {1.30, 0.390, -0.55},
    {1.40, 0.330, -0.65},
};
constexpr int kNumKnots = static_cast<int>(std::size(kCpKnots));

int segment_of(double x) {
    int lo = 0, hi = kNumKnots - 1;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        (kCpKnots[mid].x <= x ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

double cp(double x) {
    if (x <= kCpKnots[0].x) return 0.0;
    const Knot& last = kCpKnots[kNumKnots - 1];
    if (x >= last.x) return std::max(0.0, last.value + last.slope * (x - last.x));
    int i = segment_of(x);
    const Knot &a = kCpKnots[i], &b = kCpKnots[i + 1];
    double h = b.x - a.x, t = (x - a.x) / h;
    double t2 = t * t, t3 = t2 * t;
    return a.value * (2 * t3 - 3 * t2 + 1) + h * a.slope * (t3 - 2 * t2 + t) +
           b.value * (-2 * t3 + 3 * t2) + h * b.slope * (t3 - t2);
}

double cp_slope(double x) {
    if (x <= kCpKnots[0].x) return 0.0;
    const Knot& last = kCpKnots[kNumKnots - 1];
    if (x >= last.x) return (last.value + last.slope * (x - last.x)) > 0.0 ? last.slope : 0.0;
    int i = segment_of(x);
    const Knot &a = kCpKnots[i], &b = kCpKnots[i + 1];
    double h = b.x - a.x, t = (x - a.x) / h;
    return a.value * (6 * t * t - 6 * t) / h + a.slope * (3 * t * t - 4 * t + 1) +
           b.value * (-6 * t * t + 6 * t) / h + b.slope * (3 * t * t - 2 * t);
}

void TurbineParams::validate() const {
    if (p_nom_mw <= 0.0 || eta <= 0.0 || eta > 1.0) throw std::invalid_argument("TurbineParams: bad rating/efficiency");
    if (inertia_kgm2 <= 0.0 || rotor_radius_m <= 0.0 || lambda_opt <= 0.0 || rho_kg_m3 <= 0.0)
        throw std::invalid_argument("TurbineParams: bad physical constants");
    if (x_floor <= 0.0 || x_floor >= 1.0) throw std::invalid_argument("TurbineParams: x_floor must be in (0, 1)");
    if (scale < 1.0) throw std::invalid_argument("TurbineParams: scale must be >= 1");
    if (k <= cp_slope(x_floor))
        throw std::invalid_argument("TurbineParams: k must exceed the efficiency slope at the floor");
    if (v_filter_s <= 0.0 || torque_rate_limit_knm_s <= 0.0)
        throw std::invalid_argument("TurbineParams: bad filter/rate limit");
}

double TurbineParams::omega_nom_rad_s() const { return omega_nom_rpm * 2.0 * std::numbers::pi / 60.0; }

double TurbineParams::speed_constant() const {
    double r2 = rotor_radius_m * rotor_radius_m;
    return (std::numbers::pi * r2 / inertia_kgm2) * (r2 / (lambda_opt * lambda_opt)) * (rho_kg_m3 / 2.0);
}

namespace {

double wind_power_w(double v, const TurbineParams& p) {
    double r2 = p.rotor_radius_m * p.rotor_radius_m;
    return 0.5 * p.rho_kg_m3 * std::numbers::pi * r2 * v * v * v * p.scale;
}

}  // namespace

MppPoint mpp(double v, const TurbineParams& p) {
    p.validate();
    if (v <= 0.0) throw std::invalid_argument("mpp: wind speed must be > 0");
    MppPoint m;
    m.omega_mpp_rad_s = p.lambda_opt * v / p.rotor_radius_m;
    if (m.omega_mpp_rad_s > p.omega_nom_rad_s())
        throw std::invalid_argument("mpp: wind speed above the below-rated validity region");
    m.p_wind_mw = wind_power_w(v, p) / 1e6;
    m.p_mpp_mw = p.eta * p.c_opt * m.p_wind_mw;
    return m;
}

double mech_power_mw(double v, double omega, const TurbineParams& p) {
    double x = omega * p.rotor_radius_m / (p.lambda_opt * v);
    return wind_power_w(v, p) * cp(x) / 1e6;
}

double mpp_power_estimate_mw(double v_hat, const TurbineParams& p) {
    return p.eta * p.c_opt * wind_power_w(v_hat, p) / 1e6;
}

TurbineState init_state(double v, const TurbineParams& p) {
    MppPoint m = mpp(v, p);
    TurbineState s;
    s.omega = m.omega_mpp_rad_s;
    s.v_hat = v;
    // mechanical torque at the MPP balances the electric drain exactly
    s.tau_set = p.c_opt * wind_power_w(v, p) / s.omega;
    s.mode = Mode::normal;
    return s;
}

TorqueCommand set_point(const TurbineState& s, double p_ref_mw, double dt, const TurbineParams& p) {
    if (s.omega <= 0.0) throw std::runtime_error("turbine set_point: rotor at standstill");
    // measurement path: everything the set-point logic sees uses v_hat
    double omega_mpp_hat = p.lambda_opt * s.v_hat / p.rotor_radius_m;
    double x_hat = s.omega / omega_mpp_hat;
    double p_wind_hat = wind_power_w(s.v_hat, p);
    double p_ref = p_ref_mw * 1e6;

    double p_prime = p_ref + p.eta * p.k * p_wind_hat * (x_hat - 1.0);
    double p_set = p_prime;
    Mode mode = Mode::normal;
    if (x_hat < p.x_floor) {
        double d = x_hat - p.x_floor;
        double p_floor = p.eta * p_wind_hat * cp(p.x_floor) * (1.0 - 100.0 * d * d);
        if (p_floor < p_prime) {
            p_set = p_floor;
            mode = Mode::low_speed_protection;
        }
    }
    p_set = std::clamp(p_set, 0.0, p.p_nom_mw * 1e6 * p.scale);

    // torque command with the generator-side rate limit referred to the
    // low-speed shaft; one limiter decision per step
    double tau_ref = p_set / (p.eta * s.omega);
    double rate = p.torque_rate_limit_knm_s * 1e3 * p.gear_ratio * p.scale;
    double tau = s.tau_set + std::clamp(tau_ref - s.tau_set, -rate * dt, rate * dt);
    tau = std::clamp(tau, 0.0, p.p_nom_mw * 1e6 * p.scale / (p.eta * s.omega));
    return {tau, mode};
}

TurbineStep step_nonlinear(const TurbineState& s, double p_ref_mw, double v, double dt,
                           const TurbineParams& p) {
    p.validate();
    if (dt <= 0.0) throw std::invalid_argument("turbine step: dt must be > 0");
    if (v <= 0.0) throw std::invalid_argument("turbine step: wind speed must be > 0");

    TorqueCommand cmd = set_point(s, p_ref_mw, dt, p);
    const double tau = cmd.tau_nm;
    double j_farm = p.inertia_kgm2 * p.scale;
    double x_scale = p.rotor_radius_m / (p.lambda_opt * v);
    auto omega_deriv = [&](double omega) {
        double p_m = wind_power_w(v, p) * cp(omega * x_scale);
        return (p_m - tau * omega) / (j_farm * omega);
    };
    auto vhat_deriv = [&](double v_hat) { return (v - v_hat) / p.v_filter_s; };

    double w = s.omega, vh = s.v_hat;
    double k1w = omega_deriv(w), k1v = vhat_deriv(vh);
    double k2w = omega_deriv(w + 0.5 * dt * k1w), k2v = vhat_deriv(vh + 0.5 * dt * k1v);
    double k3w = omega_deriv(w + 0.5 * dt * k2w), k3v = vhat_deriv(vh + 0.5 * dt * k2v);
    double k4w = omega_deriv(w + dt * k3w), k4v = vhat_deriv(vh + dt * k3v);
    w += dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    vh += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

    if (!(w > 0.0) || !std::isfinite(w))
        throw std::runtime_error("turbine step: rotor driven to standstill (instability)");

    TurbineStep out;
    out.state = {w, tau, vh, cmd.mode};
    out.p_e_mw = p.eta * tau * w / 1e6;
    out.x = w * x_scale;
    return out;
}

double open_loop_pole(double v, double x0, const TurbineParams& p) {
    p.validate();
    if (v <= 0.0) throw std::invalid_argument("open_loop_pole: wind speed must be > 0");
    return p.speed_constant() * v * cp_slope(x0) / x0;
}

PoleZero linearize_at(double v, double x0, const TurbineParams& p) {
    PoleZero pz;
    pz.zero_rad_s = open_loop_pole(v, x0, p);
    pz.pole_rad_s = p.speed_constant() * v * (p.k - cp_slope(x0)) / x0;
    return pz;
}

Linearization linearize(double v, const TurbineParams& p) {
    PoleZero pz = linearize_at(v, p.x_floor, p);
    Linearization lin;
    lin.speed_constant = p.speed_constant();
    lin.zero_bound_rad_s = pz.zero_rad_s;
    lin.pole_floor_rad_s = pz.pole_rad_s;
    lin.h_allpass = lti::RationalTF(1.0, {lti::Complex(pz.zero_rad_s, 0.0)},
                                    {lti::Complex(-pz.pole_rad_s, 0.0)});
    lin.h_dimensional = lti::scale(lin.h_allpass, mpp(v, p).p_mpp_mw);
    return lin;
}

double WindTrace::at(double t) const {
    if (time_s.empty()) throw std::runtime_error("WindTrace: empty trace");
    if (t <= time_s.front()) return speed_m_s.front();
    if (t >= time_s.back()) return speed_m_s.back();
    auto it = std::upper_bound(time_s.begin(), time_s.end(), t);
    std::size_t i = static_cast<std::size_t>(it - time_s.begin());
    double w = (t - time_s[i - 1]) / (time_s[i] - time_s[i - 1]);
    return speed_m_s[i - 1] + w * (speed_m_s[i] - speed_m_s[i - 1]);
}

WindTrace WindTrace::parse(std::istream& is) {
    WindTrace tr;
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line)) {
        ++n;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double t, v;
        if (!(ss >> t)) continue;  // blank/comment line
        if (!(ss >> v)) throw std::runtime_error("WindTrace: missing speed at line " + std::to_string(n));
        if (!tr.time_s.empty() && t <= tr.time_s.back())
            throw std::runtime_error("WindTrace: time must be strictly increasing at line " + std::to_string(n));
        if (v <= 0.0) throw std::runtime_error("WindTrace: wind speed must be > 0 at line " + std::to_string(n));
        tr.time_s.push_back(t);
        tr.speed_m_s.push_back(v);
    }
    if (tr.time_s.empty()) throw std::runtime_error("WindTrace: no samples");
    return tr;
}

}  // namespace ffr::turbine
