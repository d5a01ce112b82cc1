#include "ffr/fcrd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ffr::fcrd {

void FcrdSpec::validate() const {
    if (f0_hz <= 0.0 || activation_50pct_s <= 0.0 || full_activation_s <= 0.0 || nadir_limit_hz <= 0.0)
        throw std::invalid_argument("FcrdSpec: requirements must be positive");
    if (!(band_high_hz > band_low_hz)) throw std::invalid_argument("FcrdSpec: band must be ordered high > low");
    if (dimensioning_fault_mw <= 0.0 || load_damping_mw_hz < 0.0)
        throw std::invalid_argument("FcrdSpec: bad fault/damping");
    if (lead_s < 0.0 || lag1_s < 0.0 || lag2_s < 0.0) throw std::invalid_argument("FcrdSpec: negative time constant");
}

FirstOrderTarget derive_first_order_target(const FcrdSpec& spec) {
    spec.validate();
    FirstOrderTarget t;
    t.t_temp_s = -spec.activation_50pct_s / std::log(0.5);
    t.r_fcr_mw_hz = spec.dimensioning_fault_mw / (spec.band_high_hz - spec.band_low_hz) - spec.load_damping_mw_hz;
    t.f_temp = lti::RationalTF::first_order_lag(t.r_fcr_mw_hz, t.t_temp_s);
    return t;
}

lti::RationalTF design_target(const FcrdSpec& spec, std::optional<double> r_fcr_override) {
    double r = r_fcr_override.value_or(derive_first_order_target(spec).r_fcr_mw_hz);
    std::vector<lti::Complex> zeros, poles;
    double gain = r;
    if (spec.lead_s > 0.0) {
        zeros.emplace_back(-1.0 / spec.lead_s, 0.0);
        gain *= spec.lead_s;
    }
    for (double lag : {spec.lag1_s, spec.lag2_s}) {
        if (lag > 0.0) {
            poles.emplace_back(-1.0 / lag, 0.0);
            gain /= lag;
        }
    }
    return lti::RationalTF(gain, std::move(zeros), std::move(poles));
}

namespace {

double mean_tail(const std::vector<double>& v, const std::vector<double>& t, double window_s) {
    double t_from = t.back() - window_s;
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (t[i] >= t_from) {
            acc += v[i];
            ++n;
        }
    }
    return acc / double(n);
}

}  // namespace

Verdict check_fcrd(const TimeSeries& freq, const std::string& freq_channel,
                   const TimeSeries& reserve, const std::string& reserve_channel,
                   const FcrdSpec& spec, std::optional<double> r_fcr, std::optional<double> fault_mw) {
    spec.validate();
    const auto& f = freq.col(freq_channel);
    const auto& p = reserve.col(reserve_channel);
    const auto& t = freq.time;
    if (f.size() != p.size() || f.size() != t.size() || reserve.time.size() != t.size())
        throw std::invalid_argument("check_fcrd: traces must share the time base");
    if (t.size() < 2) throw std::invalid_argument("check_fcrd: trace too short");

    Verdict v;
    double f_pre = f.front();

    // trigger: first sample below the upper band edge
    std::size_t trig = t.size();
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] < spec.band_high_hz) {
            trig = i;
            break;
        }
    }
    auto nadir_it = std::min_element(f.begin(), f.end());
    v.nadir_hz = *nadir_it;
    v.nadir_dev_hz = spec.f0_hz - v.nadir_hz;

    if (trig == t.size()) {
        v.details = "frequency never crossed the activation band edge";
        v.overall = VerdictState::inconclusive;
        return v;
    }
    v.trigger_s = t[trig];
    if (t.back() - t[trig] < 60.0) {
        v.details = "trace shorter than 60 s after the band crossing";
        v.overall = VerdictState::inconclusive;
        return v;
    }

    v.nadir_ok = v.nadir_hz >= spec.f0_hz - spec.nadir_limit_hz;

    double r = r_fcr.value_or(derive_first_order_target(spec).r_fcr_mw_hz);
    double fault = fault_mw.value_or(spec.dimensioning_fault_mw);
    v.steady_state_hz = mean_tail(f, t, 10.0);
    v.predicted_steady_hz = f_pre - fault / (r + spec.load_damping_mw_hz);
    v.steady_state_ok = std::abs(v.steady_state_hz - v.predicted_steady_hz) <= 0.05;

    // activation measured on the reserve deviation from its pre-trigger level
    double p_pre = p[trig > 0 ? trig - 1 : 0];
    double steady_act = mean_tail(p, t, 10.0) - p_pre;
    v.activation_ok = false;
    if (steady_act > 0.0) {
        double t50 = -1.0, t95 = -1.0;
        for (std::size_t i = trig; i < p.size(); ++i) {
            double act = p[i] - p_pre;
            if (t50 < 0.0 && act >= 0.5 * steady_act) t50 = t[i] - t[trig];
            if (t95 < 0.0 && act >= 0.95 * steady_act) {
                t95 = t[i] - t[trig];
                break;
            }
        }
        v.activation_50_s = t50;
        v.activation_95_s = t95;
        v.activation_ok = t50 >= 0.0 && t50 <= spec.activation_50pct_s && t95 >= 0.0 &&
                          t95 <= spec.full_activation_s;
    } else {
        v.details = "no sustained reserve activation";
    }

    v.overall = (v.nadir_ok && v.steady_state_ok && v.activation_ok) ? VerdictState::pass : VerdictState::fail;
    return v;
}

std::string to_text(const Verdict& v) {
    std::ostringstream os;
    auto b = [](bool x) { return x ? "true" : "false"; };
    const char* overall = v.overall == VerdictState::pass ? "pass"
                          : v.overall == VerdictState::fail ? "fail"
                                                            : "inconclusive";
    os << "overall=" << overall << "\n";
    os << "nadir_hz=" << v.nadir_hz << "\n";
    os << "nadir_dev_hz=" << v.nadir_dev_hz << "\n";
    os << "nadir_ok=" << b(v.nadir_ok) << "\n";
    os << "steady_state_hz=" << v.steady_state_hz << "\n";
    os << "predicted_steady_hz=" << v.predicted_steady_hz << "\n";
    os << "steady_state_ok=" << b(v.steady_state_ok) << "\n";
    os << "trigger_s=" << v.trigger_s << "\n";
    os << "activation_50_s=" << v.activation_50_s << "\n";
    os << "activation_95_s=" << v.activation_95_s << "\n";
    os << "activation_ok=" << b(v.activation_ok) << "\n";
    if (!v.details.empty()) os << "details=" << v.details << "\n";
    return os.str();
}

}  // namespace ffr::fcrd
