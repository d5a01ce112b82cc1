#ifndef FFR_FCRD_HPP
#define FFR_FCRD_HPP

#include <optional>
#include <string>

#include "ffr/lti.hpp"
#include "ffr/timeseries.hpp"

namespace ffr::fcrd {

/// Disturbance-reserve product requirements and the design-target filter
/// constants derived from them.
struct FcrdSpec {
    double f0_hz = 50.0;
    double activation_50pct_s = 5.0;
    double full_activation_s = 30.0;
    double nadir_limit_hz = 1.0;        // max deviation below f0
    double band_high_hz = 49.9;
    double band_low_hz = 49.5;
    double dimensioning_fault_mw = 1400.0;
    double load_damping_mw_hz = 400.0;
    // lead/lag constants of the second-order design target
    double lead_s = 6.5;
    double lag1_s = 2.0;
    double lag2_s = 17.0;

    void validate() const;
};

struct FirstOrderTarget {
    lti::RationalTF f_temp;
    double t_temp_s = 0.0;
    double r_fcr_mw_hz = 0.0;
};

/// First-order reserve target: gain sized so the post-fault frequency lands
/// at the lower band edge, time constant sized for 50% activation at the
/// 5 s mark.
FirstOrderTarget derive_first_order_target(const FcrdSpec& spec);

/// Lead-lag reserve target R (lead s + 1)/((lag1 s + 1)(lag2 s + 1)).
/// Zero time constants drop the corresponding factor. r_fcr_override
/// replaces the derived gain (used by the reduced-scale worked example).
lti::RationalTF design_target(const FcrdSpec& spec,
                              std::optional<double> r_fcr_override = std::nullopt);

enum class VerdictState { pass, fail, inconclusive };

struct Verdict {
    VerdictState overall = VerdictState::inconclusive;
    bool nadir_ok = false;
    bool steady_state_ok = false;
    bool activation_ok = false;
    double nadir_hz = 0.0;         // minimum frequency
    double nadir_dev_hz = 0.0;     // f0 - minimum frequency
    double steady_state_hz = 0.0;
    double predicted_steady_hz = 0.0;
    double trigger_s = -1.0;       // first crossing of the upper band edge
    double activation_50_s = -1.0; // relative to trigger
    double activation_95_s = -1.0;
    std::string details;
};

/// Checks a frequency trace and the matching total-reserve trace against
/// the product requirements. The reserve trace may be absolute power; its
/// pre-trigger level is subtracted. r_fcr defaults to the gain derived
/// from the spec; pass the actual reserve DC gain for non-default targets.
Verdict check_fcrd(const TimeSeries& freq, const std::string& freq_channel,
                   const TimeSeries& reserve, const std::string& reserve_channel,
                   const FcrdSpec& spec, std::optional<double> r_fcr = std::nullopt,
                   std::optional<double> fault_mw = std::nullopt);

/// Key=value rendering for verdict files.
std::string to_text(const Verdict& v);

}  // namespace ffr::fcrd

#endif
