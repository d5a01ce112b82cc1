#ifndef FFR_MATCHING_HPP
#define FFR_MATCHING_HPP

#include <string>
#include <vector>

#include "ffr/lti.hpp"

namespace ffr::matching {

enum class ActuatorKind { hydro, wind };

/// One reserve-providing plant seen from the coordination layer: its linear
/// model H_i in MW per unit of command, its steady (hydro) or transient
/// (wind) share, and which tier it participates in.
struct ActuatorSpec {
    std::string id;
    lti::RationalTF plant;
    double share = 0.0;
    ActuatorKind kind = ActuatorKind::hydro;
};

/// Result of the participation-factor synthesis. When the unnormalized sum
/// is stable and minimum phase the factors are rescaled so they add to one
/// exactly; otherwise the raw factors are returned with `normalized` false
/// and a diagnostic.
struct ParticipationSet {
    lti::RationalTF target;
    std::vector<lti::RationalTF> factors;      // c_i, aligned with the actuator list
    std::vector<lti::RationalTF> controllers;  // K_i = c_i * target / H_i
    lti::RationalTF factor_sum;                // sum of the unnormalized factors
    bool normalized = false;
    std::vector<std::string> warnings;
    std::string diagnostic;  // set when normalization was refused
};

/// Assigns per-class shares: `fcr_shares` across hydro actuators,
/// `ffr_shares` across wind actuators, in list order. Each class must sum
/// to one within 1e-9.
std::vector<ActuatorSpec> allocate_shares(std::vector<ActuatorSpec> actuators,
                                          const std::vector<double>& fcr_shares,
                                          const std::vector<double>& ffr_shares);

/// Builds dynamic participation factors and controllers against the target:
/// sustained-tier actuators get share-weighted all-pass factors carrying
/// their own RHP zeros; the residual 1 - sum is split across the transient
/// tier, each factor multiplied by that plant's all-pass RHP factor; the
/// result is normalized by the factor sum when that sum is stable and
/// minimum phase. All RHP cancellations in K_i = c_i F / H_i happen by
/// exact factor matching in factored form.
ParticipationSet synthesize(const std::vector<ActuatorSpec>& actuators,
                            const lti::RationalTF& target);

struct MatchingReport {
    double residual_inf_norm = 0.0;  // max over the grid of |sum H K - F| / |F|
    bool internal_stability = true;
    std::vector<std::string> issues;
};

/// Frequency-domain verification over a log grid w in [1e-4, 1e3] rad/s,
/// plus internal-stability screening: every controller stable and proper,
/// and no RHP pole/zero cancellation between any K_i and its plant.
MatchingReport verify_matching(const ParticipationSet& set,
                               const std::vector<ActuatorSpec>& actuators);

}  // namespace ffr::matching

#endif
