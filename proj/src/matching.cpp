#include "ffr/matching.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ffr::matching {

namespace {

using lti::Complex;
using lti::RationalTF;

// Share-weighted all-pass carrying every RHP zero of the plant. Sustained
// (hydro) factors use (z - s)/(s + z) per zero so the DC value stays +share;
// transient (wind) factors use (s - z)/(s + z), matching the plant's own
// high-frequency orientation.
RationalTF allpass_factor(const ActuatorSpec& a, const std::vector<Complex>& rhp_zeros) {
    double gain = a.share;
    std::vector<Complex> zeros, poles;
    for (const auto& z : rhp_zeros) {
        zeros.push_back(z);
        poles.emplace_back(-z.real(), z.imag());
        if (a.kind == ActuatorKind::hydro) gain = -gain;
    }
    return RationalTF(gain, std::move(zeros), std::move(poles));
}

}  // namespace

std::vector<ActuatorSpec> allocate_shares(std::vector<ActuatorSpec> actuators,
                                          const std::vector<double>& fcr_shares,
                                          const std::vector<double>& ffr_shares) {
    std::size_t nh = 0, nw = 0;
    for (const auto& a : actuators) (a.kind == ActuatorKind::hydro ? nh : nw)++;
    if (fcr_shares.size() != nh || ffr_shares.size() != nw)
        throw std::invalid_argument("allocate_shares: share count does not match actuator count");
    for (const auto* shares : {&fcr_shares, &ffr_shares}) {
        if (shares->empty()) continue;
        double sum = 0.0;
        for (double s : *shares) {
            if (s < 0.0) throw std::invalid_argument("allocate_shares: negative share");
            sum += s;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("allocate_shares: shares must sum to 1");
    }
    std::size_t ih = 0, iw = 0;
    for (auto& a : actuators) a.share = (a.kind == ActuatorKind::hydro) ? fcr_shares[ih++] : ffr_shares[iw++];
    return actuators;
}

ParticipationSet synthesize(const std::vector<ActuatorSpec>& actuators, const RationalTF& target) {
    if (actuators.empty()) throw std::invalid_argument("synthesize: no actuators");
    ParticipationSet out;
    out.target = target;

    std::vector<std::vector<Complex>> rhp(actuators.size());
    double slowest_hydro = std::numeric_limits<double>::max();
    double fastest_wind = 0.0;
    for (std::size_t i = 0; i < actuators.size(); ++i) {
        auto cls = lti::classify(actuators[i].plant);
        rhp[i] = cls.nmp_zeros;
        for (const auto& z : rhp[i]) {
            if (actuators[i].kind == ActuatorKind::hydro)
                slowest_hydro = std::min(slowest_hydro, z.real());
            else
                fastest_wind = std::max(fastest_wind, z.real());
        }
    }
    // the construction assumes the sustained tier's RHP zeros are the fast ones
    if (fastest_wind > 0.0 && slowest_hydro < std::numeric_limits<double>::max() &&
        slowest_hydro <= fastest_wind)
        out.warnings.push_back("sustained-tier RHP zeros are not faster than the transient tier's");

    // step 1: sustained tier, one all-pass factor per actuator
    std::vector<RationalTF> raw(actuators.size());
    RationalTF sustained_sum;
    bool has_transient = false;
    for (std::size_t i = 0; i < actuators.size(); ++i) {
        if (actuators[i].kind == ActuatorKind::hydro) {
            raw[i] = allpass_factor(actuators[i], rhp[i]);
            sustained_sum = lti::parallel(sustained_sum, raw[i]);
        } else {
            has_transient = true;
        }
    }

    // step 2: residual assigned to the transient tier behind its RHP factors
    if (has_transient) {
        RationalTF residual = lti::parallel(RationalTF::constant(1.0), lti::scale(sustained_sum, -1.0));
        for (std::size_t i = 0; i < actuators.size(); ++i) {
            if (actuators[i].kind != ActuatorKind::wind) continue;
            raw[i] = lti::series(residual, allpass_factor(actuators[i], rhp[i]));
        }
    }

    RationalTF sum;
    for (const auto& c : raw) sum = lti::parallel(sum, c);
    out.factor_sum = sum;

    // step 3: normalize when the sum admits a stable, minimum-phase inverse
    auto cls = lti::classify(sum);
    out.normalized = cls.stable && cls.minimum_phase() && !sum.is_zero();
    out.factors.resize(actuators.size());
    if (out.normalized) {
        for (std::size_t i = 0; i < actuators.size(); ++i) out.factors[i] = lti::divide(raw[i], sum);
    } else {
        out.factors = raw;
        out.diagnostic =
            "normalization refused: factor sum is not stable and minimum phase; "
            "returning unnormalized factors (matching is approximate)";
    }

    out.controllers.resize(actuators.size());
    for (std::size_t i = 0; i < actuators.size(); ++i)
        out.controllers[i] = lti::divide(lti::series(out.factors[i], target), actuators[i].plant);
    return out;
}

MatchingReport verify_matching(const ParticipationSet& set, const std::vector<ActuatorSpec>& actuators) {
    if (set.controllers.size() != actuators.size())
        throw std::invalid_argument("verify_matching: controller/actuator count mismatch");
    MatchingReport rep;

    std::vector<double> grid = lti::log_grid(1e-4, 1e3, 600);
    for (double w : grid) {
        Complex s(0.0, w);
        Complex sum(0.0, 0.0);
        for (std::size_t i = 0; i < actuators.size(); ++i)
            sum += actuators[i].plant.eval(s) * set.controllers[i].eval(s);
        Complex f = set.target.eval(s);
        double rel = std::abs(sum - f) / std::abs(f);
        rep.residual_inf_norm = std::max(rep.residual_inf_norm, rel);
    }

    auto target_cls = lti::classify(set.target);
    if (!target_cls.stable) {
        rep.internal_stability = false;
        rep.issues.push_back("target is not stable");
    }
    for (std::size_t i = 0; i < actuators.size(); ++i) {
        auto kc = lti::classify(set.controllers[i]);
        if (!kc.stable) {
            rep.internal_stability = false;
            rep.issues.push_back("controller " + actuators[i].id + " has unstable or marginal poles");
        }
        // an RHP plant zero surviving as a controller pole means the loop
        // relies on a forbidden cancellation
        auto pc = lti::classify(actuators[i].plant);
        for (const auto& z : pc.nmp_zeros) {
            bool preserved = false;
            for (const auto& cz : set.factors[i].zeros())
                if (std::abs(cz - z) <= 1e-6 * std::max(1.0, std::abs(z))) preserved = true;
            if (!preserved) {
                rep.internal_stability = false;
                rep.issues.push_back("factor for " + actuators[i].id + " drops an RHP plant zero");
            }
        }
        if (!pc.stable) {
            for (const auto& p : pc.unstable_poles) {
                for (const auto& kz : set.controllers[i].zeros()) {
                    if (std::abs(kz - p) <= 1e-6 * std::max(1.0, std::abs(p))) {
                        rep.internal_stability = false;
                        rep.issues.push_back("controller " + actuators[i].id + " cancels an unstable plant pole");
                    }
                }
            }
        }
    }
    return rep;
}

}  // namespace ffr::matching
