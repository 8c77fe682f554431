#include "regcop/recovery.hpp"

#include <algorithm>
#include <cmath>

namespace regcop {

namespace {

constexpr double kIdentityTol = 1e-12;

} // namespace

double calibrate_adjusted_pd(double hazard_p, double recovery, double recovery_floor)
{
    if (!(hazard_p > 0.0 && hazard_p < 1.0)) {
        throw DomainError("hazard probability must lie in (0, 1)");
    }
    if (!(recovery_floor >= 0.0 && recovery_floor <= recovery && recovery < 1.0)) {
        throw DomainError("recoveries must satisfy 0 <= floor <= recovery < 1");
    }
    if (recovery_floor == recovery) {
        return hazard_p;
    }
    const double adjusted = (1.0 - recovery) * hazard_p / (1.0 - recovery_floor);
    if (!(adjusted < 1.0)) {
        throw CalibrationError("adjusted default probability is not below 1");
    }
    return adjusted;
}

RecoverySpec RecoverySpec::calibrate(double hazard_p, double recovery, double recovery_floor)
{
    RecoverySpec rs{recovery, recovery_floor, hazard_p,
                    calibrate_adjusted_pd(hazard_p, recovery, recovery_floor)};
    rs.validate();
    return rs;
}

void RecoverySpec::validate() const
{
    if (!(floor_recovery >= 0.0 && floor_recovery <= base_recovery && base_recovery <= 1.0)) {
        throw CalibrationError("recoveries must satisfy 0 <= floor <= recovery <= 1");
    }
    if (!(adjusted_p > 0.0 && adjusted_p <= hazard_p && hazard_p < 1.0)) {
        throw CalibrationError("default probabilities must satisfy 0 < Pbar <= P < 1");
    }
    const double gap = (1.0 - base_recovery) * hazard_p - (1.0 - floor_recovery) * adjusted_p;
    if (std::abs(gap) > kIdentityTol) {
        throw CalibrationError("expected-loss identity (1-R)P = (1-Rbar)Pbar violated");
    }
}

double state_lgd_at(double z, double threshold, double adjusted_threshold, double loading,
                    double recovery_floor)
{
    if (!std::isfinite(z)) {
        throw DomainError("factor value must be finite");
    }
    const double scale = std::sqrt(1.0 - loading * loading);
    const double shifted = z * loading;
    const double log_ratio = log_norm_cdf((adjusted_threshold - shifted) / scale) -
                             log_norm_cdf((threshold - shifted) / scale);
    const double cap = 1.0 - recovery_floor;
    return std::clamp(cap * std::exp(std::min(log_ratio, 0.0)), 0.0, cap);
}

double state_lgd(double z, const LatentSpec& spec, const RecoverySpec& rs)
{
    rs.validate();
    const double a = spec.effective_loading();
    return state_lgd_at(z, default_threshold(rs.hazard_p, spec),
                        default_threshold(rs.adjusted_p, spec), a, rs.floor_recovery);
}

double state_recovery(double z, const LatentSpec& spec, const RecoverySpec& rs)
{
    return 1.0 - state_lgd(z, spec, rs);
}

double hazard_from_spread(const SpreadQuote& q)
{
    if (!(q.recovery < 1.0) || !std::isfinite(q.recovery)) {
        throw DomainError("recovery must be below 1 to imply a hazard rate");
    }
    if (!(q.spread >= 0.0) || !std::isfinite(q.spread)) {
        throw DomainError("spread must be finite and non-negative");
    }
    return q.spread / (1.0 - q.recovery);
}

} // namespace regcop
