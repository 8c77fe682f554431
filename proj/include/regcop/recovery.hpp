#pragma once

#include <string>

#include "regcop/factor_model.hpp"

namespace regcop {

/// Recovery of one name together with the shifted default probability that
/// keeps its expected loss fixed: (1 - R) P = (1 - Rbar) Pbar.
struct RecoverySpec {
    double base_recovery = 0.4;  // R
    double floor_recovery = 0.0; // Rbar
    double hazard_p = 0.05;      // P
    double adjusted_p = 0.03;    // Pbar

    double shift() const noexcept { return base_recovery - floor_recovery; }

    static RecoverySpec calibrate(double hazard_p, double recovery, double recovery_floor);

    /// Throws CalibrationError if any invariant is broken.
    void validate() const;
};

enum class SpreadKind { Cds, CreditSpread };

struct SpreadQuote {
    std::string obligor_id;
    double spread = 0.0;   // annual, decimal
    double recovery = 0.0; // R
    SpreadKind kind = SpreadKind::Cds;
};

/// Pbar = (1 - R) P / (1 - Rbar). Throws CalibrationError when Pbar >= 1.
double calibrate_adjusted_pd(double hazard_p, double recovery, double recovery_floor);

/// State-dependent loss given default
///   G(z) = (1 - Rbar) Phi((qbar - a z)/s) / Phi((q - a z)/s)
/// with q = F_U^{-1}(P), qbar = F_U^{-1}(Pbar), s = sqrt(1 - a^2).
/// The ratio is formed in log space, so it stays finite and monotone in the tails.
double state_lgd(double z, const LatentSpec& spec, const RecoverySpec& rs);

/// Same as state_lgd with precomputed thresholds and a clipped loading.
double state_lgd_at(double z, double threshold, double adjusted_threshold, double loading,
                    double recovery_floor);

double state_recovery(double z, const LatentSpec& spec, const RecoverySpec& rs);

/// Flat hazard rate implied by a spread: s / (1 - R).
double hazard_from_spread(const SpreadQuote& q);

} // namespace regcop
