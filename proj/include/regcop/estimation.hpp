#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "regcop/stats.hpp"

namespace regcop {

using Date = std::chrono::sys_days;

struct Observation {
    Date date;
    double value = 0.0;
};

/// Dated return series. Dates are strictly increasing; values share the
/// unit of the systematic factor (percent returns throughout the engine).
struct ReturnSeries {
    std::string label;
    std::vector<Observation> observations;

    std::size_t size() const noexcept { return observations.size(); }
    std::vector<double> values() const;

    /// Throws DomainError on non-increasing dates or non-finite values.
    void validate() const;
};

struct EmConfig {
    double tol = 1e-8; // on the mean per-observation log-likelihood
    int max_iter = 500;
};

struct MixtureFit {
    MixtureParams params;
    double loglik = 0.0; // total observed-data log-likelihood
    int iterations = 0;
    bool converged = false;
    /// omega reached the boundary guard; the data show no second regime.
    bool boundary_hit = false;
    /// Mean log-likelihood after each E-step, starting from the initial guess.
    std::vector<double> loglik_trace;
};

inline constexpr double kOmegaGuard = 1e-6;
inline constexpr std::size_t kMinObservations = 50;

/// Fits the two-regime mixture by expectation-maximisation. Components are
/// relabelled on exit so that hectic is the higher-volatility regime.
MixtureFit fit_mixture_em(std::span<const double> z, const EmConfig& config = {});
MixtureFit fit_mixture_em(const ReturnSeries& z, const EmConfig& config = {});

/// Bayes posterior P(S = H | Z = z), evaluated in log space.
double posterior_hectic(double z, const MixtureParams& m);

struct LoadingSet {
    std::string obligor_id;
    double alpha = 0.0;
    double alpha_h = 0.0;
    double alpha_q = 0.0;
};

inline constexpr double kLoadingClip = 0.999;

/// Unconditional and regime-conditional factor loadings of `u` on the
/// systematic series `z`. Regime loadings are Pearson correlations weighted
/// by the posterior hectic probability of each date (and its complement).
LoadingSet fit_conditional_loadings(const ReturnSeries& z, const ReturnSeries& u,
                                    const MixtureParams& m);

/// Weighted Pearson correlation; throws EstimationError on zero weighted variance.
double weighted_correlation(std::span<const double> x, std::span<const double> y,
                            std::span<const double> w);

} // namespace regcop
