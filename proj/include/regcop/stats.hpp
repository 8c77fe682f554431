#pragma once

#include <cmath>
#include <numbers>
#include <span>

#include "regcop/errors.hpp"

namespace regcop {

/// Gaussian location/scale pair. Construction enforces std > 0 and finite values,
/// so every NormalParams in circulation is valid.
class NormalParams {
public:
    constexpr NormalParams() = default;
    NormalParams(double mean, double std);

    static NormalParams from_variance(double mean, double variance);

    double mean() const noexcept { return mean_; }
    double std() const noexcept { return std_; }
    double variance() const noexcept { return std_ * std_; }

    friend bool operator==(const NormalParams&, const NormalParams&) = default;

private:
    double mean_ = 0.0;
    double std_ = 1.0;
};

/// Two-regime Gaussian mixture of the systematic factor: with probability
/// `omega` the market is hectic, otherwise quiet.
struct MixtureParams {
    double omega = 0.5;
    NormalParams hectic;
    NormalParams quiet;

    /// Throws DomainError unless 0 <= omega <= 1. Degenerate weights are
    /// accepted here; fitted mixtures additionally satisfy 0 < omega < 1 and
    /// hectic.std() > quiet.std().
    void validate() const;

    /// Single normal with the mixture's first two moments.
    NormalParams unconditional() const;
};

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;

double norm_pdf(double x, const NormalParams& p = {});
double norm_cdf(double x, const NormalParams& p = {});
double norm_inv_cdf(double q, const NormalParams& p = {});

/// log of the standard normal density.
double log_norm_pdf(double x, const NormalParams& p = {});
/// log Phi(x) for the standard normal, accurate far into the lower tail
/// where Phi itself underflows.
double log_norm_cdf(double x);

double mixture_pdf(double z, const MixtureParams& m);

/// Sum in a fixed pairwise tree over index order; the result depends only
/// on the values, never on how they were produced.
double pairwise_sum(std::span<const double> values);

} // namespace regcop
