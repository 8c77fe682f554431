#pragma once

#include <array>
#include <string>

#include "regcop/stats.hpp"

namespace regcop {

enum class Regime { Hectic, Quiet, Unconditional };

/// Latent firm value U = a Z + sqrt(1 - a^2) eps for one regime.
///
/// `z_dist` is the distribution of Z that calibrates the default threshold
/// F_U^{-1}(P). It need not be the distribution scenarios are drawn from.
struct LatentSpec {
    NormalParams z_dist;
    double loading = 0.0;
    Regime regime = Regime::Unconditional;

    /// Loading clipped into [-0.999, 0.999].
    double effective_loading() const;
};

double clip_loading(double a);

double latent_value(const LatentSpec& spec, double z, double eps);

/// Distribution F of U: mean a mu_Z, std sqrt(a^2 sigma_Z^2 + 1 - a^2).
NormalParams latent_cdf_params(const LatentSpec& spec);

double pairwise_correlation(double alpha_i, double alpha_j, double var_z);

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Covariance of (U_i, U_j): variances on the diagonal, rho sigma_i sigma_j off it.
Matrix2 covariance_block(double alpha_i, double alpha_j, double var_z);

/// Default threshold F_U^{-1}(p).
double default_threshold(double p, const LatentSpec& spec);

/// Phi((threshold - a z) / sqrt(1 - a^2)) for an already clipped loading.
double conditional_pd_at(double threshold, double loading, double z);

/// P(U <= F_U^{-1}(p) | Z = z).
double conditional_pd(double p, const LatentSpec& spec, double z);

struct DefaultTime {
    std::string obligor_id;
    double tau = 0.0;
    /// F(u) rounds to 1: no default at any finite horizon, tau = +inf.
    bool censored = false;
};

/// tau = -log(1 - F(u)) / intensity with F the cdf of U under `spec`.
DefaultTime default_time(double u, double intensity, const LatentSpec& spec);

/// Constant intensity whose one-period default probability is `p`:
/// -log(1 - p). Feeding it to default_time makes {tau <= 1} == {F(u) <= p}.
double intensity_from_probability(double p);

/// Default probability to horizon t for a one-year probability p under a
/// flat intensity: 1 - (1 - p)^t.
double horizon_probability(double p, double horizon);

/// 1 iff tau <= horizon (a default exactly at the horizon counts).
int default_indicator(const DefaultTime& tau, double horizon);

} // namespace regcop
