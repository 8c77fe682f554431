#include "regcop/factor_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regcop/estimation.hpp"

namespace regcop {

namespace {

void require_probability(double p, const char* what)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError(std::string(what) + " must lie in (0, 1)");
    }
}

void require_loading(double a)
{
    if (!std::isfinite(a) || std::abs(a) > 1.0) {
        throw DomainError("factor loading must lie in [-1, 1]");
    }
}

double latent_std(double a, double var_z) { return std::sqrt(a * a * (var_z - 1.0) + 1.0); }

} // namespace

double clip_loading(double a)
{
    require_loading(a);
    return std::clamp(a, -kLoadingClip, kLoadingClip);
}

double LatentSpec::effective_loading() const { return clip_loading(loading); }

double latent_value(const LatentSpec& spec, double z, double eps)
{
    const double a = spec.effective_loading();
    return a * z + std::sqrt(1.0 - a * a) * eps;
}

NormalParams latent_cdf_params(const LatentSpec& spec)
{
    const double a = spec.effective_loading();
    return NormalParams(a * spec.z_dist.mean(), latent_std(a, spec.z_dist.variance()));
}

double pairwise_correlation(double alpha_i, double alpha_j, double var_z)
{
    require_loading(alpha_i);
    require_loading(alpha_j);
    if (!(var_z > 0.0)) {
        throw DomainError("factor variance must be positive");
    }
    return alpha_i * alpha_j * var_z / (latent_std(alpha_i, var_z) * latent_std(alpha_j, var_z));
}

Matrix2 covariance_block(double alpha_i, double alpha_j, double var_z)
{
    const double rho = pairwise_correlation(alpha_i, alpha_j, var_z);
    const double si = latent_std(alpha_i, var_z);
    const double sj = latent_std(alpha_j, var_z);
    const double off = rho * si * sj;
    return {{{si * si, off}, {off, sj * sj}}};
}

double default_threshold(double p, const LatentSpec& spec)
{
    require_probability(p, "default probability");
    return norm_inv_cdf(p, latent_cdf_params(spec));
}

double conditional_pd_at(double threshold, double loading, double z)
{
    const double scale = std::sqrt(1.0 - loading * loading);
    return norm_cdf((threshold - loading * z) / scale);
}

double conditional_pd(double p, const LatentSpec& spec, double z)
{
    if (!std::isfinite(z)) {
        throw DomainError("factor value must be finite");
    }
    return conditional_pd_at(default_threshold(p, spec), spec.effective_loading(), z);
}

DefaultTime default_time(double u, double intensity, const LatentSpec& spec)
{
    if (!(intensity > 0.0) || !std::isfinite(intensity)) {
        throw DomainError("default intensity must be positive and finite");
    }
    if (std::isnan(u)) {
        throw DomainError("latent value must not be NaN");
    }
    const NormalParams f = latent_cdf_params(spec);
    // log(1 - F(u)) = log Phi(-(u - m)/s), kept finite deep in the upper tail.
    const double log_survival = log_norm_cdf(-(u - f.mean()) / f.std());
    DefaultTime out;
    if (log_survival == -std::numeric_limits<double>::infinity()) {
        out.tau = std::numeric_limits<double>::infinity();
        out.censored = true;
        return out;
    }
    out.tau = -log_survival / intensity;
    return out;
}

double intensity_from_probability(double p)
{
    require_probability(p, "default probability");
    return -std::log1p(-p);
}

double horizon_probability(double p, double horizon)
{
    require_probability(p, "default probability");
    if (!(horizon > 0.0)) {
        throw DomainError("horizon must be positive");
    }
    if (horizon == 1.0) {
        return p;
    }
    return -std::expm1(horizon * std::log1p(-p));
}

int default_indicator(const DefaultTime& tau, double horizon)
{
    if (!(horizon > 0.0)) {
        throw DomainError("horizon must be positive");
    }
    return tau.tau <= horizon ? 1 : 0;
}

} // namespace regcop
