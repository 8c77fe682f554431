#include "regcop/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace regcop {

namespace {

double sample_quantile(std::vector<double> sorted_copy, double q)
{
    std::sort(sorted_copy.begin(), sorted_copy.end());
    const double pos = q * static_cast<double>(sorted_copy.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 < sorted_copy.size()) {
        return sorted_copy[lo] * (1.0 - frac) + sorted_copy[lo + 1] * frac;
    }
    return sorted_copy[lo];
}

struct Moments {
    double mean = 0.0;
    double std = 0.0;
};

Moments moments(std::span<const double> x)
{
    Moments m;
    for (double v : x) {
        m.mean += v;
    }
    m.mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) {
        ss += (v - m.mean) * (v - m.mean);
    }
    m.std = std::sqrt(ss / static_cast<double>(x.size()));
    return m;
}

double log_sum_exp(double a, double b)
{
    const double hi = std::max(a, b);
    if (hi == -std::numeric_limits<double>::infinity()) {
        return hi;
    }
    return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

struct EStep {
    double mean_loglik = 0.0;
};

// Fills resp[t] = P(S=H | z_t) and returns the mean log-likelihood.
EStep expectation(std::span<const double> z, const MixtureParams& m, std::vector<double>& resp)
{
    const double log_w = std::log(m.omega);
    const double log_1mw = std::log1p(-m.omega);
    double total = 0.0;
    for (std::size_t t = 0; t < z.size(); ++t) {
        const double a = log_w + log_norm_pdf(z[t], m.hectic);
        const double b = log_1mw + log_norm_pdf(z[t], m.quiet);
        const double lse = log_sum_exp(a, b);
        resp[t] = std::exp(a - lse);
        total += lse;
    }
    return {total / static_cast<double>(z.size())};
}

} // namespace

std::vector<double> ReturnSeries::values() const
{
    std::vector<double> out;
    out.reserve(observations.size());
    for (const auto& o : observations) {
        out.push_back(o.value);
    }
    return out;
}

void ReturnSeries::validate() const
{
    for (std::size_t i = 0; i < observations.size(); ++i) {
        if (!std::isfinite(observations[i].value)) {
            throw DomainError("series '" + label + "' has a non-finite return");
        }
        if (i > 0 && !(observations[i - 1].date < observations[i].date)) {
            throw DomainError("series '" + label + "' dates are not strictly increasing");
        }
    }
}

MixtureFit fit_mixture_em(std::span<const double> z, const EmConfig& config)
{
    if (z.size() < kMinObservations) {
        throw InsufficientDataError("mixture fit needs at least " +
                                    std::to_string(kMinObservations) + " observations, got " +
                                    std::to_string(z.size()));
    }
    for (double v : z) {
        if (!std::isfinite(v)) {
            throw DomainError("mixture fit input contains a non-finite value");
        }
    }
    const Moments sample = moments(z);
    if (!(sample.std > 0.0)) {
        throw EstimationError("mixture fit input has zero variance");
    }
    const double std_floor = 1e-6 * sample.std;
    const std::vector<double> data(z.begin(), z.end());

    // Hectic starts low and wide, quiet high and narrow.
    MixtureParams m{0.5,
                    NormalParams(sample_quantile(data, 0.25), 1.5 * sample.std),
                    NormalParams(sample_quantile(data, 0.75), 0.5 * sample.std)};

    MixtureFit fit;
    std::vector<double> resp(z.size());
    double prev = expectation(z, m, resp).mean_loglik;
    fit.loglik_trace.push_back(prev);

    for (int iter = 1; iter <= config.max_iter; ++iter) {
        double w_h = 0.0, sum_h = 0.0, sum_q = 0.0;
        for (std::size_t t = 0; t < z.size(); ++t) {
            w_h += resp[t];
            sum_h += resp[t] * z[t];
            sum_q += (1.0 - resp[t]) * z[t];
        }
        const double n = static_cast<double>(z.size());
        const double w_q = n - w_h;
        if (!(w_h > 0.0) || !(w_q > 0.0)) {
            fit.boundary_hit = true;
            break;
        }
        const double mean_h = sum_h / w_h;
        const double mean_q = sum_q / w_q;
        double ss_h = 0.0, ss_q = 0.0;
        for (std::size_t t = 0; t < z.size(); ++t) {
            ss_h += resp[t] * (z[t] - mean_h) * (z[t] - mean_h);
            ss_q += (1.0 - resp[t]) * (z[t] - mean_q) * (z[t] - mean_q);
        }
        double omega = w_h / n;
        if (omega < kOmegaGuard || omega > 1.0 - kOmegaGuard) {
            omega = std::clamp(omega, kOmegaGuard, 1.0 - kOmegaGuard);
            fit.boundary_hit = true;
        }
        m = MixtureParams{omega, NormalParams(mean_h, std::max(std::sqrt(ss_h / w_h), std_floor)),
                          NormalParams(mean_q, std::max(std::sqrt(ss_q / w_q), std_floor))};

        const double current = expectation(z, m, resp).mean_loglik;
        fit.loglik_trace.push_back(current);
        fit.iterations = iter;
        if (std::abs(current - prev) < config.tol) {
            fit.converged = true;
            break;
        }
        prev = current;
    }

    if (m.hectic.std() < m.quiet.std()) {
        m = MixtureParams{1.0 - m.omega, m.quiet, m.hectic};
    }
    fit.params = m;
    fit.loglik = fit.loglik_trace.back() * static_cast<double>(z.size());
    return fit;
}

MixtureFit fit_mixture_em(const ReturnSeries& z, const EmConfig& config)
{
    z.validate();
    const std::vector<double> v = z.values();
    return fit_mixture_em(std::span<const double>(v), config);
}

double posterior_hectic(double z, const MixtureParams& m)
{
    m.validate();
    if (m.omega == 1.0) {
        return 1.0;
    }
    if (m.omega == 0.0) {
        return 0.0;
    }
    const double a = std::log(m.omega) + log_norm_pdf(z, m.hectic);
    const double b = std::log1p(-m.omega) + log_norm_pdf(z, m.quiet);
    // pi = 1 / (1 + exp(b - a)); stays finite when both densities underflow.
    const double d = b - a;
    if (d > 0.0) {
        const double e = std::exp(-d);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(d));
}

double weighted_correlation(std::span<const double> x, std::span<const double> y,
                            std::span<const double> w)
{
    if (x.size() != y.size() || x.size() != w.size() || x.empty()) {
        throw DomainError("weighted correlation needs equally sized, non-empty inputs");
    }
    double sw = 0.0, mx = 0.0, my = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        sw += w[t];
        mx += w[t] * x[t];
        my += w[t] * y[t];
    }
    if (!(sw > 0.0)) {
        throw EstimationError("weights sum to zero");
    }
    mx /= sw;
    my /= sw;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double dx = x[t] - mx;
        const double dy = y[t] - my;
        sxx += w[t] * dx * dx;
        syy += w[t] * dy * dy;
        sxy += w[t] * dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) {
        throw EstimationError("zero weighted variance in correlation estimate");
    }
    return sxy / std::sqrt(sxx * syy);
}

LoadingSet fit_conditional_loadings(const ReturnSeries& z, const ReturnSeries& u,
                                    const MixtureParams& m)
{
    z.validate();
    u.validate();
    m.validate();

    // Inner join on date; both series are sorted.
    std::vector<double> zx, uy;
    auto zi = z.observations.begin();
    auto ui = u.observations.begin();
    while (zi != z.observations.end() && ui != u.observations.end()) {
        if (zi->date < ui->date) {
            ++zi;
        } else if (ui->date < zi->date) {
            ++ui;
        } else {
            zx.push_back(zi->value);
            uy.push_back(ui->value);
            ++zi;
            ++ui;
        }
    }
    if (zx.size() < kMinObservations) {
        throw InsufficientDataError("series '" + u.label + "' shares only " +
                                    std::to_string(zx.size()) + " dates with '" + z.label +
                                    "', need " + std::to_string(kMinObservations));
    }

    std::vector<double> ones(zx.size(), 1.0), w_h(zx.size()), w_q(zx.size());
    for (std::size_t t = 0; t < zx.size(); ++t) {
        w_h[t] = posterior_hectic(zx[t], m);
        w_q[t] = 1.0 - w_h[t];
    }
    const auto clip = [](double a) { return std::clamp(a, -kLoadingClip, kLoadingClip); };
    LoadingSet out;
    out.obligor_id = u.label;
    out.alpha = clip(weighted_correlation(zx, uy, ones));
    out.alpha_h = clip(weighted_correlation(zx, uy, w_h));
    out.alpha_q = clip(weighted_correlation(zx, uy, w_q));
    return out;
}

} // namespace regcop
