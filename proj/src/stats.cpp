#include "regcop/stats.hpp"

#include <array>
#include <limits>
#include <string>

namespace regcop {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176;

void require_finite(double x, const char* what)
{
    if (!std::isfinite(x)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

// Standard normal cdf. erfc keeps full relative precision in the lower tail.
double phi_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double phi_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// Acklam's rational approximation for the lower half (p <= 0.5).
double acklam_lower(double p)
{
    static constexpr std::array<double, 6> a = {
        -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
        1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 5> b = {
        -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
        6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr std::array<double, 6> c = {
        -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
        -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<double, 4> d = {
        7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
        3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double standard_inv_cdf(double p)
{
    // Work on the lower tail where Phi is evaluated without cancellation;
    // 1 - p is exact for p in [0.5, 1).
    const bool upper = p > 0.5;
    const double tail = upper ? 1.0 - p : p;

    double x = acklam_lower(tail);
    const double density = phi_pdf(x);
    if (density > 0.0) {
        x -= (phi_cdf(x) - tail) / density;
    }
    return upper ? -x : x;
}

} // namespace

NormalParams::NormalParams(double mean, double std) : mean_(mean), std_(std)
{
    if (!std::isfinite(mean) || !std::isfinite(std)) {
        throw DomainError("normal parameters must be finite");
    }
    if (!(std > 0.0)) {
        throw DomainError("normal std must be strictly positive, got " + std::to_string(std));
    }
}

NormalParams NormalParams::from_variance(double mean, double variance)
{
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw DomainError("variance must be finite and strictly positive");
    }
    return NormalParams(mean, std::sqrt(variance));
}

void MixtureParams::validate() const
{
    if (!(omega >= 0.0 && omega <= 1.0)) {
        throw DomainError("mixture weight omega must lie in [0, 1]");
    }
}

NormalParams MixtureParams::unconditional() const
{
    validate();
    const double mean = omega * hectic.mean() + (1.0 - omega) * quiet.mean();
    const double dh = hectic.mean() - mean;
    const double dq = quiet.mean() - mean;
    const double var = omega * (hectic.variance() + dh * dh) +
                       (1.0 - omega) * (quiet.variance() + dq * dq);
    return NormalParams::from_variance(mean, var);
}

double norm_pdf(double x, const NormalParams& p)
{
    require_finite(x, "x");
    return phi_pdf((x - p.mean()) / p.std()) / p.std();
}

double log_norm_pdf(double x, const NormalParams& p)
{
    require_finite(x, "x");
    const double s = (x - p.mean()) / p.std();
    return -0.5 * s * s - kLogSqrt2Pi - std::log(p.std());
}

double norm_cdf(double x, const NormalParams& p)
{
    if (std::isnan(x)) {
        throw DomainError("x must not be NaN");
    }
    if (std::isinf(x)) {
        return x > 0.0 ? 1.0 : 0.0;
    }
    return phi_cdf((x - p.mean()) / p.std());
}

double log_norm_cdf(double x)
{
    if (std::isnan(x)) {
        throw DomainError("x must not be NaN");
    }
    if (x == std::numeric_limits<double>::infinity()) {
        return 0.0;
    }
    if (x == -std::numeric_limits<double>::infinity()) {
        return -std::numeric_limits<double>::infinity();
    }
    if (x > 0.0) {
        return std::log1p(-phi_cdf(-x));
    }
    if (x > -30.0) {
        return std::log(phi_cdf(x));
    }
    // Asymptotic Mills-ratio series; at x <= -30 ten terms are far below
    // double precision.
    const double inv_x2 = 1.0 / (x * x);
    double term = 1.0;
    double series = 1.0;
    for (int k = 1; k <= 10; ++k) {
        term *= -(2.0 * k - 1.0) * inv_x2;
        series += term;
    }
    return -0.5 * x * x - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

double norm_inv_cdf(double q, const NormalParams& p)
{
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("quantile probability must lie in (0, 1)");
    }
    return p.mean() + p.std() * standard_inv_cdf(q);
}

double mixture_pdf(double z, const MixtureParams& m)
{
    m.validate();
    return m.omega * norm_pdf(z, m.hectic) + (1.0 - m.omega) * norm_pdf(z, m.quiet);
}

double pairwise_sum(std::span<const double> values)
{
    constexpr std::size_t kBlock = 8;
    if (values.size() <= kBlock) {
        double s = 0.0;
        for (double v : values) {
            s += v;
        }
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

} // namespace regcop
