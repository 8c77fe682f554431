#include <limits>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "regcop/stats.hpp"

using namespace regcop;
using testing::check_close;

namespace {

const MixtureParams kRefMixture{0.4132, NormalParams(-0.08, 1.07), NormalParams(0.10, 0.43)};

} // namespace

TEST_CASE("normal params reject invalid values")
{
    CHECK_THROWS_AS(NormalParams(0.0, 0.0), DomainError);
    CHECK_THROWS_AS(NormalParams(0.0, -1.0), DomainError);
    CHECK_THROWS_AS(NormalParams(std::nan(""), 1.0), DomainError);
    CHECK_THROWS_AS(NormalParams::from_variance(0.0, 0.0), DomainError);
    CHECK(NormalParams::from_variance(1.0, 4.0).std() == 2.0);
}

TEST_CASE("norm_pdf")
{
    check_close(norm_pdf(0.0), 0.3989422804014326779, 1e-15);
    check_close(norm_pdf(1.0), 0.2419707245191433498, 1e-15);
    for (double s : {0.3, 1.0, 2.5}) {
        check_close(norm_pdf(1.7, NormalParams(1.7, s)), 1.0 / (s * std::sqrt(2.0 * M_PI)), 1e-15);
    }
    CHECK_THROWS_AS(norm_pdf(std::numeric_limits<double>::infinity()), DomainError);
    CHECK_THROWS_AS(norm_pdf(std::nan("")), DomainError);

    for (const NormalParams p : {NormalParams(), NormalParams(-0.03, std::sqrt(3.05)),
                                 NormalParams(4.0, 0.01)}) {
        const double area = testing::integrate([&](double x) { return norm_pdf(x, p); },
                                               p.mean() - 10 * p.std(), p.mean() + 10 * p.std());
        CHECK(std::abs(area - 1.0) < 1e-6);
    }
}

TEST_CASE("norm_cdf")
{
    CHECK(norm_cdf(0.0) == 0.5);
    check_close(norm_cdf(1.96), 0.97500210485177956586, 1e-15);
    CHECK(norm_cdf(2.0, NormalParams(2.0, 3.0)) == 0.5);
    CHECK(norm_cdf(-std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(norm_cdf(std::numeric_limits<double>::infinity()) == 1.0);
    CHECK_THROWS_AS(norm_cdf(std::nan("")), DomainError);
    for (double x : {0.1, 0.7, 1.3, 2.9, 5.0}) {
        CHECK(std::abs(norm_cdf(-x) + norm_cdf(x) - 1.0) < 1e-15);
    }

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-40.0, 40.0);
    std::vector<double> xs(2000);
    for (auto& x : xs) x = u(gen);
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 1; i < xs.size(); ++i) {
        CHECK(norm_cdf(xs[i - 1]) <= norm_cdf(xs[i]));
    }
}

TEST_CASE("log_norm_cdf stays accurate in the tails")
{
    for (double x : {-5.0, -1.0, 0.0, 0.5, 3.0}) {
        check_close(log_norm_cdf(x), std::log(norm_cdf(x)), 1e-13);
    }
    // log Phi(-40) from the Mills ratio at extended precision.
    const long double x = -40.0L;
    const long double mills = 1.0L - 1.0L / (x * x) + 3.0L / (x * x * x * x) -
                              15.0L / std::pow(x, 6.0L) + 105.0L / std::pow(x, 8.0L);
    const long double expected =
        -0.5L * x * x - std::log(-x) - 0.5L * std::log(2.0L * 3.14159265358979323846L) +
        std::log(mills);
    check_close(log_norm_cdf(-40.0), static_cast<double>(expected), 1e-14);
    CHECK(std::isfinite(log_norm_cdf(-1e10)));
    CHECK(log_norm_cdf(40.0) == 0.0);
    // Continuous across the series switch.
    CHECK(std::abs(log_norm_cdf(-30.0 + 1e-9) - log_norm_cdf(-30.0 - 1e-9)) < 1e-6);
}

TEST_CASE("norm_inv_cdf")
{
    CHECK(norm_inv_cdf(0.5) == 0.0);
    CHECK(norm_inv_cdf(0.5, NormalParams(1.25, 2.0)) == 1.25);
    check_close(norm_inv_cdf(0.975), 1.9599639845400542355, 1e-14);
    for (double q : {0.0, 1.0, -0.1, 1.1}) {
        CHECK_THROWS_AS(norm_inv_cdf(q), DomainError);
    }
    for (double x : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
        CHECK(std::abs(norm_inv_cdf(norm_cdf(x)) - x) < 1e-10);
    }
    for (double lq = -10.0; lq <= -0.31; lq += 0.05) {
        const double q = std::pow(10.0, lq);
        CHECK(std::abs(norm_cdf(norm_inv_cdf(q)) - q) < 1e-12);
        CHECK(std::abs(norm_cdf(norm_inv_cdf(1.0 - q)) - (1.0 - q)) < 1e-12);
    }
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(1e-8, 1.0 - 1e-8);
    for (int i = 0; i < 5000; ++i) {
        const double q = u(gen);
        CHECK(std::abs(norm_cdf(norm_inv_cdf(q)) - q) < 1e-10);
    }
}

TEST_CASE("mixture_pdf")
{
    check_close(mixture_pdf(0.0, kRefMixture), 0.68352122342417123413, 1e-14);
    const MixtureParams all_h{1.0, kRefMixture.hectic, kRefMixture.quiet};
    const MixtureParams all_q{0.0, kRefMixture.hectic, kRefMixture.quiet};
    for (double z : {-2.0, 0.0, 0.3}) {
        CHECK(mixture_pdf(z, all_h) == norm_pdf(z, kRefMixture.hectic));
        CHECK(mixture_pdf(z, all_q) == norm_pdf(z, kRefMixture.quiet));
        CHECK(mixture_pdf(z, kRefMixture) >= 0.0);
    }
    const double area =
        testing::integrate([](double z) { return mixture_pdf(z, kRefMixture); }, -12.0, 12.0);
    CHECK(std::abs(area - 1.0) < 1e-6);
    CHECK_THROWS_AS(mixture_pdf(0.0, MixtureParams{1.5, {}, {}}), DomainError);
}

TEST_CASE("unconditional moments of the mixture")
{
    const NormalParams u = kRefMixture.unconditional();
    check_close(u.mean(), 0.025624, 1e-14);
    check_close(u.std(), 0.76774207298024249936, 1e-14);
}

TEST_CASE("pairwise_sum is exact on integers and order fixed")
{
    std::vector<double> v(1001);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    CHECK(pairwise_sum(v) == 500500.0);
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
    std::vector<double> tiny(1 << 16, 0.1);
    CHECK(std::abs(pairwise_sum(tiny) - 6553.6) < 1e-9);
}
