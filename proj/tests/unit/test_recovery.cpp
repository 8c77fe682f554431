#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "regcop/recovery.hpp"

using namespace regcop;
using testing::check_close;

namespace {

const NormalParams kCrisis = NormalParams::from_variance(-0.03, 3.05);

std::vector<double> grid(double lo, double hi, int n)
{
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

} // namespace

TEST_CASE("calibrate_adjusted_pd")
{
    CHECK(calibrate_adjusted_pd(0.05, 0.4, 0.4) == 0.05);
    check_close(calibrate_adjusted_pd(0.05, 0.4, 0.0), 0.03, 1e-15);
    check_close(calibrate_adjusted_pd(0.05, 0.4, 0.1), 0.05 * 0.6 / 0.9, 1e-15);
    CHECK_THROWS_AS(calibrate_adjusted_pd(0.0, 0.4, 0.0), DomainError);
    CHECK_THROWS_AS(calibrate_adjusted_pd(0.05, 0.4, 0.5), DomainError);
    CHECK_THROWS_AS(calibrate_adjusted_pd(0.05, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(calibrate_adjusted_pd(0.05, 0.4, -0.1), DomainError);
}

TEST_CASE("calibration identity on random triples")
{
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double p = 0.001 + 0.998 * u(gen);
        const double r = 0.99 * u(gen);
        const double rb = r * u(gen);
        const RecoverySpec rs = RecoverySpec::calibrate(p, r, rb);
        CHECK(std::abs((1 - r) * p - (1 - rb) * rs.adjusted_p) <= 1e-12);
        CHECK(rs.adjusted_p <= rs.hazard_p);
        check_close(rs.shift(), r - rb, 1e-15);
    }
}

TEST_CASE("recovery spec validation")
{
    RecoverySpec rs = RecoverySpec::calibrate(0.05, 0.4, 0.0);
    CHECK_NOTHROW(rs.validate());
    rs.adjusted_p = 0.031;
    CHECK_THROWS_AS(rs.validate(), CalibrationError);
    RecoverySpec bad{0.3, 0.4, 0.05, 0.05};
    CHECK_THROWS_AS(bad.validate(), CalibrationError);
}

TEST_CASE("state_lgd oracle values")
{
    const RecoverySpec rs = RecoverySpec::calibrate(0.05, 0.4, 0.0);
    const LatentSpec stressed{kCrisis, 0.208};
    const double g0 = state_lgd(-3.0, stressed, rs);
    const double g1 = state_lgd(0.0, stressed, rs);
    const double g2 = state_lgd(3.0, stressed, rs);
    check_close(g0, 0.64729551120575984046, 1e-13);
    check_close(g1, 0.56427191177563422958, 1e-13);
    check_close(g2, 0.48862476897819936145, 1e-13);
    CHECK(g0 > g1);
    CHECK(g1 > g2);
}

TEST_CASE("state_lgd laws")
{
    for (const auto& [p, r, rb] : {std::tuple{0.05, 0.4, 0.0}, std::tuple{0.2, 0.6, 0.25},
                                   std::tuple{0.005, 0.3, 0.1}}) {
        const RecoverySpec rs = RecoverySpec::calibrate(p, r, rb);
        for (double z : grid(-5, 5, 101)) {
            check_close(state_lgd(z, {kCrisis, 0.0}, rs), 1.0 - r, 1e-12);
            // g * PD keeps the expected loss of the name.
            const LatentSpec flat{kCrisis, 0.0};
            check_close(state_lgd(z, flat, rs) * conditional_pd(p, flat, z), (1 - r) * p, 1e-12);
        }
        for (double a : {0.1, 0.426, 0.9}) {
            const LatentSpec spec{kCrisis, a};
            double prev = 2.0;
            for (double z : grid(-5, 5, 101)) {
                const double g = state_lgd(z, spec, rs);
                CHECK(g < prev);
                CHECK(g >= 0.0);
                CHECK(g <= 1.0 - rb);
                prev = g;
            }
            CHECK(state_lgd(-200.0, spec, rs) == doctest::Approx(1.0 - rb).epsilon(1e-9));
            CHECK(state_lgd(1e4, spec, rs) < 1e-6);
        }
    }
}

TEST_CASE("state_lgd survives underflowing cdfs")
{
    const RecoverySpec rs = RecoverySpec::calibrate(0.05, 0.4, 0.0);
    const LatentSpec spec{kCrisis, 0.999};
    for (double z : {-1e6, -1e3, 1e3, 1e6}) {
        const double g = state_lgd(z, spec, rs);
        CHECK(std::isfinite(g));
        CHECK(g >= 0.0);
        CHECK(g <= 1.0);
    }
    CHECK_THROWS_AS(state_lgd(std::nan(""), spec, rs), DomainError);
}

TEST_CASE("state_recovery")
{
    const RecoverySpec rs = RecoverySpec::calibrate(0.05, 0.4, 0.0);
    for (double z : grid(-5, 5, 11)) {
        check_close(state_recovery(z, {kCrisis, 0.0}, rs), 0.4, 1e-12);
    }
    CHECK(state_recovery(1e4, {kCrisis, 0.5}, rs) > 1.0 - 1e-6);
    double prev = -1.0;
    for (double z : grid(-5, 5, 101)) {
        const double r = state_recovery(z, {kCrisis, 0.3}, rs);
        CHECK(r >= prev);
        prev = r;
    }
}

TEST_CASE("hazard_from_spread")
{
    check_close(hazard_from_spread({"a", 0.02, 0.6}), 0.05, 1e-15);
    check_close(hazard_from_spread({"b", 0.03, 0.4}), 0.05, 1e-15);
    CHECK(hazard_from_spread({"c", 0.017, 0.0}) == 0.017);
    CHECK(hazard_from_spread({"d", 0.012, 0.4, SpreadKind::CreditSpread}) ==
          hazard_from_spread({"d", 0.012, 0.4, SpreadKind::Cds}));
    CHECK_THROWS_AS(hazard_from_spread({"e", 0.02, 1.0}), DomainError);
    CHECK_THROWS_AS(hazard_from_spread({"f", -0.01, 0.4}), DomainError);
}

// A higher loading in a bad market should not lower the LGD.
TEST_CASE("state_lgd loading sensitivity")
{
    const RecoverySpec rs = RecoverySpec::calibrate(0.05, 0.4, 0.0);
    int violations = 0;
    for (double z : grid(-5.0, -0.5, 46)) {
        double prev = 0.0;
        for (double a : grid(0.0, 0.9, 91)) {
            const double g = state_lgd(z, {kCrisis, a}, rs);
            if (g < prev - 1e-15) ++violations;
            prev = g;
        }
    }
    CHECK(violations == 0);
}
