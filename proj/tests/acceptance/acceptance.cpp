// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "regcop/pipeline.hpp"
#include "regcop/rng.hpp"

using namespace regcop;
namespace fs = std::filesystem;

namespace {

const MixtureParams kRefMixture{0.4132, NormalParams(-0.08, 1.07), NormalParams(0.10, 0.43)};
const NormalParams kCrisis = NormalParams::from_variance(-0.03, 3.05);

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<double> grid(double lo, double hi, int n)
{
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

std::vector<double> ranks(const std::vector<double>& x)
{
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    const auto rx = ranks(x), ry = ranks(y);
    const std::vector<double> ones(x.size(), 1.0);
    return weighted_correlation(rx, ry, ones);
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome em_recovery()
{
    const std::size_t n = 10'000;
    int passed = 0;
    double slowest = 0.0;
    std::string misses;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::vector<double> z(n);
        for (std::size_t i = 0; i < n; ++i) {
            const RngStream s(seed, i);
            const NormalParams& c = s.uniform(0) < kRefMixture.omega ? kRefMixture.hectic : kRefMixture.quiet;
            z[i] = c.mean() + c.std() * s.normal(1);
        }
        const auto t0 = std::chrono::steady_clock::now();
        const MixtureFit fit = fit_mixture_em(z);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        slowest = std::max(slowest, secs);
        const MixtureParams& m = fit.params;
        const bool ok = std::abs(m.omega - 0.4132) <= 0.03 &&
                        std::abs(m.hectic.mean() + 0.08) <= 0.02 &&
                        std::abs(m.quiet.mean() - 0.10) <= 0.02 &&
                        std::abs(m.hectic.std() - 1.07) <= 0.03 &&
                        std::abs(m.quiet.std() - 0.43) <= 0.03 && secs < 5.0;
        if (ok) {
            ++passed;
        } else {
            misses += fmt(" s%llu(w=%.3f mH=%.3f mQ=%.3f sH=%.3f sQ=%.3f)",
                          static_cast<unsigned long long>(seed), m.omega, m.hectic.mean(),
                          m.quiet.mean(), m.hectic.std(), m.quiet.std());
        }
    }
    return {passed == 20,
            fmt("%d/20 seeds within tolerance, slowest fit %.3fs;", passed, slowest) + misses};
}

Outcome correlation_reduction()
{
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(-0.999, 0.999);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double a = u(gen), b = u(gen);
        worst = std::max(worst, std::abs(pairwise_correlation(a, b, 1.0) - a * b));
    }
    const double rho = pairwise_correlation(0.5, 0.5, 3.05);
    const double oracle = 0.7625 / 1.5125;
    return {worst <= 1e-12 && std::abs(rho - oracle) <= 1e-6 && std::abs(rho - 0.504132) <= 1e-6,
            fmt("max |rho - a_i a_j| = %.2e at unit variance; rho(0.5, 0.5, 3.05) = %.9f", worst,
                rho)};
}

Outcome hazard_consistency()
{
    const std::size_t n = 100'000;
    const Portfolio p{Obligor{"flat", 0.05, 0.4, 0.0, 1.0, LoadingSet{"flat", 0.0, 0.0, 0.0}}};
    const ScenarioSet s = generate_scenarios(kRefMixture, kCrisis, 1, n, 3);
    const PreparedPortfolio prep(p, EngineConfig::for_mixture(kRefMixture));
    const LossPaths paths = simulate_losses(prep, ModelVariant::FC, s);
    const double freq = static_cast<double>(paths.defaults) / n;
    const double se = std::sqrt(0.05 * 0.95 / n);
    return {std::abs(freq - 0.05) <= 3.0 * se,
            fmt("default frequency %.5f, |diff| = %.2f binomial SE", freq,
                std::abs(freq - 0.05) / se)};
}

Outcome lgd_laws()
{
    bool ok = true;
    double worst_flat = 0.0;
    int checks = 0;
    for (double rb : {0.0, 0.1}) {
        const RecoverySpec rs = RecoverySpec::calibrate(0.05, 0.4, rb);
        const double cap = 1.0 - rb;
        for (double a : {0.1, 0.426, 0.9}) {
            const LatentSpec spec{kCrisis, a};
            double prev = 2.0;
            for (double z : grid(-5.0, 5.0, 101)) {
                const double g = state_lgd(z, spec, rs);
                ok = ok && g < prev && g >= 0.0 && g <= cap;
                prev = g;
                ++checks;
            }
            // Tails: monotone approach to the limits.
            double lo_prev = 0.0, hi_prev = 2.0;
            for (double z : {5.0, 10.0, 20.0, 50.0, 100.0, 1e3, 1e4}) {
                const double lo = state_lgd(-z, spec, rs);
                const double hi = state_lgd(z, spec, rs);
                ok = ok && lo >= lo_prev && lo <= cap && hi <= hi_prev && hi >= 0.0;
                lo_prev = lo;
                hi_prev = hi;
            }
            ok = ok && cap - lo_prev < 1e-9 && hi_prev < 1e-6;
        }
        for (double z : grid(-5.0, 5.0, 101)) {
            worst_flat = std::max(worst_flat, std::abs(state_lgd(z, {kCrisis, 0.0}, rs) - 0.6));
        }
    }
    ok = ok && worst_flat <= 1e-12;
    return {ok, fmt("%d grid points strictly decreasing and bounded; tails reach their limits; "
                    "max |g - (1-R)| at alpha=0 = %.2e",
                    checks, worst_flat)};
}

Outcome calibration_identity()
{
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double p = 0.0005 + 0.999 * u(gen);
        const double r = 0.999 * u(gen);
        const double rb = r * u(gen);
        const double pb = calibrate_adjusted_pd(p, r, rb);
        worst = std::max(worst, std::abs((1 - r) * p - (1 - rb) * pb));
    }
    return {worst <= 1e-12, fmt("max |(1-R)P - (1-Rbar)Pbar| = %.2e over 1000 triples", worst)};
}

Portfolio synthetic_portfolio(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> ua(0.35, 0.5), uh(0.01, 0.04), uq(0.05, 0.2),
        up(0.02, 0.08), ur(0.3, 0.5);
    Portfolio p;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = ua(gen);
        const std::string id = "N" + std::to_string(i);
        p.push_back(Obligor{id, up(gen), ur(gen), 0.0, kDefaultExposure,
                            LoadingSet{id, a, a + uh(gen), a - uq(gen)}});
    }
    return p;
}

Outcome total_expectation()
{
    const Portfolio p = synthetic_portfolio(10, 6);
    const ScenarioSet s = generate_scenarios(kRefMixture, kCrisis, p.size(), 100'000, 6);
    const PreparedPortfolio prep(p, EngineConfig::for_mixture(kRefMixture));
    bool ok = true;
    std::string detail;
    for (ModelVariant v : kAllVariants) {
        const LossPaths paths = simulate_losses(prep, v, s);
        std::vector<double> diff(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) diff[i] = paths.realized[i] - paths.expected[i];
        const MeanEstimate d = mean_estimate(diff);
        const double z = std::abs(d.mean) / d.std_error;
        ok = ok && z <= 3.0;
        detail += fmt("%s %.2f SE; ", std::string(to_string(v)).c_str(), z);
    }
    return {ok, "|realized - expected| " + detail};
}

Outcome degenerate_equivalence()
{
    Portfolio eq = synthetic_portfolio(10, 7);
    for (auto& ob : eq) ob.loadings.alpha_h = ob.loadings.alpha_q = ob.loadings.alpha;
    Portfolio zero = synthetic_portfolio(10, 7);
    for (auto& ob : zero) ob.loadings = LoadingSet{ob.id, 0.0, 0.0, 0.0};
    const EngineConfig cfg = EngineConfig::for_mixture(kRefMixture);
    const PreparedPortfolio pe(eq, cfg), pz(zero, cfg);
    const ScenarioSet s = generate_scenarios(kRefMixture, kCrisis, 10, 10'000, 7);
    double worst = 0.0;
    const auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Scenario sc = s[i];
        worst = std::max(worst, rel(expected_loss_scenario(pe, ModelVariant::RFL, sc),
                                    expected_loss_scenario(pe, ModelVariant::FC, sc)));
        worst = std::max(worst, rel(expected_loss_scenario(pe, ModelVariant::RRFL, sc),
                                    expected_loss_scenario(pe, ModelVariant::RR, sc)));
        worst = std::max(worst, rel(expected_loss_scenario(pz, ModelVariant::RR, sc),
                                    expected_loss_scenario(pz, ModelVariant::FC, sc)));
    }
    return {worst <= 1e-12, fmt("max relative gap over 10000 scenarios = %.2e", worst)};
}

Outcome crisis_ordering()
{
    const Portfolio p = synthetic_portfolio(50, 8);
    const ScenarioSet s = generate_scenarios(kRefMixture, kCrisis, p.size(), 100'000, 8);
    const EvaluationReport r =
        evaluate_models(p, s, 1.0, kAllVariants, EngineConfig::for_mixture(kRefMixture));
    const double fc = r.at(ModelVariant::FC).expected_loss;
    const double rfl = r.at(ModelVariant::RFL).expected_loss;
    const double rr = r.at(ModelVariant::RR).expected_loss;
    const double rrfl = r.at(ModelVariant::RRFL).expected_loss;
    const bool ok = rrfl >= rr && rr > rfl && rfl >= fc && rrfl > 1.05 * fc;
    return {ok, fmt("FC %.4g, RFL %.4g, RR %.4g, RRFL %.4g (RRFL/FC = %.3f)", fc, rfl, rr, rrfl,
                    rrfl / fc)};
}

Outcome recovery_pd_association()
{
    const Obligor ob{"E", 0.05, 0.4, 0.0, kDefaultExposure, LoadingSet{"E", 0.426, 0.45, 0.3}};
    const EngineConfig cfg = EngineConfig::for_mixture(kRefMixture);
    const RecoverySpec rs = ob.recovery_spec();
    const ScenarioSet s = generate_scenarios(kRefMixture, kCrisis, 1, 1000, 9);
    std::vector<double> rec(s.size()), pd(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Scenario sc = s[i];
        const LatentSpec spec{cfg.threshold_dist, effective_loading(ob, ModelVariant::RRFL, sc)};
        rec[i] = state_recovery(sc.z, spec, rs);
        pd[i] = conditional_pd(ob.hazard_p, spec, sc.z);
    }
    const double rho = spearman(rec, pd);
    return {rho < -0.9, fmt("Spearman(recovery, PD) = %.4f over 1000 scenarios", rho)};
}

Outcome determinism()
{
    const fs::path sample = REGCOP_SAMPLE_DIR;
    const fs::path root = fs::temp_directory_path() / "regcop_acceptance";
    fs::remove_all(root);
    const auto run = [&](const fs::path& out, unsigned threads) {
        RunConfig cfg;
        cfg.out_dir = out;
        cfg.returns = sample / "market.csv";
        cfg.portfolio = sample / "portfolio.csv";
        cfg.n_scenarios = 20'000;
        cfg.actual_loss = 5e7;
        cfg.threads = threads;
        std::ostringstream log;
        for (const char* cmd : kCommands) run_pipeline(cfg, cmd, log);
    };
    run(root / "a", 1);
    run(root / "b", 1);
    run(root / "c", 4);
    int files = 0;
    bool ok = true;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        const std::string name = entry.path().filename().string();
        const std::string a = slurp(entry.path());
        ok = ok && !a.empty() && a == slurp(root / "b" / name) && a == slurp(root / "c" / name);
        ++files;
    }
    ok = ok && files == 8;
    return {ok, fmt("%d artifacts byte-identical across 2 runs and 1 vs 4 threads", files)};
}

Outcome spread_hazards()
{
    const fs::path path = fs::temp_directory_path() / "regcop_spreads.csv";
    const std::vector<std::tuple<std::string, double, double>> quotes{
        {"S1", 0.02, 0.6}, {"S2", 0.03, 0.4}, {"S3", 0.0125, 0.0}, {"S4", 0.047, 0.35},
        {"S5", 0.001, 0.9}};
    {
        std::ofstream out(path);
        out << "obligor_id,hazard_p,spread,recovery,recovery_floor,exposure,returns_file\n";
        for (const auto& [id, s, r] : quotes) out << id << ",," << s << "," << r << ",,,\n";
    }
    const auto rows = io::load_portfolio(path);
    bool ok = rows.size() == quotes.size();
    for (std::size_t i = 0; ok && i < rows.size(); ++i) {
        const auto& [id, s, r] = quotes[i];
        ok = rows[i].from_spread && rows[i].obligor.hazard_p == s / (1.0 - r);
    }
    const double spot = rows.at(0).obligor.hazard_p;
    ok = ok && std::abs(spot - 0.05) < 1e-15;
    return {ok, fmt("%zu rows equal s/(1-R) exactly; spot 0.02/0.4 -> %.17g", rows.size(), spot)};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"EM recovery on the two-regime sample", em_recovery},
        {"pairwise correlation reduction", correlation_reduction},
        {"hazard consistency at zero loading", hazard_consistency},
        {"state LGD laws", lgd_laws},
        {"expected-loss calibration identity", calibration_identity},
        {"law of total expectation", total_expectation},
        {"degenerate model equivalences", degenerate_equivalence},
        {"crisis ordering RRFL >= RR > RFL >= FC", crisis_ordering},
        {"recovery and default probability move apart", recovery_pd_association},
        {"bit-identical pipeline outputs", determinism},
        {"spread-implied hazards", spread_hazards},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}
