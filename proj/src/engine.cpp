#include "regcop/engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <thread>

#include "regcop/rng.hpp"

namespace regcop {

namespace {

// Runs fn(i) for i in [0, n) over contiguous chunks. Each index is written by
// exactly one worker, so results never depend on the thread count.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn)
{
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t end = std::min(n, (w + 1) * chunk);
                for (std::size_t i = w * chunk; i < end; ++i) {
                    fn(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

constexpr std::uint64_t kDrawZ = 0;
constexpr std::uint64_t kDrawRegime = 1;
constexpr std::uint64_t kDrawFirstEps = 2;

const PreparedPortfolio::Branch& branch_for(const PreparedPortfolio::Entry& e, Regime r)
{
    switch (r) {
    case Regime::Hectic: return e.hectic;
    case Regime::Quiet: return e.quiet;
    case Regime::Unconditional: break;
    }
    return e.unconditional;
}

const NormalParams& latent_for(const PreparedPortfolio::Entry& e, Regime r)
{
    switch (r) {
    case Regime::Hectic: return e.latent_hectic;
    case Regime::Quiet: return e.latent_quiet;
    case Regime::Unconditional: break;
    }
    return e.latent_unconditional;
}

Regime realized_regime(ModelVariant v, const Scenario& s)
{
    if (!uses_regime_loadings(v)) {
        return Regime::Unconditional;
    }
    return s.hectic() ? Regime::Hectic : Regime::Quiet;
}

double branch_expected_loss(const PreparedPortfolio::Entry& e,
                            const PreparedPortfolio::Branch& b, bool state_lgd, double z)
{
    const double pd = conditional_pd_at(b.threshold, b.loading, z);
    const double lgd =
        state_lgd ? state_lgd_at(z, b.threshold, b.adjusted_threshold, b.loading, e.recovery_floor)
                  : e.lgd;
    return lgd * pd;
}

void check_dimensions(const PreparedPortfolio& p, const Scenario& s)
{
    if (s.eps.size() < p.size()) {
        throw DomainError("scenario carries fewer idiosyncratic draws than the portfolio has obligors");
    }
}

} // namespace

std::string_view to_string(ModelVariant v)
{
    switch (v) {
    case ModelVariant::FC: return "FC";
    case ModelVariant::RFL: return "RFL";
    case ModelVariant::RR: return "RR";
    case ModelVariant::RRFL: return "RRFL";
    }
    return "?";
}

ModelVariant parse_variant(std::string_view name)
{
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "fc") return ModelVariant::FC;
    if (lower == "rfl") return ModelVariant::RFL;
    if (lower == "rr") return ModelVariant::RR;
    if (lower == "rrfl") return ModelVariant::RRFL;
    throw DomainError("unknown model variant '" + std::string(name) + "'");
}

std::string_view to_string(ScenarioGroup g)
{
    switch (g) {
    case ScenarioGroup::Hectic: return "hectic";
    case ScenarioGroup::Middle: return "middle";
    case ScenarioGroup::Quiet: return "quiet";
    }
    return "?";
}

void Obligor::validate() const
{
    if (!(exposure > 0.0) || !std::isfinite(exposure)) {
        throw DomainError("obligor '" + id + "' needs a positive exposure");
    }
    for (double a : {loadings.alpha, loadings.alpha_h, loadings.alpha_q}) {
        if (!std::isfinite(a) || std::abs(a) >= 1.0) {
            throw DomainError("obligor '" + id + "' has a loading outside (-1, 1)");
        }
    }
    recovery_spec();
}

RecoverySpec Obligor::recovery_spec() const
{
    return RecoverySpec::calibrate(hazard_p, recovery, recovery_floor);
}

EngineConfig EngineConfig::for_mixture(const MixtureParams& m)
{
    EngineConfig c;
    c.threshold_dist = m.unconditional();
    c.omega = m.omega;
    return c;
}

ScenarioSet::ScenarioSet(MixtureParams mixture, NormalParams z_dist, std::uint64_t seed,
                         std::size_t n_obligors, std::size_t n_scenarios)
    : mixture_(mixture), z_dist_(z_dist), seed_(seed), n_obligors_(n_obligors),
      z_(n_scenarios), pi_(n_scenarios), regime_(n_scenarios), eps_(n_scenarios * n_obligors)
{
}

Scenario ScenarioSet::operator[](std::size_t i) const
{
    Scenario s;
    s.index = i;
    s.z = z_[i];
    s.pi_hectic = pi_[i];
    s.regime_draw = regime_[i];
    s.eps = std::span<const double>(eps_).subspan(i * n_obligors_, n_obligors_);
    return s;
}

ScenarioSet generate_scenarios(const MixtureParams& m, const NormalParams& z_dist,
                               std::size_t n_obligors, std::size_t n_scenarios,
                               std::uint64_t seed, unsigned threads)
{
    if (n_scenarios == 0) {
        throw DomainError("need at least one scenario");
    }
    m.validate();
    ScenarioSet set(m, z_dist, seed, n_obligors, n_scenarios);
    parallel_for(n_scenarios, threads, [&](std::size_t i) {
        const RngStream stream(seed, i);
        const double z = z_dist.mean() + z_dist.std() * stream.normal(kDrawZ);
        set.z_[i] = z;
        set.pi_[i] = posterior_hectic(z, m);
        set.regime_[i] = stream.uniform(kDrawRegime);
        for (std::size_t k = 0; k < n_obligors; ++k) {
            set.eps_[i * n_obligors + k] = stream.normal(kDrawFirstEps + k);
        }
    });
    return set;
}

std::array<RegimeBranch, 2> regime_branches(const Obligor& ob, ModelVariant v, const Scenario& s,
                                            RegimeWeighting weighting, double omega)
{
    const double w = weighting == RegimeWeighting::Posterior ? s.pi_hectic : omega;
    if (!uses_regime_loadings(v)) {
        return {RegimeBranch{Regime::Unconditional, w, ob.loadings.alpha},
                RegimeBranch{Regime::Unconditional, 1.0 - w, ob.loadings.alpha}};
    }
    return {RegimeBranch{Regime::Hectic, w, ob.loadings.alpha_h},
            RegimeBranch{Regime::Quiet, 1.0 - w, ob.loadings.alpha_q}};
}

double effective_loading(const Obligor& ob, ModelVariant v, const Scenario& s)
{
    switch (realized_regime(v, s)) {
    case Regime::Hectic: return ob.loadings.alpha_h;
    case Regime::Quiet: return ob.loadings.alpha_q;
    case Regime::Unconditional: break;
    }
    return ob.loadings.alpha;
}

PreparedPortfolio::PreparedPortfolio(const Portfolio& portfolio, const EngineConfig& config)
    : config_(config)
{
    if (!(config.horizon > 0.0) || !std::isfinite(config.horizon)) {
        throw DomainError("horizon must be positive");
    }
    if (!(config.omega >= 0.0 && config.omega <= 1.0)) {
        throw DomainError("omega must lie in [0, 1]");
    }
    entries_.reserve(portfolio.size());
    for (const Obligor& ob : portfolio) {
        ob.validate();
        const double p_t = horizon_probability(ob.hazard_p, config.horizon);
        const RecoverySpec rs = RecoverySpec::calibrate(p_t, ob.recovery, ob.recovery_floor);
        const auto make = [&](double loading, Regime regime, NormalParams& latent) {
            const LatentSpec spec{config.threshold_dist, loading, regime};
            latent = latent_cdf_params(spec);
            return Branch{spec.effective_loading(), default_threshold(rs.hazard_p, spec),
                          default_threshold(rs.adjusted_p, spec)};
        };
        Entry e{ob.exposure, 1.0 - ob.recovery, ob.recovery_floor,
                intensity_from_probability(ob.hazard_p), {}, {}, {}, {}, {}, {}};
        e.unconditional = make(ob.loadings.alpha, Regime::Unconditional, e.latent_unconditional);
        e.hectic = make(ob.loadings.alpha_h, Regime::Hectic, e.latent_hectic);
        e.quiet = make(ob.loadings.alpha_q, Regime::Quiet, e.latent_quiet);
        entries_.push_back(e);
    }
}

double expected_loss_scenario(const PreparedPortfolio& portfolio, ModelVariant v,
                              const Scenario& s)
{
    const EngineConfig& cfg = portfolio.config();
    const double w = cfg.weighting == RegimeWeighting::Posterior ? s.pi_hectic : cfg.omega;
    const bool stochastic = uses_state_lgd(v);
    const bool regimes = uses_regime_loadings(v);
    double total = 0.0;
    for (std::size_t i = 0; i < portfolio.size(); ++i) {
        const auto& e = portfolio[i];
        double el;
        if (regimes) {
            el = w * branch_expected_loss(e, e.hectic, stochastic, s.z) +
                 (1.0 - w) * branch_expected_loss(e, e.quiet, stochastic, s.z);
        } else {
            // Both branches carry the unconditional loading; the weights sum to one.
            el = branch_expected_loss(e, e.unconditional, stochastic, s.z);
        }
        total += e.exposure * el;
    }
    return total;
}

double expected_loss_scenario(const Portfolio& portfolio, ModelVariant v, const Scenario& s,
                              const EngineConfig& config)
{
    return expected_loss_scenario(PreparedPortfolio(portfolio, config), v, s);
}

double realized_loss_scenario(const PreparedPortfolio& portfolio, ModelVariant v,
                              const Scenario& s)
{
    check_dimensions(portfolio, s);
    const EngineConfig& cfg = portfolio.config();
    const Regime regime = realized_regime(v, s);
    double total = 0.0;
    for (std::size_t i = 0; i < portfolio.size(); ++i) {
        const auto& e = portfolio[i];
        const auto& b = branch_for(e, regime);
        const LatentSpec spec{cfg.threshold_dist, b.loading, regime};
        const double u = latent_value(spec, s.z, s.eps[i]);
        const DefaultTime tau = default_time(u, e.intensity, spec);
        if (default_indicator(tau, cfg.horizon) == 0) {
            continue;
        }
        const double lgd =
            uses_state_lgd(v)
                ? state_lgd_at(s.z, b.threshold, b.adjusted_threshold, b.loading, e.recovery_floor)
                : e.lgd;
        total += e.exposure * lgd;
    }
    return total;
}

double realized_loss_scenario(const Portfolio& portfolio, ModelVariant v, const Scenario& s,
                              const EngineConfig& config)
{
    return realized_loss_scenario(PreparedPortfolio(portfolio, config), v, s);
}

LossPaths simulate_losses(const PreparedPortfolio& portfolio, ModelVariant v,
                          const ScenarioSet& scenarios)
{
    if (scenarios.empty()) {
        throw DomainError("empty scenario set");
    }
    if (scenarios.n_obligors() < portfolio.size()) {
        throw DomainError("scenario set was generated for fewer obligors than the portfolio holds");
    }
    LossPaths out;
    out.expected.resize(scenarios.size());
    out.realized.resize(scenarios.size());
    std::vector<std::size_t> defaults(scenarios.size());
    const EngineConfig& cfg = portfolio.config();
    parallel_for(scenarios.size(), cfg.threads, [&](std::size_t i) {
        const Scenario s = scenarios[i];
        out.expected[i] = expected_loss_scenario(portfolio, v, s);

        const Regime regime = realized_regime(v, s);
        double loss = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 0; k < portfolio.size(); ++k) {
            const auto& e = portfolio[k];
            const auto& b = branch_for(e, regime);
            const NormalParams& f = latent_for(e, regime);
            const double u = b.loading * s.z + std::sqrt(1.0 - b.loading * b.loading) * s.eps[k];
            const double tau = -log_norm_cdf(-(u - f.mean()) / f.std()) / e.intensity;
            if (!(tau <= cfg.horizon)) {
                continue;
            }
            ++count;
            const double lgd = uses_state_lgd(v) ? state_lgd_at(s.z, b.threshold,
                                                                b.adjusted_threshold, b.loading,
                                                                e.recovery_floor)
                                                 : e.lgd;
            loss += e.exposure * lgd;
        }
        out.realized[i] = loss;
        defaults[i] = count;
    });
    for (std::size_t c : defaults) {
        out.defaults += c;
    }
    return out;
}

MeanEstimate mean_estimate(std::span<const double> values)
{
    if (values.empty()) {
        throw DomainError("mean of an empty sample");
    }
    const double n = static_cast<double>(values.size());
    MeanEstimate m;
    m.mean = pairwise_sum(values) / n;
    if (values.size() > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - m.mean;
            sq[i] = d * d;
        }
        m.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
    }
    return m;
}

const ModelEvaluation& EvaluationReport::at(ModelVariant v) const
{
    for (const auto& m : models) {
        if (m.variant == v) {
            return m;
        }
    }
    throw DomainError("report has no entry for " + std::string(to_string(v)));
}

EvaluationReport evaluate_models(const Portfolio& portfolio, const ScenarioSet& scenarios,
                                 double actual_loss, std::span<const ModelVariant> variants,
                                 const EngineConfig& config)
{
    if (scenarios.empty()) {
        throw DomainError("cannot evaluate models on an empty scenario set");
    }
    if (portfolio.empty()) {
        throw DomainError("cannot evaluate models on an empty portfolio");
    }
    if (!(actual_loss > 0.0) || !std::isfinite(actual_loss)) {
        throw DomainError("actual portfolio loss must be positive and finite");
    }
    const PreparedPortfolio prepared(portfolio, config);
    EvaluationReport report;
    report.n_obligors = portfolio.size();
    report.n_scenarios = scenarios.size();
    for (ModelVariant v : variants) {
        const LossPaths paths = simulate_losses(prepared, v, scenarios);
        const MeanEstimate expected = mean_estimate(paths.expected);
        const MeanEstimate realized = mean_estimate(paths.realized);
        ModelEvaluation m;
        m.variant = v;
        m.actual_loss = actual_loss;
        m.expected_loss = expected.mean;
        m.ae = actual_loss - expected.mean;
        m.abs_ae = std::abs(m.ae);
        m.mae = m.ae / static_cast<double>(portfolio.size());
        m.ratio = expected.mean / actual_loss;
        m.expected_loss_stderr = expected.std_error;
        m.simulated_loss = realized.mean;
        m.simulated_loss_stderr = realized.std_error;
        report.models.push_back(m);
    }
    return report;
}

double quantile(std::vector<double> values, double q)
{
    if (values.empty()) {
        throw DomainError("quantile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 < values.size()) {
        return values[lo] + frac * (values[lo + 1] - values[lo]);
    }
    return values[lo];
}

ContributionTable relative_contribution(const ScenarioSet& scenarios, const Portfolio& portfolio,
                                        ModelVariant v)
{
    if (scenarios.empty() || portfolio.empty()) {
        throw DomainError("relative contribution needs scenarios and obligors");
    }
    if (scenarios.n_obligors() < portfolio.size()) {
        throw DomainError("scenario set was generated for fewer obligors than the portfolio holds");
    }
    const std::size_t n = portfolio.size();
    ContributionTable table;
    table.n_obligors = n;
    const std::vector<double> pis(scenarios.pi_values().begin(), scenarios.pi_values().end());
    table.q1 = quantile(pis, 0.25);
    table.q3 = quantile(pis, 0.75);
    table.systematic.resize(scenarios.size() * n);
    table.idiosyncratic.resize(scenarios.size() * n);
    table.rows.reserve(scenarios.size());

    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const Scenario s = scenarios[i];
        ContributionRow row;
        row.scenario = i;
        row.pi_hectic = s.pi_hectic;
        row.group = s.pi_hectic > table.q3   ? ScenarioGroup::Hectic
                    : s.pi_hectic < table.q1 ? ScenarioGroup::Quiet
                                             : ScenarioGroup::Middle;
        double sys_sum = 0.0, idio_sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double a = clip_loading(effective_loading(portfolio[k], v, s));
            const double sys = a * s.z;
            const double idio = std::sqrt(1.0 - a * a) * s.eps[k];
            table.systematic[i * n + k] = sys;
            table.idiosyncratic[i * n + k] = idio;
            sys_sum += sys;
            idio_sum += idio;
        }
        row.systematic = sys_sum / static_cast<double>(n);
        row.idiosyncratic = idio_sum / static_cast<double>(n);
        row.mean_latent = row.systematic + row.idiosyncratic;
        table.rows.push_back(row);
    }
    return table;
}

} // namespace regcop
