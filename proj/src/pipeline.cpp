#include "regcop/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace regcop {

namespace fs = std::filesystem;
using io::json;

namespace {

void require_input(const fs::path& p, const char* flag)
{
    if (p.empty()) {
        throw DomainError(std::string(flag) + " is required for this command");
    }
    if (!fs::exists(p)) {
        throw Error("input file not found: " + p.string());
    }
}

void require_artifact(const fs::path& p, const char* producer)
{
    if (!fs::exists(p)) {
        throw DependencyError("missing " + p.string() + "; run " + producer + " first");
    }
}

std::string unit_name(io::ReturnUnit u) { return u == io::ReturnUnit::Percent ? "percent" : "decimal"; }

std::string weighting_name(RegimeWeighting w)
{
    return w == RegimeWeighting::Posterior ? "posterior" : "unconditional";
}

std::vector<fs::path> estimate_mixture(const RunConfig& cfg, std::ostream& log)
{
    require_input(cfg.returns, "--returns");
    std::vector<std::string> warnings;
    const ReturnSeries z = io::load_returns_csv(cfg.returns, cfg.unit, &warnings);
    for (const auto& w : warnings) log << "warning: " << w << "\n";
    const MixtureFit fit = fit_mixture_em(z, cfg.em);
    if (!fit.converged) {
        log << "warning: EM stopped at max_iter without converging\n";
    }
    if (fit.boundary_hit) {
        log << "warning: regime weight hit its boundary guard; the data show one regime\n";
    }
    json j = io::to_json(fit);
    j["n_observations"] = z.size();
    j["provenance"] = cfg.provenance();
    const fs::path out = cfg.out_dir / "mixture.json";
    io::write_json(out, j);
    log << "omega " << fit.params.omega << "  hectic (" << fit.params.hectic.mean() << ", "
        << fit.params.hectic.std() << ")  quiet (" << fit.params.quiet.mean() << ", "
        << fit.params.quiet.std() << ")  iterations " << fit.iterations << "\n";
    return {out};
}

std::vector<fs::path> estimate_loadings(const RunConfig& cfg, std::ostream& log)
{
    require_input(cfg.returns, "--returns");
    require_input(cfg.portfolio, "--portfolio");
    require_artifact(cfg.mixture_path(), "estimate-mixture");
    const MixtureParams m = io::load_mixture_json(cfg.mixture_path());
    std::vector<std::string> warnings;
    const ReturnSeries z = io::load_returns_csv(cfg.returns, cfg.unit, &warnings);
    const auto rows = io::load_portfolio(cfg.portfolio, cfg.r_bar_default);
    std::vector<LoadingSet> loadings;
    for (const auto& row : rows) {
        if (row.returns_file.empty()) {
            throw DomainError("obligor '" + row.obligor.id + "' has no returns_file");
        }
        const ReturnSeries u = io::load_returns_csv(row.returns_file, cfg.unit, &warnings);
        LoadingSet l = fit_conditional_loadings(z, u, m);
        l.obligor_id = row.obligor.id;
        loadings.push_back(l);
        log << row.obligor.id << "  alpha " << l.alpha << "  alpha_h " << l.alpha_h
            << "  alpha_q " << l.alpha_q << "\n";
    }
    for (const auto& w : warnings) log << "warning: " << w << "\n";
    const fs::path out = cfg.out_dir / "loadings.csv";
    io::write_loadings_csv(out, loadings);
    return {out};
}

struct SimulationInputs {
    MixtureParams mixture;
    Portfolio portfolio;
    ScenarioSet scenarios;
    EngineConfig engine;
};

SimulationInputs prepare(const RunConfig& cfg)
{
    require_artifact(cfg.mixture_path(), "estimate-mixture");
    const MixtureParams m = io::load_mixture_json(cfg.mixture_path());
    Portfolio p = load_calibrated_portfolio(cfg);
    ScenarioSet s =
        generate_scenarios(m, cfg.z_dist(), p.size(), cfg.n_scenarios, cfg.seed, cfg.threads);
    return {m, std::move(p), std::move(s), engine_config(cfg, m)};
}

std::vector<fs::path> simulate(const RunConfig& cfg, std::ostream& log)
{
    const SimulationInputs in = prepare(cfg);
    const PreparedPortfolio prepared(in.portfolio, in.engine);
    json models = json::array();
    for (ModelVariant v : cfg.variants) {
        const LossPaths paths = simulate_losses(prepared, v, in.scenarios);
        const MeanEstimate el = mean_estimate(paths.expected);
        const MeanEstimate rl = mean_estimate(paths.realized);
        models.push_back({{"model", std::string(to_string(v))},
                          {"expected_loss", el.mean},
                          {"expected_loss_stderr", el.std_error},
                          {"simulated_loss", rl.mean},
                          {"simulated_loss_stderr", rl.std_error},
                          {"defaults", paths.defaults}});
        log << to_string(v) << "  expected " << el.mean << "  simulated " << rl.mean << "\n";
    }
    std::size_t hectic = 0;
    for (std::size_t i = 0; i < in.scenarios.size(); ++i) {
        hectic += in.scenarios[i].hectic() ? 1 : 0;
    }
    const MeanEstimate z = mean_estimate(in.scenarios.z_values());
    const MeanEstimate pi = mean_estimate(in.scenarios.pi_values());
    json summary{{"n_scenarios", in.scenarios.size()},
                 {"n_obligors", in.portfolio.size()},
                 {"z_mean", z.mean},
                 {"pi_hectic_mean", pi.mean},
                 {"hectic_draws", hectic},
                 {"models", models},
                 {"provenance", cfg.provenance()}};
    const fs::path csv = cfg.out_dir / "scenarios.csv";
    const fs::path js = cfg.out_dir / "simulation.json";
    io::write_atomic(csv, io::scenarios_csv(in.scenarios));
    io::write_json(js, summary);
    return {csv, js};
}

std::vector<fs::path> evaluate(const RunConfig& cfg, std::ostream& log)
{
    if (!cfg.actual_loss) {
        throw DomainError("--actual-loss is required for evaluate");
    }
    const SimulationInputs in = prepare(cfg);
    const EvaluationReport report =
        evaluate_models(in.portfolio, in.scenarios, *cfg.actual_loss, cfg.variants, in.engine);
    json j = io::to_json(report);
    j["provenance"] = cfg.provenance();
    const fs::path js = cfg.out_dir / "report.json";
    const fs::path csv = cfg.out_dir / "report.csv";
    io::write_json(js, j);
    io::write_atomic(csv, io::report_csv(report));
    for (const auto& m : report.models) {
        log << to_string(m.variant) << "  expected " << m.expected_loss << "  AE " << m.ae
            << "  MAE " << m.mae << "  ratio " << m.ratio << "\n";
    }
    return {js, csv};
}

std::vector<fs::path> contribution(const RunConfig& cfg, std::ostream& log)
{
    const SimulationInputs in = prepare(cfg);
    const ContributionTable t =
        relative_contribution(in.scenarios, in.portfolio, cfg.contribution_variant);
    const fs::path p2 = cfg.out_dir / "contribution_2d.csv";
    const fs::path p3 = cfg.out_dir / "contribution_3d.csv";
    io::write_atomic(p2, io::contribution_2d_csv(t));
    io::write_atomic(p3, io::contribution_3d_csv(t));
    log << "pi quartiles Q1 " << t.q1 << "  Q3 " << t.q3 << "\n";
    return {p2, p3};
}

} // namespace

std::string_view to_string(ThresholdBasis b)
{
    return b == ThresholdBasis::Mixture ? "mixture" : "scenario";
}

ThresholdBasis parse_threshold_basis(std::string_view name)
{
    if (name == "mixture") return ThresholdBasis::Mixture;
    if (name == "scenario") return ThresholdBasis::Scenario;
    throw DomainError("threshold basis must be 'mixture' or 'scenario', got '" +
                      std::string(name) + "'");
}

NormalParams RunConfig::z_dist() const
{
    return z_param_is_std ? NormalParams(z_mean, z_variance)
                          : NormalParams::from_variance(z_mean, z_variance);
}

fs::path RunConfig::mixture_path() const
{
    return mixture.empty() ? out_dir / "mixture.json" : mixture;
}

fs::path RunConfig::loadings_path() const
{
    return loadings.empty() ? out_dir / "loadings.csv" : loadings;
}

void RunConfig::validate() const
{
    if (n_scenarios < 1) throw DomainError("need at least one scenario");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("horizon must be positive");
    if (!(z_variance > 0.0) || !std::isfinite(z_variance) || !std::isfinite(z_mean)) {
        throw DomainError("factor distribution needs a finite mean and positive spread");
    }
    if (!(r_bar_default >= 0.0 && r_bar_default < 1.0)) {
        throw DomainError("recovery floor must lie in [0, 1)");
    }
    if (variants.empty()) throw DomainError("no model variants selected");
    if (actual_loss && (!(*actual_loss > 0.0) || !std::isfinite(*actual_loss))) {
        throw DomainError("actual loss must be positive and finite");
    }
}

json RunConfig::provenance() const
{
    json vs = json::array();
    for (ModelVariant v : variants) vs.push_back(std::string(to_string(v)));
    const auto name_or_default = [](const fs::path& given, const char* fallback) {
        return given.empty() ? std::string(fallback) : given.generic_string();
    };
    json j{{"seed", seed},
           {"n_scenarios", n_scenarios},
           {"horizon", horizon},
           {"z_mean", z_mean},
           {z_param_is_std ? "z_std" : "z_variance", z_variance},
           {"r_bar_default", r_bar_default},
           {"variants", vs},
           {"contribution_variant", std::string(to_string(contribution_variant))},
           {"weighting", weighting_name(weighting)},
           {"threshold_basis", std::string(to_string(threshold_basis))},
           {"em", {{"tol", em.tol}, {"max_iter", em.max_iter}}},
           {"return_unit", unit_name(unit)},
           {"returns", returns.generic_string()},
           {"portfolio", portfolio.generic_string()},
           {"mixture", name_or_default(mixture, "mixture.json")},
           {"loadings", name_or_default(loadings, "loadings.csv")}};
    j["actual_loss"] = actual_loss ? json(*actual_loss) : json(nullptr);
    return j;
}

Portfolio load_calibrated_portfolio(const RunConfig& config)
{
    require_input(config.portfolio, "--portfolio");
    require_artifact(config.loadings_path(), "estimate-loadings");
    Portfolio p = io::obligors_of(io::load_portfolio(config.portfolio, config.r_bar_default));
    io::attach_loadings(p, io::load_loadings_csv(config.loadings_path()));
    return p;
}

EngineConfig engine_config(const RunConfig& config, const MixtureParams& m)
{
    EngineConfig e = EngineConfig::for_mixture(m);
    if (config.threshold_basis == ThresholdBasis::Scenario) {
        e.threshold_dist = config.z_dist();
    }
    e.horizon = config.horizon;
    e.weighting = config.weighting;
    e.threads = config.threads;
    return e;
}

std::vector<fs::path> run_pipeline(const RunConfig& config, std::string_view command,
                                   std::ostream& log)
{
    config.validate();
    if (command == "estimate-mixture") return estimate_mixture(config, log);
    if (command == "estimate-loadings") return estimate_loadings(config, log);
    if (command == "simulate") return simulate(config, log);
    if (command == "evaluate") return evaluate(config, log);
    if (command == "contribution") return contribution(config, log);
    throw DomainError("unknown command '" + std::string(command) + "'");
}

} // namespace regcop
