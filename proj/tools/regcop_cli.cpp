// regcop: regime-switching credit portfolio loss engine.
//
//   regcop estimate-mixture  --returns market.csv --out run
//   regcop estimate-loadings --returns market.csv --portfolio portfolio.csv --out run
//   regcop evaluate --portfolio portfolio.csv --actual-loss 5e7 --out run

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "regcop/pipeline.hpp"

namespace {

std::vector<regcop::ModelVariant> parse_variants(const std::string& list)
{
    std::vector<regcop::ModelVariant> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(regcop::parse_variant(item));
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Regime-switching factor copula credit loss engine"};
    app.require_subcommand(1, 1);

    regcop::RunConfig cfg;
    std::string variants = "fc,rfl,rr,rrfl";
    std::string contribution_variant = "rrfl";
    std::string basis = "mixture";
    std::string returns, portfolio, mixture, loadings, out = "out";
    double actual_loss = 0.0;
    bool percent = false;
    bool unconditional_weights = false;

    app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    app.add_option("--scenarios", cfg.n_scenarios, "Number of scenarios")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--z-mean", cfg.z_mean, "Mean of the systematic factor (percent)")
        ->capture_default_str();
    app.add_option("--z-var", cfg.z_variance, "Variance of the systematic factor (percent^2)")
        ->capture_default_str();
    app.add_flag("--z-is-std", cfg.z_param_is_std, "Read --z-var as a standard deviation");
    app.add_option("--horizon", cfg.horizon, "Horizon in years")->capture_default_str();
    app.add_option("--variants", variants, "Comma list of fc,rfl,rr,rrfl")->capture_default_str();
    app.add_option("--variant", contribution_variant, "Model used by contribution")
        ->capture_default_str();
    app.add_option("--r-bar", cfg.r_bar_default, "Default recovery floor")->capture_default_str();
    app.add_option("--actual-loss", actual_loss, "Realized portfolio loss");
    app.add_option("--out", out, "Output directory")->capture_default_str();
    app.add_option("--returns", returns, "Systematic factor returns (date,return)");
    app.add_option("--portfolio", portfolio, "Portfolio CSV");
    app.add_option("--mixture", mixture, "mixture.json (default: <out>/mixture.json)");
    app.add_option("--loadings", loadings, "loadings.csv (default: <out>/loadings.csv)");
    app.add_flag("--percent", percent, "Return files are in percent units");
    app.add_flag("--omega-weights", unconditional_weights,
                 "Weight regimes by omega instead of the scenario posterior");
    app.add_option("--threshold-basis", basis, "mixture or scenario")->capture_default_str();
    app.add_option("--threads", cfg.threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    app.add_option("--em-tol", cfg.em.tol, "EM tolerance on mean log-likelihood")
        ->capture_default_str();
    app.add_option("--em-max-iter", cfg.em.max_iter, "EM iteration cap")->capture_default_str();

    for (const char* cmd : regcop::kCommands) {
        app.add_subcommand(cmd)->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        cfg.variants = parse_variants(variants);
        cfg.contribution_variant = regcop::parse_variant(contribution_variant);
        cfg.threshold_basis = regcop::parse_threshold_basis(basis);
        cfg.weighting = unconditional_weights ? regcop::RegimeWeighting::Unconditional
                                              : regcop::RegimeWeighting::Posterior;
        cfg.unit = percent ? regcop::io::ReturnUnit::Percent : regcop::io::ReturnUnit::Decimal;
        cfg.out_dir = out;
        cfg.returns = returns;
        cfg.portfolio = portfolio;
        cfg.mixture = mixture;
        cfg.loadings = loadings;
        if (app.count("--actual-loss")) cfg.actual_loss = actual_loss;

        const std::string command = app.get_subcommands().front()->get_name();
        for (const auto& path : regcop::run_pipeline(cfg, command, std::cerr)) {
            std::cout << path.string() << "\n";
        }
    } catch (const regcop::DependencyError& e) {
        std::cerr << "regcop: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "regcop: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
