#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regcop/estimation.hpp"
#include "regcop/factor_model.hpp"
#include "regcop/recovery.hpp"

namespace regcop {

inline constexpr double kDefaultExposure = 100'000'000.0;

struct Obligor {
    std::string id;
    double hazard_p = 0.05;       // one-year marginal default probability
    double recovery = 0.4;        // R
    double recovery_floor = 0.0;  // Rbar
    double exposure = kDefaultExposure;
    LoadingSet loadings;

    /// Throws DomainError/CalibrationError if the obligor cannot be calibrated.
    void validate() const;
    RecoverySpec recovery_spec() const;
};

using Portfolio = std::vector<Obligor>;

/// FC: constant loading and LGD. RFL: regime loadings. RR: state-dependent
/// LGD. RRFL: both.
enum class ModelVariant { FC, RFL, RR, RRFL };

inline constexpr std::array<ModelVariant, 4> kAllVariants = {
    ModelVariant::FC, ModelVariant::RFL, ModelVariant::RR, ModelVariant::RRFL};

constexpr bool uses_regime_loadings(ModelVariant v)
{
    return v == ModelVariant::RFL || v == ModelVariant::RRFL;
}
constexpr bool uses_state_lgd(ModelVariant v)
{
    return v == ModelVariant::RR || v == ModelVariant::RRFL;
}

std::string_view to_string(ModelVariant v);
/// Case-insensitive "fc", "rfl", "rr", "rrfl".
ModelVariant parse_variant(std::string_view name);

/// How the two regime branches of an expected loss are weighted.
enum class RegimeWeighting {
    Posterior,    // pi(Z = z) per scenario
    Unconditional // omega for every scenario
};

struct EngineConfig {
    /// Distribution of Z used to place default thresholds F_U^{-1}(P).
    NormalParams threshold_dist;
    double horizon = 1.0;
    RegimeWeighting weighting = RegimeWeighting::Posterior;
    /// Used only with RegimeWeighting::Unconditional.
    double omega = 0.5;
    unsigned threads = 1;

    /// Thresholds from the mixture's moment-matched unconditional normal.
    static EngineConfig for_mixture(const MixtureParams& m);
};

/// One draw of the systematic factor with its idiosyncratic shocks.
struct Scenario {
    std::size_t index = 0;
    double z = 0.0;
    double pi_hectic = 0.0;
    /// Uniform draw that resolves the regime of the realized path:
    /// hectic iff regime_draw < pi_hectic.
    double regime_draw = 0.5;
    std::span<const double> eps;

    bool hectic() const noexcept { return regime_draw < pi_hectic; }
};

/// Scenario i consumes substream i of the seed: draw 0 is Z, draw 1 the
/// regime uniform, draws 2.. the idiosyncratic shocks.
class ScenarioSet {
public:
    ScenarioSet(MixtureParams mixture, NormalParams z_dist, std::uint64_t seed,
                std::size_t n_obligors, std::size_t n_scenarios);

    std::size_t size() const noexcept { return z_.size(); }
    bool empty() const noexcept { return z_.empty(); }
    std::size_t n_obligors() const noexcept { return n_obligors_; }
    const MixtureParams& mixture() const noexcept { return mixture_; }
    const NormalParams& z_dist() const noexcept { return z_dist_; }
    std::uint64_t seed() const noexcept { return seed_; }

    Scenario operator[](std::size_t i) const;
    std::span<const double> z_values() const noexcept { return z_; }
    std::span<const double> pi_values() const noexcept { return pi_; }

private:
    friend ScenarioSet generate_scenarios(const MixtureParams&, const NormalParams&, std::size_t,
                                          std::size_t, std::uint64_t, unsigned);

    MixtureParams mixture_;
    NormalParams z_dist_;
    std::uint64_t seed_;
    std::size_t n_obligors_;
    std::vector<double> z_;
    std::vector<double> pi_;
    std::vector<double> regime_;
    std::vector<double> eps_;
};

ScenarioSet generate_scenarios(const MixtureParams& m, const NormalParams& z_dist,
                               std::size_t n_obligors, std::size_t n_scenarios,
                               std::uint64_t seed, unsigned threads = 1);

struct RegimeBranch {
    Regime regime;
    double weight;
    double loading;
};

/// The two weighted branches of the conditional expected loss. FC/RR put the
/// unconditional loading on both branches.
std::array<RegimeBranch, 2> regime_branches(const Obligor& ob, ModelVariant v, const Scenario& s,
                                            RegimeWeighting weighting = RegimeWeighting::Posterior,
                                            double omega = 0.5);

/// Loading of the realized path: alpha for FC/RR, otherwise the loading of
/// the regime drawn for this scenario.
double effective_loading(const Obligor& ob, ModelVariant v, const Scenario& s);

/// Obligors with thresholds precomputed for every loading and horizon.
class PreparedPortfolio {
public:
    PreparedPortfolio(const Portfolio& portfolio, const EngineConfig& config);

    struct Branch {
        double loading;
        double threshold;          // F_U^{-1}(P_t)
        double adjusted_threshold; // F_U^{-1}(Pbar_t)
    };
    struct Entry {
        double exposure;
        double lgd;            // 1 - R
        double recovery_floor; // Rbar
        double intensity;      // -log(1 - P)
        NormalParams latent_unconditional;
        NormalParams latent_hectic;
        NormalParams latent_quiet;
        Branch unconditional;
        Branch hectic;
        Branch quiet;
    };

    std::size_t size() const noexcept { return entries_.size(); }
    const Entry& operator[](std::size_t i) const { return entries_[i]; }
    const EngineConfig& config() const noexcept { return config_; }

private:
    EngineConfig config_;
    std::vector<Entry> entries_;
};

double expected_loss_scenario(const PreparedPortfolio& portfolio, ModelVariant v,
                              const Scenario& s);
double expected_loss_scenario(const Portfolio& portfolio, ModelVariant v, const Scenario& s,
                              const EngineConfig& config);

double realized_loss_scenario(const PreparedPortfolio& portfolio, ModelVariant v,
                              const Scenario& s);
double realized_loss_scenario(const Portfolio& portfolio, ModelVariant v, const Scenario& s,
                              const EngineConfig& config);

struct LossPaths {
    std::vector<double> expected;
    std::vector<double> realized;
    std::size_t defaults = 0; // obligor-scenario default events on the realized path
};

/// Per-scenario expected and realized losses, evaluated in parallel.
LossPaths simulate_losses(const PreparedPortfolio& portfolio, ModelVariant v,
                          const ScenarioSet& scenarios);

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Mean and standard error of a sample, with an order-fixed reduction.
MeanEstimate mean_estimate(std::span<const double> values);

struct ModelEvaluation {
    ModelVariant variant = ModelVariant::FC;
    double actual_loss = 0.0;
    double expected_loss = 0.0;
    double ae = 0.0;      // actual - expected (signed)
    double abs_ae = 0.0;
    double mae = 0.0;     // ae / n_obligors
    double ratio = 0.0;   // expected / actual
    double expected_loss_stderr = 0.0;
    double simulated_loss = 0.0;
    double simulated_loss_stderr = 0.0;
};

struct EvaluationReport {
    std::size_t n_obligors = 0;
    std::size_t n_scenarios = 0;
    std::vector<ModelEvaluation> models;

    const ModelEvaluation& at(ModelVariant v) const;
};

EvaluationReport evaluate_models(const Portfolio& portfolio, const ScenarioSet& scenarios,
                                 double actual_loss, std::span<const ModelVariant> variants,
                                 const EngineConfig& config);

enum class ScenarioGroup { Hectic, Middle, Quiet };
std::string_view to_string(ScenarioGroup g);

struct ContributionRow {
    std::size_t scenario = 0;
    ScenarioGroup group = ScenarioGroup::Middle;
    double pi_hectic = 0.0;
    double systematic = 0.0;    // mean over obligors of a z
    double idiosyncratic = 0.0; // mean over obligors of sqrt(1 - a^2) eps
    double mean_latent = 0.0;
};

struct ContributionTable {
    double q1 = 0.0; // pi_hectic quartile cuts
    double q3 = 0.0;
    std::size_t n_obligors = 0;
    std::vector<ContributionRow> rows;
    /// Per scenario and obligor, flattened as [scenario * n_obligors + obligor].
    std::vector<double> systematic;
    std::vector<double> idiosyncratic;
};

/// Splits each latent value into its systematic and idiosyncratic parts and
/// tags scenarios by pi_hectic quartile: above Q3 hectic, below Q1 quiet.
ContributionTable relative_contribution(const ScenarioSet& scenarios, const Portfolio& portfolio,
                                        ModelVariant v);

/// Linear-interpolation sample quantile.
double quantile(std::vector<double> values, double q);

} // namespace regcop
