#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "regcop/engine.hpp"
#include "regcop/io.hpp"

namespace regcop {

/// Where default thresholds F_U^{-1}(P) are calibrated.
enum class ThresholdBasis {
    Mixture, // moment-matched normal of the fitted mixture
    Scenario // the scenario distribution of Z
};

std::string_view to_string(ThresholdBasis b);
ThresholdBasis parse_threshold_basis(std::string_view name);

struct RunConfig {
    std::uint64_t seed = 20080915;
    std::size_t n_scenarios = 1000;
    double horizon = 1.0;
    double z_mean = -0.03;
    double z_variance = 3.05;
    bool z_param_is_std = false; // treat z_variance as a standard deviation
    double r_bar_default = 0.0;
    std::vector<ModelVariant> variants{kAllVariants.begin(), kAllVariants.end()};
    ModelVariant contribution_variant = ModelVariant::RRFL;
    std::optional<double> actual_loss;
    RegimeWeighting weighting = RegimeWeighting::Posterior;
    ThresholdBasis threshold_basis = ThresholdBasis::Mixture;
    EmConfig em;
    unsigned threads = 1;

    io::ReturnUnit unit = io::ReturnUnit::Decimal;
    std::filesystem::path out_dir = "out";
    std::filesystem::path returns;   // systematic factor series
    std::filesystem::path portfolio;
    std::filesystem::path mixture;   // defaults to out_dir/mixture.json
    std::filesystem::path loadings;  // defaults to out_dir/loadings.csv

    NormalParams z_dist() const;
    std::filesystem::path mixture_path() const;
    std::filesystem::path loadings_path() const;
    /// Throws DomainError on invalid settings.
    void validate() const;
    /// Everything that determines the outputs; the thread count is left out.
    io::json provenance() const;
};

inline constexpr const char* kCommands[] = {"estimate-mixture", "estimate-loadings", "simulate",
                                            "evaluate", "contribution"};

/// Runs one subcommand and returns the artifacts it wrote.
std::vector<std::filesystem::path> run_pipeline(const RunConfig& config, std::string_view command,
                                                std::ostream& log);

/// Portfolio with loadings attached, as consumed by simulate/evaluate/contribution.
Portfolio load_calibrated_portfolio(const RunConfig& config);

EngineConfig engine_config(const RunConfig& config, const MixtureParams& m);

} // namespace regcop
