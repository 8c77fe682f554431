#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "regcop/engine.hpp"
#include "regcop/estimation.hpp"

namespace regcop::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// Units of the `return` column. The engine works in percent.
enum class ReturnUnit { Decimal, Percent };

/// YYYY-MM-DD. Throws ParseError (line 0) on anything else.
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// Shortest form that reads back to the same double (at most 17 digits).
std::string format_double(double x);

/// Reads `date,return`. Rows out of order are sorted and a warning is
/// appended to `warnings`; duplicate dates are rejected.
ReturnSeries load_returns_csv(const fs::path& path, ReturnUnit unit = ReturnUnit::Decimal,
                              std::vector<std::string>* warnings = nullptr);
void write_returns_csv(const fs::path& path, const ReturnSeries& series,
                       ReturnUnit unit = ReturnUnit::Percent);

struct PortfolioRow {
    Obligor obligor;
    fs::path returns_file; // resolved against the portfolio's directory; empty if absent
    bool from_spread = false;
    SpreadKind spread_kind = SpreadKind::Cds;
};

/// Reads `obligor_id,hazard_p,spread,recovery,recovery_floor,exposure,returns_file`
/// (optional `spread_kind` column: cds or credit). Rows without hazard_p take
/// spread / (1 - recovery). Empty recovery_floor falls back to `r_bar_default`,
/// empty exposure to 100 million. Loadings are left at zero.
std::vector<PortfolioRow> load_portfolio(const fs::path& path, double r_bar_default = 0.0);
Portfolio obligors_of(const std::vector<PortfolioRow>& rows);

std::vector<LoadingSet> load_loadings_csv(const fs::path& path);
void write_loadings_csv(const fs::path& path, const std::vector<LoadingSet>& loadings);

/// Attaches loadings by obligor id; throws DependencyError for any obligor
/// without an entry.
void attach_loadings(Portfolio& portfolio, const std::vector<LoadingSet>& loadings);

json to_json(const MixtureParams& m);
MixtureParams mixture_from_json(const json& j);
json to_json(const MixtureFit& fit);
MixtureParams load_mixture_json(const fs::path& path);

json to_json(const EvaluationReport& report);
std::string report_csv(const EvaluationReport& report);
std::string scenarios_csv(const ScenarioSet& scenarios);
std::string contribution_2d_csv(const ContributionTable& table);
std::string contribution_3d_csv(const ContributionTable& table);

/// Writes through a sibling temp file and renames it into place, so a
/// failed write never leaves a partial artifact behind.
void write_atomic(const fs::path& path, std::string_view content);
void write_json(const fs::path& path, const json& j);

} // namespace regcop::io
