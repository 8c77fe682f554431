#include "regcop/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>

namespace regcop::io {

namespace {

std::string_view trim(std::string_view s)
{
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && ws(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_row(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

// A CSV file with a named header; blank lines are skipped.
class CsvTable {
public:
    CsvTable(const fs::path& path) : source_(path.string())
    {
        std::ifstream in(path);
        if (!in) {
            throw Error("cannot open " + source_);
        }
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (trim(line).empty()) continue;
            if (header_.empty()) {
                header_ = split_row(line);
                for (std::size_t i = 0; i < header_.size(); ++i) {
                    if (!index_.emplace(header_[i], i).second) {
                        throw ParseError(source_, lineno, "duplicate column '" + header_[i] + "'");
                    }
                }
                continue;
            }
            auto cells = split_row(line);
            if (cells.size() != header_.size()) {
                throw ParseError(source_, lineno,
                                 "expected " + std::to_string(header_.size()) + " fields, got " +
                                     std::to_string(cells.size()));
            }
            rows_.push_back({lineno, std::move(cells)});
        }
        if (header_.empty()) {
            throw ParseError(source_, 1, "missing header");
        }
    }

    void require(std::initializer_list<const char*> cols) const
    {
        for (const char* c : cols) {
            if (!index_.count(c)) {
                throw ParseError(source_, 1, std::string("missing column '") + c + "'");
            }
        }
    }

    bool has(const std::string& col) const { return index_.count(col) > 0; }

    struct Row {
        std::size_t line;
        std::vector<std::string> cells;
    };

    const std::vector<Row>& rows() const { return rows_; }
    const std::string& source() const { return source_; }

    std::string_view cell(const Row& r, const std::string& col) const
    {
        const auto it = index_.find(col);
        return it == index_.end() ? std::string_view{} : std::string_view(r.cells[it->second]);
    }

    double number(const Row& r, const std::string& col) const
    {
        auto v = optional_number(r, col);
        if (!v) {
            throw ParseError(source_, r.line, "empty '" + col + "'");
        }
        return *v;
    }

    std::optional<double> optional_number(const Row& r, const std::string& col) const
    {
        const std::string_view text = cell(r, col);
        if (text.empty()) return std::nullopt;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
            throw ParseError(source_, r.line,
                             "bad number '" + std::string(text) + "' in column '" + col + "'");
        }
        return v;
    }

private:
    std::string source_;
    std::vector<std::string> header_;
    std::map<std::string, std::size_t> index_;
    std::vector<Row> rows_;
};

void require_finite(double x, const char* what)
{
    if (!std::isfinite(x)) {
        throw Error(std::string("refusing to emit non-finite ") + what);
    }
}

} // namespace

Date parse_date(std::string_view text)
{
    text = trim(text);
    const auto bad = [&] { return ParseError("date", 0, "bad ISO date '" + std::string(text) + "'"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw bad();
    }
    int y = 0;
    unsigned m = 0, d = 0;
    const auto field = [&](std::size_t pos, std::size_t len, auto& out) {
        const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
        if (ec != std::errc{} || ptr != text.data() + pos + len) throw bad();
    };
    field(0, 4, y);
    field(5, 2, m);
    field(8, 2, d);
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) {
        throw bad();
    }
    return Date{ymd};
}

std::string format_date(Date d)
{
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_double(double x)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) {
        throw Error("number formatting failed");
    }
    return std::string(buf, ptr);
}

ReturnSeries load_returns_csv(const fs::path& path, ReturnUnit unit,
                              std::vector<std::string>* warnings)
{
    const CsvTable t(path);
    t.require({"date", "return"});
    ReturnSeries s;
    s.label = path.stem().string();
    const double scale = unit == ReturnUnit::Decimal ? 100.0 : 1.0;
    bool sorted = true;
    for (const auto& r : t.rows()) {
        Date d;
        try {
            d = parse_date(t.cell(r, "date"));
        } catch (const ParseError&) {
            throw ParseError(t.source(), r.line,
                             "bad ISO date '" + std::string(t.cell(r, "date")) + "'");
        }
        const double v = t.number(r, "return") * scale;
        if (!s.observations.empty() && d <= s.observations.back().date) {
            sorted = false;
        }
        s.observations.push_back({d, v});
    }
    if (!sorted) {
        std::stable_sort(s.observations.begin(), s.observations.end(),
                         [](const Observation& a, const Observation& b) { return a.date < b.date; });
        if (warnings) {
            warnings->push_back(t.source() + ": rows were not in date order and have been sorted");
        }
    }
    for (std::size_t i = 1; i < s.observations.size(); ++i) {
        if (s.observations[i].date == s.observations[i - 1].date) {
            throw ParseError(t.source(), 0,
                             "duplicate date " + format_date(s.observations[i].date));
        }
    }
    return s;
}

void write_returns_csv(const fs::path& path, const ReturnSeries& series, ReturnUnit unit)
{
    std::string out = "date,return\n";
    for (const auto& o : series.observations) {
        const double v = unit == ReturnUnit::Decimal ? o.value / 100.0 : o.value;
        require_finite(v, "return");
        out += format_date(o.date) + "," + format_double(v) + "\n";
    }
    write_atomic(path, out);
}

std::vector<PortfolioRow> load_portfolio(const fs::path& path, double r_bar_default)
{
    const CsvTable t(path);
    t.require({"obligor_id", "recovery"});
    if (!t.has("hazard_p") && !t.has("spread")) {
        throw ParseError(t.source(), 1, "need a hazard_p or spread column");
    }
    std::vector<PortfolioRow> rows;
    std::set<std::string> seen;
    for (const auto& r : t.rows()) {
        PortfolioRow row;
        Obligor& ob = row.obligor;
        ob.id = std::string(t.cell(r, "obligor_id"));
        if (ob.id.empty()) {
            throw ParseError(t.source(), r.line, "empty obligor_id");
        }
        if (!seen.insert(ob.id).second) {
            throw ParseError(t.source(), r.line, "duplicate obligor_id '" + ob.id + "'");
        }
        ob.recovery = t.number(r, "recovery");
        const auto hazard = t.optional_number(r, "hazard_p");
        const auto spread = t.optional_number(r, "spread");
        if (hazard) {
            ob.hazard_p = *hazard;
        } else if (spread) {
            const std::string_view kind = t.cell(r, "spread_kind");
            if (kind == "credit") {
                row.spread_kind = SpreadKind::CreditSpread;
            } else if (!kind.empty() && kind != "cds") {
                throw ParseError(t.source(), r.line,
                                 "spread_kind must be cds or credit, got '" + std::string(kind) + "'");
            }
            try {
                ob.hazard_p = hazard_from_spread({ob.id, *spread, ob.recovery, row.spread_kind});
            } catch (const DomainError& e) {
                throw ParseError(t.source(), r.line, e.what());
            }
            row.from_spread = true;
        } else {
            throw ParseError(t.source(), r.line,
                             "obligor '" + ob.id + "' has neither hazard_p nor spread");
        }
        ob.recovery_floor = t.optional_number(r, "recovery_floor").value_or(r_bar_default);
        ob.exposure = t.optional_number(r, "exposure").value_or(kDefaultExposure);
        ob.loadings.obligor_id = ob.id;
        try {
            ob.validate();
        } catch (const Error& e) {
            throw ParseError(t.source(), r.line, "obligor '" + ob.id + "': " + e.what());
        }
        const std::string_view file = t.cell(r, "returns_file");
        if (!file.empty()) {
            row.returns_file = path.parent_path() / fs::path(std::string(file));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError(t.source(), 1, "portfolio has no obligors");
    }
    return rows;
}

Portfolio obligors_of(const std::vector<PortfolioRow>& rows)
{
    Portfolio p;
    p.reserve(rows.size());
    for (const auto& r : rows) p.push_back(r.obligor);
    return p;
}

std::vector<LoadingSet> load_loadings_csv(const fs::path& path)
{
    const CsvTable t(path);
    t.require({"obligor_id", "alpha", "alpha_q", "alpha_h"});
    std::vector<LoadingSet> out;
    for (const auto& r : t.rows()) {
        LoadingSet l;
        l.obligor_id = std::string(t.cell(r, "obligor_id"));
        l.alpha = t.number(r, "alpha");
        l.alpha_q = t.number(r, "alpha_q");
        l.alpha_h = t.number(r, "alpha_h");
        for (double a : {l.alpha, l.alpha_q, l.alpha_h}) {
            if (std::abs(a) >= 1.0) {
                throw ParseError(t.source(), r.line, "loading outside (-1, 1)");
            }
        }
        out.push_back(l);
    }
    return out;
}

void write_loadings_csv(const fs::path& path, const std::vector<LoadingSet>& loadings)
{
    std::string out = "obligor_id,alpha,alpha_q,alpha_h\n";
    for (const auto& l : loadings) {
        require_finite(l.alpha + l.alpha_q + l.alpha_h, "loading");
        out += l.obligor_id + "," + format_double(l.alpha) + "," + format_double(l.alpha_q) + "," +
               format_double(l.alpha_h) + "\n";
    }
    write_atomic(path, out);
}

void attach_loadings(Portfolio& portfolio, const std::vector<LoadingSet>& loadings)
{
    std::map<std::string, const LoadingSet*> by_id;
    for (const auto& l : loadings) by_id[l.obligor_id] = &l;
    for (auto& ob : portfolio) {
        const auto it = by_id.find(ob.id);
        if (it == by_id.end()) {
            throw DependencyError("no loadings for obligor '" + ob.id + "'; run estimate-loadings");
        }
        ob.loadings = *it->second;
    }
}

json to_json(const MixtureParams& m)
{
    return json{{"omega", m.omega},
                {"hectic", {{"mean", m.hectic.mean()}, {"std", m.hectic.std()}}},
                {"quiet", {{"mean", m.quiet.mean()}, {"std", m.quiet.std()}}}};
}

MixtureParams mixture_from_json(const json& j)
{
    try {
        MixtureParams m;
        m.omega = j.at("omega").get<double>();
        m.hectic = NormalParams(j.at("hectic").at("mean").get<double>(),
                                j.at("hectic").at("std").get<double>());
        m.quiet = NormalParams(j.at("quiet").at("mean").get<double>(),
                               j.at("quiet").at("std").get<double>());
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw ParseError("mixture", 0, e.what());
    }
}

json to_json(const MixtureFit& fit)
{
    json j = to_json(fit.params);
    j["loglik"] = fit.loglik;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["boundary_hit"] = fit.boundary_hit;
    const NormalParams u = fit.params.unconditional();
    j["unconditional"] = {{"mean", u.mean()}, {"std", u.std()}};
    return j;
}

MixtureParams load_mixture_json(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DependencyError("missing mixture file " + path.string() + "; run estimate-mixture");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path.string(), 0, e.what());
    }
    return mixture_from_json(j);
}

json to_json(const EvaluationReport& report)
{
    json models = json::array();
    for (const auto& m : report.models) {
        for (double x : {m.actual_loss, m.expected_loss, m.ae, m.mae, m.ratio}) {
            require_finite(x, "report field");
        }
        models.push_back({{"model", std::string(to_string(m.variant))},
                          {"actual_loss", m.actual_loss},
                          {"expected_loss", m.expected_loss},
                          {"expected_loss_stderr", m.expected_loss_stderr},
                          {"ae", m.ae},
                          {"abs_ae", m.abs_ae},
                          {"mae", m.mae},
                          {"ratio", m.ratio},
                          {"simulated_loss", m.simulated_loss},
                          {"simulated_loss_stderr", m.simulated_loss_stderr}});
    }
    return json{{"n_obligors", report.n_obligors},
                {"n_scenarios", report.n_scenarios},
                {"models", models}};
}

std::string report_csv(const EvaluationReport& report)
{
    std::string out = "model,actual_loss,expected_loss,ae,abs_ae,mae,ratio,expected_loss_stderr,"
                      "simulated_loss,simulated_loss_stderr\n";
    for (const auto& m : report.models) {
        out += std::string(to_string(m.variant));
        for (double x : {m.actual_loss, m.expected_loss, m.ae, m.abs_ae, m.mae, m.ratio,
                         m.expected_loss_stderr, m.simulated_loss, m.simulated_loss_stderr}) {
            require_finite(x, "report field");
            out += "," + format_double(x);
        }
        out += "\n";
    }
    return out;
}

std::string scenarios_csv(const ScenarioSet& scenarios)
{
    std::string out = "scenario,z,pi_hectic,regime\n";
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const Scenario s = scenarios[i];
        out += std::to_string(i) + "," + format_double(s.z) + "," + format_double(s.pi_hectic) +
               (s.hectic() ? ",hectic\n" : ",quiet\n");
    }
    return out;
}

std::string contribution_2d_csv(const ContributionTable& table)
{
    std::string out = "scenario,group,systematic,idiosyncratic\n";
    for (const auto& r : table.rows) {
        out += std::to_string(r.scenario) + "," + std::string(to_string(r.group)) + "," +
               format_double(r.systematic) + "," + format_double(r.idiosyncratic) + "\n";
    }
    return out;
}

std::string contribution_3d_csv(const ContributionTable& table)
{
    std::string out = "scenario,group,systematic,idiosyncratic,mean_latent\n";
    for (const auto& r : table.rows) {
        out += std::to_string(r.scenario) + "," + std::string(to_string(r.group)) + "," +
               format_double(r.systematic) + "," + format_double(r.idiosyncratic) + "," +
               format_double(r.mean_latent) + "\n";
    }
    return out;
}

void write_atomic(const fs::path& path, std::string_view content)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error("failed to write " + path.string());
        }
    }
    fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j)
{
    write_atomic(path, j.dump(2) + "\n");
}

} // namespace regcop::io
