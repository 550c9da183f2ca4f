#pragma once

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

#include "leadcast/bdarma.hpp"
#include "leadcast/evaluation.hpp"
#include "leadcast/inference.hpp"
#include "leadcast/totals.hpp"

namespace leadcast {

using json = nlohmann::ordered_json;

inline constexpr int kDocumentVersion = 1;

namespace detail {

inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) throw ValidationError(what + ": expected " + std::to_string(rows) + " rows");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ValidationError(what + ": expected " + std::to_string(cols) + " columns");
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

inline const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline void check_format(const json& doc, const std::string& format) {
    if (require(doc, "format").get<std::string>() != format) throw ValidationError("expected a '" + format + "' document");
    if (require(doc, "version").get<int>() != kDocumentVersion) throw ValidationError("unsupported document version");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// B-DARMA spec and parameters
// ---------------------------------------------------------------------------

inline json to_json(const CovariateSpec& c) {
    json events = json::array();
    for (const auto& e : c.events) {
        json months = json::array();
        for (MonthIndex m : e.months) months.push_back(format_month(m));
        events.push_back({{"name", e.name}, {"months", std::move(months)}});
    }
    return {{"include_intercept", c.include_intercept},
            {"include_linear_trend", c.include_linear_trend},
            {"fourier_period", c.fourier_period},
            {"fourier_harmonics", c.fourier_harmonics},
            {"events", std::move(events)},
            {"trend_origin", format_month(c.trend_origin)},
            {"trend_scale", c.trend_scale}};
}

inline CovariateSpec covariates_from_json(const json& j) {
    CovariateSpec c;
    c.include_intercept = detail::require(j, "include_intercept").get<bool>();
    c.include_linear_trend = detail::require(j, "include_linear_trend").get<bool>();
    c.fourier_period = detail::require(j, "fourier_period").get<double>();
    c.fourier_harmonics = detail::require(j, "fourier_harmonics").get<int>();
    for (const auto& e : detail::require(j, "events")) {
        EventIndicator ev;
        ev.name = detail::require(e, "name").get<std::string>();
        for (const auto& m : detail::require(e, "months")) ev.months.insert(parse_month(m.get<std::string>()));
        c.events.push_back(std::move(ev));
    }
    c.trend_origin = parse_month(detail::require(j, "trend_origin").get<std::string>());
    c.trend_scale = detail::require(j, "trend_scale").get<double>();
    c.validate();
    return c;
}

inline json to_json(const BdarmaSpec& s) {
    return {{"p", s.p},
            {"q", s.q},
            {"num_components", s.num_components},
            {"ar_structure", s.ar_structure == ArStructure::diagonal ? "diagonal" : "full"},
            {"covariates", to_json(s.covariates)},
            {"priors",
             {{"coefficient_scale", s.priors.coefficient_scale},
              {"intercept_scale", s.priors.intercept_scale},
              {"log_phi_mean", s.priors.log_phi_mean},
              {"log_phi_scale", s.priors.log_phi_scale}}}};
}

inline ArStructure parse_ar_structure(const std::string& s) {
    if (s == "diagonal") return ArStructure::diagonal;
    if (s == "full") return ArStructure::full;
    throw ValidationError("ar_structure must be 'diagonal' or 'full', got '" + s + "'");
}

inline BdarmaSpec bdarma_spec_from_json(const json& j) {
    BdarmaSpec s;
    s.p = detail::require(j, "p").get<int>();
    s.q = detail::require(j, "q").get<int>();
    s.num_components = detail::require(j, "num_components").get<int>();
    s.ar_structure = parse_ar_structure(detail::require(j, "ar_structure").get<std::string>());
    s.covariates = covariates_from_json(detail::require(j, "covariates"));
    const auto& pr = detail::require(j, "priors");
    s.priors.coefficient_scale = detail::require(pr, "coefficient_scale").get<double>();
    s.priors.intercept_scale = detail::require(pr, "intercept_scale").get<double>();
    s.priors.log_phi_mean = detail::require(pr, "log_phi_mean").get<double>();
    s.priors.log_phi_scale = detail::require(pr, "log_phi_scale").get<double>();
    s.validate();
    return s;
}

inline json to_json(const BdarmaParams& p) {
    json ar = json::array();
    for (const auto& a : p.ar) ar.push_back(detail::matrix_to_json(a));
    json ma = json::array();
    for (const auto& b : p.ma) ma.push_back(detail::matrix_to_json(b));
    return {{"ar", std::move(ar)}, {"ma", std::move(ma)}, {"beta", detail::matrix_to_json(p.beta)}, {"log_phi", p.log_phi}};
}

inline BdarmaParams bdarma_params_from_json(const json& j, const BdarmaSpec& spec) {
    const auto d = spec.alr_dim();
    const auto m = static_cast<Eigen::Index>(spec.covariates.num_columns());
    BdarmaParams p;
    const auto& ar = detail::require(j, "ar");
    const auto& ma = detail::require(j, "ma");
    if (ar.size() != static_cast<std::size_t>(spec.p) || ma.size() != static_cast<std::size_t>(spec.q)) {
        throw ValidationError("parameter document does not match model order");
    }
    for (const auto& a : ar) p.ar.push_back(detail::matrix_from_json(a, d, d, "ar"));
    for (const auto& b : ma) p.ma.push_back(detail::matrix_from_json(b, d, d, "ma"));
    p.beta = detail::matrix_from_json(detail::require(j, "beta"), d, m, "beta");
    p.log_phi = detail::require(j, "log_phi").get<double>();
    check_params(p, spec, m);
    return p;
}

/// Self-describing model document: spec, design column order, parameters and fit diagnostics.
inline json bdarma_document(const BdarmaSpec& spec, const FitReport& fit) {
    json columns = json::array();
    for (const auto& c : design_column_names(spec.covariates)) columns.push_back(c);
    json diag = {{"initial_log_posterior", fit.initial_log_posterior},
                 {"final_log_posterior", fit.final_log_posterior},
                 {"gradient_max_norm", fit.gradient_max_norm},
                 {"iterations", fit.iterations},
                 {"converged", fit.converged},
                 {"low_acceptance", fit.low_acceptance}};
    diag["acceptance_rate"] = fit.acceptance_rate ? json(*fit.acceptance_rate) : json(nullptr);
    json doc = {{"format", "leadcast.bdarma"},
                {"version", kDocumentVersion},
                {"spec", to_json(spec)},
                {"design_columns", std::move(columns)},
                {"params", to_json(fit.map_params)},
                {"diagnostics", std::move(diag)}};
    if (fit.samples) {
        json samples = json::array();
        for (const auto& s : *fit.samples) samples.push_back(to_json(s));
        doc["samples"] = std::move(samples);
    }
    return doc;
}

struct BdarmaDocument {
    BdarmaSpec spec;
    FitReport fit;
};

inline BdarmaDocument bdarma_from_document(const json& doc) {
    detail::check_format(doc, "leadcast.bdarma");
    BdarmaDocument out;
    out.spec = bdarma_spec_from_json(detail::require(doc, "spec"));
    json expected = json::array();
    for (const auto& c : design_column_names(out.spec.covariates)) expected.push_back(c);
    if (detail::require(doc, "design_columns") != expected) throw ValidationError("design column order does not match spec");
    out.fit.map_params = bdarma_params_from_json(detail::require(doc, "params"), out.spec);
    const auto& diag = detail::require(doc, "diagnostics");
    out.fit.initial_log_posterior = detail::require(diag, "initial_log_posterior").get<double>();
    out.fit.final_log_posterior = detail::require(diag, "final_log_posterior").get<double>();
    out.fit.gradient_max_norm = detail::require(diag, "gradient_max_norm").get<double>();
    out.fit.iterations = detail::require(diag, "iterations").get<int>();
    out.fit.converged = detail::require(diag, "converged").get<bool>();
    out.fit.low_acceptance = detail::require(diag, "low_acceptance").get<bool>();
    if (!detail::require(diag, "acceptance_rate").is_null()) out.fit.acceptance_rate = diag.at("acceptance_rate").get<double>();
    if (doc.contains("samples")) {
        std::vector<BdarmaParams> samples;
        for (const auto& s : doc.at("samples")) samples.push_back(bdarma_params_from_json(s, out.spec));
        out.fit.samples = std::move(samples);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Totals model
// ---------------------------------------------------------------------------

/// Coefficients only; training residuals are not stored.
inline json totals_document(const TotalsModel& m) {
    json effects = json::object();
    for (const auto& [name, v] : m.holiday_effects) effects[name] = v;
    json dates = json::object();
    for (const auto& [name, set] : m.holiday_dates) {
        json list = json::array();
        for (const auto& d : set) list.push_back(format_date(d));
        dates[name] = std::move(list);
    }
    return {{"format", "leadcast.totals"},
            {"version", kDocumentVersion},
            {"origin", format_date(m.origin)},
            {"trend_intercept", m.trend_intercept},
            {"trend_slope", m.trend_slope},
            {"weekly_fourier", m.weekly_fourier},
            {"annual_fourier", m.annual_fourier},
            {"holiday_effects", std::move(effects)},
            {"holiday_dates", std::move(dates)},
            {"ridge_lambda", m.ridge_lambda},
            {"short_history", m.short_history}};
}

inline TotalsModel totals_from_document(const json& doc) {
    detail::check_format(doc, "leadcast.totals");
    TotalsModel m;
    m.origin = parse_date(detail::require(doc, "origin").get<std::string>());
    m.trend_intercept = detail::require(doc, "trend_intercept").get<double>();
    m.trend_slope = detail::require(doc, "trend_slope").get<double>();
    m.weekly_fourier = detail::require(doc, "weekly_fourier").get<std::vector<double>>();
    m.annual_fourier = detail::require(doc, "annual_fourier").get<std::vector<double>>();
    if (m.weekly_fourier.size() % 2 || m.annual_fourier.size() % 2) throw ValidationError("Fourier coefficients come in pairs");
    for (const auto& [name, v] : detail::require(doc, "holiday_effects").items()) m.holiday_effects[name] = v.get<double>();
    for (const auto& [name, list] : detail::require(doc, "holiday_dates").items()) {
        for (const auto& d : list) m.holiday_dates[name].insert(parse_date(d.get<std::string>()));
    }
    m.ridge_lambda = detail::require(doc, "ridge_lambda").get<double>();
    m.short_history = detail::require(doc, "short_history").get<bool>();
    return m;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

inline json to_json(const MetricReport& r) {
    json per_month = json::array();
    for (const auto& [m, d] : r.per_month_l1) per_month.push_back({{"month", format_month(m)}, {"l1", d}});
    return {{"booking_mae", r.booking_mae},
            {"booking_mape", r.booking_mape},
            {"booking_mape_excluded", r.booking_mape_excluded},
            {"trip_mae", r.trip_mae},
            {"trip_mape", r.trip_mape},
            {"trip_mape_excluded", r.trip_mape_excluded},
            {"leadtime_mean_norm_l1", r.leadtime_mean_norm_l1},
            {"per_month_l1", std::move(per_month)},
            {"daily_booking_mae", r.daily_booking_mae},
            {"daily_booking_mape", r.daily_booking_mape},
            {"daily_mape_excluded", r.daily_mape_excluded}};
}

inline MetricReport metric_report_from_json(const json& j) {
    MetricReport r;
    r.booking_mae = detail::require(j, "booking_mae").get<double>();
    r.booking_mape = detail::require(j, "booking_mape").get<double>();
    r.booking_mape_excluded = detail::require(j, "booking_mape_excluded").get<std::size_t>();
    r.trip_mae = detail::require(j, "trip_mae").get<double>();
    r.trip_mape = detail::require(j, "trip_mape").get<double>();
    r.trip_mape_excluded = detail::require(j, "trip_mape_excluded").get<std::size_t>();
    r.leadtime_mean_norm_l1 = detail::require(j, "leadtime_mean_norm_l1").get<double>();
    for (const auto& e : detail::require(j, "per_month_l1")) {
        r.per_month_l1.emplace_back(parse_month(detail::require(e, "month").get<std::string>()), detail::require(e, "l1").get<double>());
    }
    r.daily_booking_mae = detail::require(j, "daily_booking_mae").get<double>();
    r.daily_booking_mape = detail::require(j, "daily_booking_mape").get<double>();
    r.daily_mape_excluded = detail::require(j, "daily_mape_excluded").get<std::size_t>();
    return r;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

/// Two-space indented JSON with a trailing newline.
inline std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

}  // namespace leadcast
