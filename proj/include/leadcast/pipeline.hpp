#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "leadcast/benchmark.hpp"
#include "leadcast/csv.hpp"
#include "leadcast/datagen.hpp"
#include "leadcast/evaluation.hpp"
#include "leadcast/serialization.hpp"

namespace leadcast {

/// Everything one command invocation needs. Paths are empty when not given.
struct RunConfig {
    std::string input;     ///< booking CSV, or metrics.json for `report`
    std::string holidays;  ///< holiday CSV
    std::string out_dir = ".";
    std::string model_dir;  ///< `forecast`: reuse fitted models from here

    // Synthetic input when no CSV is given.
    std::string preset = "correlated";
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;  ///< `backtest` over several presets seeds
    std::string start;
    std::string end;

    std::string split = "2019-01-01";
    std::string label;
    int test_months = 12;
    int horizon = 12;

    IngestOptions ingest;
    TotalsOptions totals;
    BdarmaSpec bdarma;
    FitOptions fit;
    SamplerOptions sampler;
    bool intervals = false;
    double interval_lower = 0.05;
    double interval_upper = 0.95;

    std::string backfill;        ///< known reservations CSV (trip_month,total)
    std::string backfill_as_of;  ///< last booking month included in `backfill`
    bool parallel_buckets = false;

    void validate() const {
        ingest.validate();
        bdarma.validate();
        sampler.validate();
        if (horizon <= 0) throw ValidationError("horizon must be positive");
        if (test_months <= 0) throw ValidationError("test_months must be positive");
        if (!(interval_lower > 0.0 && interval_lower < interval_upper && interval_upper < 1.0)) {
            throw ValidationError("interval quantiles must satisfy 0 < lower < upper < 1");
        }
    }
};

inline LeadOverflow parse_overflow(const std::string& s) {
    if (s == "fold_into_last" || s == "fold") return LeadOverflow::fold_into_last;
    if (s == "drop") return LeadOverflow::drop;
    throw ValidationError("lead overflow policy must be 'fold_into_last' or 'drop', got '" + s + "'");
}

// ---------------------------------------------------------------------------
// Inputs
// ---------------------------------------------------------------------------

inline ScenarioConfig scenario_for(const RunConfig& cfg, std::uint64_t seed) {
    auto c = scenario_preset(cfg.preset, seed);
    if (!cfg.start.empty()) c.start = parse_date(cfg.start);
    if (!cfg.end.empty()) c.end = parse_date(cfg.end);
    c.max_lead = cfg.ingest.max_lead;
    c.composition.base_alr = geometric_lead_alr(c.max_lead, 0.1);
    c.validate();
    return c;
}

inline std::vector<BookingRecord> load_records(const RunConfig& cfg, std::uint64_t seed) {
    if (!cfg.input.empty()) return read_booking_csv(cfg.input);
    return generate(scenario_for(cfg, seed));
}

inline HolidayCalendar load_holidays(const RunConfig& cfg) {
    return cfg.holidays.empty() ? HolidayCalendar{} : read_holiday_csv(cfg.holidays);
}

/// Known reservations by trip month.
inline MonthlyAxisSeries read_known_reservations(const std::string& path) {
    std::map<MonthIndex, double> by_month;
    csv::read_file(path, {"trip_month", "total"}, [&](const std::vector<std::string_view>& f, std::size_t) {
        const MonthIndex m = parse_month(f[0]);
        const double v = parse_double(f[1]);
        if (!(v >= 0.0)) throw ValidationError("known reservations must be non-negative");
        if (!by_month.emplace(m, v).second) throw ValidationError("duplicate trip month " + format_month(m));
    });
    if (by_month.empty()) throw ValidationError(path + ": no rows");
    MonthlyAxisSeries out;
    out.axis = Axis::trip;
    out.first_month = by_month.begin()->first;
    for (MonthIndex m = out.first_month; m <= by_month.rbegin()->first; ++m) {
        const auto it = by_month.find(m);
        out.totals.push_back(it == by_month.end() ? 0.0 : it->second);
    }
    return out;
}

/// Last month fully covered by the daily series.
inline MonthIndex last_complete_month(const Dataset& ds) {
    const MonthIndex last = ds.last_month();
    return ds.totals.end() == first_day(last + 1) ? last : last - 1;
}

// ---------------------------------------------------------------------------
// Fitting and forecasting on all complete months
// ---------------------------------------------------------------------------

struct FittedModels {
    Dataset train;
    MonthIndex cutoff = 0;  ///< last training month
    CompositionSeries history;
    BdarmaSpec spec;
    FitReport bdarma;
    TotalsModel totals;
};

inline FittedModels fit_models(const std::vector<BookingRecord>& records, const RunConfig& cfg) {
    const Dataset full = ingest_records(records, cfg.ingest);
    FittedModels f;
    f.cutoff = last_complete_month(full);
    if (f.cutoff < full.first_month()) throw ValidationError("input covers no complete month");
    f.train = ingest_records(records_before(records, first_day(f.cutoff + 1)), cfg.ingest);
    f.spec = cfg.bdarma;
    f.spec.num_components = cfg.ingest.max_lead + 1;
    f.history = composition_series(f.train, f.train.first_month(), f.cutoff);
    if (f.history.size() <= static_cast<std::size_t>(f.spec.max_lag()) + 1) {
        throw ValidationError("too few complete months for the B-DARMA order");
    }
    anchor_trend(f.spec.covariates, f.history.times);
    f.bdarma = fit_map(f.spec, f.history, design_matrix(f.spec.covariates, f.history.times), cfg.fit);
    f.totals = fit_totals(f.train.totals, load_holidays(cfg), cfg.totals);
    if (cfg.intervals) {
        auto options = cfg.sampler;
        options.seed = cfg.seed;
        auto s = sample_posterior(f.spec, f.history, design_matrix(f.spec.covariates, f.history.times), f.bdarma.map_params,
                                  options);
        f.bdarma.samples = std::move(s.draws);
        f.bdarma.acceptance_rate = s.acceptance_rate;
        f.bdarma.low_acceptance = s.low_acceptance;
    }
    return f;
}

/// Linear-interpolation quantile of sorted values.
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw ValidationError("quantile of an empty sample");
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

struct AllocationBand {
    std::vector<double> lower;
    std::vector<double> upper;
};

struct ForecastOutput {
    DailySeries daily;
    MonthlyAxisSeries monthly;
    std::vector<LeadAllocation> allocations;
    std::vector<AllocationBand> bands;  ///< per allocation, empty without intervals
    MonthlyAxisSeries trip;
    std::optional<double> acceptance_rate;
};

inline Date horizon_end(MonthIndex cutoff, int horizon) { return first_day(cutoff + horizon + 1); }

/// Trip axis: known reservations plus incremental forecast when a backfill file is given.
inline MonthlyAxisSeries trip_axis(const RunConfig& cfg, const BookingForecast& fc, MonthIndex cutoff) {
    if (cfg.backfill.empty()) return shift_to_trip_axis(fc.totals, fc.allocations);
    auto known = read_known_reservations(cfg.backfill);
    known.as_of = cfg.backfill_as_of.empty() ? cutoff : parse_month(cfg.backfill_as_of);
    return blend_backfill(fc, known, cutoff);
}

inline ForecastOutput two_part_forecast(const FittedModels& f, const RunConfig& cfg) {
    ForecastOutput out;
    const Date from = first_day(f.cutoff + 1);
    const auto days = static_cast<std::size_t>((horizon_end(f.cutoff, cfg.horizon) - from).count());
    out.daily = predict_totals(f.totals, from, days).series;
    out.monthly = detail::to_monthly_axis(aggregate_monthly(out.daily), Axis::booking);

    std::vector<MonthIndex> future;
    for (int h = 1; h <= cfg.horizon; ++h) future.push_back(f.cutoff + h);
    const auto steps = forecast_compositions(f.bdarma.map_params, f.spec, f.history,
                                             design_matrix(f.spec.covariates, f.history.times),
                                             design_matrix(f.spec.covariates, future),
                                             cfg.intervals && f.bdarma.samples ? *f.bdarma.samples : std::vector<BdarmaParams>{});
    for (const auto& step : steps) {
        out.allocations.push_back({step.month, step.mean});
        if (step.samples.empty()) continue;
        AllocationBand band;
        for (std::size_t j = 0; j < step.mean.size(); ++j) {
            std::vector<double> v;
            v.reserve(step.samples.size());
            for (const auto& s : step.samples) v.push_back(s[j]);
            std::sort(v.begin(), v.end());
            band.lower.push_back(sorted_quantile(v, cfg.interval_lower));
            band.upper.push_back(sorted_quantile(v, cfg.interval_upper));
        }
        out.bands.push_back(std::move(band));
    }
    out.acceptance_rate = f.bdarma.acceptance_rate;
    out.trip = trip_axis(cfg, BookingForecast{out.monthly, out.allocations}, f.cutoff);
    return out;
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

namespace detail {

inline std::string out_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

inline std::string monthly_csv(const MonthlyAxisSeries& s, const char* month_column) {
    std::string out = std::string(month_column) + ",total,partial\n";
    for (MonthIndex m = s.first_month; !s.empty() && m <= s.last_month(); ++m) {
        out += format_month(m) + "," + format_double(s.at(m)) + "," + (s.is_partial(m) ? "true" : "false") + "\n";
    }
    return out;
}

inline std::string daily_csv(const DailySeries& s) {
    std::string out = "booking_date,total\n";
    for (std::size_t i = 0; i < s.size(); ++i) out += format_date(s.date(i)) + "," + format_double(s.values[i]) + "\n";
    return out;
}

inline std::string allocations_csv(const std::vector<LeadAllocation>& allocations, const std::vector<AllocationBand>& bands) {
    const bool with_bands = !bands.empty();
    std::string out = with_bands ? "booking_month,bucket,proportion,lower,upper\n" : "booking_month,bucket,proportion\n";
    for (std::size_t i = 0; i < allocations.size(); ++i) {
        const auto& a = allocations[i];
        for (std::size_t j = 0; j < a.proportions.size(); ++j) {
            out += format_month(a.booking_month) + "," + std::to_string(j) + "," + format_double(a.proportions[j]);
            if (with_bands) out += "," + format_double(bands[i].lower[j]) + "," + format_double(bands[i].upper[j]);
            out += "\n";
        }
    }
    return out;
}

inline void write_forecast(const RunConfig& cfg, const ForecastOutput& f) {
    csv::write_file(out_path(cfg, "forecast_daily.csv"), daily_csv(f.daily));
    csv::write_file(out_path(cfg, "forecast_booking.csv"), monthly_csv(f.monthly, "booking_month"));
    csv::write_file(out_path(cfg, "allocations.csv"), allocations_csv(f.allocations, f.bands));
    csv::write_file(out_path(cfg, "forecast_trip.csv"), monthly_csv(f.trip, "trip_month"));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Backtest reports
// ---------------------------------------------------------------------------

/// One backtest as JSON: metrics per method plus the series behind them.
inline json backtest_json(const BacktestResult& r) {
    const MonthIndex last = r.first_test_month + r.test_months - 1;
    json booking = json::array();
    json trip = json::array();
    for (MonthIndex m = r.first_test_month; m <= last; ++m) {
        booking.push_back({{"month", format_month(m)},
                           {"actual", r.actual_monthly_booking.at(m)},
                           {"two_part", r.two_part_forecast.monthly_booking.at(m)},
                           {"bottom_up", r.bottom_up_forecast.monthly_booking.at(m)}});
        trip.push_back({{"month", format_month(m)},
                        {"actual", r.actual_trip.at(m)},
                        {"two_part", r.two_part_forecast.trip.at(m)},
                        {"bottom_up", r.bottom_up_forecast.trip.at(m)}});
    }
    json allocations = json::array();
    for (std::size_t i = 0; i < r.actual_allocations.size(); ++i) {
        allocations.push_back({{"month", format_month(r.actual_allocations[i].booking_month)},
                               {"actual", r.actual_allocations[i].proportions.values()},
                               {"two_part", r.two_part_forecast.allocations[i].proportions.values()},
                               {"bottom_up", r.bottom_up_forecast.allocations[i].proportions.values()}});
    }
    return {{"label", r.label},
            {"split", format_date(r.split)},
            {"first_test_month", format_month(r.first_test_month)},
            {"test_months", r.test_months},
            {"l1_normalization", kL1Normalization},
            {"methods", {{"two_part", to_json(r.two_part)}, {"bottom_up", to_json(r.bottom_up)}}},
            {"bdarma",
             {{"converged", r.bdarma_fit.converged},
              {"iterations", r.bdarma_fit.iterations},
              {"gradient_max_norm", r.bdarma_fit.gradient_max_norm},
              {"log_phi", r.bdarma_fit.map_params.log_phi}}},
            {"series", {{"booking", std::move(booking)}, {"allocations", std::move(allocations)}, {"trip", std::move(trip)}}}};
}

inline json metrics_document(const std::vector<json>& runs) {
    json doc = {{"format", "leadcast.metrics"}, {"version", kDocumentVersion}, {"runs", json::array()}};
    for (const auto& r : runs) doc["runs"].push_back(r);
    return doc;
}

/// comparison.csv and plotdata_*.csv from a metrics document.
inline void render_report(const json& doc, const RunConfig& cfg) {
    detail::check_format(doc, "leadcast.metrics");
    static const char* const kMethods[] = {"two_part", "bottom_up"};
    std::string comparison = "label,method,booking_mae,booking_mape,leadtime_mean_norm_l1\n";
    std::string booking = "label,booking_month,actual,two_part,bottom_up\n";
    std::string trip = "label,trip_month,actual,two_part,bottom_up\n";
    std::string allocations = "label,booking_month,bucket,actual,two_part,bottom_up\n";
    std::string l1 = "label,booking_month,two_part,bottom_up\n";
    auto num = [](const json& v) { return format_double(v.get<double>()); };
    for (const auto& run : detail::require(doc, "runs")) {
        const auto label = detail::require(run, "label").get<std::string>();
        const auto& methods = detail::require(run, "methods");
        for (const char* name : kMethods) {
            const auto m = metric_report_from_json(detail::require(methods, name));
            comparison += label + "," + name + "," + format_double(m.booking_mae) + "," + format_double(m.booking_mape) + "," +
                          format_double(m.leadtime_mean_norm_l1) + "\n";
        }
        const auto tp = metric_report_from_json(methods.at("two_part"));
        const auto bu = metric_report_from_json(methods.at("bottom_up"));
        if (tp.per_month_l1.size() != bu.per_month_l1.size()) throw ValidationError("per-month L1 lists differ in length");
        for (std::size_t i = 0; i < tp.per_month_l1.size(); ++i) {
            l1 += label + "," + format_month(tp.per_month_l1[i].first) + "," + format_double(tp.per_month_l1[i].second) + "," +
                  format_double(bu.per_month_l1[i].second) + "\n";
        }
        const auto& series = detail::require(run, "series");
        for (const auto& row : detail::require(series, "booking")) {
            booking += label + "," + row.at("month").get<std::string>() + "," + num(row.at("actual")) + "," +
                       num(row.at("two_part")) + "," + num(row.at("bottom_up")) + "\n";
        }
        for (const auto& row : detail::require(series, "trip")) {
            trip += label + "," + row.at("month").get<std::string>() + "," + num(row.at("actual")) + "," +
                    num(row.at("two_part")) + "," + num(row.at("bottom_up")) + "\n";
        }
        for (const auto& row : detail::require(series, "allocations")) {
            const auto& a = row.at("actual");
            for (std::size_t j = 0; j < a.size(); ++j) {
                allocations += label + "," + row.at("month").get<std::string>() + "," + std::to_string(j) + "," + num(a[j]) +
                               "," + num(row.at("two_part")[j]) + "," + num(row.at("bottom_up")[j]) + "\n";
            }
        }
    }
    csv::write_file(detail::out_path(cfg, "comparison.csv"), comparison);
    csv::write_file(detail::out_path(cfg, "plotdata_booking.csv"), booking);
    csv::write_file(detail::out_path(cfg, "plotdata_trip.csv"), trip);
    csv::write_file(detail::out_path(cfg, "plotdata_allocations.csv"), allocations);
    csv::write_file(detail::out_path(cfg, "plotdata_l1.csv"), l1);
}

inline BacktestConfig backtest_config(const RunConfig& cfg) {
    BacktestConfig b;
    b.ingest = cfg.ingest;
    b.totals = cfg.totals;
    b.holidays = load_holidays(cfg);
    b.bdarma = cfg.bdarma;
    b.fit = cfg.fit;
    b.test_months = cfg.test_months;
    b.parallel_buckets = cfg.parallel_buckets;
    return b;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline void command_simulate(const RunConfig& cfg) {
    cfg.validate();
    const auto scenario = scenario_for(cfg, cfg.seed);
    csv::write_file(detail::out_path(cfg, "bookings.csv"), booking_records_csv(generate(scenario)));
    csv::write_file(detail::out_path(cfg, "latent_allocations.csv"), detail::allocations_csv(latent_compositions(scenario), {}));
}

inline void command_fit(const RunConfig& cfg) {
    cfg.validate();
    const auto f = fit_models(load_records(cfg, cfg.seed), cfg);
    csv::write_file(detail::out_path(cfg, "bdarma.json"), dump(bdarma_document(f.spec, f.bdarma)));
    csv::write_file(detail::out_path(cfg, "totals.json"), dump(totals_document(f.totals)));
}

inline ForecastOutput command_forecast(const RunConfig& cfg) {
    cfg.validate();
    const auto records = load_records(cfg, cfg.seed);
    FittedModels f;
    if (cfg.model_dir.empty()) {
        f = fit_models(records, cfg);
    } else {
        const auto dir = std::filesystem::path(cfg.model_dir);
        auto doc = bdarma_from_document(read_json_file((dir / "bdarma.json").string()));
        f.spec = std::move(doc.spec);
        f.bdarma = std::move(doc.fit);
        f.totals = totals_from_document(read_json_file((dir / "totals.json").string()));
        if (f.spec.num_components != cfg.ingest.max_lead + 1) throw ValidationError("saved model has a different lead count");
        const Dataset full = ingest_records(records, cfg.ingest);
        f.cutoff = last_complete_month(full);
        f.train = ingest_records(records_before(records, first_day(f.cutoff + 1)), cfg.ingest);
        f.history = composition_series(f.train, f.train.first_month(), f.cutoff);
        if (cfg.intervals && !f.bdarma.samples) throw ValidationError("saved model has no posterior draws; refit with --intervals");
    }
    auto out = two_part_forecast(f, cfg);
    detail::write_forecast(cfg, out);
    return out;
}

inline ForecastOutput command_benchmark(const RunConfig& cfg) {
    cfg.validate();
    const auto records = load_records(cfg, cfg.seed);
    const MonthIndex cutoff = last_complete_month(ingest_records(records, cfg.ingest));
    const Dataset train = ingest_records(records_before(records, first_day(cutoff + 1)), cfg.ingest);
    BottomUpOptions options;
    options.totals = cfg.totals;
    options.parallel = cfg.parallel_buckets;
    options.epsilon = cfg.ingest.epsilon;
    const auto models = fit_bottom_up(train.buckets, load_holidays(cfg), options);
    const Date from = first_day(cutoff + 1);
    auto bu = bottom_up_forecast(models, from, static_cast<std::size_t>((horizon_end(cutoff, cfg.horizon) - from).count()),
                                 cfg.ingest.epsilon);
    ForecastOutput out;
    out.daily = bu.total;
    out.monthly = detail::to_monthly_axis(aggregate_monthly(bu.total), Axis::booking);
    out.allocations = std::move(bu.allocations);
    out.trip = trip_axis(cfg, BookingForecast{out.monthly, out.allocations}, cutoff);
    detail::write_forecast(cfg, out);
    json docs = json::array();
    for (const auto& m : models) docs.push_back(totals_document(m));
    csv::write_file(detail::out_path(cfg, "bucket_models.json"), dump(docs));
    return out;
}

inline json command_backtest(const RunConfig& cfg) {
    cfg.validate();
    const Date split = parse_date(cfg.split);
    const auto config = backtest_config(cfg);
    std::vector<std::uint64_t> seeds = cfg.seeds.empty() ? std::vector<std::uint64_t>{cfg.seed} : cfg.seeds;
    if (!cfg.input.empty()) seeds = {cfg.seed};
    std::vector<json> runs;
    for (const auto seed : seeds) {
        auto c = config;
        if (!cfg.label.empty() && seeds.size() == 1) {
            c.label = cfg.label;
        } else if (!cfg.input.empty()) {
            c.label = std::filesystem::path(cfg.input).stem().string();
        } else {
            c.label = (cfg.label.empty() ? cfg.preset : cfg.label) + "-seed" + std::to_string(seed);
        }
        runs.push_back(backtest_json(run_backtest(load_records(cfg, seed), split, c)));
    }
    const auto doc = metrics_document(runs);
    csv::write_file(detail::out_path(cfg, "metrics.json"), dump(doc));
    render_report(doc, cfg);
    return doc;
}

inline void command_report(const RunConfig& cfg) {
    if (cfg.input.empty()) throw ValidationError("report needs --input metrics.json");
    render_report(read_json_file(cfg.input), cfg);
}

}  // namespace leadcast
