#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leadcast/bdarma.hpp"
#include "leadcast/benchmark.hpp"
#include "leadcast/compositional.hpp"
#include "leadcast/inference.hpp"
#include "leadcast/ingest.hpp"
#include "leadcast/timeshift.hpp"
#include "leadcast/totals.hpp"

namespace leadcast {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

inline double mae(std::span<const double> forecast, std::span<const double> actual) {
    if (forecast.size() != actual.size()) throw ValidationError("mae: series are not aligned");
    if (forecast.empty()) throw ValidationError("mae: empty series");
    CompensatedSum acc;
    for (std::size_t i = 0; i < forecast.size(); ++i) acc.add(std::abs(forecast[i] - actual[i]));
    return acc.value() / static_cast<double>(forecast.size());
}

struct MapeResult {
    double percent = 0.0;
    std::size_t excluded = 0;  ///< points with a zero actual
};

/// 100 * mean(|f - a| / |a|) over points with a != 0.
inline MapeResult mape(std::span<const double> forecast, std::span<const double> actual) {
    if (forecast.size() != actual.size()) throw ValidationError("mape: series are not aligned");
    if (forecast.empty()) throw ValidationError("mape: empty series");
    CompensatedSum acc;
    MapeResult out;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        if (actual[i] == 0.0) {
            ++out.excluded;
            continue;
        }
        acc.add(std::abs(forecast[i] - actual[i]) / std::abs(actual[i]));
    }
    const std::size_t used = forecast.size() - out.excluded;
    if (used == 0) throw ValidationError("mape: every actual is zero");
    out.percent = 100.0 * acc.value() / static_cast<double>(used);
    return out;
}

struct LeadTimeL1 {
    std::vector<std::pair<MonthIndex, double>> per_month;
    double mean = 0.0;
};

/// Normalized L1 per booking month and its arithmetic mean. Both sides must cover the same months.
inline LeadTimeL1 leadtime_l1_by_month(const std::vector<LeadAllocation>& forecast, const std::vector<LeadAllocation>& actual) {
    std::map<MonthIndex, const Composition*> truth;
    for (const auto& a : actual) truth[a.booking_month] = &a.proportions;
    if (truth.size() != forecast.size()) throw ValidationError("leadtime_l1_by_month: month sets differ");
    std::map<MonthIndex, double> by_month;
    for (const auto& f : forecast) {
        const auto it = truth.find(f.booking_month);
        if (it == truth.end()) throw ValidationError("leadtime_l1_by_month: no actual for " + format_month(f.booking_month));
        by_month[f.booking_month] = normalized_l1(f.proportions, *it->second);
    }
    if (by_month.size() != forecast.size()) throw ValidationError("leadtime_l1_by_month: duplicate forecast months");
    LeadTimeL1 out;
    CompensatedSum acc;
    for (const auto& [m, d] : by_month) {
        out.per_month.emplace_back(m, d);
        acc.add(d);
    }
    if (!out.per_month.empty()) out.mean = acc.value() / static_cast<double>(out.per_month.size());
    return out;
}

/// Constant used by normalized_l1 (half the plain L1 sum), recorded in reports.
inline constexpr double kL1Normalization = 0.5;

struct MetricReport {
    double booking_mae = 0.0;   ///< monthly aggregates, bookings
    double booking_mape = 0.0;  ///< monthly aggregates, percent
    std::size_t booking_mape_excluded = 0;
    double daily_booking_mae = 0.0;
    double daily_booking_mape = 0.0;
    std::size_t daily_mape_excluded = 0;
    double trip_mae = 0.0;
    double trip_mape = 0.0;
    std::size_t trip_mape_excluded = 0;
    double leadtime_mean_norm_l1 = 0.0;
    std::vector<std::pair<MonthIndex, double>> per_month_l1;
};

// ---------------------------------------------------------------------------
// Backtest
// ---------------------------------------------------------------------------

struct BacktestConfig {
    std::string label = "synthetic";
    IngestOptions ingest;
    TotalsOptions totals;
    HolidayCalendar holidays;
    /// Order, covariates, structure and priors; num_components is set from the lead count.
    BdarmaSpec bdarma;
    FitOptions fit;
    int test_months = 12;
    bool parallel_buckets = false;
};

/// A method's forecasts over the test window.
struct MethodForecast {
    DailySeries daily_booking;
    MonthlyAxisSeries monthly_booking;
    std::vector<LeadAllocation> allocations;
    MonthlyAxisSeries trip;  ///< known reservations plus incremental forecast
};

struct BacktestResult {
    std::string label;
    Date split{};
    MonthIndex first_test_month = 0;
    int test_months = 0;
    MetricReport two_part;
    MetricReport bottom_up;

    // Fitted state, from the training window only.
    TotalsModel totals_model;
    BdarmaSpec bdarma_spec;  ///< with the trend anchored on the training window
    FitReport bdarma_fit;
    std::vector<TotalsModel> bucket_models;

    // Series behind the metrics.
    MonthlyAxisSeries actual_monthly_booking;
    std::vector<LeadAllocation> actual_allocations;
    MonthlyAxisSeries actual_trip;
    MethodForecast two_part_forecast;
    MethodForecast bottom_up_forecast;
};

/// The model inputs drawn from a dataset's monthly allocations over [first, last].
inline CompositionSeries composition_series(const Dataset& ds, MonthIndex first, MonthIndex last) {
    CompositionSeries out;
    for (const auto& a : ds.allocations) {
        if (a.booking_month < first || a.booking_month > last) continue;
        out.times.push_back(a.booking_month);
        out.values.push_back(a.proportions);
    }
    out.validate();
    return out;
}

namespace detail {

inline MonthlyAxisSeries to_monthly_axis(const std::vector<MonthlyTotal>& monthly, Axis axis) {
    MonthlyAxisSeries out;
    out.axis = axis;
    if (monthly.empty()) return out;
    out.first_month = monthly.front().month;
    for (const auto& m : monthly) {
        out.totals.push_back(m.total);
        out.partial.push_back(m.partial);
    }
    return out;
}

inline std::vector<double> window(const MonthlyAxisSeries& s, MonthIndex first, int months) {
    std::vector<double> out;
    for (int i = 0; i < months; ++i) out.push_back(s.at(first + i));
    return out;
}

inline MetricReport score(const MethodForecast& f, const BacktestResult& r, const DailySeries& actual_daily) {
    MetricReport m;
    const auto fb = window(f.monthly_booking, r.first_test_month, r.test_months);
    const auto ab = window(r.actual_monthly_booking, r.first_test_month, r.test_months);
    m.booking_mae = mae(fb, ab);
    const auto bm = mape(fb, ab);
    m.booking_mape = bm.percent;
    m.booking_mape_excluded = bm.excluded;

    m.daily_booking_mae = mae(f.daily_booking.values, actual_daily.values);
    const auto dm = mape(f.daily_booking.values, actual_daily.values);
    m.daily_booking_mape = dm.percent;
    m.daily_mape_excluded = dm.excluded;

    const auto ft = window(f.trip, r.first_test_month, r.test_months);
    const auto at = window(r.actual_trip, r.first_test_month, r.test_months);
    m.trip_mae = mae(ft, at);
    const auto tm = mape(ft, at);
    m.trip_mape = tm.percent;
    m.trip_mape_excluded = tm.excluded;

    const auto l1 = leadtime_l1_by_month(f.allocations, r.actual_allocations);
    m.leadtime_mean_norm_l1 = l1.mean;
    m.per_month_l1 = l1.per_month;
    return m;
}

}  // namespace detail

/**
 * Fits the two-part method and the bottom-up benchmark on bookings made before `split`
 * (the first day of a month) and scores both over the following test_months months.
 * Trip-axis forecasts add incremental bookings to reservations already made before the
 * split.
 */
inline BacktestResult run_backtest(const std::vector<BookingRecord>& records, Date split, const BacktestConfig& config) {
    config.ingest.validate();
    if (config.test_months <= 0) throw ValidationError("test_months must be positive");
    if (static_cast<unsigned>(std::chrono::year_month_day{split}.day()) != 1) {
        throw ValidationError("split must be the first day of a month");
    }
    const Dataset full = ingest_records(records, config.ingest);
    if (split <= full.totals.start || split >= full.totals.end()) {
        throw ValidationError("split " + format_date(split) + " lies outside the data range " + format_date(full.totals.start) +
                              " .. " + format_date(full.totals.end() - std::chrono::days{1}));
    }
    BacktestResult r;
    r.label = config.label;
    r.split = split;
    r.first_test_month = month_of(split);
    r.test_months = config.test_months;
    const MonthIndex last_test = r.first_test_month + config.test_months - 1;
    const Date test_end = first_day(last_test + 1);
    if (full.totals.end() < test_end) {
        throw ValidationError("data end before the end of the test window (" + format_month(last_test) + ")");
    }
    const auto test_days = static_cast<std::size_t>((test_end - split).count());

    // Only training rows reach any fit.
    const Dataset train = ingest_records(records_before(records, split), config.ingest);
    const MonthIndex cutoff = r.first_test_month - 1;

    BdarmaSpec spec = config.bdarma;
    spec.num_components = config.ingest.max_lead + 1;
    const auto train_series = composition_series(train, train.first_month(), cutoff);
    if (train_series.size() <= static_cast<std::size_t>(spec.max_lag()) + 1) {
        throw ValidationError("training window too short for B-DARMA order");
    }
    anchor_trend(spec.covariates, train_series.times);
    r.bdarma_spec = spec;

    // Part 1: booking-axis totals.
    r.totals_model = fit_totals(train.totals, config.holidays, config.totals);
    const auto totals_pred = predict_totals(r.totals_model, split, test_days);
    r.two_part_forecast.daily_booking = totals_pred.series;
    r.two_part_forecast.monthly_booking = detail::to_monthly_axis(aggregate_monthly(totals_pred.series), Axis::booking);

    // Part 2: lead-time compositions.
    const Eigen::MatrixXd x_train = design_matrix(spec.covariates, train_series.times);
    std::vector<MonthIndex> test_times;
    for (MonthIndex m = r.first_test_month; m <= last_test; ++m) test_times.push_back(m);
    const Eigen::MatrixXd x_test = design_matrix(spec.covariates, test_times);
    r.bdarma_fit = fit_map(spec, train_series, x_train, config.fit);
    for (const auto& step : forecast_compositions(r.bdarma_fit.map_params, spec, train_series, x_train, x_test)) {
        r.two_part_forecast.allocations.push_back({step.month, step.mean});
    }

    // Benchmark.
    BottomUpOptions bu_options;
    bu_options.totals = config.totals;
    bu_options.parallel = config.parallel_buckets;
    bu_options.epsilon = config.ingest.epsilon;
    r.bucket_models = fit_bottom_up(train.buckets, config.holidays, bu_options);
    auto bu = bottom_up_forecast(r.bucket_models, split, test_days, config.ingest.epsilon);
    r.bottom_up_forecast.daily_booking = bu.total;
    r.bottom_up_forecast.monthly_booking = detail::to_monthly_axis(aggregate_monthly(bu.total), Axis::booking);
    r.bottom_up_forecast.allocations = std::move(bu.allocations);

    // Trip axis: reservations made before the split are known.
    MonthlyAxisSeries known = train.trip_totals;
    known.as_of = cutoff;
    for (auto* f : {&r.two_part_forecast, &r.bottom_up_forecast}) {
        f->trip = blend_backfill(BookingForecast{f->monthly_booking, f->allocations}, known, cutoff);
    }

    // Actuals.
    r.actual_monthly_booking = detail::to_monthly_axis(aggregate_monthly(full.totals.slice(split, test_end)), Axis::booking);
    for (const auto& a : full.allocations) {
        if (a.booking_month >= r.first_test_month && a.booking_month <= last_test) r.actual_allocations.push_back(a);
    }
    r.actual_trip = full.trip_totals;
    const DailySeries actual_daily = full.totals.slice(split, test_end);

    r.two_part = detail::score(r.two_part_forecast, r, actual_daily);
    r.bottom_up = detail::score(r.bottom_up_forecast, r, actual_daily);
    return r;
}

}  // namespace leadcast
