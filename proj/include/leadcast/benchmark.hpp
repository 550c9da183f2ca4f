#pragma once

#include <future>
#include <map>
#include <numbers>
#include <vector>

#include "leadcast/compositional.hpp"
#include "leadcast/ingest.hpp"
#include "leadcast/timeshift.hpp"
#include "leadcast/totals.hpp"

namespace leadcast {

struct BottomUpOptions {
    TotalsOptions totals;
    bool parallel = false;  ///< fit buckets on separate threads; results do not depend on it
    double epsilon = 1e-6;  ///< floor for emitted allocation shares
};

/// One independently fitted additive model per lead bucket, with identical options.
inline std::vector<TotalsModel> fit_bottom_up(const std::vector<BucketSeries>& buckets, const HolidayCalendar& holidays,
                                              const BottomUpOptions& options = {}) {
    if (buckets.empty()) throw ValidationError("fit_bottom_up: no buckets");
    for (std::size_t b = 0; b < buckets.size(); ++b) {
        if (buckets[b].bucket != static_cast<int>(b)) throw ValidationError("buckets must be ordered 0..L");
        if (buckets[b].series.start != buckets[0].series.start || buckets[b].series.size() != buckets[0].series.size()) {
            throw ValidationError("bucket " + std::to_string(b) + " covers a different date range");
        }
    }
    std::vector<TotalsModel> models(buckets.size());
    if (options.parallel) {
        std::vector<std::future<TotalsModel>> jobs;
        jobs.reserve(buckets.size());
        for (const auto& b : buckets) {
            jobs.push_back(std::async(std::launch::async, [&b, &holidays, &options] {
                return fit_totals(b.series, holidays, options.totals);
            }));
        }
        for (std::size_t b = 0; b < jobs.size(); ++b) models[b] = jobs[b].get();
    } else {
        for (std::size_t b = 0; b < buckets.size(); ++b) models[b] = fit_totals(buckets[b].series, holidays, options.totals);
    }
    return models;
}

struct BottomUpForecast {
    DailySeries total;                     ///< per-date sum over buckets
    std::vector<DailySeries> per_bucket;   ///< floored bucket forecasts
    std::vector<LeadAllocation> allocations;
    std::vector<MonthIndex> degenerate_months;  ///< grand total <= 0, uniform allocation emitted
};

namespace detail {

inline void allocations_from_monthly(const std::vector<std::vector<MonthlyTotal>>& per_bucket, double epsilon,
                                     BottomUpForecast& out) {
    const std::size_t parts = per_bucket.size();
    for (std::size_t m = 0; m < per_bucket[0].size(); ++m) {
        std::vector<double> sums(parts);
        CompensatedSum grand;
        for (std::size_t b = 0; b < parts; ++b) {
            sums[b] = per_bucket[b][m].total;
            grand.add(sums[b]);
        }
        const MonthIndex month = per_bucket[0][m].month;
        if (grand.value() > 0.0) {
            out.allocations.push_back({month, Composition::from_weights(sums, epsilon)});
        } else {
            out.allocations.push_back({month, Composition::uniform(parts)});
            out.degenerate_months.push_back(month);
        }
    }
}

}  // namespace detail

/// Bucket forecasts over `days` dates from `start`: summed for totals, and per calendar
/// month normalized into lead allocations.
inline BottomUpForecast bottom_up_forecast(const std::vector<TotalsModel>& models, Date start, std::size_t days,
                                           double epsilon = 1e-6) {
    if (models.empty()) throw ValidationError("bottom_up_forecast: no models");
    BottomUpForecast out;
    out.total.start = start;
    out.total.values.assign(days, 0.0);
    std::vector<CompensatedSum> acc(days);
    std::vector<std::vector<MonthlyTotal>> monthly;
    for (const auto& model : models) {
        auto pred = predict_totals(model, start, days);
        for (std::size_t i = 0; i < days; ++i) acc[i].add(pred.series.values[i]);
        monthly.push_back(aggregate_monthly(pred.series));
        out.per_bucket.push_back(std::move(pred.series));
    }
    for (std::size_t i = 0; i < days; ++i) out.total.values[i] = acc[i].value();
    if (days > 0) detail::allocations_from_monthly(monthly, epsilon, out);
    return out;
}

// ---------------------------------------------------------------------------
// Monthly-granularity variant: buckets are fitted on complete-month sums.
// ---------------------------------------------------------------------------

struct MonthlyBucketModel {
    MonthIndex origin = 0;
    double intercept = 0.0;
    double slope = 0.0;              ///< per month
    std::vector<double> annual;      ///< sin1, cos1, ... with period 12 months
};

inline double evaluate(const MonthlyBucketModel& model, MonthIndex m) {
    double v = model.intercept + model.slope * (m - model.origin);
    for (std::size_t k = 0; k < model.annual.size() / 2; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k + 1) * m / 12.0;
        v += model.annual[2 * k] * std::sin(angle) + model.annual[2 * k + 1] * std::cos(angle);
    }
    return v;
}

/// Ridge fits of each bucket's complete-month totals on [1, t, annual Fourier (K <= 6)].
inline std::vector<MonthlyBucketModel> fit_bottom_up_monthly(const std::vector<BucketSeries>& buckets, int harmonics = 2,
                                                             double ridge_lambda = 1.0) {
    if (buckets.empty()) throw ValidationError("fit_bottom_up_monthly: no buckets");
    if (harmonics < 0 || harmonics > 6) throw ValidationError("monthly harmonics must lie in 0..6");
    std::vector<MonthlyBucketModel> out;
    for (const auto& b : buckets) {
        std::vector<MonthlyTotal> months;
        for (const auto& m : aggregate_monthly(b.series)) {
            if (!m.partial) months.push_back(m);
        }
        if (months.empty()) throw ValidationError("bucket " + std::to_string(b.bucket) + " has no complete month");
        const auto n = static_cast<Eigen::Index>(months.size());
        Eigen::MatrixXd x(n, 1 + 2 * harmonics);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const MonthIndex m = months[static_cast<std::size_t>(i)].month;
            x(i, 0) = m - months.front().month;
            for (int k = 1; k <= harmonics; ++k) {
                const double angle = 2.0 * std::numbers::pi * k * m / 12.0;
                x(i, 2 * k - 1) = std::sin(angle);
                x(i, 2 * k) = std::cos(angle);
            }
            y(i) = months[static_cast<std::size_t>(i)].total;
        }
        const auto sol = detail::ridge_fit(x, y, ridge_lambda);
        MonthlyBucketModel model;
        model.origin = months.front().month;
        model.intercept = sol.intercept;
        model.slope = sol.coef(0);
        model.annual.assign(sol.coef.data() + 1, sol.coef.data() + sol.coef.size());
        out.push_back(std::move(model));
    }
    return out;
}

struct BottomUpMonthlyForecast {
    MonthlyAxisSeries totals;
    std::vector<LeadAllocation> allocations;
    std::vector<MonthIndex> degenerate_months;
};

inline BottomUpMonthlyForecast bottom_up_forecast_monthly(const std::vector<MonthlyBucketModel>& models, MonthIndex first,
                                                          int months, double epsilon = 1e-6) {
    if (models.empty() || months <= 0) throw ValidationError("bottom_up_forecast_monthly: nothing to forecast");
    BottomUpMonthlyForecast out;
    out.totals.axis = Axis::booking;
    out.totals.first_month = first;
    std::vector<std::vector<MonthlyTotal>> per_bucket(models.size());
    for (std::size_t b = 0; b < models.size(); ++b) {
        for (int i = 0; i < months; ++i) {
            const double v = evaluate(models[b], first + i);
            per_bucket[b].push_back({first + i, v < 0.0 ? 0.0 : v, false});
        }
    }
    for (int i = 0; i < months; ++i) {
        CompensatedSum s;
        for (const auto& pb : per_bucket) s.add(pb[static_cast<std::size_t>(i)].total);
        out.totals.totals.push_back(s.value());
    }
    BottomUpForecast tmp;
    detail::allocations_from_monthly(per_bucket, epsilon, tmp);
    out.allocations = std::move(tmp.allocations);
    out.degenerate_months = std::move(tmp.degenerate_months);
    return out;
}

}  // namespace leadcast
