#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "leadcast/dates.hpp"
#include "leadcast/numeric.hpp"

namespace leadcast {

/// Daily values on a gap-free run of dates starting at `start`.
struct DailySeries {
    Date start{};
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] bool empty() const noexcept { return values.empty(); }
    [[nodiscard]] Date date(std::size_t i) const { return start + std::chrono::days{static_cast<long>(i)}; }
    /// One past the last date.
    [[nodiscard]] Date end() const { return date(values.size()); }

    /// Dates in [from, to).
    [[nodiscard]] DailySeries slice(Date from, Date to) const {
        DailySeries out;
        const auto lo = std::max(from, start);
        const auto hi = std::min(to, end());
        out.start = lo;
        if (hi <= lo) return out;
        const auto a = static_cast<long>((lo - start).count());
        const auto b = static_cast<long>((hi - start).count());
        out.values.assign(values.begin() + a, values.begin() + b);
        return out;
    }
};

struct Holiday {
    std::string name;
    Date date{};
};

using HolidayCalendar = std::vector<Holiday>;

struct TotalsOptions {
    int weekly_harmonics = 3;
    int annual_harmonics = 10;
    double ridge_lambda = 1.0;  ///< on standardized columns; intercept unpenalized
};

inline constexpr double kWeeklyPeriod = 7.0;
inline constexpr double kAnnualPeriod = 365.25;

/**
 * Additive daily model: linear trend, weekly and annual Fourier terms, and one
 * additive effect per named holiday. Coefficients are in raw (unstandardized) units.
 */
struct TotalsModel {
    Date origin{};  ///< trend is counted in days from here
    double trend_intercept = 0.0;
    double trend_slope = 0.0;
    std::vector<double> weekly_fourier;  ///< sin1, cos1, sin2, cos2, ...
    std::vector<double> annual_fourier;
    std::map<std::string, double> holiday_effects;
    std::map<std::string, std::set<Date>> holiday_dates;
    double ridge_lambda = 1.0;
    bool short_history = false;  ///< fewer than two years of training data
    /// y - fitted on the training window, from the same evaluation path as prediction.
    std::vector<double> training_residuals;

    [[nodiscard]] double evaluate(Date d) const {
        const double t = static_cast<double>((d - origin).count());
        double v = trend_intercept + trend_slope * t;
        const double day = static_cast<double>(day_number(d));
        for (std::size_t k = 0; k < weekly_fourier.size() / 2; ++k) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(k + 1) * day / kWeeklyPeriod;
            v += weekly_fourier[2 * k] * std::sin(angle) + weekly_fourier[2 * k + 1] * std::cos(angle);
        }
        for (std::size_t k = 0; k < annual_fourier.size() / 2; ++k) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(k + 1) * day / kAnnualPeriod;
            v += annual_fourier[2 * k] * std::sin(angle) + annual_fourier[2 * k + 1] * std::cos(angle);
        }
        for (const auto& [name, effect] : holiday_effects) {
            const auto it = holiday_dates.find(name);
            if (it != holiday_dates.end() && it->second.count(d)) v += effect;
        }
        return v;
    }
};

namespace detail {

struct RidgeSolution {
    double intercept = 0.0;
    Eigen::VectorXd coef;  ///< raw units; zero for constant columns
};

/// Ridge regression with an unpenalized intercept, on columns standardized to unit
/// (population) variance. Constant columns are left out and get a zero coefficient.
inline RidgeSolution ridge_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
    const Eigen::Index n = x.rows();
    const Eigen::Index m = x.cols();
    RidgeSolution out;
    out.coef = Eigen::VectorXd::Zero(m);
    const double y_mean = y.mean();
    std::vector<Eigen::Index> kept;
    Eigen::VectorXd mean(m);
    Eigen::VectorXd sd(m);
    for (Eigen::Index c = 0; c < m; ++c) {
        mean(c) = x.col(c).mean();
        sd(c) = std::sqrt((x.col(c).array() - mean(c)).square().sum() / static_cast<double>(n));
        if (sd(c) > 1e-12 * std::max(1.0, std::abs(mean(c)))) kept.push_back(c);
    }
    out.intercept = y_mean;
    if (kept.empty()) return out;
    Eigen::MatrixXd z(n, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) {
        const auto c = kept[k];
        z.col(static_cast<Eigen::Index>(k)) = (x.col(c).array() - mean(c)) / sd(c);
    }
    Eigen::MatrixXd gram = z.transpose() * z;
    gram.diagonal().array() += lambda;
    const Eigen::VectorXd rhs = z.transpose() * (y.array() - y_mean).matrix();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success) throw RuntimeFailure("ridge system is singular");
    const Eigen::VectorXd b = ldlt.solve(rhs);
    if (!b.allFinite()) throw RuntimeFailure("ridge solution is not finite");
    for (std::size_t k = 0; k < kept.size(); ++k) {
        const auto c = kept[k];
        out.coef(c) = b(static_cast<Eigen::Index>(k)) / sd(c);
        out.intercept -= out.coef(c) * mean(c);
    }
    return out;
}

}  // namespace detail

/// Ridge fit of daily counts on [1, t, weekly Fourier, annual Fourier, holiday indicators].
inline TotalsModel fit_totals(const DailySeries& series, const HolidayCalendar& holidays, const TotalsOptions& options = {}) {
    if (series.empty()) throw ValidationError("fit_totals: empty series");
    if (options.weekly_harmonics < 0 || options.annual_harmonics < 0) throw ValidationError("harmonics must be >= 0");
    if (2 * options.weekly_harmonics > 6) throw ValidationError("at most 3 weekly harmonics are identifiable");
    if (!(options.ridge_lambda > 0.0)) throw ValidationError("ridge_lambda must be > 0");
    for (double v : series.values) {
        if (!std::isfinite(v)) throw ValidationError("fit_totals: non-finite value");
    }

    TotalsModel model;
    model.origin = series.start;
    model.ridge_lambda = options.ridge_lambda;
    model.short_history = series.size() < 730;
    for (const auto& h : holidays) model.holiday_dates[h.name].insert(h.date);

    const auto n = static_cast<Eigen::Index>(series.size());
    const Eigen::Index kw = 2 * options.weekly_harmonics;
    const Eigen::Index ka = 2 * options.annual_harmonics;
    const auto nh = static_cast<Eigen::Index>(model.holiday_dates.size());
    Eigen::MatrixXd x(n, 1 + kw + ka + nh);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Date d = series.date(static_cast<std::size_t>(i));
        const double day = static_cast<double>(day_number(d));
        Eigen::Index c = 0;
        x(i, c++) = static_cast<double>(i);
        for (int k = 1; k <= options.weekly_harmonics; ++k) {
            const double angle = 2.0 * std::numbers::pi * k * day / kWeeklyPeriod;
            x(i, c++) = std::sin(angle);
            x(i, c++) = std::cos(angle);
        }
        for (int k = 1; k <= options.annual_harmonics; ++k) {
            const double angle = 2.0 * std::numbers::pi * k * day / kAnnualPeriod;
            x(i, c++) = std::sin(angle);
            x(i, c++) = std::cos(angle);
        }
        for (const auto& [name, dates] : model.holiday_dates) x(i, c++) = dates.count(d) ? 1.0 : 0.0;
    }
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(series.values.data(), n);
    const auto sol = detail::ridge_fit(x, y, options.ridge_lambda);

    model.trend_intercept = sol.intercept;
    model.trend_slope = sol.coef(0);
    model.weekly_fourier.assign(sol.coef.data() + 1, sol.coef.data() + 1 + kw);
    model.annual_fourier.assign(sol.coef.data() + 1 + kw, sol.coef.data() + 1 + kw + ka);
    Eigen::Index c = 1 + kw + ka;
    for (const auto& entry : model.holiday_dates) model.holiday_effects[entry.first] = sol.coef(c++);

    model.training_residuals.resize(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        model.training_residuals[i] = series.values[i] - model.evaluate(series.date(i));
    }
    return model;
}

struct TotalsPrediction {
    DailySeries series;        ///< floored at zero
    std::vector<double> raw;   ///< model values before flooring
    std::vector<bool> floored;
};

/// Evaluates the model on `days` consecutive dates from `start`; negatives are floored at 0.
inline TotalsPrediction predict_totals(const TotalsModel& model, Date start, std::size_t days) {
    TotalsPrediction out;
    out.series.start = start;
    out.series.values.resize(days);
    out.raw.resize(days);
    out.floored.resize(days);
    for (std::size_t i = 0; i < days; ++i) {
        const double v = model.evaluate(start + std::chrono::days{static_cast<long>(i)});
        out.raw[i] = v;
        out.floored[i] = v < 0.0;
        out.series.values[i] = v < 0.0 ? 0.0 : v;
    }
    return out;
}

struct MonthlyTotal {
    MonthIndex month = 0;
    double total = 0.0;
    bool partial = false;  ///< the series does not cover the whole calendar month

    friend bool operator==(const MonthlyTotal&, const MonthlyTotal&) = default;
};

/// Sums daily values by calendar month with compensated summation.
inline std::vector<MonthlyTotal> aggregate_monthly(const DailySeries& series) {
    std::vector<MonthlyTotal> out;
    if (series.empty()) return out;
    MonthIndex current = month_of(series.start);
    CompensatedSum acc;
    int days = 0;
    auto flush = [&]() {
        out.push_back({current, acc.value(), days != days_in_month(current)});
    };
    for (std::size_t i = 0; i < series.size(); ++i) {
        const MonthIndex m = month_of(series.date(i));
        if (m != current) {
            flush();
            current = m;
            acc = CompensatedSum{};
            days = 0;
        }
        acc.add(series.values[i]);
        ++days;
    }
    flush();
    return out;
}

}  // namespace leadcast
