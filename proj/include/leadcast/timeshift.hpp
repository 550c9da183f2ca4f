#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leadcast/compositional.hpp"
#include "leadcast/dates.hpp"
#include "leadcast/numeric.hpp"

namespace leadcast {

enum class Axis { booking, trip };

/// Monthly totals on contiguous months starting at `first_month`.
struct MonthlyAxisSeries {
    MonthIndex first_month = 0;
    std::vector<double> totals;
    Axis axis = Axis::booking;
    std::vector<bool> partial;  ///< empty, or one flag per month
    /// For known-reservation series: the last booking month whose bookings are included.
    std::optional<MonthIndex> as_of;

    [[nodiscard]] std::size_t size() const noexcept { return totals.size(); }
    [[nodiscard]] bool empty() const noexcept { return totals.empty(); }
    [[nodiscard]] MonthIndex last_month() const noexcept { return first_month + static_cast<MonthIndex>(totals.size()) - 1; }
    [[nodiscard]] bool contains(MonthIndex m) const noexcept { return !empty() && m >= first_month && m <= last_month(); }
    [[nodiscard]] double at(MonthIndex m) const { return contains(m) ? totals[static_cast<std::size_t>(m - first_month)] : 0.0; }
    [[nodiscard]] bool is_partial(MonthIndex m) const {
        return contains(m) && !partial.empty() && partial[static_cast<std::size_t>(m - first_month)];
    }
};

/// Lead-time shares for one booking month; part l is the share booked l months ahead.
struct LeadAllocation {
    MonthIndex booking_month = 0;
    Composition proportions = Composition::uniform(13);
};

/**
 * Trip-axis totals S_n = sum_l T_{n-l} p_{n-l, l} over the booking months supplied.
 * Output runs from the first booking month to the last booking month + L. A trip month
 * is flagged partial when its window n-L..n reaches outside the booking months.
 */
inline MonthlyAxisSeries shift_to_trip_axis(const MonthlyAxisSeries& booking, const std::vector<LeadAllocation>& allocations) {
    if (booking.axis != Axis::booking) throw ValidationError("shift_to_trip_axis expects booking-axis totals");
    if (booking.empty()) throw ValidationError("shift_to_trip_axis: no booking months");
    std::map<MonthIndex, const Composition*> by_month;
    std::size_t parts = 0;
    for (const auto& a : allocations) {
        if (parts == 0) parts = a.proportions.size();
        if (a.proportions.size() != parts) throw ValidationError("allocations disagree on the number of lead buckets");
        by_month[a.booking_month] = &a.proportions;
    }
    for (MonthIndex m = booking.first_month; m <= booking.last_month(); ++m) {
        if (!by_month.count(m)) throw ValidationError("missing lead allocation for booking month " + format_month(m));
    }
    const auto max_lead = static_cast<MonthIndex>(parts) - 1;

    MonthlyAxisSeries trip;
    trip.axis = Axis::trip;
    trip.first_month = booking.first_month;
    const std::size_t len = booking.size() + static_cast<std::size_t>(max_lead);
    std::vector<CompensatedSum> acc(len);
    for (MonthIndex b = booking.first_month; b <= booking.last_month(); ++b) {
        const double total = booking.at(b);
        const Composition& p = *by_month.at(b);
        for (MonthIndex lead = 0; lead <= max_lead; ++lead) {
            acc[static_cast<std::size_t>(b + lead - trip.first_month)].add(total * p[static_cast<std::size_t>(lead)]);
        }
    }
    trip.totals.resize(len);
    trip.partial.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
        const MonthIndex n = trip.first_month + static_cast<MonthIndex>(i);
        trip.totals[i] = acc[i].value();
        trip.partial[i] = (n - max_lead < booking.first_month) || (n > booking.last_month());
    }
    return trip;
}

/// Booking-axis forecast plus its lead-time allocations.
struct BookingForecast {
    MonthlyAxisSeries totals;
    std::vector<LeadAllocation> allocations;
};

/**
 * Known reservations as a baseline plus incremental forecast. Only booking months after
 * `cutoff` are shifted; bookings made up to `cutoff` enter solely through `known`.
 *
 * `known` is trip-indexed; its as_of month (when set) must equal `cutoff`, since a later
 * as_of double counts forecast bookings and an earlier one leaves a gap.
 */
inline MonthlyAxisSeries blend_backfill(const BookingForecast& forecast, const MonthlyAxisSeries& known, MonthIndex cutoff) {
    if (known.axis != Axis::trip) throw ValidationError("known reservations must be indexed by trip month");
    if (known.as_of && *known.as_of != cutoff) {
        throw ValidationError("known reservations are as of " + format_month(*known.as_of) + " but cutoff is " +
                              format_month(cutoff) + "; booking months would be double counted or skipped");
    }

    MonthlyAxisSeries incremental;
    incremental.axis = Axis::trip;
    const MonthlyAxisSeries& booking = forecast.totals;
    const bool has_future = !booking.empty() && booking.last_month() > cutoff;
    MonthIndex last_booking = cutoff;
    if (has_future) {
        MonthlyAxisSeries future;
        future.axis = Axis::booking;
        future.first_month = std::max(booking.first_month, cutoff + 1);
        for (MonthIndex m = future.first_month; m <= booking.last_month(); ++m) future.totals.push_back(booking.at(m));
        incremental = shift_to_trip_axis(future, forecast.allocations);
        last_booking = booking.last_month();
    }

    MonthIndex lo = known.empty() ? incremental.first_month : known.first_month;
    MonthIndex hi = known.empty() ? incremental.last_month() : known.last_month();
    if (!incremental.empty()) {
        lo = std::min(lo, incremental.first_month);
        hi = std::max(hi, incremental.last_month());
    }
    // Booking months strictly between the cutoff and the first forecast month are
    // neither known nor forecast.
    const MonthIndex max_lead = forecast.allocations.empty()
                                    ? 0
                                    : static_cast<MonthIndex>(forecast.allocations.front().proportions.size()) - 1;
    const MonthIndex gap_lo = cutoff + 1;
    const MonthIndex gap_hi = has_future ? booking.first_month - 1 : cutoff;

    MonthlyAxisSeries out;
    out.axis = Axis::trip;
    if (known.empty() && incremental.empty()) return out;
    out.first_month = lo;
    for (MonthIndex n = lo; n <= hi; ++n) {
        CompensatedSum s;
        s.add(known.at(n));
        s.add(incremental.at(n));
        out.totals.push_back(s.value());
        const bool in_gap = std::max(n - max_lead, gap_lo) <= std::min(n, gap_hi);
        out.partial.push_back(n > last_booking || in_gap);
    }
    return out;
}

}  // namespace leadcast
