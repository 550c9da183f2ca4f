#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "leadcast/compositional.hpp"
#include "leadcast/csv.hpp"
#include "leadcast/dates.hpp"
#include "leadcast/timeshift.hpp"
#include "leadcast/totals.hpp"

namespace leadcast {

/// One (booking date, trip date, count) observation.
struct BookingRecord {
    Date booking{};
    Date trip{};
    std::int64_t count = 0;

    friend bool operator==(const BookingRecord&, const BookingRecord&) = default;
};

/// Whole calendar months from booking month to trip month.
inline int lead_months(Date booking, Date trip) { return month_of(trip) - month_of(booking); }

enum class LeadOverflow { fold_into_last, drop };

struct IngestOptions {
    int max_lead = 12;  ///< L; buckets are 0..L
    LeadOverflow overflow = LeadOverflow::fold_into_last;
    double epsilon = 1e-6;  ///< floor for monthly allocation shares

    void validate() const {
        if (max_lead < 1) throw ValidationError("max_lead must be >= 1");
        if (!(epsilon > 0.0 && epsilon <= 1e-3)) throw ValidationError("epsilon must lie in (0, 1e-3]");
    }
};

/// Bookings at a single lead bucket by booking date.
struct BucketSeries {
    int bucket = 0;
    DailySeries series;
};

/// Everything the pipeline needs from a set of booking records.
struct Dataset {
    DailySeries totals;                 ///< bookings per booking date (zero-filled)
    std::vector<BucketSeries> buckets;  ///< one per lead 0..L, same dates as totals
    /// Booking month -> counts per lead bucket.
    std::map<MonthIndex, std::vector<double>> monthly_lead_counts;
    /// Per booking month, clamped to the simplex interior.
    std::vector<LeadAllocation> allocations;
    /// Booking months whose allocation fell back to uniform (no bookings).
    std::vector<MonthIndex> empty_months;
    /// Actual bookings by trip month (the recorded trip month, before any folding).
    MonthlyAxisSeries trip_totals;
    std::int64_t total_count = 0;  ///< bookings kept after the overflow policy
    std::int64_t folded_count = 0;
    std::int64_t dropped_count = 0;
    int max_lead = 12;

    [[nodiscard]] MonthIndex first_month() const { return month_of(totals.start); }
    [[nodiscard]] MonthIndex last_month() const { return month_of(totals.end() - std::chrono::days{1}); }

    /// Booking-axis monthly totals (from the daily series).
    [[nodiscard]] MonthlyAxisSeries monthly_booking_totals() const {
        MonthlyAxisSeries out;
        out.axis = Axis::booking;
        const auto monthly = aggregate_monthly(totals);
        if (monthly.empty()) return out;
        out.first_month = monthly.front().month;
        for (const auto& m : monthly) {
            out.totals.push_back(m.total);
            out.partial.push_back(m.partial);
        }
        return out;
    }
};

/// Builds the daily, per-bucket and monthly views of `records`.
inline Dataset ingest_records(const std::vector<BookingRecord>& records, const IngestOptions& options = {}) {
    options.validate();
    if (records.empty()) throw ValidationError("no booking records");
    Dataset ds;
    ds.max_lead = options.max_lead;
    Date lo = records.front().booking;
    Date hi = records.front().booking;
    MonthIndex trip_lo = month_of(records.front().trip);
    MonthIndex trip_hi = trip_lo;
    for (const auto& r : records) {
        if (r.count <= 0) throw ValidationError("booking counts must be positive");
        const int lead = lead_months(r.booking, r.trip);
        if (lead < 0) {
            throw ValidationError("trip " + format_date(r.trip) + " precedes booking " + format_date(r.booking));
        }
        lo = std::min(lo, r.booking);
        hi = std::max(hi, r.booking);
        trip_lo = std::min(trip_lo, month_of(r.trip));
        trip_hi = std::max(trip_hi, month_of(r.trip));
    }
    const auto days = static_cast<std::size_t>((hi - lo).count()) + 1;
    ds.totals.start = lo;
    ds.totals.values.assign(days, 0.0);
    const auto parts = static_cast<std::size_t>(options.max_lead) + 1;
    ds.buckets.resize(parts);
    for (std::size_t b = 0; b < parts; ++b) {
        ds.buckets[b].bucket = static_cast<int>(b);
        ds.buckets[b].series.start = lo;
        ds.buckets[b].series.values.assign(days, 0.0);
    }
    for (MonthIndex m = month_of(lo); m <= month_of(hi); ++m) ds.monthly_lead_counts[m].assign(parts, 0.0);
    std::vector<double> trip_counts(static_cast<std::size_t>(trip_hi - trip_lo + 1), 0.0);

    for (const auto& r : records) {
        int lead = lead_months(r.booking, r.trip);
        if (lead > options.max_lead) {
            if (options.overflow == LeadOverflow::drop) {
                ds.dropped_count += r.count;
                continue;
            }
            ds.folded_count += r.count;
            lead = options.max_lead;
        }
        const auto day = static_cast<std::size_t>((r.booking - lo).count());
        const auto c = static_cast<double>(r.count);
        ds.totals.values[day] += c;
        ds.buckets[static_cast<std::size_t>(lead)].series.values[day] += c;
        ds.monthly_lead_counts[month_of(r.booking)][static_cast<std::size_t>(lead)] += c;
        trip_counts[static_cast<std::size_t>(month_of(r.trip) - trip_lo)] += c;
        ds.total_count += r.count;
    }

    for (const auto& [month, counts] : ds.monthly_lead_counts) {
        double total = 0.0;
        for (double c : counts) total += c;
        if (total > 0.0) {
            ds.allocations.push_back({month, Composition::from_weights(counts, options.epsilon)});
        } else {
            ds.allocations.push_back({month, Composition::uniform(parts)});
            ds.empty_months.push_back(month);
        }
    }
    ds.trip_totals.axis = Axis::trip;
    ds.trip_totals.first_month = trip_lo;
    ds.trip_totals.totals = std::move(trip_counts);
    return ds;
}

inline std::vector<BookingRecord> read_booking_records(std::istream& in, const std::string& source = "<input>") {
    std::vector<BookingRecord> out;
    csv::read(in, {"booking_date", "trip_date", "count"}, source,
              [&](const std::vector<std::string_view>& f, std::size_t) {
                  BookingRecord r;
                  r.booking = parse_date(f[0]);
                  r.trip = parse_date(f[1]);
                  const double c = parse_double(f[2]);
                  if (!(c >= 1.0) || c != static_cast<double>(static_cast<std::int64_t>(c))) {
                      throw ValidationError("count must be a positive integer");
                  }
                  r.count = static_cast<std::int64_t>(c);
                  if (lead_months(r.booking, r.trip) < 0) {
                      throw ValidationError("negative lead: trip " + format_date(r.trip) + " before booking " + format_date(r.booking));
                  }
                  out.push_back(r);
              });
    return out;
}

inline std::vector<BookingRecord> read_booking_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    return read_booking_records(in, path);
}

/// Reads the input CSV and builds the dataset views.
inline Dataset ingest(const std::string& path, const IngestOptions& options = {}) {
    return ingest_records(read_booking_csv(path), options);
}

inline std::string booking_records_csv(const std::vector<BookingRecord>& records) {
    std::string out = "booking_date,trip_date,count\n";
    out.reserve(records.size() * 28 + 32);
    for (const auto& r : records) {
        out += format_date(r.booking);
        out += ',';
        out += format_date(r.trip);
        out += ',';
        out += std::to_string(r.count);
        out += '\n';
    }
    return out;
}

inline HolidayCalendar read_holiday_csv(const std::string& path) {
    HolidayCalendar out;
    csv::read_file(path, {"name", "date"}, [&](const std::vector<std::string_view>& f, std::size_t) {
        if (f[0].empty()) throw ValidationError("holiday name is empty");
        out.push_back({std::string(f[0]), parse_date(f[1])});
    });
    return out;
}

/// Records whose booking date is before `split`.
inline std::vector<BookingRecord> records_before(const std::vector<BookingRecord>& records, Date split) {
    std::vector<BookingRecord> out;
    for (const auto& r : records) {
        if (r.booking < split) out.push_back(r);
    }
    return out;
}

}  // namespace leadcast
