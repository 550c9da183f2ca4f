#include <gtest/gtest.h>

#include <sstream>

#include "leadcast/ingest.hpp"

using namespace leadcast;

TEST(Lead, CalendarMonths) {
    EXPECT_EQ(lead_months(make_date(2019, 1, 15), make_date(2019, 3, 2)), 2);
    EXPECT_EQ(lead_months(make_date(2019, 1, 31), make_date(2019, 2, 1)), 1);
    EXPECT_EQ(lead_months(make_date(2019, 12, 1), make_date(2020, 1, 31)), 1);
    EXPECT_EQ(lead_months(make_date(2019, 5, 1), make_date(2019, 5, 31)), 0);
}

TEST(Ingest, FoldsOverflowIntoLastBucket) {
    const std::vector<BookingRecord> recs{
        {make_date(2019, 1, 10), make_date(2020, 3, 5), 3},   // lead 14
        {make_date(2019, 1, 11), make_date(2019, 1, 20), 5},  // lead 0
    };
    const auto ds = ingest_records(recs);
    EXPECT_EQ(ds.folded_count, 3);
    EXPECT_EQ(ds.dropped_count, 0);
    EXPECT_EQ(ds.buckets[12].series.values[0], 3.0);
    EXPECT_EQ(ds.buckets[0].series.values[1], 5.0);
    EXPECT_EQ(ds.monthly_lead_counts.at(month_index(2019, 1))[12], 3.0);
    EXPECT_EQ(ds.total_count, 8);
    EXPECT_EQ(ds.trip_totals.at(month_index(2020, 3)), 3.0);

    IngestOptions drop;
    drop.overflow = LeadOverflow::drop;
    const auto dd = ingest_records(recs, drop);
    EXPECT_EQ(dd.dropped_count, 3);
    EXPECT_EQ(dd.total_count, 5);
    EXPECT_EQ(dd.buckets[12].series.values[0], 0.0);
}

TEST(Ingest, NegativeLeadRejected) {
    EXPECT_THROW(ingest_records({{make_date(2019, 2, 1), make_date(2019, 1, 31), 1}}), ValidationError);
    std::istringstream in("booking_date,trip_date,count\n2019-02-01,2019-01-31,1\n");
    EXPECT_THROW(read_booking_records(in), ValidationError);
}

TEST(Ingest, MalformedRowsReportLineNumbers) {
    auto message = [](const std::string& text) {
        std::istringstream in(text);
        try {
            read_booking_records(in, "bookings.csv");
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(message("booking_date,trip_date,count\n2019-01-01,2019-01-02,1\n2019-13-01,2019-01-02,1\n").find("bookings.csv:3"),
              std::string::npos);
    EXPECT_NE(message("booking_date,trip_date,count\n\n2019-01-01,2019-01-02\n").find("bookings.csv:3"), std::string::npos);
    EXPECT_NE(message("booking_date,trip_date,count\n2019-01-01,2019-01-02,1.5\n").find("bookings.csv:2"), std::string::npos);
    EXPECT_NE(message("booking_date,trip_date,count\n2019-01-01,2019-01-02,0\n").find("bookings.csv:2"), std::string::npos);
    EXPECT_NE(message("date,trip,count\n").find("bookings.csv:1"), std::string::npos);
    EXPECT_FALSE(message("").empty());
}

TEST(Ingest, CsvRoundTrip) {
    const std::vector<BookingRecord> recs{
        {make_date(2019, 1, 10), make_date(2019, 3, 5), 3},
        {make_date(2019, 1, 12), make_date(2019, 1, 20), 12},
    };
    std::istringstream in(booking_records_csv(recs));
    EXPECT_EQ(read_booking_records(in), recs);
}

TEST(Ingest, ConservesCountsAndFillsGaps) {
    std::vector<BookingRecord> recs;
    std::int64_t expected = 0;
    for (int d = 0; d < 90; d += 3) {
        const Date b = make_date(2018, 11, 1) + std::chrono::days{d};
        const std::int64_t c = 1 + d % 7;
        recs.push_back({b, b + std::chrono::days{d * 4}, c});
        expected += c;
    }
    const auto ds = ingest_records(recs);
    EXPECT_EQ(ds.total_count, expected);
    EXPECT_EQ(ds.totals.size(), 88u);
    double daily = 0.0;
    for (double v : ds.totals.values) daily += v;
    double buckets = 0.0;
    for (const auto& b : ds.buckets) {
        EXPECT_EQ(b.series.start, ds.totals.start);
        for (double v : b.series.values) buckets += v;
    }
    double trips = 0.0;
    for (double v : ds.trip_totals.totals) trips += v;
    EXPECT_EQ(daily, static_cast<double>(expected));
    EXPECT_EQ(buckets, static_cast<double>(expected));
    EXPECT_EQ(trips, static_cast<double>(expected));
    EXPECT_EQ(ds.totals.values[1], 0.0);
}

TEST(Ingest, AllocationsAreClampedShares) {
    const std::vector<BookingRecord> recs{
        {make_date(2019, 1, 10), make_date(2019, 1, 15), 30},
        {make_date(2019, 1, 11), make_date(2019, 2, 15), 70},
    };
    IngestOptions opt;
    opt.max_lead = 3;
    opt.epsilon = 1e-4;
    const auto ds = ingest_records(recs, opt);
    ASSERT_EQ(ds.allocations.size(), 1u);
    const auto& p = ds.allocations[0].proportions;
    ASSERT_EQ(p.size(), 4u);
    const double total = 0.3 + 0.7 + 2e-4;
    EXPECT_NEAR(p[0], 0.3 / total, 1e-15);
    EXPECT_NEAR(p[1], 0.7 / total, 1e-15);
    EXPECT_NEAR(p[2], 1e-4 / total, 1e-15);
    const Composition raw = Composition::from_weights(std::vector<double>{0.3, 0.7, 0.0, 0.0}, 1e-300);
    EXPECT_LE(normalized_l1(p, raw), 4 * opt.epsilon / 2.0);
}

TEST(Ingest, EmptyMonthsAreUniform) {
    const std::vector<BookingRecord> recs{
        {make_date(2019, 1, 10), make_date(2019, 1, 15), 1},
        {make_date(2019, 3, 11), make_date(2019, 3, 15), 1},
    };
    const auto ds = ingest_records(recs);
    ASSERT_EQ(ds.empty_months.size(), 1u);
    EXPECT_EQ(ds.empty_months[0], month_index(2019, 2));
}

TEST(Ingest, OptionValidation) {
    IngestOptions opt;
    opt.max_lead = 0;
    EXPECT_THROW(opt.validate(), ValidationError);
    opt.max_lead = 12;
    opt.epsilon = 2e-3;
    EXPECT_THROW(opt.validate(), ValidationError);
    opt.epsilon = 0.0;
    EXPECT_THROW(opt.validate(), ValidationError);
}

TEST(Ingest, RecordsBeforeSplit) {
    const std::vector<BookingRecord> recs{
        {make_date(2018, 12, 31), make_date(2019, 1, 15), 1},
        {make_date(2019, 1, 1), make_date(2019, 1, 15), 1},
    };
    const auto before = records_before(recs, make_date(2019, 1, 1));
    ASSERT_EQ(before.size(), 1u);
    EXPECT_EQ(before[0].booking, make_date(2018, 12, 31));
}
