#include <gtest/gtest.h>

#include <random>

#include "leadcast/timeshift.hpp"
#include "test_support.hpp"

using namespace leadcast;

namespace {

MonthlyAxisSeries booking(MonthIndex first, std::vector<double> totals) {
    MonthlyAxisSeries s;
    s.first_month = first;
    s.totals = std::move(totals);
    s.axis = Axis::booking;
    return s;
}

std::vector<LeadAllocation> two_month_allocations() {
    return {{1, Composition({0.6, 0.4})}, {2, Composition({0.5, 0.5})}};
}

}  // namespace

TEST(Shift, HandConvolution) {
    const auto s = shift_to_trip_axis(booking(1, {100, 200}), two_month_allocations());
    EXPECT_EQ(s.axis, Axis::trip);
    EXPECT_EQ(s.first_month, 1);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.totals[0], 60.0);
    EXPECT_EQ(s.totals[1], 140.0);
    EXPECT_EQ(s.totals[2], 100.0);
    EXPECT_EQ(s.totals[0] + s.totals[1] + s.totals[2], 300.0);
    EXPECT_TRUE(s.partial[0]);
    EXPECT_FALSE(s.partial[1]);
    EXPECT_TRUE(s.partial[2]);
}

TEST(Shift, IdentityAtLeadZero) {
    const auto s = shift_to_trip_axis(booking(10, {42}), {{10, Composition::from_weights(std::vector<double>{1, 0, 0}, 1e-300)}});
    EXPECT_NEAR(s.at(10), 42.0, 1e-12);
    EXPECT_NEAR(s.at(11), 0.0, 1e-12);
    EXPECT_NEAR(s.at(12), 0.0, 1e-12);
}

TEST(Shift, PureDelay) {
    const std::vector<double> t{5, 7, 11, 13};
    std::vector<LeadAllocation> alloc;
    for (MonthIndex m = 0; m < 4; ++m) alloc.push_back({m, Composition::from_weights(std::vector<double>{0, 0, 1}, 1e-300)});
    const auto s = shift_to_trip_axis(booking(0, t), alloc);
    ASSERT_EQ(s.size(), 6u);
    for (MonthIndex m = 0; m < 4; ++m) EXPECT_NEAR(s.at(m + 2), t[static_cast<std::size_t>(m)], 1e-12);
    EXPECT_NEAR(s.at(0), 0.0, 1e-12);
    EXPECT_NEAR(s.at(1), 0.0, 1e-12);
}

TEST(Shift, MissingAllocationRejected) {
    EXPECT_THROW(shift_to_trip_axis(booking(1, {1, 2, 3}), two_month_allocations()), ValidationError);
    auto wrong = booking(1, {1});
    wrong.axis = Axis::trip;
    EXPECT_THROW(shift_to_trip_axis(wrong, two_month_allocations()), ValidationError);
}

TEST(Shift, MassConservationAndNonNegativity) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1e5);
    std::uniform_int_distribution<int> len(1, 30);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = len(rng);
        const std::size_t parts = 13;
        std::vector<double> t;
        std::vector<LeadAllocation> alloc;
        for (int i = 0; i < n; ++i) {
            t.push_back(u(rng));
            alloc.push_back({600 + i, test_support::random_simplex(rng, parts)});
        }
        const auto s = shift_to_trip_axis(booking(600, t), alloc);
        double st = 0.0;
        double sb = 0.0;
        for (double v : s.totals) {
            EXPECT_GE(v, 0.0);
            st += v;
        }
        for (double v : t) sb += v;
        EXPECT_NEAR(st, sb, 1e-9 * sb);
    }
}

TEST(Shift, Linearity) {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    std::vector<LeadAllocation> alloc;
    std::vector<double> t1;
    std::vector<double> t2;
    std::vector<double> mix;
    const double a = 2.5;
    const double b = -0.75;
    for (int i = 0; i < 18; ++i) {
        alloc.push_back({i, test_support::random_simplex(rng, 5)});
        t1.push_back(u(rng));
        t2.push_back(u(rng));
        mix.push_back(a * t1.back() + b * t2.back());
    }
    const auto s1 = shift_to_trip_axis(booking(0, t1), alloc);
    const auto s2 = shift_to_trip_axis(booking(0, t2), alloc);
    const auto sm = shift_to_trip_axis(booking(0, mix), alloc);
    for (std::size_t i = 0; i < sm.size(); ++i) {
        EXPECT_NEAR(sm.totals[i], a * s1.totals[i] + b * s2.totals[i], 1e-9 * (1.0 + std::abs(sm.totals[i])));
    }
}

TEST(Shift, PartialFlagsExactlyOnIncompleteWindows) {
    std::mt19937_64 rng(33);
    const MonthIndex first = 100;
    const int n = 9;
    const MonthIndex lead = 4;
    std::vector<LeadAllocation> alloc;
    for (int i = 0; i < n; ++i) alloc.push_back({first + i, test_support::random_simplex(rng, static_cast<std::size_t>(lead) + 1)});
    const auto s = shift_to_trip_axis(booking(first, std::vector<double>(n, 1.0)), alloc);
    for (MonthIndex m = s.first_month; m <= s.last_month(); ++m) {
        bool outside = false;
        for (MonthIndex k = m - lead; k <= m; ++k) outside = outside || k < first || k >= first + n;
        EXPECT_EQ(s.is_partial(m), outside) << m;
    }
}

TEST(Backfill, NoBackfillEqualsPureForecast) {
    const BookingForecast f{booking(1, {100, 200}), two_month_allocations()};
    MonthlyAxisSeries known;
    known.axis = Axis::trip;
    const auto out = blend_backfill(f, known, 0);
    const auto pure = shift_to_trip_axis(f.totals, f.allocations);
    EXPECT_EQ(out.first_month, pure.first_month);
    EXPECT_EQ(out.totals, pure.totals);
}

TEST(Backfill, FullyRealizedEqualsKnown) {
    const BookingForecast f{booking(1, {100, 200}), two_month_allocations()};
    MonthlyAxisSeries known;
    known.axis = Axis::trip;
    known.first_month = 1;
    known.totals = {60, 140, 100};
    known.as_of = 2;
    const auto out = blend_backfill(f, known, 2);
    EXPECT_EQ(out.first_month, 1);
    EXPECT_EQ(out.totals, known.totals);
}

TEST(Backfill, MixedHandComputation) {
    const BookingForecast f{booking(1, {100, 200}), two_month_allocations()};
    MonthlyAxisSeries known;
    known.axis = Axis::trip;
    known.first_month = 1;
    known.totals = {60, 40};  // month 1's bookings
    known.as_of = 1;
    const auto out = blend_backfill(f, known, 1);
    EXPECT_EQ(out.first_month, 1);
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out.totals[0], 60.0);
    EXPECT_EQ(out.totals[1], 140.0);
    EXPECT_EQ(out.totals[2], 100.0);
}

TEST(Backfill, NoDoubleCounting) {
    // Known holds every booking month up to the cutoff; the blend must equal the full shift.
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> u(10.0, 1000.0);
    const int n = 12;
    std::vector<double> t;
    std::vector<LeadAllocation> alloc;
    for (int i = 0; i < n; ++i) {
        t.push_back(u(rng));
        alloc.push_back({i, test_support::random_simplex(rng, 4)});
    }
    const auto full = shift_to_trip_axis(booking(0, t), alloc);
    for (MonthIndex cutoff = -1; cutoff < n; ++cutoff) {
        MonthlyAxisSeries known;
        known.axis = Axis::trip;
        known.as_of = cutoff;
        if (cutoff >= 0) {
            std::vector<double> past(t.begin(), t.begin() + cutoff + 1);
            std::vector<LeadAllocation> pa(alloc.begin(), alloc.begin() + cutoff + 1);
            known = shift_to_trip_axis(booking(0, past), pa);
            known.as_of = cutoff;
        }
        const auto out = blend_backfill({booking(0, t), alloc}, known, cutoff);
        ASSERT_EQ(out.first_month, full.first_month);
        ASSERT_EQ(out.size(), full.size());
        for (std::size_t i = 0; i < full.size(); ++i) EXPECT_NEAR(out.totals[i], full.totals[i], 1e-9 * full.totals[i]);
    }
}

TEST(Backfill, OverlapRejected) {
    const BookingForecast f{booking(1, {100, 200}), two_month_allocations()};
    MonthlyAxisSeries known;
    known.axis = Axis::trip;
    known.first_month = 1;
    known.totals = {60, 140, 100};
    known.as_of = 2;
    EXPECT_THROW(blend_backfill(f, known, 1), ValidationError);
    known.axis = Axis::booking;
    EXPECT_THROW(blend_backfill(f, known, 2), ValidationError);
}

TEST(Backfill, GapMonthsFlaggedPartial) {
    // Forecast starts two months after the cutoff: trip months whose window touches month 2 are partial.
    const BookingForecast f{booking(3, {100}), {{3, Composition({0.5, 0.5})}}};
    MonthlyAxisSeries known;
    known.axis = Axis::trip;
    known.first_month = 1;
    known.totals = {10, 10};
    known.as_of = 1;
    const auto out = blend_backfill(f, known, 1);
    EXPECT_FALSE(out.is_partial(1));
    EXPECT_TRUE(out.is_partial(2));
    EXPECT_TRUE(out.is_partial(3));
    EXPECT_TRUE(out.is_partial(4));
    EXPECT_EQ(out.at(3), 50.0);
}
