#include <gtest/gtest.h>

#include <random>

#include "leadcast/datagen.hpp"
#include "leadcast/evaluation.hpp"
#include "test_support.hpp"

using namespace leadcast;

TEST(Mae, Basics) {
    const std::vector<double> a{1, 2, 3};
    EXPECT_EQ(mae(a, a), 0.0);
    EXPECT_EQ(mae(std::vector<double>{110}, std::vector<double>{100}), 10.0);
    EXPECT_THROW(mae(a, std::vector<double>{1, 2}), ValidationError);
    EXPECT_THROW(mae(std::vector<double>{}, std::vector<double>{}), ValidationError);
}

TEST(Mae, MatchesLoopAndIsPermutationInvariant) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(100.0, 30.0);
    std::vector<double> f(50);
    std::vector<double> a(50);
    for (auto& x : f) x = n(rng);
    for (auto& x : a) x = n(rng);
    double loop = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) loop += std::abs(f[i] - a[i]);
    EXPECT_NEAR(mae(f, a), loop / 50.0, 1e-12);
    std::vector<std::size_t> idx(50);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<double> fs;
    std::vector<double> as;
    for (auto i : idx) {
        fs.push_back(f[i]);
        as.push_back(a[i]);
    }
    EXPECT_NEAR(mae(fs, as), mae(f, a), 1e-12);
    EXPECT_NEAR(mape(fs, as).percent, mape(f, a).percent, 1e-10);
}

TEST(Mape, Basics) {
    EXPECT_EQ(mape(std::vector<double>{110}, std::vector<double>{100}).percent, 10.0);
    const std::vector<double> a{4, 5};
    EXPECT_EQ(mape(a, a).percent, 0.0);
    const auto r = mape(std::vector<double>{110, 7, 90}, std::vector<double>{100, 0, 100});
    EXPECT_EQ(r.excluded, 1u);
    EXPECT_NEAR(r.percent, 10.0, 1e-12);
    EXPECT_THROW(mape(std::vector<double>{1, 2}, std::vector<double>{0, 0}), ValidationError);
}

TEST(LeadTimeL1, PerfectAndSwapped) {
    const std::vector<LeadAllocation> truth{{1, Composition({0.5, 0.3, 0.2})}, {2, Composition({0.2, 0.2, 0.6})}};
    const auto perfect = leadtime_l1_by_month(truth, truth);
    for (const auto& [m, d] : perfect.per_month) EXPECT_EQ(d, 0.0);
    EXPECT_EQ(perfect.mean, 0.0);

    auto off = truth;
    off[1].proportions = Composition({0.3, 0.1, 0.6});
    const auto r = leadtime_l1_by_month(off, truth);
    EXPECT_NEAR(r.per_month[0].second, 0.0, 1e-15);
    EXPECT_NEAR(r.per_month[1].second, 0.1, 1e-15);
    EXPECT_NEAR(r.mean, 0.05, 1e-15);
}

TEST(LeadTimeL1, RandomMatchesNaiveAndMeanConsistency) {
    std::mt19937_64 rng(8);
    std::vector<LeadAllocation> f;
    std::vector<LeadAllocation> a;
    for (int m = 0; m < 24; ++m) {
        f.push_back({m, test_support::random_simplex(rng, 13)});
        a.push_back({m, test_support::random_simplex(rng, 13)});
    }
    std::shuffle(a.begin(), a.end(), rng);
    const auto r = leadtime_l1_by_month(f, a);
    double mean = 0.0;
    for (const auto& [m, d] : r.per_month) {
        const auto& fp = f[static_cast<std::size_t>(m)].proportions;
        const LeadAllocation* ap = nullptr;
        for (const auto& x : a) {
            if (x.booking_month == m) ap = &x;
        }
        double s = 0.0;
        for (std::size_t j = 0; j < 13; ++j) s += std::abs(fp[j] - ap->proportions[j]);
        EXPECT_NEAR(d, 0.5 * s, 1e-14);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0);
        mean += d;
    }
    EXPECT_NEAR(r.mean, mean / 24.0, 1e-12);
}

TEST(LeadTimeL1, MonthMismatch) {
    const std::vector<LeadAllocation> a{{1, Composition({0.5, 0.5})}};
    const std::vector<LeadAllocation> b{{2, Composition({0.5, 0.5})}};
    EXPECT_THROW(leadtime_l1_by_month(a, b), ValidationError);
    EXPECT_THROW(leadtime_l1_by_month(a, {}), ValidationError);
}

namespace {

std::vector<BookingRecord> static_records(std::uint64_t seed, double level = 800.0) {
    auto c = scenario_preset("static", seed);
    c.base_level = level;
    c.start = make_date(2016, 1, 1);
    c.end = make_date(2018, 12, 31);
    return generate(c);
}

}  // namespace

TEST(Backtest, EasyRegime) {
    // At 4000 bookings a day the multinomial noise in the actual monthly shares is ~0.004 L1.
    const auto recs = static_records(1, 4000.0);
    BacktestConfig cfg;
    const auto r = run_backtest(recs, make_date(2018, 1, 1), cfg);
    EXPECT_EQ(r.first_test_month, month_index(2018, 1));
    EXPECT_LE(r.two_part.leadtime_mean_norm_l1, 0.01);
    EXPECT_LE(r.bottom_up.leadtime_mean_norm_l1, 0.02);
    EXPECT_LT(r.two_part.booking_mape, 2.0);
    EXPECT_LT(r.bottom_up.booking_mape, 2.0);
    EXPECT_LT(r.two_part.trip_mape, 3.0);
    EXPECT_LT(r.bottom_up.trip_mape, 3.0);
    ASSERT_EQ(r.two_part.per_month_l1.size(), 12u);
    double mean = 0.0;
    for (const auto& [m, d] : r.two_part.per_month_l1) mean += d;
    EXPECT_NEAR(mean / 12.0, r.two_part.leadtime_mean_norm_l1, 1e-12);
    EXPECT_TRUE(r.bdarma_fit.converged);
}

TEST(Backtest, SplitValidation) {
    const auto recs = static_records(2);
    BacktestConfig cfg;
    EXPECT_THROW(run_backtest(recs, make_date(2020, 1, 1), cfg), ValidationError);
    EXPECT_THROW(run_backtest(recs, make_date(2015, 1, 1), cfg), ValidationError);
    EXPECT_THROW(run_backtest(recs, make_date(2018, 1, 2), cfg), ValidationError);
    EXPECT_THROW(run_backtest(recs, make_date(2018, 6, 1), cfg), ValidationError);  // test window runs past the data
}

TEST(Backtest, TestRowsDoNotReachFits) {
    const auto recs = static_records(3);
    const Date split = make_date(2018, 1, 1);
    auto perturbed = recs;
    for (auto& r : perturbed) {
        if (r.booking >= split) r.count = r.count * 3 + 1;
    }
    BacktestConfig cfg;
    const auto a = run_backtest(recs, split, cfg);
    const auto b = run_backtest(perturbed, split, cfg);
    EXPECT_EQ(a.bdarma_fit.map_params, b.bdarma_fit.map_params);
    EXPECT_EQ(a.totals_model.annual_fourier, b.totals_model.annual_fourier);
    EXPECT_EQ(a.totals_model.trend_intercept, b.totals_model.trend_intercept);
    EXPECT_NE(a.two_part.booking_mae, b.two_part.booking_mae);
}
