#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>

#include "leadcast/datagen.hpp"

using namespace leadcast;

namespace {

ScenarioConfig short_scenario(const std::string& preset, std::uint64_t seed, Date start, Date end) {
    auto c = scenario_preset(preset, seed);
    c.start = start;
    c.end = end;
    return c;
}

}  // namespace

TEST(Datagen, PresetsValidate) {
    EXPECT_NO_THROW(scenario_preset("static").validate());
    EXPECT_NO_THROW(scenario_preset("correlated").validate());
    EXPECT_THROW(scenario_preset("nope"), ValidationError);
    auto c = scenario_preset("static");
    c.composition.rho = 1.0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = scenario_preset("static");
    c.base_level = 0.0;
    EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Datagen, StaticCompositionWithinMultinomialBands) {
    const auto c = short_scenario("static", 3, make_date(2015, 1, 1), make_date(2016, 12, 31));
    const auto recs = generate(c);
    const auto ds = ingest_records(recs, {c.max_lead, LeadOverflow::drop, 1e-6});
    const Composition base = alr_inverse(AlrVector(c.composition.base_alr));
    int checks = 0;
    int outside = 0;
    for (const auto& [month, counts] : ds.monthly_lead_counts) {
        double n = 0.0;
        for (double v : counts) n += v;
        ASSERT_GT(n, 20000.0);
        for (std::size_t j = 0; j < counts.size(); ++j) {
            const double p = base[j];
            const double sd = std::sqrt(p * (1.0 - p) / n);
            ++checks;
            if (std::abs(counts[j] / n - p) > 3.0 * sd) ++outside;
        }
    }
    // 3-sigma bands exclude about 0.27% of points under the null.
    EXPECT_LE(outside, checks / 100) << outside << " of " << checks;
    EXPECT_EQ(ds.dropped_count, 0);
}

TEST(Datagen, ChiSquareAgainstLatentComposition) {
    // Per-month goodness of fit over 10 six-year scenarios: rejections at 0.001 stay at the
    // nominal rate and the statistic averages its degrees of freedom.
    const boost::math::chi_squared dist(12.0);
    const double critical = boost::math::quantile(dist, 1.0 - 0.001);
    double total = 0.0;
    int months = 0;
    int rejected = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto c = scenario_preset("correlated", seed);
        const auto latent = latent_compositions(c);
        const auto ds = ingest_records(generate(c), {c.max_lead, LeadOverflow::drop, 1e-6});
        for (const auto& a : latent) {
            const auto& counts = ds.monthly_lead_counts.at(a.booking_month);
            double n = 0.0;
            for (double v : counts) n += v;
            ASSERT_GE(n, 10000.0);
            double stat = 0.0;
            for (std::size_t j = 0; j < counts.size(); ++j) {
                const double e = n * a.proportions[j];
                stat += (counts[j] - e) * (counts[j] - e) / e;
            }
            total += stat;
            ++months;
            if (stat > critical) ++rejected;
        }
    }
    EXPECT_EQ(months, 720);
    EXPECT_LE(rejected, 4);  // Binomial(720, 0.001) exceeds 4 with probability < 1%
    EXPECT_NEAR(total / months, 12.0, 4.0 * std::sqrt(24.0 / months));
}

TEST(Datagen, EventMeanMonteCarlo) {
    const Date event = make_date(2017, 9, 1);
    double sum = 0.0;
    const int seeds = 100;
    double lambda = 0.0;
    for (int s = 1; s <= seeds; ++s) {
        const auto c = short_scenario("correlated", static_cast<std::uint64_t>(s), make_date(2017, 8, 30), make_date(2017, 9, 2));
        if (s == 1) {
            const auto expected = expected_daily_totals(c);
            lambda = expected.values[2];
        }
        for (const auto& r : generate(c)) {
            if (r.booking == event) sum += static_cast<double>(r.count);
        }
    }
    auto base = short_scenario("correlated", 1, make_date(2017, 8, 30), make_date(2017, 9, 2));
    base.events.clear();
    const double without = expected_daily_totals(base).values[2];
    EXPECT_NEAR(lambda, without + 2400.0, 1e-9);
    const double mean = sum / seeds;
    EXPECT_NEAR(mean, lambda, 3.0 * std::sqrt(lambda / seeds));
}

TEST(Datagen, ByteIdenticalForFixedSeed) {
    const auto c = short_scenario("correlated", 7, make_date(2018, 1, 1), make_date(2018, 3, 31));
    const auto a = booking_records_csv(generate(c));
    const auto b = booking_records_csv(generate(c));
    EXPECT_EQ(a, b);
    const auto other = booking_records_csv(generate(short_scenario("correlated", 8, make_date(2018, 1, 1), make_date(2018, 3, 31))));
    EXPECT_NE(a, other);
}

TEST(Datagen, RecordsRespectLeadRange) {
    const auto c = short_scenario("correlated", 9, make_date(2018, 1, 1), make_date(2018, 6, 30));
    const auto recs = generate(c);
    ASSERT_FALSE(recs.empty());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        EXPECT_GE(r.trip, r.booking);
        EXPECT_GE(lead_months(r.booking, r.trip), 0);
        EXPECT_LE(lead_months(r.booking, r.trip), c.max_lead);
        EXPECT_GT(r.count, 0);
        if (i > 0) {
            const auto& p = recs[i - 1];
            EXPECT_TRUE(p.booking < r.booking || (p.booking == r.booking && p.trip < r.trip));
        }
    }
}

TEST(Datagen, DailyTotalsArePoissonAroundLevel) {
    const auto c = short_scenario("static", 4, make_date(2018, 1, 1), make_date(2018, 12, 31));
    const auto ds = ingest_records(generate(c));
    double sum = 0.0;
    for (double v : ds.totals.values) sum += v;
    const double n = static_cast<double>(ds.totals.size());
    EXPECT_EQ(n, 365.0);
    EXPECT_NEAR(sum / n, 800.0, 3.0 * std::sqrt(800.0 / n));
}
