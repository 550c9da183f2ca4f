#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "leadcast/pipeline.hpp"

using namespace leadcast;

namespace {

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("leadcast_pipeline_" + name);
    std::filesystem::remove_all(p);
    return p;
}

RunConfig small_config(const std::string& out) {
    RunConfig cfg;
    cfg.preset = "static";
    cfg.start = "2016-01-01";
    cfg.end = "2018-12-31";
    cfg.split = "2018-01-01";
    cfg.out_dir = out;
    return cfg;
}

}  // namespace

TEST(Quantile, LinearInterpolation) {
    const std::vector<double> v{1, 2, 3, 4, 5};
    EXPECT_EQ(sorted_quantile(v, 0.0), 1.0);
    EXPECT_EQ(sorted_quantile(v, 1.0), 5.0);
    EXPECT_EQ(sorted_quantile(v, 0.5), 3.0);
    EXPECT_NEAR(sorted_quantile(v, 0.05), 1.2, 1e-15);
    EXPECT_NEAR(sorted_quantile(v, 0.95), 4.8, 1e-15);
    EXPECT_THROW(sorted_quantile({}, 0.5), ValidationError);
}

TEST(Pipeline, LastCompleteMonth) {
    std::vector<BookingRecord> recs{{make_date(2019, 1, 1), make_date(2019, 1, 2), 1}, {make_date(2019, 3, 31), make_date(2019, 4, 2), 1}};
    EXPECT_EQ(last_complete_month(ingest_records(recs)), month_index(2019, 3));
    recs.back().booking = make_date(2019, 3, 30);
    EXPECT_EQ(last_complete_month(ingest_records(recs)), month_index(2019, 2));
}

TEST(Pipeline, KnownReservationsFile) {
    const auto dir = scratch("known");
    std::filesystem::create_directories(dir);
    const auto path = (dir / "known.csv").string();
    csv::write_file(path, "trip_month,total\n2019-03,5\n2019-01,10\n");
    const auto k = read_known_reservations(path);
    EXPECT_EQ(k.axis, Axis::trip);
    EXPECT_EQ(k.first_month, month_index(2019, 1));
    EXPECT_EQ(k.totals, (std::vector<double>{10, 0, 5}));
    csv::write_file(path, "trip_month,total\n2019-01,10\n2019-01,3\n");
    EXPECT_THROW(read_known_reservations(path), ValidationError);
    csv::write_file(path, "trip_month,total\n2019-01,-1\n");
    EXPECT_THROW(read_known_reservations(path), ValidationError);
}

TEST(Pipeline, BacktestWritesReportAndReportRegeneratesIt) {
    const auto dir = scratch("backtest");
    auto cfg = small_config((dir / "run").string());
    const auto doc = command_backtest(cfg);
    ASSERT_EQ(doc.at("runs").size(), 1u);
    EXPECT_EQ(doc.at("runs")[0].at("label"), "static-seed1");
    for (const char* f : {"metrics.json", "comparison.csv", "plotdata_booking.csv", "plotdata_allocations.csv", "plotdata_l1.csv",
                          "plotdata_trip.csv"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / "run" / f)) << f;
    }
    const auto comparison = read_text(dir / "run" / "comparison.csv");
    EXPECT_EQ(comparison.rfind("label,method,booking_mae,booking_mape,leadtime_mean_norm_l1\n", 0), 0u);
    EXPECT_NE(comparison.find("static-seed1,two_part,"), std::string::npos);
    EXPECT_NE(comparison.find("static-seed1,bottom_up,"), std::string::npos);

    // 12 months x 13 buckets of allocations plus the header.
    const auto alloc = read_text(dir / "run" / "plotdata_allocations.csv");
    EXPECT_EQ(std::count(alloc.begin(), alloc.end(), '\n'), 1 + 12 * 13);

    RunConfig report;
    report.input = (dir / "run" / "metrics.json").string();
    report.out_dir = (dir / "report").string();
    command_report(report);
    for (const char* f : {"comparison.csv", "plotdata_booking.csv", "plotdata_allocations.csv", "plotdata_l1.csv", "plotdata_trip.csv"}) {
        EXPECT_EQ(read_text(dir / "report" / f), read_text(dir / "run" / f)) << f;
    }
}

TEST(Pipeline, MetricsJsonAgreesWithLibraryBacktest) {
    const auto dir = scratch("agree");
    auto cfg = small_config(dir.string());
    const auto doc = command_backtest(cfg);
    const auto direct = run_backtest(load_records(cfg, 1), parse_date(cfg.split), backtest_config(cfg));
    const auto& m = doc.at("runs")[0].at("methods");
    EXPECT_EQ(m.at("two_part").at("leadtime_mean_norm_l1").get<double>(), direct.two_part.leadtime_mean_norm_l1);
    EXPECT_EQ(m.at("bottom_up").at("booking_mape").get<double>(), direct.bottom_up.booking_mape);
}

TEST(Pipeline, ForecastWithIntervalsBracketsTheMean) {
    const auto dir = scratch("forecast");
    auto cfg = small_config(dir.string());
    cfg.horizon = 4;
    cfg.intervals = true;
    cfg.sampler.warmup = 300;
    cfg.sampler.draws = 400;
    const auto out = command_forecast(cfg);
    ASSERT_EQ(out.allocations.size(), 4u);
    ASSERT_EQ(out.bands.size(), 4u);
    EXPECT_EQ(out.allocations.front().booking_month, month_index(2019, 1));
    for (std::size_t i = 0; i < out.bands.size(); ++i) {
        for (std::size_t j = 0; j < out.allocations[i].proportions.size(); ++j) {
            EXPECT_LT(out.bands[i].lower[j], out.bands[i].upper[j]);
            EXPECT_LE(out.bands[i].lower[j], out.allocations[i].proportions[j] + 1e-3);
            EXPECT_GE(out.bands[i].upper[j], out.allocations[i].proportions[j] - 1e-3);
        }
    }
    const auto text = read_text(dir / "allocations.csv");
    EXPECT_EQ(text.rfind("booking_month,bucket,proportion,lower,upper\n", 0), 0u);
    const auto booking = read_text(dir / "forecast_booking.csv");
    EXPECT_EQ(booking.rfind("booking_month,total,partial\n2019-01,", 0), 0u);
    const auto trip = read_text(dir / "forecast_trip.csv");
    EXPECT_EQ(trip.rfind("trip_month,total,partial\n2019-01,", 0), 0u);
}

TEST(Pipeline, ForecastFromSavedModelsMatchesRefit) {
    const auto dir = scratch("saved");
    auto cfg = small_config((dir / "models").string());
    cfg.horizon = 3;
    command_fit(cfg);
    auto refit = cfg;
    refit.out_dir = (dir / "refit").string();
    const auto a = command_forecast(refit);
    auto saved = cfg;
    saved.out_dir = (dir / "saved").string();
    saved.model_dir = (dir / "models").string();
    const auto b = command_forecast(saved);
    EXPECT_EQ(read_text(dir / "refit" / "allocations.csv"), read_text(dir / "saved" / "allocations.csv"));
    EXPECT_EQ(read_text(dir / "refit" / "forecast_booking.csv"), read_text(dir / "saved" / "forecast_booking.csv"));
    EXPECT_EQ(a.trip.totals, b.trip.totals);
}

TEST(Pipeline, BenchmarkBookingTotalsMatchTwoPart) {
    const auto dir = scratch("benchmark");
    auto cfg = small_config((dir / "bu").string());
    cfg.horizon = 2;
    const auto bu = command_benchmark(cfg);
    cfg.out_dir = (dir / "tp").string();
    const auto tp = command_forecast(cfg);
    ASSERT_EQ(bu.monthly.size(), tp.monthly.size());
    for (std::size_t i = 0; i < bu.monthly.size(); ++i) EXPECT_NEAR(bu.monthly.totals[i], tp.monthly.totals[i], 1e-9 * tp.monthly.totals[i]);
    EXPECT_TRUE(std::filesystem::exists(dir / "bu" / "bucket_models.json"));
}

TEST(Pipeline, ConfigValidation) {
    RunConfig cfg;
    cfg.horizon = 0;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg.horizon = 3;
    cfg.interval_lower = 0.97;
    EXPECT_THROW(cfg.validate(), ValidationError);
    EXPECT_THROW(parse_overflow("keep"), ValidationError);
    EXPECT_EQ(parse_overflow("drop"), LeadOverflow::drop);
}
