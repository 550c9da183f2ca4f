#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "leadcast/pipeline.hpp"

namespace {

using namespace leadcast;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CliOptions {
    RunConfig run;
    std::string overflow = "fold_into_last";
    std::string ar_structure = "diagonal";
    std::string config;
};

void add_common(CLI::App* sub, CliOptions& o) {
    auto& r = o.run;
    sub->add_option("--config", o.config, "key = value file; command-line flags win");
    sub->add_option("--seed", r.seed, "seed for synthetic data and the sampler");
    sub->add_option("--out", r.out_dir, "output directory");
    sub->add_option("--max-lead", r.ingest.max_lead, "last lead bucket L (buckets 0..L)");
}

void add_data(CLI::App* sub, CliOptions& o) {
    auto& r = o.run;
    sub->add_option("--input", r.input, "booking CSV (booking_date,trip_date,count)");
    sub->add_option("--holidays", r.holidays, "holiday CSV (name,date)");
    sub->add_option("--preset", r.preset, "synthetic preset when no input is given: correlated or static");
    sub->add_option("--start", r.start, "first booking date of synthetic data");
    sub->add_option("--end", r.end, "last booking date of synthetic data");
    sub->add_option("--overflow", o.overflow, "leads beyond L: fold_into_last or drop");
    sub->add_option("--epsilon", r.ingest.epsilon, "floor for monthly lead shares, in (0, 1e-3]");
}

void add_model(CLI::App* sub, CliOptions& o) {
    auto& r = o.run;
    auto& b = r.bdarma;
    sub->add_option("--p", b.p, "B-DARMA autoregressive order");
    sub->add_option("--q", b.q, "B-DARMA moving-average order");
    sub->add_option("--harmonics", b.covariates.fourier_harmonics, "annual Fourier pairs in the composition mean");
    sub->add_option("--ar-structure", o.ar_structure, "diagonal or full");
    sub->add_option("--prior-coefficient-scale", b.priors.coefficient_scale);
    sub->add_option("--prior-intercept-scale", b.priors.intercept_scale);
    sub->add_option("--prior-log-phi-mean", b.priors.log_phi_mean);
    sub->add_option("--prior-log-phi-scale", b.priors.log_phi_scale);
    sub->add_option("--max-iterations", r.fit.max_iterations);
    sub->add_option("--weekly-harmonics", r.totals.weekly_harmonics, "weekly Fourier pairs in the totals model");
    sub->add_option("--annual-harmonics", r.totals.annual_harmonics, "annual Fourier pairs in the totals model");
    sub->add_option("--ridge-lambda", r.totals.ridge_lambda, "ridge penalty of the totals model");
    sub->add_flag("--parallel-buckets", r.parallel_buckets, "fit bottom-up buckets concurrently");
}

void add_sampler(CLI::App* sub, CliOptions& o) {
    auto& r = o.run;
    sub->add_flag("--intervals", r.intervals, "posterior draws for 5%/95% allocation bands");
    sub->add_option("--warmup", r.sampler.warmup);
    sub->add_option("--draws", r.sampler.draws);
    sub->add_option("--thin", r.sampler.thin);
}

void add_forecast(CLI::App* sub, CliOptions& o) {
    auto& r = o.run;
    sub->add_option("--horizon", r.horizon, "months to forecast after the last complete month");
    sub->add_option("--backfill", r.backfill, "known reservations CSV (trip_month,total)");
    sub->add_option("--backfill-as-of", r.backfill_as_of, "last booking month included in the backfill (YYYY-MM)");
}

/// Config entries become --key=value arguments placed ahead of the command line, so
/// that with take-last semantics flags given on the command line win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty() || args.empty()) return args;
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_file(path);
    } catch (const CLI::Error& e) {
        throw ValidationError("cannot read config '" + path + "': " + e.what());
    }
    out.push_back(args.front());
    for (const auto& item : items) {
        if (!item.parents.empty()) throw ValidationError(path + ": sections are not supported ('" + item.fullname() + "')");
        if (item.name == "config") continue;
        for (const auto& v : item.inputs) out.push_back("--" + item.name + "=" + v);
        if (item.inputs.empty()) out.push_back("--" + item.name);
    }
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

void finish(CliOptions& o) {
    o.run.ingest.overflow = parse_overflow(o.overflow);
    o.run.bdarma.ar_structure = parse_ar_structure(o.ar_structure);
    o.run.sampler.seed = o.run.seed;
}

int run(int argc, char** argv) {
    CLI::App app{"Two-part booking forecasts: daily totals times lead-time compositions, shifted to the trip axis."};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    CliOptions o;

    auto* simulate = app.add_subcommand("simulate", "write a synthetic booking CSV");
    add_common(simulate, o);
    simulate->add_option("--preset", o.run.preset, "correlated or static");
    simulate->add_option("--start", o.run.start, "first booking date");
    simulate->add_option("--end", o.run.end, "last booking date");

    auto* fit = app.add_subcommand("fit", "fit the totals and B-DARMA models on all complete months");
    for (auto* add : {add_common, add_data, add_model, add_sampler}) add(fit, o);

    auto* forecast = app.add_subcommand("forecast", "two-part forecast on booking and trip axes");
    for (auto* add : {add_common, add_data, add_model, add_sampler, add_forecast}) add(forecast, o);
    forecast->add_option("--model-dir", o.run.model_dir, "reuse bdarma.json and totals.json written by fit");

    auto* benchmark = app.add_subcommand("benchmark", "bottom-up per-bucket forecast");
    for (auto* add : {add_common, add_data, add_model, add_forecast}) add(benchmark, o);

    auto* backtest = app.add_subcommand("backtest", "compare the two-part method with bottom-up on a split");
    for (auto* add : {add_common, add_data, add_model}) add(backtest, o);
    backtest->add_option("--split", o.run.split, "first test day, the first of a month");
    backtest->add_option("--test-months", o.run.test_months);
    backtest->add_option("--label", o.run.label);
    backtest->add_option("--seeds", o.run.seeds, "several synthetic seeds, one run each")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

    auto* report = app.add_subcommand("report", "render metrics.json into comparison and plot-data CSVs");
    report->add_option("--input", o.run.input, "metrics.json")->required();
    report->add_option("--out", o.run.out_dir, "output directory");

    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        args = expand_config(args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    finish(o);
    const auto& cfg = o.run;
    if (simulate->parsed()) {
        command_simulate(cfg);
    } else if (fit->parsed()) {
        command_fit(cfg);
    } else if (forecast->parsed()) {
        const auto out = command_forecast(cfg);
        if (out.acceptance_rate) std::cerr << "sampler acceptance " << format_fixed(*out.acceptance_rate, 3) << "\n";
    } else if (benchmark->parsed()) {
        command_benchmark(cfg);
    } else if (backtest->parsed()) {
        const auto doc = command_backtest(cfg);
        for (const auto& r : doc.at("runs")) {
            std::cout << r.at("label").get<std::string>() << ": normalized L1 two-part "
                      << format_fixed(r.at("methods").at("two_part").at("leadtime_mean_norm_l1").get<double>(), 4)
                      << ", bottom-up "
                      << format_fixed(r.at("methods").at("bottom_up").at("leadtime_mean_norm_l1").get<double>(), 4) << "\n";
        }
    } else if (report->parsed()) {
        command_report(cfg);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const leadcast::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const leadcast::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return kExitRuntime;
    }
}
