#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "leadcast/compositional.hpp"
#include "leadcast/dates.hpp"
#include "leadcast/ingest.hpp"
#include "leadcast/timeshift.hpp"

namespace leadcast {

struct EventSpike {
    Date date{};
    double magnitude = 0.0;   ///< extra expected bookings on the event day
    double decay_days = 0.0;  ///< e-folding time of the tail; 0 means a single day
};

/// Latent lead-time composition: alr_m = mean_m + rho (alr_{m-1} - mean_{m-1}) + sigma * noise,
/// with mean_m = base_alr + seasonal_amplitude * sin(2 pi (month_of_year / 12) + phase_j).
struct CompositionProcess {
    std::vector<double> base_alr;
    double rho = 0.0;
    double innovation_scale = 0.0;
    double seasonal_amplitude = 0.0;
};

struct ScenarioConfig {
    Date start = make_date(2014, 1, 1);
    Date end = make_date(2019, 12, 31);  ///< inclusive
    double base_level = 800.0;           ///< bookings per day
    double trend_slope = 0.0;            ///< relative growth per day
    double weekly_amplitude = 0.0;       ///< relative
    double annual_amplitude = 0.0;       ///< relative
    std::vector<EventSpike> events;
    CompositionProcess composition;
    int max_lead = 12;
    std::uint64_t seed = 1;

    void validate() const {
        if (end < start) throw ValidationError("scenario end precedes start");
        if (!(base_level > 0.0)) throw ValidationError("base_level must be > 0");
        if (!(std::abs(composition.rho) < 1.0)) throw ValidationError("|rho| must be < 1");
        if (composition.innovation_scale < 0.0) throw ValidationError("innovation_scale must be >= 0");
        if (max_lead < 1) throw ValidationError("max_lead must be >= 1");
        if (composition.base_alr.size() != static_cast<std::size_t>(max_lead)) {
            throw ValidationError("base_alr needs max_lead entries");
        }
        for (const auto& e : events) {
            if (e.decay_days < 0.0) throw ValidationError("event decay must be >= 0");
        }
    }
};

/// Geometric lead-time profile exp(-rate * l) as alr coordinates against the last bucket.
inline std::vector<double> geometric_lead_alr(int max_lead, double rate) {
    std::vector<double> out(static_cast<std::size_t>(max_lead));
    for (int l = 0; l < max_lead; ++l) out[static_cast<std::size_t>(l)] = rate * (max_lead - l);
    return out;
}

/// Presets shipped with the repository: "correlated" and "static".
inline ScenarioConfig scenario_preset(const std::string& name, std::uint64_t seed = 1) {
    ScenarioConfig c;
    c.seed = seed;
    c.composition.base_alr = geometric_lead_alr(c.max_lead, 0.1);
    if (name == "static") {
        return c;
    }
    if (name == "correlated") {
        c.trend_slope = 1.5e-4;
        c.weekly_amplitude = 0.12;
        c.annual_amplitude = 0.25;
        c.events.push_back({make_date(2017, 9, 1), 2400.0, 3.0});
        c.composition.rho = 0.8;
        c.composition.innovation_scale = 0.08;
        c.composition.seasonal_amplitude = 0.25;
        return c;
    }
    throw ValidationError("unknown preset '" + name + "' (expected correlated or static)");
}

/// Expected bookings on each day of the scenario (before Poisson noise).
inline DailySeries expected_daily_totals(const ScenarioConfig& config) {
    config.validate();
    DailySeries out;
    out.start = config.start;
    const auto days = static_cast<std::size_t>((config.end - config.start).count()) + 1;
    out.values.resize(days);
    for (std::size_t i = 0; i < days; ++i) {
        const Date d = out.date(i);
        const double t = static_cast<double>(i);
        const double weekly = 1.0 + config.weekly_amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(day_number(d)) / 7.0);
        const double annual = 1.0 + config.annual_amplitude * std::sin(2.0 * std::numbers::pi * day_of_year(d) / 365.25);
        double lambda = config.base_level * (1.0 + config.trend_slope * t) * weekly * annual;
        for (const auto& e : config.events) {
            const double since = static_cast<double>((d - e.date).count());
            if (since < 0.0) continue;
            if (e.decay_days == 0.0) {
                if (since == 0.0) lambda += e.magnitude;
            } else {
                lambda += e.magnitude * std::exp(-since / e.decay_days);
            }
        }
        out.values[i] = std::max(0.0, lambda);
    }
    return out;
}

/// The latent monthly lead-time compositions, one per booking month of the scenario.
inline std::vector<LeadAllocation> latent_compositions(const ScenarioConfig& config) {
    config.validate();
    const auto& proc = config.composition;
    const auto d = static_cast<std::size_t>(config.max_lead);
    std::mt19937_64 rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
    std::normal_distribution<double> normal(0.0, 1.0);

    auto mean_at = [&](MonthIndex m) {
        std::vector<double> mu(proc.base_alr);
        const double season = 2.0 * std::numbers::pi * static_cast<double>(month_of_year(m) - 1) / 12.0;
        for (std::size_t j = 0; j < d; ++j) {
            mu[j] += proc.seasonal_amplitude * std::sin(season + 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(d));
        }
        return mu;
    };

    std::vector<double> dev(d, 0.0);
    const double stationary = proc.innovation_scale / std::sqrt(1.0 - proc.rho * proc.rho);
    for (auto& v : dev) v = stationary * normal(rng);

    std::vector<LeadAllocation> out;
    for (MonthIndex m = month_of(config.start); m <= month_of(config.end); ++m) {
        if (m != month_of(config.start)) {
            for (auto& v : dev) v = proc.rho * v + proc.innovation_scale * normal(rng);
        }
        auto z = mean_at(m);
        for (std::size_t j = 0; j < d; ++j) z[j] += dev[j];
        out.push_back({m, alr_inverse(AlrVector(std::move(z)))});
    }
    return out;
}

namespace detail {

/// Multinomial counts by sequential binomials.
inline std::vector<std::int64_t> multinomial(std::mt19937_64& rng, std::int64_t n, const std::vector<double>& p) {
    std::vector<std::int64_t> out(p.size(), 0);
    double remaining_p = 1.0;
    for (std::size_t j = 0; j + 1 < p.size() && n > 0; ++j) {
        const double q = std::clamp(p[j] / remaining_p, 0.0, 1.0);
        std::binomial_distribution<std::int64_t> binom(n, q);
        out[j] = binom(rng);
        n -= out[j];
        remaining_p -= p[j];
        if (remaining_p <= 0.0) break;
    }
    out.back() += n;
    return out;
}

}  // namespace detail

/**
 * Synthetic (booking date, trip date, count) records. Daily totals are Poisson around
 * expected_daily_totals(); each day's bookings split multinomially over lead buckets
 * with its month's latent composition; trip days are uniform within the trip month
 * (lead 0 draws from the booking day to month end). Sorted by booking then trip date.
 */
inline std::vector<BookingRecord> generate(const ScenarioConfig& config) {
    config.validate();
    const auto expected = expected_daily_totals(config);
    const auto latent = latent_compositions(config);
    std::map<MonthIndex, const Composition*> by_month;
    for (const auto& a : latent) by_month[a.booking_month] = &a.proportions;

    std::mt19937_64 rng(config.seed);
    std::vector<BookingRecord> out;
    std::map<long, std::int64_t> trip_counts;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const Date booking = expected.date(i);
        std::poisson_distribution<std::int64_t> poisson(expected.values[i]);
        const std::int64_t total = expected.values[i] > 0.0 ? poisson(rng) : 0;
        if (total == 0) continue;
        const MonthIndex bm = month_of(booking);
        const auto split = detail::multinomial(rng, total, by_month.at(bm)->values());
        trip_counts.clear();
        for (std::size_t lead = 0; lead < split.size(); ++lead) {
            const MonthIndex tm = bm + static_cast<MonthIndex>(lead);
            const Date lo = lead == 0 ? booking : first_day(tm);
            const long span = static_cast<long>((last_day(tm) - lo).count());
            std::uniform_int_distribution<long> pick(0, span);
            for (std::int64_t k = 0; k < split[lead]; ++k) ++trip_counts[day_number(lo) + pick(rng)];
        }
        for (const auto& [day, count] : trip_counts) {
            out.push_back({booking, Date{std::chrono::days{day}}, count});
        }
    }
    return out;
}

}  // namespace leadcast
