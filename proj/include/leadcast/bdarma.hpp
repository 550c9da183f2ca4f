#pragma once

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "leadcast/compositional.hpp"
#include "leadcast/dates.hpp"
#include "leadcast/numeric.hpp"

namespace leadcast {

// ---------------------------------------------------------------------------
// Model description
// ---------------------------------------------------------------------------

struct EventIndicator {
    std::string name;
    std::set<MonthIndex> months;

    friend bool operator==(const EventIndicator&, const EventIndicator&) = default;
};

/**
 * Covariates for the alr-space mean. Column order of the design is fixed:
 * intercept, linear trend, (sin, cos) for harmonics 1..K, then event indicators.
 *
 * The trend column is (t - trend_origin) / trend_scale; fitting code anchors it
 * on the training window (first month, training length).
 */
struct CovariateSpec {
    bool include_intercept = true;
    bool include_linear_trend = true;
    double fourier_period = 12.0;
    int fourier_harmonics = 2;
    std::vector<EventIndicator> events;
    MonthIndex trend_origin = 0;
    double trend_scale = 1.0;

    void validate() const {
        if (fourier_harmonics < 0) throw ValidationError("fourier_harmonics must be >= 0");
        if (!(fourier_period > 0.0)) throw ValidationError("fourier_period must be > 0");
        if (!(trend_scale > 0.0)) throw ValidationError("trend_scale must be > 0");
    }

    [[nodiscard]] std::size_t num_columns() const noexcept {
        return (include_intercept ? 1u : 0u) + (include_linear_trend ? 1u : 0u) +
               2u * static_cast<std::size_t>(fourier_harmonics) + events.size();
    }

    friend bool operator==(const CovariateSpec&, const CovariateSpec&) = default;
};

/// Anchors the trend column on a training window of month indices.
inline void anchor_trend(CovariateSpec& spec, const std::vector<MonthIndex>& training_times) {
    if (training_times.empty()) throw ValidationError("anchor_trend: empty training window");
    spec.trend_origin = training_times.front();
    spec.trend_scale = static_cast<double>(training_times.size());
}

inline std::vector<std::string> design_column_names(const CovariateSpec& spec) {
    std::vector<std::string> names;
    if (spec.include_intercept) names.emplace_back("intercept");
    if (spec.include_linear_trend) names.emplace_back("trend");
    for (int k = 1; k <= spec.fourier_harmonics; ++k) {
        names.push_back("sin" + std::to_string(k));
        names.push_back("cos" + std::to_string(k));
    }
    for (const auto& e : spec.events) names.push_back("event:" + e.name);
    return names;
}

inline Eigen::MatrixXd design_matrix(const CovariateSpec& spec, const std::vector<MonthIndex>& times) {
    spec.validate();
    const auto rows = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(spec.num_columns()));
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double t = times[static_cast<std::size_t>(r)];
        Eigen::Index c = 0;
        if (spec.include_intercept) x(r, c++) = 1.0;
        if (spec.include_linear_trend) x(r, c++) = (t - spec.trend_origin) / spec.trend_scale;
        for (int k = 1; k <= spec.fourier_harmonics; ++k) {
            const double angle = 2.0 * std::numbers::pi * k * t / spec.fourier_period;
            x(r, c++) = std::sin(angle);
            x(r, c++) = std::cos(angle);
        }
        for (const auto& e : spec.events) x(r, c++) = e.months.count(times[static_cast<std::size_t>(r)]) ? 1.0 : 0.0;
    }
    return x;
}

enum class ArStructure { diagonal, full };

/// Independent Gaussian priors: N(0, coefficient_scale^2) on every AR/MA/covariate
/// coefficient and N(log_phi_mean, log_phi_scale^2) on the log precision.
struct PriorSpec {
    double coefficient_scale = 1.0;
    double intercept_scale = 10.0;  ///< intercept column of beta; alr levels sit far from 0
    double log_phi_mean = std::log(100.0);
    double log_phi_scale = 1.0;

    void validate() const {
        if (!(coefficient_scale > 0.0) || !(intercept_scale > 0.0) || !(log_phi_scale > 0.0)) {
            throw ValidationError("prior scales must be > 0");
        }
    }
    friend bool operator==(const PriorSpec&, const PriorSpec&) = default;
};

struct BdarmaSpec {
    int p = 1;
    int q = 0;
    int num_components = 13;
    CovariateSpec covariates;
    ArStructure ar_structure = ArStructure::diagonal;
    PriorSpec priors;

    void validate() const {
        if (p < 0 || q < 0) throw ValidationError("B-DARMA orders must be non-negative");
        if (num_components < 2) throw ValidationError("B-DARMA needs at least 2 components");
        covariates.validate();
        priors.validate();
    }
    [[nodiscard]] int max_lag() const noexcept { return p > q ? p : q; }
    [[nodiscard]] Eigen::Index alr_dim() const noexcept { return num_components - 1; }

    friend bool operator==(const BdarmaSpec&, const BdarmaSpec&) = default;
};

struct BdarmaParams {
    std::vector<Eigen::MatrixXd> ar;  ///< p matrices, (J-1) x (J-1)
    std::vector<Eigen::MatrixXd> ma;  ///< q matrices, (J-1) x (J-1)
    Eigen::MatrixXd beta;             ///< (J-1) x m covariate coefficients
    double log_phi = 0.0;

    /// All coefficients zero, log_phi as given.
    static BdarmaParams zeros(const BdarmaSpec& spec, double log_phi = 0.0) {
        const auto d = spec.alr_dim();
        BdarmaParams out;
        out.ar.assign(static_cast<std::size_t>(spec.p), Eigen::MatrixXd::Zero(d, d));
        out.ma.assign(static_cast<std::size_t>(spec.q), Eigen::MatrixXd::Zero(d, d));
        out.beta = Eigen::MatrixXd::Zero(d, static_cast<Eigen::Index>(spec.covariates.num_columns()));
        out.log_phi = log_phi;
        return out;
    }

    [[nodiscard]] double phi() const { return std::exp(log_phi); }
};

inline bool operator==(const BdarmaParams& a, const BdarmaParams& b) {
    auto same = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
        return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
    };
    if (a.ar.size() != b.ar.size() || a.ma.size() != b.ma.size()) return false;
    for (std::size_t i = 0; i < a.ar.size(); ++i) if (!same(a.ar[i], b.ar[i])) return false;
    for (std::size_t i = 0; i < a.ma.size(); ++i) if (!same(a.ma[i], b.ma[i])) return false;
    return same(a.beta, b.beta) && a.log_phi == b.log_phi;
}

inline void check_params(const BdarmaParams& params, const BdarmaSpec& spec, Eigen::Index design_cols) {
    const auto d = spec.alr_dim();
    auto check = [&](const Eigen::MatrixXd& m, const char* what) {
        if (m.rows() != d || m.cols() != d) throw ValidationError(std::string(what) + " matrix has wrong shape");
        if (!m.allFinite()) throw ValidationError(std::string(what) + " matrix has non-finite entries");
        if (spec.ar_structure == ArStructure::diagonal) {
            for (Eigen::Index r = 0; r < d; ++r)
                for (Eigen::Index c = 0; c < d; ++c)
                    if (r != c && m(r, c) != 0.0) throw ValidationError(std::string(what) + " must be diagonal");
        }
    };
    if (params.ar.size() != static_cast<std::size_t>(spec.p)) throw ValidationError("expected p AR matrices");
    if (params.ma.size() != static_cast<std::size_t>(spec.q)) throw ValidationError("expected q MA matrices");
    for (const auto& a : params.ar) check(a, "AR");
    for (const auto& b : params.ma) check(b, "MA");
    if (params.beta.rows() != d || params.beta.cols() != design_cols) {
        throw ValidationError("beta must be (J-1) x (number of design columns)");
    }
    if (!params.beta.allFinite() || !std::isfinite(params.log_phi)) throw ValidationError("non-finite parameters");
}

// ---------------------------------------------------------------------------
// Observed compositions
// ---------------------------------------------------------------------------

/// Monthly compositions on contiguous month indices.
struct CompositionSeries {
    std::vector<MonthIndex> times;
    std::vector<Composition> values;

    void validate() const {
        if (times.size() != values.size()) throw ValidationError("composition series: times/values length mismatch");
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (times[i] != times[i - 1] + 1) throw ValidationError("composition series must be contiguous monthly");
        }
        for (std::size_t i = 1; i < values.size(); ++i) {
            if (values[i].size() != values[0].size()) throw ValidationError("composition series: ragged parts");
        }
    }
    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }

    /// Months [from, to) by position.
    [[nodiscard]] CompositionSeries slice(std::size_t from, std::size_t to) const {
        CompositionSeries out;
        out.times.assign(times.begin() + static_cast<long>(from), times.begin() + static_cast<long>(to));
        out.values.assign(values.begin() + static_cast<long>(from), values.begin() + static_cast<long>(to));
        return out;
    }
};

namespace detail {

/// alr coordinates (last-part reference) as columns of a (J-1) x T matrix.
inline Eigen::MatrixXd alr_columns(const CompositionSeries& series, Eigen::Index d) {
    Eigen::MatrixXd z(d, static_cast<Eigen::Index>(series.size()));
    for (std::size_t t = 0; t < series.size(); ++t) {
        const auto& c = series.values[t];
        if (static_cast<Eigen::Index>(c.size()) != d + 1) throw ValidationError("composition has wrong number of parts");
        const double log_ref = std::log(c[c.size() - 1]);
        for (Eigen::Index k = 0; k < d; ++k) z(k, static_cast<Eigen::Index>(t)) = std::log(c[static_cast<std::size_t>(k)]) - log_ref;
    }
    return z;
}

/// Linear predictor columns over the observed window. `z` is (J-1) x T, `x` is T x m.
inline Eigen::MatrixXd predictor_columns(const BdarmaParams& params, const BdarmaSpec& spec,
                                         const Eigen::MatrixXd& z, const Eigen::MatrixXd& x) {
    const Eigen::Index T = z.cols();
    const Eigen::Index r = spec.max_lag();
    const Eigen::MatrixXd reg = params.beta * x.transpose();  // (J-1) x T
    Eigen::MatrixXd eta(z.rows(), T);
    for (Eigen::Index t = 0; t < T; ++t) {
        eta.col(t) = reg.col(t);
        if (t < r) continue;
        for (int i = 1; i <= spec.p; ++i) eta.col(t).noalias() += params.ar[static_cast<std::size_t>(i - 1)] * (z.col(t - i) - reg.col(t - i));
        for (int j = 1; j <= spec.q; ++j) eta.col(t).noalias() += params.ma[static_cast<std::size_t>(j - 1)] * (z.col(t - j) - eta.col(t - j));
    }
    return eta;
}

/// lgamma(x) - [(x - 1/2) ln x - x + ln(2 pi) / 2] for x >= 10, by its asymptotic series.
inline double stirling_remainder(double x) {
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return inv *
           (1.0 / 12.0 +
            inv2 * (-1.0 / 360.0 +
                    inv2 * (1.0 / 1260.0 +
                            inv2 * (-1.0 / 1680.0 + inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360360.0 + inv2 / 156.0))))));
}

inline constexpr double kStirlingThreshold = 10.0;

/**
 * Dirichlet log density with concentration phi * mu, on raw arrays of length J.
 *
 * For large phi the terms lgamma(phi) and sum_j lgamma(phi mu_j) are each of order
 * phi ln phi and cancel almost entirely; the Stirling forms of those terms are combined
 * analytically so that what is summed is of order phi * KL(mu || y).
 */
template <typename Y, typename Mu>
double dirichlet_log_density_raw(const Y& y, const Mu& mu, std::size_t parts, double phi) {
    if (phi < kStirlingThreshold) {
        double out = boost::math::lgamma(phi);
        for (std::size_t j = 0; j < parts; ++j) {
            const double a = phi * mu[j];
            out += (a - 1.0) * std::log(y[j]) - boost::math::lgamma(a);
        }
        return out;
    }
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    const double log_phi = std::log(phi);
    double small_mass = 0.0;
    double large_count = 0.0;
    CompensatedSum body;
    for (std::size_t j = 0; j < parts; ++j) {
        const double a = phi * mu[j];
        const double log_y = std::log(y[j]);
        if (a < kStirlingThreshold) {
            small_mass += a;
            body.add((a - 1.0) * log_y - boost::math::lgamma(a));
        } else {
            const double log_mu = std::log(mu[j]);
            large_count += 1.0;
            body.add(a * (log_y - log_mu));
            body.add(0.5 * log_mu - log_y - stirling_remainder(a));
        }
    }
    body.add(small_mass * (log_phi - 1.0));
    body.add(0.5 * (large_count - 1.0) * (log_phi - 2.0 * half_log_2pi));
    body.add(stirling_remainder(phi));
    return body.value();
}

inline void check_inputs(const BdarmaSpec& spec, const CompositionSeries& series, const Eigen::MatrixXd& x) {
    spec.validate();
    series.validate();
    if (static_cast<std::size_t>(x.rows()) != series.size()) throw ValidationError("design rows must match series length");
    if (static_cast<std::size_t>(x.cols()) != spec.covariates.num_columns()) {
        throw ValidationError("design columns do not match covariate spec");
    }
    if (series.size() < static_cast<std::size_t>(spec.max_lag())) {
        throw ValidationError("series shorter than model order max(p, q)");
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Model evaluation
// ---------------------------------------------------------------------------

/**
 * alr-space means for every observed month.
 *
 * For t >= max(p, q):
 *   eta_t = beta x_t + sum_i A_i (alr(y_{t-i}) - beta x_{t-i}) + sum_j B_j (alr(y_{t-j}) - eta_{t-j});
 * earlier months use eta_t = beta x_t and are treated as conditioning values.
 */
inline std::vector<AlrVector> linear_predictor(const BdarmaParams& params, const BdarmaSpec& spec,
                                               const CompositionSeries& history, const Eigen::MatrixXd& x) {
    detail::check_inputs(spec, history, x);
    check_params(params, spec, x.cols());
    const auto eta = detail::predictor_columns(params, spec, detail::alr_columns(history, spec.alr_dim()), x);
    std::vector<AlrVector> out;
    out.reserve(static_cast<std::size_t>(eta.cols()));
    for (Eigen::Index t = 0; t < eta.cols(); ++t) {
        out.emplace_back(std::vector<double>(eta.col(t).data(), eta.col(t).data() + eta.rows()));
    }
    return out;
}

/// ln Dir(y | phi * mu).
inline double dirichlet_log_density(const Composition& y, const Composition& mu, double phi) {
    if (!(phi > 0.0) || !std::isfinite(phi)) throw ValidationError("Dirichlet precision must be positive and finite");
    if (y.size() != mu.size()) throw ValidationError("Dirichlet: y and mu differ in length");
    return detail::dirichlet_log_density_raw(y.values(), mu.values(), y.size(), phi);
}

/// Conditional log likelihood: months before max(p, q) are conditioned on, not scored.
inline double log_likelihood(const BdarmaParams& params, const BdarmaSpec& spec, const CompositionSeries& series,
                             const Eigen::MatrixXd& x) {
    detail::check_inputs(spec, series, x);
    check_params(params, spec, x.cols());
    const auto d = spec.alr_dim();
    const auto eta = detail::predictor_columns(params, spec, detail::alr_columns(series, d), x);
    const double phi = params.phi();
    const auto parts = static_cast<std::size_t>(spec.num_components);
    std::vector<double> mu(parts);
    CompensatedSum total;
    for (Eigen::Index t = spec.max_lag(); t < eta.cols(); ++t) {
        detail::alr_inverse_into(eta.col(t), static_cast<std::size_t>(d), mu, parts - 1);
        total.add(detail::dirichlet_log_density_raw(series.values[static_cast<std::size_t>(t)].values(), mu, parts, phi));
    }
    return total.value();
}

// ---------------------------------------------------------------------------
// Forecasting
// ---------------------------------------------------------------------------

struct ForecastStep {
    MonthIndex month = 0;
    Composition mean = Composition::uniform(2);
    std::vector<Composition> samples;  ///< one per posterior draw, empty without draws
};

namespace detail {

/// Plug-in path: future observations are replaced by their predicted means, so future
/// MA residuals are zero. Returns the h future alr means as columns.
inline Eigen::MatrixXd forecast_alr_path(const BdarmaParams& params, const BdarmaSpec& spec, const Eigen::MatrixXd& z,
                                         const Eigen::MatrixXd& x_hist, const Eigen::MatrixXd& x_future) {
    const Eigen::Index T = z.cols();
    const Eigen::Index h = x_future.rows();
    const Eigen::Index d = z.rows();
    const Eigen::MatrixXd eta_hist = predictor_columns(params, spec, z, x_hist);

    Eigen::MatrixXd x_all(T + h, x_hist.cols());
    x_all << x_hist, x_future;
    const Eigen::MatrixXd reg = params.beta * x_all.transpose();

    Eigen::MatrixXd z_all(d, T + h);
    Eigen::MatrixXd eta_all(d, T + h);
    z_all.leftCols(T) = z;
    eta_all.leftCols(T) = eta_hist;
    for (Eigen::Index s = T; s < T + h; ++s) {
        Eigen::VectorXd eta = reg.col(s);
        for (int i = 1; i <= spec.p; ++i) {
            if (s - i < 0) continue;
            eta.noalias() += params.ar[static_cast<std::size_t>(i - 1)] * (z_all.col(s - i) - reg.col(s - i));
        }
        for (int j = 1; j <= spec.q; ++j) {
            if (s - j < 0) continue;
            eta.noalias() += params.ma[static_cast<std::size_t>(j - 1)] * (z_all.col(s - j) - eta_all.col(s - j));
        }
        eta_all.col(s) = eta;
        z_all.col(s) = eta;
    }
    return eta_all.rightCols(h);
}

inline Composition composition_from_alr(const Eigen::VectorXd& eta) {
    std::vector<double> out(static_cast<std::size_t>(eta.size() + 1));
    alr_inverse_into(eta, static_cast<std::size_t>(eta.size()), out, out.size() - 1);
    return Composition(std::move(out));
}

}  // namespace detail

/**
 * h-step mean forecasts continuing `history`. `x_history` holds the design rows of the
 * history months and `x_future` the next h rows. When `draws` is non-empty, each draw
 * is propagated along the same plug-in path to give per-step sample sets.
 */
inline std::vector<ForecastStep> forecast_compositions(const BdarmaParams& params, const BdarmaSpec& spec,
                                                       const CompositionSeries& history, const Eigen::MatrixXd& x_history,
                                                       const Eigen::MatrixXd& x_future,
                                                       const std::vector<BdarmaParams>& draws = {}) {
    if (x_future.rows() <= 0) throw ValidationError("forecast horizon must be positive");
    detail::check_inputs(spec, history, x_history);
    check_params(params, spec, x_history.cols());
    if (x_future.cols() != x_history.cols()) throw ValidationError("future design has wrong column count");
    if (history.size() == 0) throw ValidationError("forecast needs a non-empty history");

    const auto z = detail::alr_columns(history, spec.alr_dim());
    const auto mean_path = detail::forecast_alr_path(params, spec, z, x_history, x_future);
    std::vector<ForecastStep> steps;
    steps.reserve(static_cast<std::size_t>(x_future.rows()));
    for (Eigen::Index s = 0; s < mean_path.cols(); ++s) {
        ForecastStep step;
        step.month = history.times.back() + 1 + static_cast<MonthIndex>(s);
        step.mean = detail::composition_from_alr(mean_path.col(s));
        steps.push_back(std::move(step));
    }
    for (const auto& draw : draws) {
        check_params(draw, spec, x_history.cols());
        const auto path = detail::forecast_alr_path(draw, spec, z, x_history, x_future);
        for (Eigen::Index s = 0; s < path.cols(); ++s) {
            steps[static_cast<std::size_t>(s)].samples.push_back(detail::composition_from_alr(path.col(s)));
        }
    }
    return steps;
}

}  // namespace leadcast
