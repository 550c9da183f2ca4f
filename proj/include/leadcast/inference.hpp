#pragma once

#include <Eigen/Dense>
#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "leadcast/bdarma.hpp"
#include "leadcast/numeric.hpp"

namespace leadcast {

/**
 * Flat parameter vector layout: AR matrices (diagonals only under a diagonal
 * structure, otherwise row-major), then MA matrices likewise, then beta row-major,
 * then log_phi last.
 */
class ParameterLayout {
public:
    ParameterLayout(const BdarmaSpec& spec, Eigen::Index design_cols) : spec_(spec), cols_(design_cols) {
        const Eigen::Index d = spec.alr_dim();
        per_matrix_ = spec.ar_structure == ArStructure::diagonal ? d : d * d;
        size_ = (spec.p + spec.q) * per_matrix_ + d * cols_ + 1;
    }

    [[nodiscard]] Eigen::Index size() const noexcept { return size_; }
    [[nodiscard]] Eigen::Index log_phi_index() const noexcept { return size_ - 1; }

    [[nodiscard]] Eigen::VectorXd flatten(const BdarmaParams& params) const {
        Eigen::VectorXd out(size_);
        Eigen::Index k = 0;
        auto put = [&](const Eigen::MatrixXd& m) {
            if (spec_.ar_structure == ArStructure::diagonal) {
                for (Eigen::Index r = 0; r < m.rows(); ++r) out(k++) = m(r, r);
            } else {
                for (Eigen::Index r = 0; r < m.rows(); ++r)
                    for (Eigen::Index c = 0; c < m.cols(); ++c) out(k++) = m(r, c);
            }
        };
        for (const auto& a : params.ar) put(a);
        for (const auto& b : params.ma) put(b);
        for (Eigen::Index r = 0; r < params.beta.rows(); ++r)
            for (Eigen::Index c = 0; c < params.beta.cols(); ++c) out(k++) = params.beta(r, c);
        out(k++) = params.log_phi;
        return out;
    }

    [[nodiscard]] BdarmaParams unflatten(const Eigen::VectorXd& theta) const {
        if (theta.size() != size_) throw ValidationError("parameter vector has wrong length");
        BdarmaParams out = BdarmaParams::zeros(spec_);
        out.beta.resize(spec_.alr_dim(), cols_);
        Eigen::Index k = 0;
        auto take = [&](Eigen::MatrixXd& m) {
            if (spec_.ar_structure == ArStructure::diagonal) {
                for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, r) = theta(k++);
            } else {
                for (Eigen::Index r = 0; r < m.rows(); ++r)
                    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = theta(k++);
            }
        };
        for (auto& a : out.ar) take(a);
        for (auto& b : out.ma) take(b);
        for (Eigen::Index r = 0; r < out.beta.rows(); ++r)
            for (Eigen::Index c = 0; c < out.beta.cols(); ++c) out.beta(r, c) = theta(k++);
        out.log_phi = theta(k++);
        return out;
    }

    [[nodiscard]] std::vector<std::string> names() const {
        std::vector<std::string> out;
        const Eigen::Index d = spec_.alr_dim();
        auto add = [&](const std::string& prefix) {
            for (Eigen::Index r = 0; r < d; ++r) {
                if (spec_.ar_structure == ArStructure::diagonal) {
                    out.push_back(prefix + "[" + std::to_string(r) + "," + std::to_string(r) + "]");
                } else {
                    for (Eigen::Index c = 0; c < d; ++c)
                        out.push_back(prefix + "[" + std::to_string(r) + "," + std::to_string(c) + "]");
                }
            }
        };
        for (int i = 1; i <= spec_.p; ++i) add("ar" + std::to_string(i));
        for (int j = 1; j <= spec_.q; ++j) add("ma" + std::to_string(j));
        const auto cols = design_column_names(spec_.covariates);
        for (Eigen::Index r = 0; r < d; ++r)
            for (Eigen::Index c = 0; c < cols_; ++c)
                out.push_back("beta[" + std::to_string(r) + "," +
                              (static_cast<std::size_t>(c) < cols.size() ? cols[static_cast<std::size_t>(c)] : std::to_string(c)) + "]");
        out.emplace_back("log_phi");
        return out;
    }

    /// Prior means and standard deviations in flat order.
    [[nodiscard]] std::pair<Eigen::VectorXd, Eigen::VectorXd> prior_moments() const {
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(size_);
        Eigen::VectorXd sd = Eigen::VectorXd::Constant(size_, spec_.priors.coefficient_scale);
        if (spec_.covariates.include_intercept) {
            const Eigen::Index offset = (spec_.p + spec_.q) * per_matrix_;
            for (Eigen::Index r = 0; r < spec_.alr_dim(); ++r) sd(offset + r * cols_) = spec_.priors.intercept_scale;
        }
        mean(log_phi_index()) = spec_.priors.log_phi_mean;
        sd(log_phi_index()) = spec_.priors.log_phi_scale;
        return {mean, sd};
    }

private:
    BdarmaSpec spec_;
    Eigen::Index cols_ = 0;
    Eigen::Index per_matrix_ = 0;
    Eigen::Index size_ = 0;
};

/**
 * Log posterior of a B-DARMA model over a fixed data set, evaluated on flat
 * parameter vectors. Holds precomputed alr coordinates of the observations.
 */
class PosteriorTarget {
public:
    PosteriorTarget(BdarmaSpec spec, const CompositionSeries& series, Eigen::MatrixXd x)
        : spec_(std::move(spec)), layout_(spec_, x.cols()), series_(series), x_(std::move(x)) {
        detail::check_inputs(spec_, series_, x_);
        z_ = detail::alr_columns(series_, spec_.alr_dim());
        log_y_.resize(spec_.num_components, static_cast<Eigen::Index>(series_.size()));
        for (std::size_t t = 0; t < series_.size(); ++t)
            for (int j = 0; j < spec_.num_components; ++j)
                log_y_(j, static_cast<Eigen::Index>(t)) = std::log(series_.values[t][static_cast<std::size_t>(j)]);
        std::tie(prior_mean_, prior_sd_) = layout_.prior_moments();
    }

    [[nodiscard]] const ParameterLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] const BdarmaSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return layout_.size(); }

    [[nodiscard]] double log_prior(const Eigen::VectorXd& theta) const {
        CompensatedSum acc;
        for (Eigen::Index k = 0; k < theta.size(); ++k) {
            const double u = (theta(k) - prior_mean_(k)) / prior_sd_(k);
            acc.add(-0.5 * u * u - std::log(prior_sd_(k)) - 0.5 * std::log(2.0 * std::numbers::pi));
        }
        return acc.value();
    }

    [[nodiscard]] double log_likelihood(const Eigen::VectorXd& theta) const {
        const BdarmaParams params = layout_.unflatten(theta);
        const auto eta = detail::predictor_columns(params, spec_, z_, x_);
        const double phi = params.phi();
        const auto parts = static_cast<std::size_t>(spec_.num_components);
        std::vector<double> mu(parts);
        std::vector<double> y(parts);
        CompensatedSum total;
        for (Eigen::Index t = spec_.max_lag(); t < eta.cols(); ++t) {
            detail::alr_inverse_into(eta.col(t), parts - 1, mu, parts - 1);
            total.add(detail::dirichlet_log_density_raw(series_.values[static_cast<std::size_t>(t)].values(), mu, parts, phi));
        }
        return total.value();
    }

    [[nodiscard]] double value(const Eigen::VectorXd& theta) const { return log_likelihood(theta) + log_prior(theta); }

    /// Analytic gradient of the log posterior, by reverse accumulation through the recursion.
    [[nodiscard]] Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const {
        const BdarmaParams params = layout_.unflatten(theta);
        const Eigen::Index d = spec_.alr_dim();
        const Eigen::Index T = z_.cols();
        const Eigen::Index r = spec_.max_lag();
        const auto parts = static_cast<std::size_t>(spec_.num_components);
        const double phi = params.phi();

        const Eigen::MatrixXd reg = params.beta * x_.transpose();
        const auto eta = detail::predictor_columns(params, spec_, z_, x_);

        Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(d, T);
        double d_log_phi = 0.0;
        std::vector<double> mu(parts);
        std::vector<double> dig(parts);
        const double dig_phi = boost::math::digamma(phi);
        for (Eigen::Index t = r; t < T; ++t) {
            detail::alr_inverse_into(eta.col(t), parts - 1, mu, parts - 1);
            double mean_g = 0.0;
            double mean_dig = 0.0;
            double mean_logy = 0.0;
            std::vector<double> g(parts);
            for (std::size_t j = 0; j < parts; ++j) {
                dig[j] = boost::math::digamma(phi * mu[j]);
                g[j] = phi * (log_y_(static_cast<Eigen::Index>(j), t) - dig[j]);
                mean_g += mu[j] * g[j];
                mean_dig += mu[j] * dig[j];
                mean_logy += mu[j] * log_y_(static_cast<Eigen::Index>(j), t);
            }
            for (Eigen::Index k = 0; k < d; ++k) adj(k, t) = mu[static_cast<std::size_t>(k)] * (g[static_cast<std::size_t>(k)] - mean_g);
            d_log_phi += phi * (dig_phi - mean_dig + mean_logy);
        }

        // eta_{t+j} depends on eta_t through -B_j when t + j >= r.
        if (spec_.q > 0) {
            for (Eigen::Index t = T - 1; t >= 0; --t) {
                for (int j = 1; j <= spec_.q; ++j) {
                    const Eigen::Index s = t + j;
                    if (s >= T || s < r) continue;
                    adj.col(t).noalias() -= params.ma[static_cast<std::size_t>(j - 1)].transpose() * adj.col(s);
                }
            }
        }

        std::vector<Eigen::MatrixXd> g_ar(params.ar.size(), Eigen::MatrixXd::Zero(d, d));
        std::vector<Eigen::MatrixXd> g_ma(params.ma.size(), Eigen::MatrixXd::Zero(d, d));
        Eigen::MatrixXd g_beta = Eigen::MatrixXd::Zero(d, x_.cols());
        for (Eigen::Index t = 0; t < T; ++t) {
            const Eigen::VectorXd lam = adj.col(t);
            g_beta.noalias() += lam * x_.row(t);
            if (t < r) continue;
            for (int i = 1; i <= spec_.p; ++i) {
                const auto& a = params.ar[static_cast<std::size_t>(i - 1)];
                g_ar[static_cast<std::size_t>(i - 1)].noalias() += lam * (z_.col(t - i) - reg.col(t - i)).transpose();
                g_beta.noalias() -= (a.transpose() * lam) * x_.row(t - i);
            }
            for (int j = 1; j <= spec_.q; ++j) {
                g_ma[static_cast<std::size_t>(j - 1)].noalias() += lam * (z_.col(t - j) - eta.col(t - j)).transpose();
            }
        }

        BdarmaParams grad;
        grad.ar = std::move(g_ar);
        grad.ma = std::move(g_ma);
        grad.beta = std::move(g_beta);
        grad.log_phi = d_log_phi;
        Eigen::VectorXd out = layout_.flatten(grad);
        out.array() -= ((theta - prior_mean_).array() / prior_sd_.array().square());
        return out;
    }

private:
    BdarmaSpec spec_;
    ParameterLayout layout_;
    CompositionSeries series_;
    Eigen::MatrixXd x_;
    Eigen::MatrixXd z_;
    Eigen::MatrixXd log_y_;
    Eigen::VectorXd prior_mean_;
    Eigen::VectorXd prior_sd_;
};

/// Log likelihood plus independent Gaussian log priors (normalizing constants included).
inline double log_posterior(const BdarmaParams& params, const BdarmaSpec& spec, const CompositionSeries& series,
                            const Eigen::MatrixXd& x) {
    check_params(params, spec, x.cols());
    const PosteriorTarget target(spec, series, x);
    return target.value(target.layout().flatten(params));
}

/// Gradient of log_posterior with respect to the flat parameter vector.
inline Eigen::VectorXd gradient(const BdarmaParams& params, const BdarmaSpec& spec, const CompositionSeries& series,
                                const Eigen::MatrixXd& x) {
    check_params(params, spec, x.cols());
    const PosteriorTarget target(spec, series, x);
    return target.gradient(target.layout().flatten(params));
}

// ---------------------------------------------------------------------------
// MAP fitting
// ---------------------------------------------------------------------------

struct FitOptions {
    int max_iterations = 2000;
    double gradient_tolerance = 1e-5;
    double relative_tolerance = 1e-10;
};

struct FitReport {
    BdarmaParams map_params;
    double initial_log_posterior = 0.0;
    double final_log_posterior = 0.0;
    double gradient_max_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::optional<std::vector<BdarmaParams>> samples;
    std::optional<double> acceptance_rate;
    bool low_acceptance = false;
};

/// Raised when the objective becomes non-finite where the search cannot recover.
class FitError : public RuntimeFailure {
public:
    FitError(const std::string& what, Eigen::VectorXd theta, Eigen::VectorXd step)
        : RuntimeFailure(what), theta_(std::move(theta)), step_(std::move(step)) {}
    [[nodiscard]] const Eigen::VectorXd& parameters() const noexcept { return theta_; }
    [[nodiscard]] const Eigen::VectorXd& step() const noexcept { return step_; }

private:
    Eigen::VectorXd theta_;
    Eigen::VectorXd step_;
};

/// Deterministic start: beta by least squares of alr(y) on the design, AR/MA at zero,
/// log_phi at its prior mean.
inline BdarmaParams initial_params(const BdarmaSpec& spec, const CompositionSeries& series, const Eigen::MatrixXd& x) {
    detail::check_inputs(spec, series, x);
    BdarmaParams out = BdarmaParams::zeros(spec, spec.priors.log_phi_mean);
    if (x.cols() > 0 && x.rows() > 0) {
        const Eigen::MatrixXd z = detail::alr_columns(series, spec.alr_dim());
        const Eigen::MatrixXd coef = x.completeOrthogonalDecomposition().solve(z.transpose());  // m x (J-1)
        out.beta = coef.transpose();
    }
    return out;
}

namespace detail {

struct BfgsResult {
    Eigen::VectorXd theta;
    double value = 0.0;
    Eigen::VectorXd grad;
    int iterations = 0;
};

/// A stalled objective only ends the search once the gradient is this small; on badly
/// scaled posteriors (large phi) f can change by < 1e-10 relative per step while still far
/// from the mode.
inline constexpr double kStallGradientBound = 1e-4;

/// Maximizes `target` with BFGS on the inverse Hessian and a backtracking Armijo search.
template <typename Target>
BfgsResult maximize_bfgs(const Target& target, Eigen::VectorXd theta, const FitOptions& options) {
    const Eigen::Index n = theta.size();
    double f = -target.value(theta);
    if (!std::isfinite(f)) throw FitError("non-finite objective at initialization", theta, Eigen::VectorXd::Zero(n));
    Eigen::VectorXd g = -target.gradient(theta);
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
    bool scaled = false;
    int iter = 0;
    int stalls = 0;
    for (; iter < options.max_iterations; ++iter) {
        if (g.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) break;
        Eigen::VectorXd dir = -h_inv * g;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            h_inv.setIdentity();
            dir = -g;
            slope = -g.squaredNorm();
        }
        double step = 1.0;
        if (!scaled) step = std::min(1.0, 1.0 / std::max(1.0, g.lpNorm<Eigen::Infinity>()));
        Eigen::VectorXd trial;
        double f_trial = 0.0;
        Eigen::VectorXd g_trial;
        bool accepted = false;
        bool saw_finite = false;
        for (int backtrack = 0; backtrack < 60; ++backtrack) {
            trial = theta + step * dir;
            f_trial = -target.value(trial);
            if (std::isfinite(f_trial)) {
                saw_finite = true;
                if (f_trial <= f + 1e-4 * step * slope) {
                    accepted = true;
                    break;
                }
                // At the noise floor of f, accept steps that shrink the gradient.
                if (std::abs(f_trial - f) <= 1e-13 * std::max(1.0, std::abs(f))) {
                    g_trial = -target.gradient(trial);
                    if (g_trial.lpNorm<Eigen::Infinity>() < g.lpNorm<Eigen::Infinity>()) {
                        accepted = true;
                        break;
                    }
                    g_trial.resize(0);
                }
            }
            step *= 0.5;
        }
        if (!saw_finite) throw FitError("non-finite objective along search direction", theta, dir);
        if (!accepted) {
            if (h_inv.isIdentity()) break;
            h_inv.setIdentity();
            scaled = false;
            continue;
        }
        if (g_trial.size() == 0) g_trial = -target.gradient(trial);
        const Eigen::VectorXd s = trial - theta;
        const Eigen::VectorXd y = g_trial - g;
        const double sy = s.dot(y);
        const double rel_change = std::abs(f - f_trial) / std::max(1.0, std::abs(f));
        theta = std::move(trial);
        f = f_trial;
        g = std::move(g_trial);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (!scaled) {
                h_inv = Eigen::MatrixXd::Identity(n, n) * (sy / y.squaredNorm());
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Eigen::VectorXd hy = h_inv * y;
            h_inv += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
        }
        if (rel_change < options.relative_tolerance && g.lpNorm<Eigen::Infinity>() < kStallGradientBound) {
            if (++stalls >= 3) {
                ++iter;
                break;
            }
        } else {
            stalls = 0;
        }
    }
    return {std::move(theta), -f, std::move(g), iter};
}

}  // namespace detail

/**
 * MAP estimate by quasi-Newton ascent from initial_params(). Converged means the
 * gradient max-norm fell below options.gradient_tolerance, or the objective stalled
 * (relative change below options.relative_tolerance) with max-norm under 1e-4.
 */
inline FitReport fit_map(const BdarmaSpec& spec, const CompositionSeries& series, const Eigen::MatrixXd& x,
                         const FitOptions& options = {}) {
    if (options.max_iterations <= 0) throw ValidationError("max_iterations must be positive");
    const PosteriorTarget target(spec, series, x);
    const Eigen::VectorXd start = target.layout().flatten(initial_params(spec, series, x));
    FitReport report;
    report.initial_log_posterior = target.value(start);
    auto result = detail::maximize_bfgs(target, start, options);
    if (result.value < report.initial_log_posterior) {
        result.theta = start;
        result.value = report.initial_log_posterior;
        result.grad = -target.gradient(start);
    }
    report.map_params = target.layout().unflatten(result.theta);
    report.final_log_posterior = result.value;
    report.gradient_max_norm = result.grad.lpNorm<Eigen::Infinity>();
    report.iterations = result.iterations;
    report.converged = report.gradient_max_norm < options.gradient_tolerance ||
                       (report.gradient_max_norm < detail::kStallGradientBound && result.iterations < options.max_iterations);
    return report;
}

// ---------------------------------------------------------------------------
// Posterior sampling
// ---------------------------------------------------------------------------

struct SamplerOptions {
    int warmup = 1000;
    int draws = 2000;
    int thin = 1;  ///< Metropolis steps per retained draw
    std::uint64_t seed = 1;
    double target_acceptance = 0.234;
    /// Global proposal multiplier; defaults to 2.38 / sqrt(dim) before adaptation.
    std::optional<double> proposal_scale;

    void validate() const {
        if (warmup < 0 || draws <= 0 || thin <= 0) throw ValidationError("sampler needs warmup >= 0, draws > 0, thin > 0");
        if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) throw ValidationError("target acceptance must lie in (0, 1)");
        if (proposal_scale && !(*proposal_scale > 0.0 && std::isfinite(*proposal_scale))) {
            throw ValidationError("proposal scale must be positive; a zero scale would repeat the start point forever");
        }
    }
};

struct SampleReport {
    std::vector<BdarmaParams> draws;
    double acceptance_rate = 0.0;  ///< over post-warmup steps
    bool low_acceptance = false;   ///< acceptance below 0.05 after adaptation
    double proposal_scale = 0.0;   ///< global multiplier after adaptation
};

namespace detail {

/// Proposal covariance from the curvature of the target at `theta`: the inverse of the
/// negated finite-difference Hessian when it is positive definite, else its diagonal.
template <typename Target>
Eigen::MatrixXd proposal_covariance(const Target& target, const Eigen::VectorXd& theta) {
    const Eigen::Index n = theta.size();
    Eigen::MatrixXd hess(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double h = 1e-5 * std::max(1.0, std::abs(theta(k)));
        Eigen::VectorXd up = theta;
        Eigen::VectorXd dn = theta;
        up(k) += h;
        dn(k) -= h;
        hess.col(k) = (target.gradient(up) - target.gradient(dn)) / (2.0 * h);
    }
    const Eigen::MatrixXd precision = -0.5 * (hess + hess.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() == Eigen::Success && precision.allFinite()) {
        return llt.solve(Eigen::MatrixXd::Identity(n, n));
    }
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double c = precision(k, k);
        cov(k, k) = (c > 0.0 && std::isfinite(c)) ? 1.0 / c : 0.01;
    }
    return cov;
}

}  // namespace detail

/**
 * Random-walk Metropolis in the flat parameter space. Proposals are scale * L * z with
 * L the Cholesky factor of the curvature-based covariance at `start`; during warmup the
 * log scale follows a Robbins-Monro recursion toward options.target_acceptance, then
 * it is frozen. Warmup draws are discarded.
 */
template <typename Target>
SampleReport run_metropolis(const Target& target, const Eigen::VectorXd& start, const SamplerOptions& options) {
    options.validate();
    const Eigen::Index n = start.size();
    const Eigen::MatrixXd cov = detail::proposal_covariance(target, start);
    const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    double log_scale = std::log(options.proposal_scale.value_or(2.38 / std::sqrt(static_cast<double>(n))));
    Eigen::VectorXd current = start;
    double current_lp = target.value(current);
    if (!std::isfinite(current_lp)) throw ValidationError("sampler start has non-finite log posterior");

    Eigen::VectorXd z(n);
    auto step = [&]() {
        for (Eigen::Index k = 0; k < n; ++k) z(k) = normal(rng);
        const Eigen::VectorXd proposal = current + std::exp(log_scale) * (chol * z);
        const double lp = target.value(proposal);
        const double u = uniform(rng);
        if (std::isfinite(lp) && std::log(u) < lp - current_lp) {
            current = proposal;
            current_lp = lp;
            return true;
        }
        return false;
    };

    for (int i = 0; i < options.warmup; ++i) {
        const bool accepted = step();
        const double gain = 1.0 / std::pow(static_cast<double>(i) + 1.0, 0.6);
        log_scale += gain * ((accepted ? 1.0 : 0.0) - options.target_acceptance);
    }

    SampleReport report;
    report.proposal_scale = std::exp(log_scale);
    report.draws.reserve(static_cast<std::size_t>(options.draws));
    long accepted = 0;
    long total = 0;
    const auto& layout = target.layout();
    for (int i = 0; i < options.draws; ++i) {
        for (int s = 0; s < options.thin; ++s) {
            accepted += step() ? 1 : 0;
            ++total;
        }
        report.draws.push_back(layout.unflatten(current));
    }
    report.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(total);
    report.low_acceptance = report.acceptance_rate < 0.05;
    return report;
}

/// Posterior draws for the model, started at `start` (normally the MAP).
inline SampleReport sample_posterior(const BdarmaSpec& spec, const CompositionSeries& series, const Eigen::MatrixXd& x,
                                     const BdarmaParams& start, const SamplerOptions& options = {}) {
    options.validate();
    check_params(start, spec, x.cols());
    const PosteriorTarget target(spec, series, x);
    return run_metropolis(target, target.layout().flatten(start), options);
}

}  // namespace leadcast
