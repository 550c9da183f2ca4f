#pragma once

#include <random>
#include <vector>

#include "leadcast/compositional.hpp"

namespace leadcast::test_support {

/// Flat-Dirichlet draw via normalized exponentials.
inline Composition random_simplex(std::mt19937_64& rng, std::size_t parts) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> w(parts);
    double total = 0.0;
    for (auto& x : w) {
        x = expo(rng) + 1e-12;
        total += x;
    }
    for (auto& x : w) x /= total;
    return Composition(std::move(w));
}

}  // namespace leadcast::test_support

#include "leadcast/bdarma.hpp"

namespace leadcast::test_support {

inline Composition dirichlet_draw(std::mt19937_64& rng, const std::vector<double>& alpha) {
    std::vector<double> g(alpha.size());
    double total = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        std::gamma_distribution<double> gamma(alpha[j], 1.0);
        g[j] = std::max(gamma(rng), 1e-300);
        total += g[j];
    }
    for (auto& x : g) x /= total;
    return Composition(std::move(g));
}

/// Simulates a B-DARMA(1,0) path with intercept-only covariates, after `burn_in` discarded steps.
inline CompositionSeries simulate_ar1(std::mt19937_64& rng, const Eigen::VectorXd& intercept, const Eigen::MatrixXd& ar,
                                      double phi, std::size_t length, std::size_t burn_in = 50) {
    const auto d = intercept.size();
    Eigen::VectorXd z_prev = intercept;
    CompositionSeries out;
    for (std::size_t t = 0; t < length + burn_in; ++t) {
        const Eigen::VectorXd eta = intercept + ar * (z_prev - intercept);
        std::vector<double> mu(static_cast<std::size_t>(d + 1));
        double denom = 1.0;
        for (Eigen::Index k = 0; k < d; ++k) denom += std::exp(eta(k));
        for (Eigen::Index k = 0; k < d; ++k) mu[static_cast<std::size_t>(k)] = std::exp(eta(k)) / denom;
        mu[static_cast<std::size_t>(d)] = 1.0 / denom;
        std::vector<double> alpha(mu.size());
        for (std::size_t j = 0; j < mu.size(); ++j) alpha[j] = phi * mu[j];
        const auto y = dirichlet_draw(rng, alpha);
        for (Eigen::Index k = 0; k < d; ++k) z_prev(k) = std::log(y[static_cast<std::size_t>(k)] / y[static_cast<std::size_t>(d)]);
        if (t >= burn_in) {
            out.times.push_back(static_cast<MonthIndex>(t - burn_in));
            out.values.push_back(y);
        }
    }
    return out;
}

}  // namespace leadcast::test_support
