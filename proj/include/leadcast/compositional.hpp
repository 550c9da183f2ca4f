#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "leadcast/numeric.hpp"

namespace leadcast {

/// Absolute tolerance on the sum of a stored composition.
inline constexpr double kSimplexTolerance = 1e-9;
/// Inputs whose sum is off by at most this much are renormalized; larger deviations are rejected.
inline constexpr double kRenormalizeTolerance = 1e-6;

/**
 * A strictly positive vector on the simplex (J >= 2 parts summing to one).
 *
 * Construction validates positivity and renormalizes small sum deviations, so
 * every live Composition satisfies the invariants.
 */
class Composition {
public:
    explicit Composition(std::vector<double> values) : values_(std::move(values)) {
        if (values_.size() < 2) {
            throw ValidationError("composition needs at least 2 parts, got " + std::to_string(values_.size()));
        }
        CompensatedSum total;
        for (std::size_t j = 0; j < values_.size(); ++j) {
            const double v = values_[j];
            if (!std::isfinite(v) || v <= 0.0) {
                throw ValidationError("composition part " + std::to_string(j) + " is not strictly positive");
            }
            total.add(v);
        }
        const double s = total.value();
        if (std::abs(s - 1.0) > kRenormalizeTolerance) {
            throw ValidationError("composition sums to " + format_double(s) + ", not 1");
        }
        if (s != 1.0) {
            for (double& v : values_) v /= s;
        }
    }

    static Composition uniform(std::size_t parts) {
        return Composition(std::vector<double>(parts, 1.0 / static_cast<double>(parts)));
    }

    /// Normalizes non-negative weights; entries below `epsilon` (as a share) are lifted to it first.
    static Composition from_weights(std::span<const double> weights, double epsilon) {
        CompensatedSum total;
        for (double w : weights) {
            if (!std::isfinite(w) || w < 0.0) throw ValidationError("weights must be finite and non-negative");
            total.add(w);
        }
        if (total.value() <= 0.0) throw ValidationError("weights sum to zero");
        std::vector<double> shares(weights.size());
        for (std::size_t j = 0; j < weights.size(); ++j) shares[j] = weights[j] / total.value();
        return clamp_to_interior(shares, epsilon);
    }

    /// Floors every share at `epsilon` and renormalizes.
    static Composition clamp_to_interior(std::span<const double> shares, double epsilon) {
        if (!(epsilon > 0.0)) throw ValidationError("clamp epsilon must be positive");
        std::vector<double> v(shares.begin(), shares.end());
        CompensatedSum total;
        for (double& x : v) {
            x = std::max(x, epsilon);
            total.add(x);
        }
        for (double& x : v) x /= total.value();
        return Composition(std::move(v));
    }

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t j) const { return values_[j]; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    friend bool operator==(const Composition&, const Composition&) = default;

private:
    std::vector<double> values_;
};

/// Log-ratio coordinates of a composition (J-1 finite reals).
struct AlrVector {
    std::vector<double> values;

    AlrVector() = default;
    explicit AlrVector(std::vector<double> v) : values(std::move(v)) {
        for (double x : values) {
            if (!std::isfinite(x)) throw ValidationError("alr coordinates must be finite");
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] double operator[](std::size_t j) const { return values[j]; }
    friend bool operator==(const AlrVector&, const AlrVector&) = default;
};

/// Selects the last part as the alr reference.
inline constexpr std::size_t kLastPart = std::numeric_limits<std::size_t>::max();

/// (ln(c_j / c_ref)) over j != ref. Reference defaults to the last part.
inline AlrVector alr(const Composition& c, std::size_t reference = kLastPart) {
    const std::size_t parts = c.size();
    const std::size_t ref = reference == kLastPart ? parts - 1 : reference;
    if (ref >= parts) throw ValidationError("alr reference index out of range");
    const double log_ref = std::log(c[ref]);
    std::vector<double> out;
    out.reserve(parts - 1);
    for (std::size_t j = 0; j < parts; ++j) {
        if (j != ref) out.push_back(std::log(c[j]) - log_ref);
    }
    return AlrVector(std::move(out));
}

namespace detail {

/// Inverse alr on raw coordinates, writing J parts into `out`. Shifts by the running max
/// before exponentiating; parts that underflow are held at the smallest normal double.
template <typename InRange, typename OutRange>
void alr_inverse_into(const InRange& a, std::size_t count, OutRange& out, std::size_t ref) {
    double shift = 0.0;  // the reference coordinate is 0
    for (std::size_t k = 0; k < count; ++k) shift = std::max(shift, static_cast<double>(a[k]));
    CompensatedSum denom;
    denom.add(std::exp(-shift));
    for (std::size_t k = 0; k < count; ++k) denom.add(std::exp(static_cast<double>(a[k]) - shift));
    const double z = denom.value();
    constexpr double tiny = std::numeric_limits<double>::min();
    std::size_t k = 0;
    for (std::size_t j = 0; j <= count; ++j) {
        const double e = (j == ref) ? std::exp(-shift) : std::exp(static_cast<double>(a[k++]) - shift);
        out[j] = std::max(e / z, tiny);
    }
}

}  // namespace detail

/// Maps log-ratio coordinates back to the simplex; always yields a valid Composition.
inline Composition alr_inverse(const AlrVector& a, std::size_t reference = kLastPart) {
    const std::size_t parts = a.size() + 1;
    const std::size_t ref = reference == kLastPart ? parts - 1 : reference;
    if (ref >= parts) throw ValidationError("alr reference index out of range");
    std::vector<double> out(parts);
    detail::alr_inverse_into(a.values, a.size(), out, ref);
    return Composition(std::move(out));
}

/// Half the L1 distance between two compositions; lies in [0, 1].
inline double normalized_l1(const Composition& u, const Composition& v) {
    if (u.size() != v.size()) {
        throw ValidationError("normalized_l1: length mismatch (" + std::to_string(u.size()) + " vs " +
                              std::to_string(v.size()) + ")");
    }
    CompensatedSum acc;
    for (std::size_t j = 0; j < u.size(); ++j) acc.add(std::abs(u[j] - v[j]));
    return 0.5 * acc.value();
}

}  // namespace leadcast
