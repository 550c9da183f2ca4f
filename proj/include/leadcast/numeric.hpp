#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <system_error>

namespace leadcast {

/// Raised when inputs violate a documented precondition. The CLI maps it to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a computation fails on otherwise valid input. The CLI maps it to exit code 2.
class RuntimeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
    CompensatedSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double x) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) throw RuntimeFailure("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

/// Fixed-point rendering for human-facing tables.
inline std::string format_fixed(double x, int digits) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::fixed, digits);
    if (ec != std::errc{}) throw RuntimeFailure("format_fixed: conversion failed");
    return std::string(buf.data(), ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    while (first != last && *first == ' ') ++first;
    while (last != first && (last[-1] == ' ' || last[-1] == '\r')) --last;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw ValidationError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace leadcast
