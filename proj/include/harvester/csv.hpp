// Numeric text output: shortest round-trip decimal, padded to a minimum
// number of significant digits. All file output goes through here so
// repeated runs are byte-identical.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <system_error>

namespace harvester {

namespace detail {

inline int count_significant_digits(const std::string& mantissa) {
    int count = 0;
    bool leading = true;
    for (char ch : mantissa) {
        if (ch == '.' || ch == '-' || ch == '+') continue;
        if (leading && ch == '0') continue;
        leading = false;
        ++count;
    }
    // "0", "0.0" and friends: a single significant digit.
    return count == 0 ? 1 : count;
}

}  // namespace detail

/// Shortest decimal that round-trips to v, zero-padded to at least
/// min_sig significant digits.
inline std::string format_double(double v, int min_sig = 9) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";

    char buf[64];
    const auto rc = std::to_chars(buf, buf + sizeof buf, v);
    if (rc.ec != std::errc{})
        throw std::runtime_error("format_double: conversion failed");
    std::string s(buf, rc.ptr);

    const std::size_t epos = s.find_first_of("eE");
    std::string mantissa = epos == std::string::npos ? s : s.substr(0, epos);
    const std::string exponent = epos == std::string::npos ? "" : s.substr(epos);

    int have = detail::count_significant_digits(mantissa);
    if (have < min_sig) {
        if (mantissa.find('.') == std::string::npos) mantissa += '.';
        mantissa.append(static_cast<std::size_t>(min_sig - have), '0');
    }
    return mantissa + exponent;
}

inline std::string format_int(long long v) { return std::to_string(v); }

}  // namespace harvester
