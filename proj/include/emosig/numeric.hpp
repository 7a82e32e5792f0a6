// Small descriptive-statistics helpers shared across modules.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "emosig/types.hpp"

namespace emosig {

inline double mean(const std::vector<double>& x) {
    if (x.empty()) throw Error(ErrorCode::InsufficientData, "mean of empty vector");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Population variance (divide by n).
inline double var_pop(const std::vector<double>& x) {
    double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

// Sample variance (divide by n-1).
inline double var_samp(const std::vector<double>& x) {
    if (x.size() < 2) throw Error(ErrorCode::InsufficientData, "sample variance needs n >= 2");
    double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

inline double sd_pop(const std::vector<double>& x) { return std::sqrt(var_pop(x)); }
inline double sd_samp(const std::vector<double>& x) { return std::sqrt(var_samp(x)); }

// Percentile with linear interpolation between order statistics
// (the numpy default): rank = q/100 * (n-1).
inline double percentile(std::vector<double> x, double q) {
    if (x.empty()) throw Error(ErrorCode::InsufficientData, "percentile of empty vector");
    std::sort(x.begin(), x.end());
    double rank = q / 100.0 * static_cast<double>(x.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(rank));
    auto hi = static_cast<std::size_t>(std::ceil(rank));
    if (lo == hi) return x[lo];
    double frac = rank - static_cast<double>(lo);
    return x[lo] * (1.0 - frac) + x[hi] * frac;
}

inline double median(const std::vector<double>& x) { return percentile(x, 50.0); }

// Median absolute deviation, unscaled.
inline double mad(const std::vector<double>& x) {
    double m = median(x);
    std::vector<double> dev(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) dev[i] = std::fabs(x[i] - m);
    return median(dev);
}

}  // namespace emosig
