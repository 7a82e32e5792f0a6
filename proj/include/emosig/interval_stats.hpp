// Interval-series indices shared by the cardiac (IBI) and respiratory (BB)
// feature sets. All inputs and time-domain outputs are in seconds.
#pragma once

#include <vector>

#include "emosig/types.hpp"

namespace emosig {

// Root mean square of successive differences.
double rmssd(const std::vector<double>& iv);

// Sample standard deviation of successive differences.
double sdsd(const std::vector<double>& iv);

// Fraction of successive differences whose magnitude exceeds threshold_s
// (strictly greater).
double pnn(const std::vector<double>& iv, double threshold_s);

// Triangular index: count divided by the modal bin height of the 1/128 s
// histogram.
double hti(const std::vector<double>& iv);

// Baseline width (seconds) of the best least-squares triangular fit to the
// 1/128 s histogram.
double tinn(const std::vector<double>& iv);

// Approximate entropy, Chebyshev distance, self-matches included.
// Tolerance r = r_frac * population std of x.
double apen(const std::vector<double>& x, int m = 2, double r_frac = 0.2);

// Band powers of the interval tachogram: intervals placed at their onset
// times, linearly resampled to resample_hz, Welch PSD.
struct TachogramSpectrum {
    double lf = 0.0;  // 0.04-0.15 Hz
    double hf = 0.0;  // 0.15-0.5 Hz
    double tp = 0.0;  // 0-0.5 Hz
};

TachogramSpectrum tachogram_spectrum(const std::vector<double>& intervals,
                                     const std::vector<double>& onset_times,
                                     double resample_hz = 4.0);

}  // namespace emosig
