// Filtering, spectral estimation, and signal conditioning.
//
// Butterworth filters are designed in zero-pole form and realized as cascaded
// biquads (second-order sections). Direct transfer-function realizations fall
// apart in double precision at the narrow normalized bands used here
// (e.g. 0.15-0.35 Hz at several hundred Hz sampling).
#pragma once

#include <cstddef>
#include <vector>

#include "emosig/types.hpp"

namespace emosig {

struct BandSpec {
    double lo = 0.0;  // Hz
    double hi = 0.0;  // Hz
};

// One biquad: H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
struct Biquad {
    double b0 = 0, b1 = 0, b2 = 0;
    double a1 = 0, a2 = 0;
};

using Sos = std::vector<Biquad>;

// Butterworth band-pass of given prototype order (2*order poles total),
// unity gain at the geometric center frequency.
Sos butter_bandpass(int order, double lo_hz, double hi_hz, double fs);

// Butterworth low-pass, unity gain at DC.
Sos butter_lowpass(int order, double cut_hz, double fs);

// Cascade magnitude response at frequency f (Hz).
double sos_response(const Sos& sos, double f, double fs);

// Single forward pass, zero initial state.
std::vector<double> sosfilt(const Sos& sos, const std::vector<double>& x);

// Forward-backward (zero-phase) filtering with odd-reflection padding and
// steady-state initial conditions at both ends.
std::vector<double> sosfiltfilt(const Sos& sos, const std::vector<double>& x);

// Zero-phase Butterworth band-pass of a uniform signal.
UniformSignal bandpass(const UniformSignal& sig, const BandSpec& band, int order = 4);

// Magnitude of the analytic signal (FFT method, exact length). Needs >= 8
// samples.
std::vector<double> hilbert_envelope(const std::vector<double>& x);
UniformSignal hilbert_envelope(const UniformSignal& sig);

struct PowerSpectrum {
    std::vector<double> freqs;  // Hz
    std::vector<double> psd;    // units^2 / Hz, one-sided
};

// Welch periodogram: periodic Hann window, per-segment mean removal,
// one-sided density scaling. Signals shorter than nperseg fall back to a
// single full-length segment.
PowerSpectrum welch_psd(const std::vector<double>& x, double fs, std::size_t nperseg,
                        double overlap_fraction = 0.5);
PowerSpectrum welch_psd(const UniformSignal& sig, std::size_t nperseg,
                        double overlap_fraction = 0.5);

// Trapezoidal integral of the PSD over [band.lo, band.hi], with linear
// interpolation at the band edges so adjacent bands tile exactly.
double band_power(const PowerSpectrum& ps, const BandSpec& band);

// Linear interpolation of (ts, vs) at the query times. Queries outside the
// support clamp to the end values.
std::vector<double> interp_linear(const std::vector<double>& ts,
                                  const std::vector<double>& vs,
                                  const std::vector<double>& query);

// Resample an irregular series onto a uniform grid at `rate`, spanning
// [first timestamp, last timestamp].
UniformSignal resample_uniform(const IrregularSignal& sig, double rate);

// Centered moving average with window truncated symmetrically near the
// edges: at index i the effective radius is min(window/2, i, n-1-i).
std::vector<double> moving_average(const std::vector<double>& x, std::size_t window);

// x minus its centered moving average.
std::vector<double> moving_average_detrend(const std::vector<double>& x, std::size_t window);
UniformSignal moving_average_detrend(const UniformSignal& sig, std::size_t window);

}  // namespace emosig
