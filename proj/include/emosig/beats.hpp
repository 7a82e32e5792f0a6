// Event detection: R-peaks, AO-peaks, pulse peaks, breath cycles, plus the
// SCG/ADR derivations from chest acceleration and IBI screening.
#pragma once

#include <cstddef>
#include <vector>

#include "emosig/dsp.hpp"
#include "emosig/types.hpp"

namespace emosig {

enum class BeatKind { RPeak, AoPeak, PulsePeak, BreathPeak };

struct BeatSeries {
    std::vector<double> event_times;  // seconds, strictly increasing
    BeatKind kind = BeatKind::RPeak;
};

struct IbiSeries {
    std::vector<double> intervals;      // seconds, screened
    std::vector<double> onset_times;    // first beat of each retained interval
    std::vector<double> rejected_gaps;  // durations of screened-out intervals

    std::size_t rejected_count() const { return rejected_gaps.size(); }
};

// The SCG signal is the dorsoventral acceleration on a regular 200 Hz grid.
UniformSignal derive_scg(const IrregularSignal& acc_z, double rate = 200.0);

// AO-peak cascade: band-pass 10-20 Hz, Hilbert envelope, band-pass
// 0.5-2 Hz, then local maxima with a refractory distance.
BeatSeries detect_ao_peaks(const UniformSignal& scg, double min_distance_s = 0.375);

// Two-moving-averages QRS detector on the squared 8-20 Hz band signal.
BeatSeries detect_r_peaks(const UniformSignal& ecg, double qrs_window_s = 0.097,
                          double beat_window_s = 0.611, double beta = 0.08);

// Pulse peaks on the moving-average-detrended BVP: local maxima whose
// prominence exceeds the rolling 60th percentile of the local absolute
// amplitude, so the gate adapts to per-trial pulse strength.
BeatSeries detect_bvp_peaks(const UniformSignal& bvp, std::size_t detrend_window = 256,
                            double threshold_percentile = 60.0, double rolling_window_s = 10.0,
                            double min_distance_s = 0.375);

// Accelerometry-derived respiration: 200 Hz grid, 0.15-0.35 Hz band, then
// moving-average baseline removal.
UniformSignal derive_adr(const IrregularSignal& acc_z, double rate = 200.0,
                         BandSpec band = {0.15, 0.35}, double baseline_window_s = 10.0);

// Inhalation peaks: maxima of positive half-waves between zero crossings.
// Default minimum cycle distance is 0.8 of the shortest in-band period.
BeatSeries detect_breath_cycles(const UniformSignal& resp,
                                double min_distance_s = 0.8 / 0.35);

struct IbiOptions {
    double min_s = 0.3;  // 200 bpm ceiling
    double max_s = 2.0;  // 30 bpm floor
    bool screen = true;  // protocol-faithful runs can disable rejection
};

// Successive differences of event times, with implausible gaps rejected and
// counted. Respiratory callers pass a wider window.
IbiSeries build_ibi(const BeatSeries& beats, const IbiOptions& opts = {});

}  // namespace emosig
