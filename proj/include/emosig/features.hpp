// Per-trial feature extraction for all channels, and scenario assembly.
#pragma once

#include <string>
#include <vector>

#include "emosig/beats.hpp"
#include "emosig/signal_model.hpp"
#include "emosig/types.hpp"

namespace emosig {

// Named, ordered scalars for one trial. NaN marks a feature that could not
// be computed (degenerate input); imputation happens at classification time.
struct FeatureVector {
    std::vector<std::string> names;
    std::vector<double> values;

    void push(std::string name, double value) {
        names.push_back(std::move(name));
        values.push_back(value);
    }
    std::size_t size() const { return values.size(); }
};

// IBI statistics. The base set mirrors the DEAP-style features; the extended
// set adds the named HRV indices. Needs >= 4 intervals.
FeatureVector cardiac_features(const IbiSeries& ibi, bool extended);

// Statistics of a band-limited respiratory waveform and its breath cycles.
// Needs >= 3 cycles.
FeatureVector respiratory_features(const UniformSignal& resp, const BeatSeries& cycles,
                                   bool extended);

// Electrodermal statistics including SCSR/SCVSR zero-crossing features.
// Needs >= 20 s of signal.
FeatureVector eda_features(const UniformSignal& eda, double scsr_cut_hz = 0.2,
                           double scvsr_cut_hz = 0.08);

FeatureVector skt_features(const UniformSignal& skt);

FeatureVector emg_features(const UniformSignal& emg);

// EMG set plus the blink rate (events per minute).
FeatureVector eog_features(const UniformSignal& eog);

// Knobs threaded from the experiment config into per-channel extraction.
struct FeatureOptions {
    bool ibi_screen = true;  // physiological-plausibility gate on cardiac IBIs
};

// Runs the per-channel chains a scenario demands and concatenates their
// vectors with channel-prefixed names in a fixed order. Extended indices
// apply only to cardiac/respiratory channels of EmoWear-style runs.
FeatureVector assemble_features(const TrialRecord& trial, const Scenario& scenario,
                                bool extended, const FeatureOptions& options = {});

}  // namespace emosig
