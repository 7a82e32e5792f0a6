// Synthetic physiological recordings with known ground truth: scripted beat
// and breath processes rendered into ECG/BVP/chest-acceleration/RSP/EDA/SKT
// (plus EMG/EOG for DEAP-style sets) so every detector and the end-to-end
// pipeline can be checked against the generating parameters.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emosig/dataset_io.hpp"
#include "emosig/signal_model.hpp"
#include "emosig/types.hpp"

namespace emosig {

// Offsets applied to a trial's generating parameters when its label for the
// owning dimension is High.
struct LabelEffect {
    double hr_offset_bpm = 0.0;
    double breath_offset_hz = 0.0;
    double eda_level_offset = 0.0;
    double skt_level_offset = 0.0;
};

struct SynthSpec {
    std::size_t subjects = 4;
    std::size_t trials_per_subject = 8;
    double duration_s = 60.0;

    // Per-trial base draws (subject shift of up to +-2 bpm comes on top).
    double hr_lo_bpm = 62.0;
    double hr_hi_bpm = 88.0;
    double breath_lo_hz = 0.20;
    double breath_hi_hz = 0.30;

    // Label assignment: fraction of High trials per subject and dimension.
    double valence_high_fraction = 0.5;
    double arousal_high_fraction = 0.5;
    LabelEffect valence;
    LabelEffect arousal;

    // Chance a trial's physiology is generated from the flipped label. Keeps
    // perfectly separable specs from collapsing every subject onto F1 = 1
    // (which would zero the between-subject variance).
    double label_noise = 0.0;

    double rsa_depth = 0.02;       // respiratory modulation of beat intervals
    double beat_jitter_s = 0.005;  // per-beat timing noise (std, seconds)
    double noise_scale = 1.0;      // multiplies every additive noise term

    DatasetStyle style = DatasetStyle::EmoWear;
};

struct TrialTruth {
    std::string subject_id;
    std::string video_id;
    double hr_bpm = 0.0;     // generating mean heart rate (offsets applied)
    double breath_hz = 0.0;  // generating breath rate (offsets applied)
    std::size_t n_beats = 0;
    std::size_t n_breaths = 0;
    BinaryLabel valence = BinaryLabel::Low;
    BinaryLabel arousal = BinaryLabel::High;
    std::vector<double> beat_times;  // ground-truth beats; not serialized
};

struct SynthResult {
    std::vector<TrialRecord> trials;
    std::vector<TrialTruth> truth;
};

// Deterministic per seed: every draw comes from a stream keyed by
// (seed, subject, trial, purpose). Infeasible parameter combinations (heart
// or breath rates that leave the detector bands, too-short trials) raise
// SynthSpecError.
SynthResult generate_synthetic_dataset(const SynthSpec& spec, std::uint64_t seed);

// `synth.*` keys of a config file -> spec (missing keys keep defaults).
SynthSpec synth_spec_from_kv(const KvFile& kv);

// Ground-truth sidecar table (written next to a generated dataset).
void write_truth(const std::string& path, const std::vector<TrialTruth>& truth);

}  // namespace emosig
