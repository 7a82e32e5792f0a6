// Scenario definitions, rating binarization, exclusion screening, and trial
// validation.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "emosig/types.hpp"

namespace emosig {

enum class CardiacSource { Ecg, Bvp, Scg };
enum class PeripheralSet { All, RspOnly, AdrOnly };
enum class DatasetStyle { EmoWear, Deap };

// One classifier input scenario: a cardiac source plus a peripheral set.
// ADR-only runs exist solely for the SCG chain; the DEAP replication style
// has no accelerometer, so it is restricted to BVP with the full peripheral
// set (which there includes EMG and EOG).
struct Scenario {
    CardiacSource cardiac = CardiacSource::Ecg;
    PeripheralSet peripherals = PeripheralSet::All;
    DatasetStyle style = DatasetStyle::EmoWear;
};

// Throws ConfigError on forbidden combinations.
void validate_scenario(const Scenario& s);

std::string scenario_name(const Scenario& s);

// Raw channels a trial must carry for this scenario (SCG/ADR trace back to
// the accelerometer z axis).
std::vector<Channel> required_channels(const Scenario& s);

// High iff rating > 5 (>= 5 when tie_high). Rating must be finite in [1, 9].
BinaryLabel binarize_rating(double rating, Dimension dim, bool tie_high = false);

struct ValidationFinding {
    Channel channel;
    std::string issue;
    std::ptrdiff_t index = -1;  // first offending sample, when applicable
};

struct ValidationReport {
    std::vector<ValidationFinding> findings;
    bool ok() const { return findings.empty(); }
};

// Report-only checks: missing scenario channels, non-finite samples,
// zero-length signals, non-monotone timestamps.
ValidationReport validate_trial(const TrialRecord& trial, const Scenario& scenario);

struct Removal {
    std::string subject_id;
    std::string video_id;  // empty for subject-level removals
    std::string reason;
};

struct ExclusionReport {
    std::vector<Removal> removals;
    std::size_t kept_subjects = 0;
    std::size_t kept_trials = 0;
};

// Screening pass: drops faulty trials, then subjects with missing/corrupt
// required channels, then subjects whose binarized High or Low fraction in
// either dimension falls below min_class_fraction.
std::pair<std::vector<TrialRecord>, ExclusionReport> apply_exclusions(
    const std::vector<TrialRecord>& dataset, double min_class_fraction,
    const std::vector<Channel>& required, bool tie_high = false);

}  // namespace emosig
