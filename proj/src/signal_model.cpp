#include "emosig/signal_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

namespace emosig {

void validate_scenario(const Scenario& s) {
    if (s.peripherals == PeripheralSet::AdrOnly && s.cardiac != CardiacSource::Scg)
        throw Error(ErrorCode::ConfigError, "ADR-only peripherals require the SCG cardiac source");
    if (s.style == DatasetStyle::Deap) {
        if (s.cardiac != CardiacSource::Bvp)
            throw Error(ErrorCode::ConfigError, "DEAP-style runs support only the BVP cardiac source");
        if (s.peripherals == PeripheralSet::AdrOnly)
            throw Error(ErrorCode::ConfigError, "DEAP-style runs have no accelerometer for ADR");
    }
}

std::string scenario_name(const Scenario& s) {
    std::string c = s.cardiac == CardiacSource::Ecg   ? "ecg"
                    : s.cardiac == CardiacSource::Bvp ? "bvp"
                                                      : "scg";
    std::string p = s.peripherals == PeripheralSet::All       ? "all"
                    : s.peripherals == PeripheralSet::RspOnly ? "rsp"
                                                              : "adr";
    std::string name = c + "+" + p;
    if (s.style == DatasetStyle::Deap) name += "@deap";
    return name;
}

std::vector<Channel> required_channels(const Scenario& s) {
    validate_scenario(s);
    std::set<Channel> req;
    switch (s.cardiac) {
        case CardiacSource::Ecg: req.insert(Channel::Ecg); break;
        case CardiacSource::Bvp: req.insert(Channel::Bvp); break;
        case CardiacSource::Scg: req.insert(Channel::AccZ); break;
    }
    switch (s.peripherals) {
        case PeripheralSet::RspOnly:
            req.insert(Channel::Rsp);
            break;
        case PeripheralSet::AdrOnly:
            req.insert(Channel::AccZ);
            break;
        case PeripheralSet::All:
            req.insert(Channel::Rsp);
            req.insert(Channel::Eda);
            req.insert(Channel::Skt);
            if (s.style == DatasetStyle::Deap) {
                req.insert(Channel::Emg);
                req.insert(Channel::Eog);
            } else if (s.cardiac == CardiacSource::Scg) {
                req.insert(Channel::AccZ);  // ADR rides along only with SCG
            }
            break;
    }
    return {req.begin(), req.end()};
}

BinaryLabel binarize_rating(double rating, Dimension, bool tie_high) {
    if (!std::isfinite(rating) || rating < 1.0 || rating > 9.0)
        throw Error(ErrorCode::InvalidRating,
                    "rating must be finite in [1, 9], got " + std::to_string(rating));
    if (rating > 5.0) return BinaryLabel::High;
    if (rating == 5.0 && tie_high) return BinaryLabel::High;
    return BinaryLabel::Low;
}

namespace {

// Data-integrity findings for one channel, independent of scenario.
void check_channel(Channel kind, const SignalData& data, std::vector<ValidationFinding>& out) {
    if (const auto* u = std::get_if<UniformSignal>(&data)) {
        if (u->samples.empty()) {
            out.push_back({kind, "zero-length signal", -1});
            return;
        }
        for (std::size_t i = 0; i < u->samples.size(); ++i) {
            if (!std::isfinite(u->samples[i])) {
                out.push_back({kind, "non-finite sample", static_cast<std::ptrdiff_t>(i)});
                break;
            }
        }
        if (!(u->rate > 0.0)) out.push_back({kind, "non-positive sampling rate", -1});
    } else {
        const auto& irr = std::get<IrregularSignal>(data);
        if (irr.values.empty()) {
            out.push_back({kind, "zero-length signal", -1});
            return;
        }
        if (irr.timestamps.size() != irr.values.size())
            out.push_back({kind, "timestamp/value length mismatch", -1});
        for (std::size_t i = 0; i < irr.values.size(); ++i) {
            if (!std::isfinite(irr.values[i])) {
                out.push_back({kind, "non-finite sample", static_cast<std::ptrdiff_t>(i)});
                break;
            }
        }
        for (std::size_t i = 1; i < irr.timestamps.size(); ++i) {
            if (!(irr.timestamps[i] > irr.timestamps[i - 1])) {
                out.push_back({kind, "timestamps not strictly increasing",
                               static_cast<std::ptrdiff_t>(i)});
                break;
            }
        }
    }
}

}  // namespace

ValidationReport validate_trial(const TrialRecord& trial, const Scenario& scenario) {
    ValidationReport report;
    for (Channel c : required_channels(scenario)) {
        if (trial.channels.find(c) == trial.channels.end())
            report.findings.push_back({c, "missing channel", -1});
    }
    for (const auto& [kind, data] : trial.channels) check_channel(kind, data, report.findings);
    return report;
}

std::pair<std::vector<TrialRecord>, ExclusionReport> apply_exclusions(
    const std::vector<TrialRecord>& dataset, double min_class_fraction,
    const std::vector<Channel>& required, bool tie_high) {
    if (!(min_class_fraction > 0.0) || !(min_class_fraction <= 0.5))
        throw Error(ErrorCode::ConfigError, "min_class_fraction must be in (0, 0.5]");

    ExclusionReport report;

    // 1. Faulty trials go first; they count toward nothing downstream.
    std::vector<TrialRecord> kept;
    kept.reserve(dataset.size());
    for (const TrialRecord& t : dataset) {
        if (t.faulty)
            report.removals.push_back({t.subject_id, t.video_id, "flagged faulty"});
        else
            kept.push_back(t);
    }

    // 2. Subjects with a required channel missing or corrupt in any trial.
    std::map<std::string, std::string> channel_reason;
    for (const TrialRecord& t : kept) {
        if (channel_reason.count(t.subject_id)) continue;
        for (Channel c : required) {
            auto it = t.channels.find(c);
            if (it == t.channels.end()) {
                channel_reason[t.subject_id] =
                    "missing channel " + channel_name(c) + " in trial " + t.video_id;
                break;
            }
            std::vector<ValidationFinding> findings;
            check_channel(c, it->second, findings);
            if (!findings.empty()) {
                channel_reason[t.subject_id] = "corrupt channel " + channel_name(c) + " in trial " +
                                               t.video_id + " (" + findings.front().issue + ")";
                break;
            }
        }
    }

    // 3. Class balance per subject, both dimensions.
    std::map<std::string, std::array<std::pair<int, int>, 2>> counts;  // (high, low) per dim
    for (const TrialRecord& t : kept) {
        if (channel_reason.count(t.subject_id)) continue;
        for (int d = 0; d < 2; ++d) {
            Dimension dim = d == 0 ? Dimension::Valence : Dimension::Arousal;
            BinaryLabel lab = binarize_rating(rating_for(t.ratings, dim), dim, tie_high);
            auto& [high, low] = counts[t.subject_id][d];
            (lab == BinaryLabel::High ? high : low) += 1;
        }
    }
    std::map<std::string, std::string> balance_reason;
    for (const auto& [subject, dims] : counts) {
        for (int d = 0; d < 2; ++d) {
            auto [high, low] = dims[d];
            double total = high + low;
            double frac = std::min(high, low) / total;
            if (frac < min_class_fraction) {
                const char* dim_name = d == 0 ? "valence" : "arousal";
                balance_reason[subject] = std::string("minority class below threshold in ") +
                                          dim_name + " (" + std::to_string(std::min(high, low)) +
                                          "/" + std::to_string(high + low) + ")";
                break;
            }
        }
    }

    std::set<std::string> reported;
    std::vector<TrialRecord> survivors;
    std::set<std::string> surviving_subjects;
    for (const TrialRecord& t : kept) {
        auto ch = channel_reason.find(t.subject_id);
        auto ba = balance_reason.find(t.subject_id);
        if (ch != channel_reason.end() || ba != balance_reason.end()) {
            if (reported.insert(t.subject_id).second) {
                const std::string& reason =
                    ch != channel_reason.end() ? ch->second : ba->second;
                report.removals.push_back({t.subject_id, "", reason});
            }
            continue;
        }
        survivors.push_back(t);
        surviving_subjects.insert(t.subject_id);
    }

    if (survivors.empty())
        throw Error(ErrorCode::EmptyDataset, "no trials survive exclusion screening");

    report.kept_subjects = surviving_subjects.size();
    report.kept_trials = survivors.size();
    return {std::move(survivors), std::move(report)};
}

}  // namespace emosig
