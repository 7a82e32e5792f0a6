// Core data model: signals, trials, ratings, labels.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace emosig {

enum class ErrorCode {
    InvalidRating,
    InvalidBand,
    InsufficientData,
    InsufficientBeats,
    EmptyBeats,
    EmptyDataset,
    EmptyEval,
    MissingChannel,
    UndefinedScore,
    DegenerateFit,
    ShapeMismatch,
    InsufficientTrials,
    InsufficientSubjects,
    SubjectEval,
    ParseError,
    ConfigError,
    SynthSpecError,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Evenly sampled series. `start_time` is trial-relative seconds.
struct UniformSignal {
    std::vector<double> samples;
    double rate = 0.0;  // Hz, > 0
    double start_time = 0.0;

    std::size_t size() const { return samples.size(); }
    double duration() const { return samples.empty() ? 0.0 : (samples.size() - 1) / rate; }
    double time_at(std::size_t i) const { return start_time + static_cast<double>(i) / rate; }
    double end_time() const { return samples.empty() ? start_time : time_at(samples.size() - 1); }
};

// Unevenly sampled series; timestamps strictly increasing.
struct IrregularSignal {
    std::vector<double> timestamps;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

using SignalData = std::variant<UniformSignal, IrregularSignal>;

// SCG and ADR are derived kinds: they never appear in raw ingested trials.
enum class Channel { Ecg, Bvp, AccZ, Scg, Rsp, Adr, Eda, Skt, Emg, Eog };

std::string channel_name(Channel c);
std::optional<Channel> parse_channel(const std::string& name);

// Self-assessment ratings on 1-9 scales. Dominance/liking/familiarity are
// carried through ingestion but never classified.
struct SamRatings {
    double valence = 0.0;
    double arousal = 0.0;
    std::optional<double> dominance;
    std::optional<double> liking;
    std::optional<double> familiarity;
};

struct TrialRecord {
    std::string subject_id;
    std::string video_id;
    std::map<Channel, SignalData> channels;
    SamRatings ratings;
    bool faulty = false;
};

enum class BinaryLabel : int { Low = 0, High = 1 };

enum class Dimension { Valence, Arousal };

std::string dimension_name(Dimension d);

double rating_for(const SamRatings& r, Dimension d);

}  // namespace emosig
