#include "emosig/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "emosig/rng.hpp"

namespace emosig {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void spec_fail(const std::string& msg) {
    throw Error(ErrorCode::SynthSpecError, "synthetic spec: " + msg);
}

void validate_spec(const SynthSpec& spec) {
    if (spec.subjects < 1 || spec.trials_per_subject < 1)
        spec_fail("needs at least one subject and one trial");
    if (!(spec.duration_s >= 25.0))
        spec_fail("trial duration must be >= 25 s (electrodermal features need 20 s)");
    if (!(spec.hr_lo_bpm <= spec.hr_hi_bpm) || !(spec.breath_lo_hz <= spec.breath_hi_hz))
        spec_fail("empty parameter range");

    double v = spec.valence.hr_offset_bpm, a = spec.arousal.hr_offset_bpm;
    double lo_off = std::min({0.0, v, a, v + a});
    double hi_off = std::max({0.0, v, a, v + a});
    // +-2 bpm headroom for the per-subject shift.
    if (spec.hr_lo_bpm + lo_off - 2.0 < 40.0 || spec.hr_hi_bpm + hi_off + 2.0 > 180.0)
        spec_fail("effective heart rate leaves the 40-180 bpm detector range");

    double bv = spec.valence.breath_offset_hz, ba = spec.arousal.breath_offset_hz;
    double blo = spec.breath_lo_hz + std::min({0.0, bv, ba, bv + ba});
    double bhi = spec.breath_hi_hz + std::max({0.0, bv, ba, bv + ba});
    if (blo < 0.16 || bhi > 0.34)
        spec_fail("effective breath rate leaves the 0.16-0.34 Hz respiration band");

    if (spec.label_noise < 0.0 || spec.label_noise > 0.5)
        spec_fail("label_noise must lie in [0, 0.5]");
    if (spec.valence_high_fraction < 0.0 || spec.valence_high_fraction > 1.0 ||
        spec.arousal_high_fraction < 0.0 || spec.arousal_high_fraction > 1.0)
        spec_fail("high fractions must lie in [0, 1]");
    if (spec.rsa_depth < 0.0 || spec.rsa_depth > 0.1)
        spec_fail("rsa_depth must lie in [0, 0.1]");
    if (spec.beat_jitter_s < 0.0 || spec.beat_jitter_s > 0.05)
        spec_fail("beat_jitter_s must lie in [0, 0.05] s");
    if (spec.noise_scale < 0.0) spec_fail("noise_scale must be >= 0");
}

std::string padded_id(char prefix, std::size_t index_1based, std::size_t count) {
    int width = 2;
    for (std::size_t c = count; c >= 100; c /= 10) ++width;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, index_1based);
    return buf;
}

std::vector<BinaryLabel> subject_labels(std::size_t n, double high_fraction, Rng& rng) {
    auto n_high = static_cast<std::size_t>(
        std::clamp<long long>(std::llround(high_fraction * static_cast<double>(n)), 0,
                              static_cast<long long>(n)));
    std::vector<BinaryLabel> labels(n, BinaryLabel::Low);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_high),
              BinaryLabel::High);
    for (std::size_t i = n; i > 1; --i) {  // Fisher-Yates
        std::size_t j = rng.below(i);
        std::swap(labels[i - 1], labels[j]);
    }
    return labels;
}

std::vector<double> make_beat_times(double duration, double hr_bpm, double breath_hz,
                                    double rsa_depth, double jitter_s, Rng& rng) {
    double base = 60.0 / hr_bpm;
    double phase = rng.uniform(0.0, 2.0 * kPi);
    double t = rng.uniform(0.2, 0.5);
    std::vector<double> beats;
    while (t < duration - 0.6) {
        beats.push_back(t);
        double ibi = base * (1.0 + rsa_depth * std::sin(2.0 * kPi * breath_hz * t + phase)) +
                     jitter_s * rng.normal();
        t += std::clamp(ibi, 0.6 * base, 1.4 * base);
    }
    return beats;
}

double tri(double t, double center, double half_width, double amp) {
    double d = std::fabs(t - center);
    return d >= half_width ? 0.0 : amp * (1.0 - d / half_width);
}

double gauss(double t, double center, double sigma, double amp) {
    double z = (t - center) / sigma;
    return amp * std::exp(-0.5 * z * z);
}

UniformSignal make_ecg(const std::vector<double>& beats, double duration, double noise, Rng& rng) {
    UniformSignal sig;
    sig.rate = 256.0;
    sig.samples.assign(static_cast<std::size_t>(duration * sig.rate), 0.0);

    double ph1 = rng.uniform(0.0, 2.0 * kPi), ph2 = rng.uniform(0.0, 2.0 * kPi);
    for (double tb : beats) {
        auto lo = static_cast<std::size_t>(std::max(0.0, (tb - 0.30) * sig.rate));
        auto hi = std::min(sig.samples.size(),
                           static_cast<std::size_t>(std::max(0.0, (tb + 0.45) * sig.rate)));
        for (std::size_t i = lo; i < hi; ++i) {
            double t = sig.time_at(i);
            sig.samples[i] += gauss(t, tb - 0.16, 0.020, 0.12)   // P
                              + tri(t, tb - 0.030, 0.012, -0.15)  // Q
                              + tri(t, tb, 0.022, 1.0)            // R
                              + tri(t, tb + 0.030, 0.014, -0.22)  // S
                              + gauss(t, tb + 0.20, 0.050, 0.28); // T
        }
    }
    for (std::size_t i = 0; i < sig.samples.size(); ++i) {
        double t = sig.time_at(i);
        sig.samples[i] += 0.08 * std::sin(2.0 * kPi * 0.09 * t + ph1) +
                          0.04 * std::sin(2.0 * kPi * 0.33 * t + ph2) +
                          noise * 0.04 * rng.normal();
    }
    return sig;
}

UniformSignal make_bvp(const std::vector<double>& beats, double duration, double mean_ibi,
                       double noise, Rng& rng) {
    UniformSignal sig;
    sig.rate = 64.0;
    sig.samples.assign(static_cast<std::size_t>(duration * sig.rate), 0.0);

    // Pulse wave: a symmetric raised-cosine systolic bump riding on a slow
    // full-cycle base wave. The bump keeps the immediate peak neighbourhood
    // symmetric, so sampled peaks interpolate cleanly, while the base keeps
    // the trough sloped instead of leaving a flat noise-dominated shelf
    // between beats — real pulse recordings never sit idle either.
    constexpr double bump_w = 0.36, bump_amp = 0.55, base_amp = 0.45;
    std::vector<double> peaks(beats.size());
    for (std::size_t k = 0; k < beats.size(); ++k) peaks[k] = beats[k] + 0.25;
    for (std::size_t i = 0; i < sig.samples.size() && !peaks.empty(); ++i) {
        double t = sig.time_at(i);
        auto it = std::lower_bound(peaks.begin(), peaks.end(), t);
        auto j = static_cast<std::size_t>(it - peaks.begin());
        double left = j > 0 ? peaks[j - 1] : peaks.front() - mean_ibi;
        double right = j < peaks.size() ? peaks[j] : peaks.back() + mean_ibi;
        double x = (t - left) / std::max(right - left, 1e-9);
        double v = base_amp * 0.5 * (1.0 + std::cos(2.0 * kPi * x));
        double dt = std::min(t - left, right - t);
        if (dt < bump_w / 2.0) v += bump_amp * 0.5 * (1.0 + std::cos(2.0 * kPi * dt / bump_w));
        sig.samples[i] = v;
    }
    double ph = rng.uniform(0.0, 2.0 * kPi);
    for (std::size_t i = 0; i < sig.samples.size(); ++i) {
        double t = sig.time_at(i);
        sig.samples[i] += 0.25 * std::sin(2.0 * kPi * 0.04 * t + ph) +
                          noise * 0.02 * rng.normal();
    }
    return sig;
}

IrregularSignal make_acc(const std::vector<double>& beats, double duration, double breath_hz,
                         double noise, Rng& rng) {
    IrregularSignal sig;
    double period = 1.0 / 200.0;
    double phase = rng.uniform(0.0, 2.0 * kPi);
    const double sigma = 0.025;  // wavelet envelope width

    double t = 0.0;
    std::size_t k = 0;  // first beat whose wavelet can still touch t
    while (t <= duration) {
        double value = 9.81 + 0.35 * std::sin(2.0 * kPi * breath_hz * t + phase) +
                       noise * 0.05 * rng.normal();
        while (k < beats.size() && beats[k] + 0.05 + 0.15 < t) ++k;
        for (std::size_t j = k; j < beats.size() && j < k + 3; ++j) {
            double tc = beats[j] + 0.05;  // mechanical delay after the R-peak
            double d = t - tc;
            if (d < -0.15) break;
            if (std::fabs(d) <= 0.15)
                value += 0.9 * std::exp(-0.5 * d * d / (sigma * sigma)) *
                         std::cos(2.0 * kPi * 15.0 * d);
        }
        sig.timestamps.push_back(t);
        sig.values.push_back(value);
        t += period * (1.0 + 0.06 * (rng.uniform() - 0.5));
    }
    return sig;
}

UniformSignal make_rsp(double duration, double breath_hz, double noise, Rng& rng,
                       std::size_t* n_breaths) {
    UniformSignal sig;
    sig.rate = 32.0;
    sig.samples.resize(static_cast<std::size_t>(duration * sig.rate));

    double phase = rng.uniform(0.0, 2.0 * kPi);
    double drift_phase = rng.uniform(0.0, 2.0 * kPi);
    for (std::size_t i = 0; i < sig.samples.size(); ++i) {
        double t = sig.time_at(i);
        double theta = 2.0 * kPi * breath_hz * t + phase;
        sig.samples[i] = std::sin(theta) + 0.15 * std::sin(2.0 * theta) +
                         0.12 * std::sin(2.0 * kPi * 0.013 * t + drift_phase) +
                         noise * 0.03 * rng.normal();
    }

    // Fundamental-peak count inside the window (phase at pi/2 mod 2*pi).
    double first = std::fmod(0.5 * kPi - phase, 2.0 * kPi);
    if (first < 0.0) first += 2.0 * kPi;
    first /= 2.0 * kPi * breath_hz;
    std::size_t count = 0;
    for (double tp = first; tp < duration; tp += 1.0 / breath_hz) ++count;
    *n_breaths = count;
    return sig;
}

UniformSignal make_eda(double duration, double level, double noise, Rng& rng) {
    UniformSignal sig;
    sig.rate = 32.0;
    sig.samples.resize(static_cast<std::size_t>(duration * sig.rate));

    double ph = rng.uniform(0.0, 2.0 * kPi);
    for (std::size_t i = 0; i < sig.samples.size(); ++i) {
        double t = sig.time_at(i);
        sig.samples[i] = level + 0.25 * std::sin(2.0 * kPi * 0.006 * t + ph) +
                         noise * 0.01 * rng.normal();
    }
    // Sparse skin-conductance responses: sharp rise, slow recovery.
    double te = rng.uniform(2.0, 6.0);
    while (te < duration) {
        double amp = rng.uniform(0.15, 0.45);
        auto lo = static_cast<std::size_t>(te * sig.rate);
        auto hi = std::min(sig.samples.size(), static_cast<std::size_t>((te + 15.0) * sig.rate));
        for (std::size_t i = lo; i < hi; ++i) {
            double d = sig.time_at(i) - te;
            sig.samples[i] += amp * (1.0 - std::exp(-d / 0.75)) * std::exp(-d / 2.8);
        }
        te += rng.uniform(7.0, 18.0);
    }
    return sig;
}

UniformSignal make_skt(double duration, double level, double noise, Rng& rng) {
    UniformSignal sig;
    sig.rate = 4.0;
    sig.samples.resize(static_cast<std::size_t>(duration * sig.rate));
    double ph = rng.uniform(0.0, 2.0 * kPi);
    double slope = 0.002 * rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < sig.samples.size(); ++i) {
        double t = sig.time_at(i);
        sig.samples[i] = level + 0.25 * std::sin(2.0 * kPi * 0.009 * t + ph) + slope * t +
                         noise * 0.01 * rng.normal();
    }
    return sig;
}

UniformSignal make_emg(double duration, double noise, Rng& rng) {
    UniformSignal sig;
    sig.rate = 256.0;
    sig.samples.resize(static_cast<std::size_t>(duration * sig.rate));
    for (double& s : sig.samples) s = noise * 0.04 * rng.normal();

    std::size_t bursts = 2 + rng.below(4);
    for (std::size_t b = 0; b < bursts; ++b) {
        double start = rng.uniform(0.0, duration - 1.5);
        double len = rng.uniform(0.4, 1.2);
        auto lo = static_cast<std::size_t>(start * sig.rate);
        auto hi = std::min(sig.samples.size(), static_cast<std::size_t>((start + len) * sig.rate));
        for (std::size_t i = lo; i < hi; ++i) {
            double u = (sig.time_at(i) - start) / len;
            double env = 0.5 * (1.0 - std::cos(2.0 * kPi * u));  // Hann burst envelope
            sig.samples[i] += 0.35 * env * rng.normal();
        }
    }
    return sig;
}

UniformSignal make_eog(double duration, double noise, Rng& rng) {
    UniformSignal sig;
    sig.rate = 256.0;
    sig.samples.resize(static_cast<std::size_t>(duration * sig.rate));
    double ph = rng.uniform(0.0, 2.0 * kPi);
    for (std::size_t i = 0; i < sig.samples.size(); ++i) {
        double t = sig.time_at(i);
        sig.samples[i] = 0.1 * std::sin(2.0 * kPi * 0.3 * t + ph) + noise * 0.04 * rng.normal();
    }
    double tb = rng.uniform(1.0, 3.0);
    while (tb < duration - 0.3) {
        auto lo = static_cast<std::size_t>(std::max(0.0, (tb - 0.25) * sig.rate));
        auto hi = std::min(sig.samples.size(), static_cast<std::size_t>((tb + 0.25) * sig.rate));
        for (std::size_t i = lo; i < hi; ++i)
            sig.samples[i] += gauss(sig.time_at(i), tb, 0.05, 0.9);
        tb += rng.uniform(3.5, 6.5);
    }
    return sig;
}

}  // namespace

SynthResult generate_synthetic_dataset(const SynthSpec& spec, std::uint64_t seed) {
    validate_spec(spec);

    SynthResult out;
    const std::size_t nt = spec.trials_per_subject;

    for (std::size_t s = 1; s <= spec.subjects; ++s) {
        std::string sid = padded_id('s', s, spec.subjects);

        Rng shift_rng(derive_seed(seed, sid + "/shift"));
        double subject_shift = shift_rng.uniform(-2.0, 2.0);

        Rng vl_rng(derive_seed(seed, sid + "/labels/valence"));
        Rng al_rng(derive_seed(seed, sid + "/labels/arousal"));
        std::vector<BinaryLabel> v_labels = subject_labels(nt, spec.valence_high_fraction, vl_rng);
        std::vector<BinaryLabel> a_labels = subject_labels(nt, spec.arousal_high_fraction, al_rng);

        for (std::size_t t = 1; t <= nt; ++t) {
            std::string vid = padded_id('v', t, nt);
            std::string base = sid + "/" + vid;
            BinaryLabel v_label = v_labels[t - 1], a_label = a_labels[t - 1];

            Rng params(derive_seed(seed, base + "/params"));
            double hr = params.uniform(spec.hr_lo_bpm, spec.hr_hi_bpm) + subject_shift;
            double breath = params.uniform(spec.breath_lo_hz, spec.breath_hi_hz);

            // Physiology may ignore the label (keeps specs from being
            // perfectly separable); truth still records the actual rates.
            BinaryLabel pv = v_label, pa = a_label;
            if (params.uniform() < spec.label_noise)
                pv = pv == BinaryLabel::High ? BinaryLabel::Low : BinaryLabel::High;
            if (params.uniform() < spec.label_noise)
                pa = pa == BinaryLabel::High ? BinaryLabel::Low : BinaryLabel::High;

            double eda_level = 2.0, skt_level = 33.0;
            if (pv == BinaryLabel::High) {
                hr += spec.valence.hr_offset_bpm;
                breath += spec.valence.breath_offset_hz;
                eda_level += spec.valence.eda_level_offset;
                skt_level += spec.valence.skt_level_offset;
            }
            if (pa == BinaryLabel::High) {
                hr += spec.arousal.hr_offset_bpm;
                breath += spec.arousal.breath_offset_hz;
                eda_level += spec.arousal.eda_level_offset;
                skt_level += spec.arousal.skt_level_offset;
            }
            hr = std::clamp(hr, 40.0, 180.0);
            breath = std::clamp(breath, 0.16, 0.34);

            Rng beat_rng(derive_seed(seed, base + "/beats"));
            std::vector<double> beats = make_beat_times(spec.duration_s, hr, breath,
                                                        spec.rsa_depth, spec.beat_jitter_s,
                                                        beat_rng);

            TrialRecord trial;
            trial.subject_id = sid;
            trial.video_id = vid;

            Rng rating_rng(derive_seed(seed, base + "/ratings"));
            trial.ratings.valence = v_label == BinaryLabel::High ? rating_rng.uniform(6.0, 8.5)
                                                                 : rating_rng.uniform(1.5, 4.0);
            trial.ratings.arousal = a_label == BinaryLabel::High ? rating_rng.uniform(6.0, 8.5)
                                                                 : rating_rng.uniform(1.5, 4.0);

            double noise = spec.noise_scale;
            std::size_t n_breaths = 0;
            {
                Rng rng(derive_seed(seed, base + "/rsp"));
                trial.channels.emplace(Channel::Rsp,
                                       make_rsp(spec.duration_s, breath, noise, rng, &n_breaths));
            }
            {
                Rng rng(derive_seed(seed, base + "/bvp"));
                trial.channels.emplace(Channel::Bvp,
                                       make_bvp(beats, spec.duration_s, 60.0 / hr, noise, rng));
            }
            {
                Rng rng(derive_seed(seed, base + "/eda"));
                trial.channels.emplace(Channel::Eda,
                                       make_eda(spec.duration_s, eda_level, noise, rng));
            }
            {
                Rng rng(derive_seed(seed, base + "/skt"));
                trial.channels.emplace(Channel::Skt,
                                       make_skt(spec.duration_s, skt_level, noise, rng));
            }
            if (spec.style == DatasetStyle::EmoWear) {
                Rng ecg_rng(derive_seed(seed, base + "/ecg"));
                trial.channels.emplace(Channel::Ecg,
                                       make_ecg(beats, spec.duration_s, noise, ecg_rng));
                Rng acc_rng(derive_seed(seed, base + "/acc"));
                trial.channels.emplace(Channel::AccZ,
                                       make_acc(beats, spec.duration_s, breath, noise, acc_rng));
            } else {
                Rng emg_rng(derive_seed(seed, base + "/emg"));
                trial.channels.emplace(Channel::Emg, make_emg(spec.duration_s, noise, emg_rng));
                Rng eog_rng(derive_seed(seed, base + "/eog"));
                trial.channels.emplace(Channel::Eog, make_eog(spec.duration_s, noise, eog_rng));
            }

            TrialTruth truth;
            truth.subject_id = sid;
            truth.video_id = vid;
            truth.hr_bpm = hr;
            truth.breath_hz = breath;
            truth.n_beats = beats.size();
            truth.n_breaths = n_breaths;
            truth.valence = v_label;
            truth.arousal = a_label;
            truth.beat_times = beats;

            out.trials.push_back(std::move(trial));
            out.truth.push_back(std::move(truth));
        }
    }
    return out;
}

SynthSpec synth_spec_from_kv(const KvFile& kv) {
    SynthSpec d;  // defaults
    SynthSpec s;
    s.subjects = static_cast<std::size_t>(
        kv_int(kv, "synth.subjects", static_cast<std::int64_t>(d.subjects)));
    s.trials_per_subject = static_cast<std::size_t>(
        kv_int(kv, "synth.trials", static_cast<std::int64_t>(d.trials_per_subject)));
    s.duration_s = kv_double(kv, "synth.duration_s", d.duration_s);
    s.hr_lo_bpm = kv_double(kv, "synth.hr_lo_bpm", d.hr_lo_bpm);
    s.hr_hi_bpm = kv_double(kv, "synth.hr_hi_bpm", d.hr_hi_bpm);
    s.breath_lo_hz = kv_double(kv, "synth.breath_lo_hz", d.breath_lo_hz);
    s.breath_hi_hz = kv_double(kv, "synth.breath_hi_hz", d.breath_hi_hz);
    s.valence_high_fraction = kv_double(kv, "synth.valence_high_fraction",
                                        d.valence_high_fraction);
    s.arousal_high_fraction = kv_double(kv, "synth.arousal_high_fraction",
                                        d.arousal_high_fraction);
    s.valence.hr_offset_bpm = kv_double(kv, "synth.valence.hr_offset_bpm", 0.0);
    s.valence.breath_offset_hz = kv_double(kv, "synth.valence.breath_offset_hz", 0.0);
    s.valence.eda_level_offset = kv_double(kv, "synth.valence.eda_level_offset", 0.0);
    s.valence.skt_level_offset = kv_double(kv, "synth.valence.skt_level_offset", 0.0);
    s.arousal.hr_offset_bpm = kv_double(kv, "synth.arousal.hr_offset_bpm", 0.0);
    s.arousal.breath_offset_hz = kv_double(kv, "synth.arousal.breath_offset_hz", 0.0);
    s.arousal.eda_level_offset = kv_double(kv, "synth.arousal.eda_level_offset", 0.0);
    s.arousal.skt_level_offset = kv_double(kv, "synth.arousal.skt_level_offset", 0.0);
    s.label_noise = kv_double(kv, "synth.label_noise", d.label_noise);
    s.rsa_depth = kv_double(kv, "synth.rsa_depth", d.rsa_depth);
    s.beat_jitter_s = kv_double(kv, "synth.beat_jitter_s", d.beat_jitter_s);
    s.noise_scale = kv_double(kv, "synth.noise_scale", d.noise_scale);
    std::string style = kv.get("synth.style", "emowear");
    if (style == "emowear")
        s.style = DatasetStyle::EmoWear;
    else if (style == "deap")
        s.style = DatasetStyle::Deap;
    else
        throw Error(ErrorCode::ConfigError, "synth.style must be 'emowear' or 'deap'");
    return s;
}

void write_truth(const std::string& path, const std::vector<TrialTruth>& truth) {
    Table t;
    t.columns = {"subject_id", "video_id", "hr_bpm", "breath_hz",
                 "n_beats",    "n_breaths", "valence", "arousal"};
    for (const TrialTruth& row : truth)
        t.add_row({row.subject_id, row.video_id, fmt_full(row.hr_bpm), fmt_full(row.breath_hz),
                   std::to_string(row.n_beats), std::to_string(row.n_breaths),
                   row.valence == BinaryLabel::High ? "High" : "Low",
                   row.arousal == BinaryLabel::High ? "High" : "Low"});
    write_table(path, t);
}

}  // namespace emosig
