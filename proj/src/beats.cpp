#include "emosig/beats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "emosig/numeric.hpp"

namespace emosig {

namespace {

// Local maxima indices; plateaus contribute their first sample.
std::vector<std::size_t> local_maxima(const std::vector<double>& x) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i + 1 < x.size(); ++i)
        if (x[i] > x[i - 1] && x[i] >= x[i + 1]) idx.push_back(i);
    return idx;
}

// Keep the strongest peaks subject to a minimum index separation
// (amplitude-greedy, ties broken by position — deterministic).
std::vector<std::size_t> enforce_distance(const std::vector<std::size_t>& candidates,
                                          const std::vector<double>& amp,
                                          std::size_t min_samples) {
    std::vector<std::size_t> order = candidates;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (amp[a] != amp[b]) return amp[a] > amp[b];
        return a < b;
    });
    std::vector<std::size_t> accepted;
    for (std::size_t c : order) {
        bool ok = true;
        for (std::size_t a : accepted) {
            std::size_t gap = c > a ? c - a : a - c;
            if (gap < min_samples) {
                ok = false;
                break;
            }
        }
        if (ok) accepted.push_back(c);
    }
    std::sort(accepted.begin(), accepted.end());
    return accepted;
}

// Fractional offset of the true extremum from a least-squares parabola over
// ±k samples around a sampled maximum; 0 when the fit is degenerate or not
// concave. k = 1 reduces to classic 3-point interpolation (right for sharp
// QRS/AO transients); wider windows average sensor noise on smooth low-rate
// waveforms such as the pulse wave, keeping interval errors well below the
// sample period even at the 64 Hz pulse-wave rate.
double parabolic_offset(const std::vector<double>& x, std::size_t i, std::size_t k) {
    std::size_t m = std::min({k, i, x.size() - 1 - i});
    if (m == 0) return 0.0;
    double n = 2.0 * static_cast<double>(m) + 1.0;
    double s2 = 0.0, s4 = 0.0, sy = 0.0, sty = 0.0, st2y = 0.0;
    for (std::size_t j = i - m; j <= i + m; ++j) {
        double t = static_cast<double>(j) - static_cast<double>(i);
        s2 += t * t;
        s4 += t * t * t * t;
        sy += x[j];
        sty += t * x[j];
        st2y += t * t * x[j];
    }
    double c = (n * st2y - s2 * sy) / (n * s4 - s2 * s2);
    if (!(c < 0.0)) return 0.0;
    double off = -(sty / s2) / (2.0 * c);
    double lim = m == 1 ? 0.5 : 1.0;
    return std::clamp(off, -lim, lim);
}

// Topographic prominence of the local maximum at i: walk outward on each side
// until a strictly higher sample (or the border) appears, take the lowest
// sample passed on each side, and measure the peak against the higher of the
// two bases. Noise wrinkles riding a slope earn only their own tiny height,
// while genuine pulse peaks earn the full trough-to-peak excursion.
double peak_prominence(const std::vector<double>& x, std::size_t i) {
    double left = x[i];
    for (std::size_t j = i; j-- > 0;) {
        if (x[j] > x[i]) break;
        left = std::min(left, x[j]);
    }
    double right = x[i];
    for (std::size_t j = i + 1; j < x.size(); ++j) {
        if (x[j] > x[i]) break;
        right = std::min(right, x[j]);
    }
    return x[i] - std::max(left, right);
}

BeatSeries to_beats(const UniformSignal& sig, const std::vector<std::size_t>& idx,
                    const std::vector<double>& refine_on, BeatKind kind,
                    std::size_t refine_halfwidth = 1) {
    BeatSeries out;
    out.kind = kind;
    out.event_times.reserve(idx.size());
    for (std::size_t i : idx)
        out.event_times.push_back(
            sig.time_at(i) + parabolic_offset(refine_on, i, refine_halfwidth) / sig.rate);
    return out;
}

void require_duration(const UniformSignal& sig, double min_s, const char* what) {
    if (sig.duration() < min_s)
        throw Error(ErrorCode::InsufficientData,
                    std::string(what) + " needs >= " + std::to_string(min_s) + " s of signal");
}

}  // namespace

UniformSignal derive_scg(const IrregularSignal& acc_z, double rate) {
    return resample_uniform(acc_z, rate);
}

BeatSeries detect_ao_peaks(const UniformSignal& scg, double min_distance_s) {
    require_duration(scg, 5.0, "AO-peak detection");

    UniformSignal stage = bandpass(scg, {10.0, 20.0});
    stage = hilbert_envelope(stage);
    stage = bandpass(stage, {0.5, 2.0});

    std::vector<std::size_t> cand;
    for (std::size_t i : local_maxima(stage.samples))
        if (stage.samples[i] > 0.0) cand.push_back(i);

    auto min_samples = static_cast<std::size_t>(std::llround(min_distance_s * scg.rate));
    auto idx = enforce_distance(cand, stage.samples, min_samples);
    if (idx.empty())
        throw Error(ErrorCode::EmptyBeats,
                    "no AO peaks found (" + std::to_string(scg.size()) + " samples at " +
                        std::to_string(scg.rate) + " Hz)");
    return to_beats(scg, idx, stage.samples, BeatKind::AoPeak);
}

BeatSeries detect_r_peaks(const UniformSignal& ecg, double qrs_window_s, double beat_window_s,
                          double beta) {
    require_duration(ecg, 5.0, "R-peak detection");

    UniformSignal band = bandpass(ecg, {8.0, 20.0});
    std::vector<double> sq(band.size());
    for (std::size_t i = 0; i < band.size(); ++i) sq[i] = band.samples[i] * band.samples[i];

    auto w_qrs = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(qrs_window_s * ecg.rate)));
    auto w_beat = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(beat_window_s * ecg.rate)));
    std::vector<double> ma_qrs = moving_average(sq, w_qrs);
    std::vector<double> ma_beat = moving_average(sq, w_beat);
    double offset = beta * mean(sq);

    // Blocks where the QRS average rises above the beat average mark events;
    // blocks shorter than the QRS window are noise.
    std::vector<std::size_t> idx;
    std::size_t n = sq.size();
    std::size_t i = 0;
    while (i < n) {
        if (ma_qrs[i] > ma_beat[i] + offset) {
            std::size_t j = i;
            while (j < n && ma_qrs[j] > ma_beat[j] + offset) ++j;
            if (j - i >= w_qrs) {
                std::size_t best = i;
                for (std::size_t k = i; k < j; ++k)
                    if (sq[k] > sq[best]) best = k;
                idx.push_back(best);
            }
            i = j;
        } else {
            ++i;
        }
    }

    if (idx.empty())
        throw Error(ErrorCode::EmptyBeats, "no R peaks found (" + std::to_string(ecg.size()) +
                                               " samples at " + std::to_string(ecg.rate) + " Hz)");
    return to_beats(ecg, idx, sq, BeatKind::RPeak);
}

BeatSeries detect_bvp_peaks(const UniformSignal& bvp, std::size_t detrend_window,
                            double threshold_percentile, double rolling_window_s,
                            double min_distance_s) {
    require_duration(bvp, 5.0, "pulse-peak detection");

    std::vector<double> d = moving_average_detrend(bvp.samples, detrend_window);

    // Adaptive prominence gate: a candidate peak must rise above its
    // surroundings by more than the rolling percentile of the local absolute
    // amplitude, so the threshold tracks per-trial (and slowly drifting)
    // pulse strength with no fixed amplitude constant.
    auto half = static_cast<std::size_t>(std::llround(rolling_window_s * bvp.rate / 2.0));
    std::vector<std::size_t> cand;
    for (std::size_t i : local_maxima(d)) {
        std::size_t lo = i > half ? i - half : 0;
        std::size_t hi = std::min(d.size(), i + half + 1);
        std::vector<double> window;
        window.reserve(hi - lo);
        for (std::size_t j = lo; j < hi; ++j) window.push_back(std::fabs(d[j]));
        if (peak_prominence(d, i) > percentile(std::move(window), threshold_percentile))
            cand.push_back(i);
    }

    auto min_samples = static_cast<std::size_t>(std::llround(min_distance_s * bvp.rate));
    auto idx = enforce_distance(cand, d, min_samples);
    if (idx.empty())
        throw Error(ErrorCode::EmptyBeats, "no pulse peaks found (" + std::to_string(bvp.size()) +
                                               " samples at " + std::to_string(bvp.rate) + " Hz)");
    return to_beats(bvp, idx, d, BeatKind::PulsePeak, 3);
}

UniformSignal derive_adr(const IrregularSignal& acc_z, double rate, BandSpec band,
                         double baseline_window_s) {
    if (acc_z.timestamps.size() < 2 ||
        acc_z.timestamps.back() - acc_z.timestamps.front() < 20.0)
        throw Error(ErrorCode::InsufficientData, "ADR derivation needs >= 20 s of acceleration");

    UniformSignal sig = resample_uniform(acc_z, rate);
    sig = bandpass(sig, band);
    auto window = static_cast<std::size_t>(std::llround(baseline_window_s * rate));
    sig = moving_average_detrend(sig, window);
    return sig;
}

BeatSeries detect_breath_cycles(const UniformSignal& resp, double min_distance_s) {
    if (resp.size() < 3)
        throw Error(ErrorCode::InsufficientData, "breath detection needs >= 3 samples");

    const std::vector<double>& x = resp.samples;
    std::size_t n = x.size();

    // Maxima of positive half-waves between an upward and the next downward
    // zero crossing.
    std::vector<std::size_t> cand;
    std::size_t i = 0;
    while (i + 1 < n) {
        if (x[i] <= 0.0 && x[i + 1] > 0.0) {
            std::size_t j = i + 1;
            while (j + 1 < n && x[j + 1] > 0.0) ++j;
            if (j + 1 < n) {  // half-wave closed by a downward crossing
                std::size_t best = i + 1;
                for (std::size_t k = i + 1; k <= j; ++k)
                    if (x[k] > x[best]) best = k;
                cand.push_back(best);
            }
            i = j + 1;
        } else {
            ++i;
        }
    }

    auto min_samples = static_cast<std::size_t>(std::llround(min_distance_s * resp.rate));
    auto idx = enforce_distance(cand, x, min_samples);
    if (idx.empty())
        throw Error(ErrorCode::EmptyBeats, "no breath cycles found (" + std::to_string(n) +
                                               " samples at " + std::to_string(resp.rate) + " Hz)");
    return to_beats(resp, idx, x, BeatKind::BreathPeak);
}

IbiSeries build_ibi(const BeatSeries& beats, const IbiOptions& opts) {
    if (beats.event_times.size() < 3)
        throw Error(ErrorCode::InsufficientBeats, "interval series needs >= 3 events");

    IbiSeries out;
    for (std::size_t i = 1; i < beats.event_times.size(); ++i) {
        double gap = beats.event_times[i] - beats.event_times[i - 1];
        if (!opts.screen || (gap >= opts.min_s && gap <= opts.max_s)) {
            out.intervals.push_back(gap);
            out.onset_times.push_back(beats.event_times[i - 1]);
        } else {
            out.rejected_gaps.push_back(gap);
        }
    }
    if (out.intervals.size() < 2)
        throw Error(ErrorCode::InsufficientBeats,
                    "fewer than 2 plausible intervals (" +
                        std::to_string(out.rejected_gaps.size()) + " rejected)");
    return out;
}

}  // namespace emosig
