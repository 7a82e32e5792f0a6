#include "emosig/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emosig/interval_stats.hpp"
#include "emosig/numeric.hpp"

namespace emosig {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::vector<double> diffs(const std::vector<double>& x) {
    std::vector<double> d;
    d.reserve(x.size() > 0 ? x.size() - 1 : 0);
    for (std::size_t i = 1; i < x.size(); ++i) d.push_back(x[i] - x[i - 1]);
    return d;
}

// Guard for indices undefined on degenerate inputs.
template <typename F>
double or_missing(F&& f) {
    try {
        double v = f();
        return std::isfinite(v) ? v : kMissing;
    } catch (const Error&) {
        return kMissing;
    }
}

double spectral_centroid(const PowerSpectrum& ps) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ps.freqs.size(); ++i) {
        num += ps.freqs[i] * ps.psd[i];
        den += ps.psd[i];
    }
    return den > 0.0 ? num / den : kMissing;
}

// Zero crossings counted as strict sign flips between consecutive samples.
std::vector<std::size_t> zero_crossings(const std::vector<double>& x) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (x[i] * x[i + 1] < 0.0) idx.push_back(i);
    return idx;
}

double mean_peak_between_crossings(const std::vector<double>& x,
                                   const std::vector<std::size_t>& crossings) {
    if (crossings.size() < 2) return kMissing;
    double total = 0.0;
    for (std::size_t c = 0; c + 1 < crossings.size(); ++c) {
        double peak = 0.0;
        for (std::size_t i = crossings[c] + 1; i <= crossings[c + 1]; ++i)
            peak = std::max(peak, std::fabs(x[i]));
        total += peak;
    }
    return total / static_cast<double>(crossings.size() - 1);
}

double blink_rate_per_minute(const UniformSignal& eog) {
    std::vector<double> rect(eog.size());
    for (std::size_t i = 0; i < eog.size(); ++i) rect[i] = std::fabs(eog.samples[i]);
    auto smooth_w = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.15 * eog.rate)));
    std::vector<double> smooth = moving_average(rect, smooth_w);

    double threshold = median(smooth) + 12.0 * mad(smooth);

    auto refractory = static_cast<std::size_t>(std::llround(0.25 * eog.rate));
    std::size_t count = 0;
    std::size_t last = 0;
    bool have_last = false;
    for (std::size_t i = 1; i + 1 < smooth.size(); ++i) {
        if (smooth[i] > threshold && smooth[i] > smooth[i - 1] && smooth[i] >= smooth[i + 1]) {
            if (!have_last || i - last >= refractory) {
                ++count;
                last = i;
                have_last = true;
            }
        }
    }
    double dur = eog.duration();
    return dur > 0.0 ? static_cast<double>(count) / dur * 60.0 : 0.0;
}

}  // namespace

FeatureVector cardiac_features(const IbiSeries& ibi, bool extended) {
    const std::vector<double>& iv = ibi.intervals;
    if (iv.size() < 4)
        throw Error(ErrorCode::InsufficientBeats, "cardiac features need >= 4 intervals");

    FeatureVector out;
    out.push("ibi_mean", mean(iv));
    out.push("ibi_std", sd_samp(iv));

    std::vector<double> hr(iv.size());
    for (std::size_t i = 0; i < iv.size(); ++i) hr[i] = 60.0 / iv[i];
    out.push("hr_mean", mean(hr));
    out.push("hr_std", sd_samp(hr));

    std::vector<double> d = diffs(iv);
    out.push("ibi_diff_mean", mean(d));
    out.push("ibi_diff_std", sd_samp(d));

    TachogramSpectrum spec = tachogram_spectrum(iv, ibi.onset_times);
    out.push("lf_hf", spec.hf > 0.0 ? spec.lf / spec.hf : kMissing);

    // Tachogram band powers (band edges in mHz in the names).
    IrregularSignal tach{ibi.onset_times, iv};
    UniformSignal tach_u = resample_uniform(tach, 4.0);
    PowerSpectrum tach_ps = welch_psd(tach_u, 256);
    out.push("tach_bp_100_200", band_power(tach_ps, {0.1, 0.2}));
    out.push("tach_bp_200_300", band_power(tach_ps, {0.2, 0.3}));
    out.push("tach_bp_300_400", band_power(tach_ps, {0.3, 0.4}));

    // Same treatment for the interval-derivative series.
    std::vector<double> d_onsets(ibi.onset_times.begin() + 1, ibi.onset_times.end());
    out.push("dibi_bp_10_80", or_missing([&] {
                 IrregularSignal ds{d_onsets, d};
                 PowerSpectrum ps = welch_psd(resample_uniform(ds, 4.0), 256);
                 return band_power(ps, {0.01, 0.08});
             }));
    out.push("dibi_bp_80_150", or_missing([&] {
                 IrregularSignal ds{d_onsets, d};
                 PowerSpectrum ps = welch_psd(resample_uniform(ds, 4.0), 256);
                 return band_power(ps, {0.08, 0.15});
             }));
    out.push("dibi_bp_150_500", or_missing([&] {
                 IrregularSignal ds{d_onsets, d};
                 PowerSpectrum ps = welch_psd(resample_uniform(ds, 4.0), 256);
                 return band_power(ps, {0.15, 0.5});
             }));

    if (!extended) return out;

    double sdnn = sd_samp(iv);
    double rm = rmssd(iv);
    double med = median(iv);
    double madnn = emosig::mad(iv);

    out.push("cvnn", or_missing([&] { return sdnn / mean(iv); }));
    out.push("cvsd", or_missing([&] { return rm / mean(iv); }));
    out.push("hfn", spec.lf + spec.hf > 0.0 ? spec.hf / (spec.lf + spec.hf) : kMissing);
    out.push("hti", hti(iv));
    out.push("iqrnn", percentile(iv, 75.0) - percentile(iv, 25.0));
    out.push("lfn", spec.lf + spec.hf > 0.0 ? spec.lf / (spec.lf + spec.hf) : kMissing);
    out.push("lnhf", spec.hf > 0.0 ? std::log(spec.hf) : kMissing);
    out.push("mcvnn", med != 0.0 ? madnn / med : kMissing);
    out.push("madnn", madnn);
    out.push("maxnn", *std::max_element(iv.begin(), iv.end()));
    out.push("mediannn", med);
    out.push("minnn", *std::min_element(iv.begin(), iv.end()));
    out.push("prc20nn", percentile(iv, 20.0));
    out.push("prc80nn", percentile(iv, 80.0));
    out.push("rmssd", rm);
    out.push("sdrmssd", rm > 0.0 ? sdnn / rm : kMissing);
    out.push("tinn", tinn(iv));
    out.push("tp", spec.tp);
    out.push("pnn20", pnn(iv, 0.020));
    out.push("pnn50", pnn(iv, 0.050));
    return out;
}

FeatureVector respiratory_features(const UniformSignal& resp, const BeatSeries& cycles,
                                   bool extended) {
    if (cycles.event_times.size() < 3)
        throw Error(ErrorCode::InsufficientData, "respiratory features need >= 3 cycles");

    const std::vector<double>& x = resp.samples;
    std::vector<double> bb = diffs(cycles.event_times);

    FeatureVector out;
    out.push("sig_mean", mean(x));
    out.push("sig_std", sd_pop(x));
    std::vector<double> dx = diffs(x);
    out.push("deriv_mean", dx.empty() ? kMissing : mean(dx) * resp.rate);
    out.push("breath_rate", 60.0 / mean(bb));
    out.push("bb_mean", mean(bb));
    out.push("bb_median", median(bb));

    PowerSpectrum ps = welch_psd(resp, 256);
    double low = band_power(ps, {0.05, 0.25});
    double high = band_power(ps, {0.25, 5.0});
    out.push("log_band_ratio", low > 0.0 ? std::log(low) - std::log(high + 1e-12) : kMissing);
    out.push("spectral_centroid", spectral_centroid(ps));
    out.push("bp_0_2400", band_power(ps, {0.0, 2.4}));

    if (!extended) return out;

    double bb_mean = mean(bb);
    double bb_med = median(bb);
    double madbb = emosig::mad(bb);

    out.push("sdbb", or_missing([&] { return sd_samp(bb); }));
    out.push("rmssd", or_missing([&] { return rmssd(bb); }));
    out.push("sdsd", or_missing([&] { return sdsd(bb); }));
    out.push("cvbb", or_missing([&] { return sd_samp(bb) / bb_mean; }));
    out.push("cvsd", or_missing([&] { return rmssd(bb) / bb_mean; }));
    out.push("mcvbb", bb_med != 0.0 ? madbb / bb_med : kMissing);
    out.push("madbb", madbb);
    out.push("sd1", or_missing([&] { return rmssd(bb) / std::sqrt(2.0); }));

    double lf = kMissing, hf = kMissing, lfhf = kMissing;
    try {
        std::vector<double> onsets(cycles.event_times.begin(), cycles.event_times.end() - 1);
        TachogramSpectrum spec = tachogram_spectrum(bb, onsets);
        lf = spec.lf;
        hf = spec.hf;
        lfhf = spec.hf > 0.0 ? spec.lf / spec.hf : kMissing;
    } catch (const Error&) {
    }
    out.push("lf", lf);
    out.push("hf", hf);
    out.push("lfhf", lfhf);

    out.push("apen", or_missing([&] { return apen(bb); }));

    // Respiratory volume proxy: mean peak-to-trough drop over mean interval.
    double amp_total = 0.0;
    std::size_t amp_count = 0;
    for (std::size_t k = 0; k + 1 < cycles.event_times.size(); ++k) {
        auto i0 = static_cast<std::size_t>(
            std::llround((cycles.event_times[k] - resp.start_time) * resp.rate));
        auto i1 = static_cast<std::size_t>(
            std::llround((cycles.event_times[k + 1] - resp.start_time) * resp.rate));
        i0 = std::min(i0, x.size() - 1);
        i1 = std::min(i1, x.size() - 1);
        if (i1 <= i0) continue;
        double trough = x[i0];
        for (std::size_t i = i0; i <= i1; ++i) trough = std::min(trough, x[i]);
        amp_total += x[i0] - trough;
        ++amp_count;
    }
    out.push("rvt", amp_count > 0 ? (amp_total / static_cast<double>(amp_count)) / bb_mean
                                  : kMissing);
    return out;
}

FeatureVector eda_features(const UniformSignal& eda, double scsr_cut_hz, double scvsr_cut_hz) {
    if (eda.duration() < 20.0)
        throw Error(ErrorCode::InsufficientData, "EDA features need >= 20 s of signal");

    const std::vector<double>& x = eda.samples;
    std::vector<double> dx = diffs(x);

    FeatureVector out;
    out.push("mean_level", mean(x));
    out.push("deriv_mean", mean(dx) * eda.rate);

    double dec_total = 0.0;
    std::size_t dec_count = 0, neg_count = 0;
    for (double d : dx) {
        if (d < 0.0) {
            dec_total += d * eda.rate;
            ++dec_count;
            ++neg_count;
        }
    }
    out.push("decrease_rate", dec_count > 0 ? dec_total / static_cast<double>(dec_count)
                                            : kMissing);
    out.push("neg_prop", static_cast<double>(neg_count) / static_cast<double>(dx.size()));

    std::size_t minima = 0;
    for (std::size_t i = 1; i + 1 < x.size(); ++i)
        if (x[i] < x[i - 1] && x[i] <= x[i + 1]) ++minima;
    out.push("local_min_count", static_cast<double>(minima));

    // Mean duration of maximal strictly-increasing runs.
    double rise_total = 0.0;
    std::size_t rise_runs = 0, run_len = 0;
    for (std::size_t i = 0; i <= dx.size(); ++i) {
        if (i < dx.size() && dx[i] > 0.0) {
            ++run_len;
        } else if (run_len > 0) {
            rise_total += static_cast<double>(run_len) / eda.rate;
            ++rise_runs;
            run_len = 0;
        }
    }
    out.push("rise_time_mean", rise_runs > 0 ? rise_total / static_cast<double>(rise_runs)
                                             : kMissing);

    out.push("bp_0_2400", band_power(welch_psd(eda, 256), {0.0, 2.4}));

    // Slow and very-slow skin-conductance responses.
    auto detrend_w = static_cast<std::size_t>(std::llround(10.0 * eda.rate));
    std::vector<double> detrended = moving_average_detrend(x, detrend_w);
    double duration = eda.duration();
    for (auto [cut, tag] : {std::pair{scsr_cut_hz, "scsr"}, std::pair{scvsr_cut_hz, "scvsr"}}) {
        Sos lp = butter_lowpass(4, cut, eda.rate);
        std::vector<double> comp = sosfiltfilt(lp, detrended);
        auto crossings = zero_crossings(comp);
        out.push(std::string(tag) + "_zcr",
                 duration > 0.0 ? static_cast<double>(crossings.size()) / duration : kMissing);
        out.push(std::string(tag) + "_peak_mag", mean_peak_between_crossings(comp, crossings));
    }
    return out;
}

FeatureVector skt_features(const UniformSignal& skt) {
    if (skt.samples.empty()) throw Error(ErrorCode::InsufficientData, "empty SKT signal");
    FeatureVector out;
    out.push("mean_level", mean(skt.samples));
    std::vector<double> dx = diffs(skt.samples);
    out.push("deriv_mean", dx.empty() ? kMissing : mean(dx) * skt.rate);
    PowerSpectrum ps = welch_psd(skt, 256);
    out.push("bp_0_100", band_power(ps, {0.0, 0.1}));
    out.push("bp_100_200", band_power(ps, {0.1, 0.2}));
    return out;
}

FeatureVector emg_features(const UniformSignal& emg) {
    if (emg.samples.empty()) throw Error(ErrorCode::InsufficientData, "empty EMG signal");
    FeatureVector out;
    double energy = 0.0;
    for (double v : emg.samples) energy += v * v;
    out.push("energy", energy / static_cast<double>(emg.size()));
    out.push("mean_level", mean(emg.samples));
    out.push("variance", var_pop(emg.samples));
    return out;
}

FeatureVector eog_features(const UniformSignal& eog) {
    FeatureVector out = emg_features(eog);
    out.push("blink_rate", blink_rate_per_minute(eog));
    return out;
}

namespace {

void append_prefixed(FeatureVector& out, const std::string& prefix, const FeatureVector& in) {
    for (std::size_t i = 0; i < in.size(); ++i) out.push(prefix + "." + in.names[i], in.values[i]);
}

const SignalData& channel_or_throw(const TrialRecord& trial, Channel c) {
    auto it = trial.channels.find(c);
    if (it == trial.channels.end())
        throw Error(ErrorCode::MissingChannel,
                    "trial " + trial.subject_id + "/" + trial.video_id + " missing channel " +
                        channel_name(c));
    return it->second;
}

UniformSignal uniform_channel(const TrialRecord& trial, Channel c) {
    const SignalData& data = channel_or_throw(trial, c);
    if (const auto* u = std::get_if<UniformSignal>(&data)) return *u;
    // Tolerate irregular storage for nominally uniform channels.
    return resample_uniform(std::get<IrregularSignal>(data), 200.0);
}

IrregularSignal irregular_channel(const TrialRecord& trial, Channel c) {
    const SignalData& data = channel_or_throw(trial, c);
    if (const auto* irr = std::get_if<IrregularSignal>(&data)) return *irr;
    const auto& u = std::get<UniformSignal>(data);
    IrregularSignal out;
    out.timestamps.resize(u.size());
    out.values = u.samples;
    for (std::size_t i = 0; i < u.size(); ++i) out.timestamps[i] = u.time_at(i);
    return out;
}

}  // namespace

FeatureVector assemble_features(const TrialRecord& trial, const Scenario& scenario,
                                bool extended, const FeatureOptions& options) {
    validate_scenario(scenario);
    bool ext = extended && scenario.style == DatasetStyle::EmoWear;

    IbiOptions ibi_opts;
    ibi_opts.screen = options.ibi_screen;

    FeatureVector out;

    switch (scenario.cardiac) {
        case CardiacSource::Ecg: {
            UniformSignal ecg = uniform_channel(trial, Channel::Ecg);
            IbiSeries ibi = build_ibi(detect_r_peaks(ecg), ibi_opts);
            append_prefixed(out, "ecg", cardiac_features(ibi, ext));
            break;
        }
        case CardiacSource::Bvp: {
            UniformSignal bvp = uniform_channel(trial, Channel::Bvp);
            IbiSeries ibi = build_ibi(detect_bvp_peaks(bvp), ibi_opts);
            append_prefixed(out, "bvp", cardiac_features(ibi, ext));
            break;
        }
        case CardiacSource::Scg: {
            UniformSignal scg = derive_scg(irregular_channel(trial, Channel::AccZ));
            IbiSeries ibi = build_ibi(detect_ao_peaks(scg), ibi_opts);
            append_prefixed(out, "scg", cardiac_features(ibi, ext));
            break;
        }
    }

    bool want_rsp = scenario.peripherals != PeripheralSet::AdrOnly;
    bool want_adr = scenario.peripherals == PeripheralSet::AdrOnly ||
                    (scenario.peripherals == PeripheralSet::All &&
                     scenario.style == DatasetStyle::EmoWear &&
                     scenario.cardiac == CardiacSource::Scg);
    bool want_peripherals = scenario.peripherals == PeripheralSet::All;

    if (want_rsp) {
        UniformSignal rsp = bandpass(uniform_channel(trial, Channel::Rsp), {0.15, 0.35});
        BeatSeries cycles = detect_breath_cycles(rsp);
        append_prefixed(out, "rsp", respiratory_features(rsp, cycles, ext));
    }
    if (want_adr) {
        UniformSignal adr = derive_adr(irregular_channel(trial, Channel::AccZ));
        BeatSeries cycles = detect_breath_cycles(adr);
        append_prefixed(out, "adr", respiratory_features(adr, cycles, ext));
    }
    if (want_peripherals) {
        append_prefixed(out, "eda", eda_features(uniform_channel(trial, Channel::Eda)));
        append_prefixed(out, "skt", skt_features(uniform_channel(trial, Channel::Skt)));
        if (scenario.style == DatasetStyle::Deap) {
            UniformSignal emg = bandpass(uniform_channel(trial, Channel::Emg), {4.0, 40.0});
            append_prefixed(out, "emg", emg_features(emg));
            UniformSignal eog = bandpass(uniform_channel(trial, Channel::Eog), {4.0, 40.0});
            append_prefixed(out, "eog", eog_features(eog));
        }
    }
    return out;
}

}  // namespace emosig
