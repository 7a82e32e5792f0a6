// Per-channel feature extraction and scenario assembly: analytic signals with
// known statistics, degenerate-input flagging, and name/prefix contracts.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "emosig/beats.hpp"
#include "emosig/features.hpp"
#include "emosig/rng.hpp"
#include "emosig/synthetic.hpp"

using namespace emosig;

namespace {

double value_of(const FeatureVector& fv, const std::string& name) {
    for (std::size_t i = 0; i < fv.size(); ++i)
        if (fv.names[i] == name) return fv.values[i];
    FAIL("missing feature ", name);
    return 0.0;
}

bool has_name(const FeatureVector& fv, const std::string& name) {
    for (const std::string& n : fv.names)
        if (n == name) return true;
    return false;
}

UniformSignal sine(double freq_hz, double rate_hz, double duration, double amp = 1.0,
                   double offset = 0.0) {
    UniformSignal sig;
    sig.rate = rate_hz;
    sig.samples.resize(static_cast<std::size_t>(duration * rate_hz));
    for (std::size_t i = 0; i < sig.samples.size(); ++i)
        sig.samples[i] = offset + amp * std::sin(2.0 * M_PI * freq_hz * sig.time_at(i));
    return sig;
}

IbiSeries ibi_from(const std::vector<double>& intervals) {
    IbiSeries s;
    s.intervals = intervals;
    double t = 0.0;
    for (double v : intervals) {
        s.onset_times.push_back(t);
        t += v;
    }
    return s;
}

}  // namespace

TEST_CASE("constant IBI series has the trivial cardiac statistics") {
    FeatureVector fv = cardiac_features(ibi_from(std::vector<double>(60, 1.0)), true);
    CHECK(value_of(fv, "ibi_mean") == doctest::Approx(1.0));
    CHECK(value_of(fv, "ibi_std") == 0.0);
    CHECK(value_of(fv, "hr_mean") == doctest::Approx(60.0));
    CHECK(value_of(fv, "rmssd") == 0.0);
    CHECK(value_of(fv, "pnn50") == 0.0);
}

TEST_CASE("alternating IBI series recovers the hand-computed indices") {
    std::vector<double> iv(40);
    for (std::size_t i = 0; i < iv.size(); ++i) iv[i] = (i % 2 == 0) ? 0.8 : 1.2;
    FeatureVector fv = cardiac_features(ibi_from(iv), true);
    CHECK(value_of(fv, "rmssd") == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(value_of(fv, "pnn50") == 1.0);
    CHECK(value_of(fv, "ibi_mean") == doctest::Approx(1.0));
}

TEST_CASE("an in-band tachogram oscillation lands in its band power") {
    // IBI = 1.0 + 0.05 sin(2*pi*0.25 t): modulation inside 0.2-0.3 Hz.
    std::vector<double> iv;
    double t = 0.0;
    while (t < 240.0) {
        double v = 1.0 + 0.05 * std::sin(2.0 * M_PI * 0.25 * t);
        iv.push_back(v);
        t += v;
    }
    FeatureVector fv = cardiac_features(ibi_from(iv), false);
    CHECK(value_of(fv, "tach_bp_200_300") > 10.0 * value_of(fv, "tach_bp_100_200"));
}

TEST_CASE("cardiac features need at least four intervals") {
    CHECK_THROWS_AS((void)cardiac_features(ibi_from({1.0, 1.0, 1.0}), false), Error);
}

TEST_CASE("relative cardiac indices are invariant to interval rescaling") {
    std::vector<double> iv = {0.82, 0.95, 1.08, 0.9, 1.01, 0.87, 1.12, 0.93};
    std::vector<double> scaled = iv;
    for (double& v : scaled) v *= 2.0;
    FeatureVector a = cardiac_features(ibi_from(iv), true);
    FeatureVector b = cardiac_features(ibi_from(scaled), true);
    CHECK(value_of(b, "cvnn") == doctest::Approx(value_of(a, "cvnn")).epsilon(1e-12));
    CHECK(value_of(b, "mcvnn") == doctest::Approx(value_of(a, "mcvnn")).epsilon(1e-12));
    CHECK(value_of(b, "ibi_mean") == doctest::Approx(2.0 * value_of(a, "ibi_mean")));
}

TEST_CASE("a 0.25 Hz breath wave yields 15 breaths per minute") {
    UniformSignal resp = sine(0.25, 32.0, 60.0);
    BeatSeries cycles = detect_breath_cycles(resp);
    FeatureVector fv = respiratory_features(resp, cycles, false);
    CHECK(value_of(fv, "breath_rate") == doctest::Approx(15.0).epsilon(0.034));
    CHECK(value_of(fv, "spectral_centroid") == doctest::Approx(0.25).epsilon(0.08));
}

TEST_CASE("constant breath-to-breath intervals zero the variability indices") {
    UniformSignal resp = sine(0.25, 32.0, 60.0);
    BeatSeries cycles;
    for (double t = 1.0; t < 58.0; t += 4.0) cycles.event_times.push_back(t);
    FeatureVector fv = respiratory_features(resp, cycles, true);
    CHECK(value_of(fv, "sdbb") == 0.0);
    CHECK(value_of(fv, "rmssd") == 0.0);
    CHECK(value_of(fv, "cvbb") == 0.0);
}

TEST_CASE("a flat respiratory record flags spectral features missing") {
    UniformSignal resp;
    resp.rate = 32.0;
    resp.samples.assign(32 * 60, 0.0);
    BeatSeries cycles;
    cycles.event_times = {1.0, 5.0, 9.0};  // injected: rate features stay valid
    FeatureVector fv = respiratory_features(resp, cycles, false);
    CHECK(value_of(fv, "sig_std") == 0.0);
    CHECK(std::isnan(value_of(fv, "log_band_ratio")));
    CHECK(std::isnan(value_of(fv, "spectral_centroid")));
    CHECK(value_of(fv, "breath_rate") == doctest::Approx(15.0));
}

TEST_CASE("a monotone EDA decay is all decrease and no rise") {
    UniformSignal eda;
    eda.rate = 32.0;
    eda.samples.resize(32 * 30);
    for (std::size_t i = 0; i < eda.samples.size(); ++i)
        eda.samples[i] = 10.0 - 0.01 * static_cast<double>(i) / eda.rate;
    FeatureVector fv = eda_features(eda);
    CHECK(value_of(fv, "neg_prop") == 1.0);
    CHECK(value_of(fv, "local_min_count") == 0.0);
    CHECK(std::isnan(value_of(fv, "rise_time_mean")));
    CHECK(value_of(fv, "decrease_rate") == doctest::Approx(-0.01).epsilon(1e-6));
}

TEST_CASE("SCSR zero-crossing rate matches the analytic sinusoid") {
    // 0.1 Hz crosses zero twice per 10 s period: 0.2 crossings/s.
    FeatureVector fv = eda_features(sine(0.1, 32.0, 120.0));
    CHECK(value_of(fv, "scsr_zcr") == doctest::Approx(0.2).epsilon(0.10));
}

TEST_CASE("skin-temperature features match constructed inputs") {
    UniformSignal flat;
    flat.rate = 4.0;
    flat.samples.assign(240, 33.0);
    FeatureVector fv = skt_features(flat);
    CHECK(value_of(fv, "mean_level") == doctest::Approx(33.0));
    CHECK(value_of(fv, "deriv_mean") == 0.0);
    CHECK(value_of(fv, "bp_0_100") == doctest::Approx(0.0).epsilon(1e-9));

    UniformSignal warming;
    warming.rate = 4.0;
    warming.samples.resize(240);
    for (std::size_t i = 0; i < warming.samples.size(); ++i)
        warming.samples[i] = 30.0 + 0.01 * static_cast<double>(i) / warming.rate;
    CHECK(value_of(skt_features(warming), "deriv_mean") == doctest::Approx(0.01).epsilon(1e-6));

    FeatureVector osc = skt_features(sine(0.05, 4.0, 120.0, 0.5, 33.0));
    CHECK(value_of(osc, "bp_0_100") > 10.0 * value_of(osc, "bp_100_200"));
}

TEST_CASE("EMG features are energy and moments with quadratic homogeneity") {
    UniformSignal zero;
    zero.rate = 256.0;
    zero.samples.assign(2560, 0.0);
    FeatureVector z = emg_features(zero);
    CHECK(value_of(z, "energy") == 0.0);
    CHECK(value_of(z, "variance") == 0.0);

    UniformSignal s = sine(10.0, 256.0, 10.0);
    CHECK(value_of(emg_features(s), "energy") == doctest::Approx(0.5).epsilon(0.01));

    UniformSignal scaled = s;
    for (double& v : scaled.samples) v *= 3.0;
    FeatureVector a = emg_features(s);
    FeatureVector b = emg_features(scaled);
    CHECK(value_of(b, "energy") == doctest::Approx(9.0 * value_of(a, "energy")));
    CHECK(value_of(b, "variance") == doctest::Approx(9.0 * value_of(a, "variance")));
}

TEST_CASE("blink rate counts injected blink templates") {
    Rng rng(99);
    UniformSignal eog;
    eog.rate = 128.0;
    eog.samples.resize(128 * 60);
    for (double& v : eog.samples) v = 0.02 * rng.normal();
    // 12 smooth 0.25 s blink bumps of unit amplitude, evenly spread.
    for (int b = 0; b < 12; ++b) {
        double t0 = 2.5 + 4.7 * b;
        for (double dt = -0.125; dt <= 0.125; dt += 1.0 / eog.rate) {
            auto i = static_cast<std::size_t>((t0 + dt) * eog.rate);
            eog.samples[i] += 0.5 * (1.0 + std::cos(2.0 * M_PI * dt / 0.25));
        }
    }
    double rate = value_of(eog_features(eog), "blink_rate");
    CHECK(rate >= 11.0);
    CHECK(rate <= 13.0);

    UniformSignal quiet;
    quiet.rate = 128.0;
    quiet.samples.resize(128 * 60);
    for (double& v : quiet.samples) v = 0.1 * rng.normal();
    CHECK(value_of(eog_features(quiet), "blink_rate") == 0.0);
}

TEST_CASE("scenario assembly prefixes exactly the demanded channels") {
    SynthSpec spec;
    spec.subjects = 1;
    spec.trials_per_subject = 1;
    SynthResult r = generate_synthetic_dataset(spec, 321);
    const TrialRecord& trial = r.trials.front();

    Scenario scg_adr{CardiacSource::Scg, PeripheralSet::AdrOnly, DatasetStyle::EmoWear};
    FeatureVector fv = assemble_features(trial, scg_adr, false);
    for (const std::string& n : fv.names)
        CHECK((n.rfind("scg.", 0) == 0 || n.rfind("adr.", 0) == 0));

    Scenario ecg_all{CardiacSource::Ecg, PeripheralSet::All, DatasetStyle::EmoWear};
    FeatureVector all = assemble_features(trial, ecg_all, false);
    CHECK(has_name(all, "ecg.ibi_mean"));
    CHECK(has_name(all, "rsp.breath_rate"));
    CHECK(has_name(all, "eda.mean_level"));
    CHECK(has_name(all, "skt.mean_level"));
    for (const std::string& n : all.names) CHECK(n.rfind("adr.", 0) != 0);

    Scenario scg_all{CardiacSource::Scg, PeripheralSet::All, DatasetStyle::EmoWear};
    CHECK(has_name(assemble_features(trial, scg_all, false), "adr.breath_rate"));
}

TEST_CASE("assembly is deterministic bit for bit") {
    SynthSpec spec;
    spec.subjects = 1;
    spec.trials_per_subject = 1;
    SynthResult r = generate_synthetic_dataset(spec, 321);
    Scenario sc{CardiacSource::Scg, PeripheralSet::All, DatasetStyle::EmoWear};
    FeatureVector a = assemble_features(r.trials.front(), sc, true);
    FeatureVector b = assemble_features(r.trials.front(), sc, true);
    REQUIRE(a.names == b.names);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i)
        CHECK(std::bit_cast<std::uint64_t>(a.values[i]) ==
              std::bit_cast<std::uint64_t>(b.values[i]));
}

TEST_CASE("a missing channel is reported by name") {
    SynthSpec spec;
    spec.subjects = 1;
    spec.trials_per_subject = 1;
    SynthResult r = generate_synthetic_dataset(spec, 321);
    TrialRecord trial = r.trials.front();
    trial.channels.erase(Channel::Rsp);
    Scenario sc{CardiacSource::Ecg, PeripheralSet::All, DatasetStyle::EmoWear};
    try {
        (void)assemble_features(trial, sc, false);
        FAIL("expected a missing-channel error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingChannel);
        CHECK(std::string(e.what()).find("rsp") != std::string::npos);
    }
}

TEST_CASE("replication-style assembly spans all six channels, base set only") {
    SynthSpec spec;
    spec.subjects = 1;
    spec.trials_per_subject = 1;
    spec.style = DatasetStyle::Deap;
    SynthResult r = generate_synthetic_dataset(spec, 654);
    Scenario sc{CardiacSource::Bvp, PeripheralSet::All, DatasetStyle::Deap};
    FeatureVector fv = assemble_features(r.trials.front(), sc, true);
    for (const char* prefix : {"bvp.", "rsp.", "eda.", "skt.", "emg.", "eog."}) {
        bool found = false;
        for (const std::string& n : fv.names)
            if (n.rfind(prefix, 0) == 0) found = true;
        CHECK_MESSAGE(found, "expected a ", prefix, " feature");
    }
    // Extended indices stay off outside EmoWear-style runs even when asked.
    CHECK(!has_name(fv, "bvp.rmssd"));
    CHECK(!has_name(fv, "rsp.apen"));
}
