// Synthetic dataset generator: determinism, structure, ground-truth
// consistency, label effects, spec validation, and the truth sidecar.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "emosig/signal_model.hpp"
#include "emosig/synthetic.hpp"

using namespace emosig;

namespace {

const UniformSignal& uniform_channel(const TrialRecord& t, Channel c) {
    REQUIRE(t.channels.count(c) == 1);
    const auto* u = std::get_if<UniformSignal>(&t.channels.at(c));
    REQUIRE(u != nullptr);
    return *u;
}

std::set<Channel> channel_set(const TrialRecord& t) {
    std::set<Channel> s;
    for (const auto& [c, data] : t.channels) s.insert(c);
    return s;
}

}  // namespace

TEST_CASE("generation is deterministic per seed and structured by id") {
    SynthSpec spec;
    spec.subjects = 3;
    spec.trials_per_subject = 5;
    spec.duration_s = 30.0;

    SynthResult a = generate_synthetic_dataset(spec, 2024);
    SynthResult b = generate_synthetic_dataset(spec, 2024);
    SynthResult c = generate_synthetic_dataset(spec, 2025);

    REQUIRE(a.trials.size() == 15);
    REQUIRE(a.truth.size() == 15);
    CHECK(a.trials.front().subject_id == "s01");
    CHECK(a.trials.front().video_id == "v01");
    CHECK(a.trials.back().subject_id == "s03");
    CHECK(a.trials.back().video_id == "v05");
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        CHECK(a.trials[i].subject_id == a.truth[i].subject_id);
        CHECK(a.trials[i].video_id == a.truth[i].video_id);
    }

    // Bit-identical across runs with the same seed.
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        const UniformSignal& ua = uniform_channel(a.trials[i], Channel::Ecg);
        const UniformSignal& ub = uniform_channel(b.trials[i], Channel::Ecg);
        REQUIRE(ua.samples.size() == ub.samples.size());
        bool same = true;
        for (std::size_t j = 0; j < ua.samples.size(); ++j)
            same &= ua.samples[j] == ub.samples[j];
        CHECK(same);
        CHECK(a.truth[i].hr_bpm == b.truth[i].hr_bpm);
        CHECK(a.truth[i].beat_times == b.truth[i].beat_times);
    }

    // A different seed moves the draws.
    bool any_diff = false;
    for (std::size_t i = 0; i < a.truth.size(); ++i)
        any_diff |= a.truth[i].hr_bpm != c.truth[i].hr_bpm;
    CHECK(any_diff);
}

TEST_CASE("styles carry their channel sets") {
    SynthSpec spec;
    spec.subjects = 1;
    spec.trials_per_subject = 2;
    spec.duration_s = 30.0;

    SynthResult emowear = generate_synthetic_dataset(spec, 7);
    std::set<Channel> expect_emowear{Channel::Ecg, Channel::Bvp, Channel::AccZ,
                                     Channel::Rsp, Channel::Eda, Channel::Skt};
    CHECK(channel_set(emowear.trials.front()) == expect_emowear);

    spec.style = DatasetStyle::Deap;
    SynthResult deap = generate_synthetic_dataset(spec, 7);
    std::set<Channel> expect_deap{Channel::Bvp, Channel::Rsp, Channel::Eda,
                                  Channel::Skt, Channel::Emg, Channel::Eog};
    CHECK(channel_set(deap.trials.front()) == expect_deap);

    // Raw trials never contain the derived channels.
    CHECK(emowear.trials.front().channels.count(Channel::Scg) == 0);
    CHECK(emowear.trials.front().channels.count(Channel::Adr) == 0);

    const UniformSignal& ecg = uniform_channel(emowear.trials.front(), Channel::Ecg);
    CHECK(ecg.rate == 256.0);
    CHECK(ecg.duration() == doctest::Approx(30.0).epsilon(0.01));
}

TEST_CASE("truth rows agree with ratings and beat scripts") {
    SynthSpec spec;
    spec.subjects = 4;
    spec.trials_per_subject = 8;
    spec.duration_s = 40.0;

    SynthResult r = generate_synthetic_dataset(spec, 99);
    for (std::size_t i = 0; i < r.trials.size(); ++i) {
        const TrialTruth& tt = r.truth[i];
        const SamRatings& ratings = r.trials[i].ratings;

        CHECK(binarize_rating(ratings.valence, Dimension::Valence) == tt.valence);
        CHECK(binarize_rating(ratings.arousal, Dimension::Arousal) == tt.arousal);

        CHECK(tt.n_beats == tt.beat_times.size());
        REQUIRE(tt.n_beats >= 2);
        CHECK(tt.beat_times.front() >= 0.0);
        CHECK(tt.beat_times.back() < spec.duration_s);
        for (std::size_t k = 1; k < tt.beat_times.size(); ++k)
            CHECK(tt.beat_times[k] > tt.beat_times[k - 1]);

        // Script rate matches the recorded generating heart rate.
        double span = tt.beat_times.back() - tt.beat_times.front();
        double mean_ibi = span / static_cast<double>(tt.n_beats - 1);
        CHECK(mean_ibi == doctest::Approx(60.0 / tt.hr_bpm).epsilon(0.03));

        // Base draws stay inside the configured ranges (+-2 subject shift).
        CHECK(tt.hr_bpm >= spec.hr_lo_bpm - 2.0);
        CHECK(tt.hr_bpm <= spec.hr_hi_bpm + 2.0);
        CHECK(tt.breath_hz >= spec.breath_lo_hz);
        CHECK(tt.breath_hz <= spec.breath_hi_hz);
        CHECK(tt.n_breaths >= 1);
    }
}

TEST_CASE("high fractions are exact per subject") {
    SynthSpec spec;
    spec.subjects = 5;
    spec.trials_per_subject = 8;
    spec.duration_s = 30.0;
    spec.valence_high_fraction = 0.25;
    spec.arousal_high_fraction = 0.5;

    SynthResult r = generate_synthetic_dataset(spec, 11);
    for (std::size_t s = 0; s < spec.subjects; ++s) {
        std::size_t v_high = 0, a_high = 0;
        for (std::size_t t = 0; t < spec.trials_per_subject; ++t) {
            const TrialTruth& tt = r.truth[s * spec.trials_per_subject + t];
            v_high += tt.valence == BinaryLabel::High ? 1 : 0;
            a_high += tt.arousal == BinaryLabel::High ? 1 : 0;
        }
        CHECK(v_high == 2);
        CHECK(a_high == 4);
    }
}

TEST_CASE("label effects shift the generating parameters") {
    SynthSpec spec;
    spec.subjects = 6;
    spec.trials_per_subject = 8;
    spec.duration_s = 30.0;
    spec.hr_lo_bpm = 64.0;
    spec.hr_hi_bpm = 76.0;
    spec.breath_lo_hz = 0.20;
    spec.breath_hi_hz = 0.27;
    spec.arousal.hr_offset_bpm = 15.0;
    spec.valence.breath_offset_hz = 0.03;

    SynthResult r = generate_synthetic_dataset(spec, 42);
    double hr_high = 0.0, hr_low = 0.0, br_high = 0.0, br_low = 0.0;
    std::size_t na_high = 0, na_low = 0, nv_high = 0, nv_low = 0;
    for (const TrialTruth& tt : r.truth) {
        if (tt.arousal == BinaryLabel::High) {
            hr_high += tt.hr_bpm;
            ++na_high;
        } else {
            hr_low += tt.hr_bpm;
            ++na_low;
        }
        if (tt.valence == BinaryLabel::High) {
            br_high += tt.breath_hz;
            ++nv_high;
        } else {
            br_low += tt.breath_hz;
            ++nv_low;
        }
    }
    REQUIRE(na_high > 0);
    REQUIRE(na_low > 0);
    CHECK(hr_high / na_high - hr_low / na_low == doctest::Approx(15.0).epsilon(0.2));
    CHECK(br_high / nv_high - br_low / nv_low == doctest::Approx(0.03).epsilon(0.35));
}

TEST_CASE("label noise decouples physiology from the recorded label") {
    SynthSpec spec;
    spec.subjects = 6;
    spec.trials_per_subject = 8;
    spec.duration_s = 30.0;
    spec.hr_lo_bpm = 62.0;
    spec.hr_hi_bpm = 70.0;
    spec.arousal.hr_offset_bpm = 20.0;
    spec.label_noise = 0.5;

    SynthResult r = generate_synthetic_dataset(spec, 5);
    double min_high = 1e9, max_low = -1e9;
    for (const TrialTruth& tt : r.truth) {
        if (tt.arousal == BinaryLabel::High)
            min_high = std::min(min_high, tt.hr_bpm);
        else
            max_low = std::max(max_low, tt.hr_bpm);
        // Ratings always follow the recorded label, flipped physiology or not.
        CHECK(binarize_rating(rating_for(r.trials.front().ratings, Dimension::Arousal),
                              Dimension::Arousal) == r.truth.front().arousal);
    }
    // With half the trials flipped the +20 bpm separation must break down.
    CHECK(min_high < max_low);
}

TEST_CASE("infeasible specs are rejected") {
    auto rejected = [](auto mutate) {
        SynthSpec spec;
        spec.subjects = 1;
        spec.trials_per_subject = 2;
        spec.duration_s = 30.0;
        mutate(spec);
        CHECK_THROWS_AS((void)generate_synthetic_dataset(spec, 1), Error);
    };
    rejected([](SynthSpec& s) { s.subjects = 0; });
    rejected([](SynthSpec& s) { s.duration_s = 20.0; });
    rejected([](SynthSpec& s) { s.hr_lo_bpm = 90.0; s.hr_hi_bpm = 80.0; });
    rejected([](SynthSpec& s) { s.hr_hi_bpm = 179.0; });
    rejected([](SynthSpec& s) { s.hr_lo_bpm = 41.0; s.arousal.hr_offset_bpm = -10.0; });
    rejected([](SynthSpec& s) { s.breath_hi_hz = 0.35; });
    rejected([](SynthSpec& s) { s.breath_lo_hz = 0.15; });
    rejected([](SynthSpec& s) { s.valence.breath_offset_hz = 0.1; });
    rejected([](SynthSpec& s) { s.label_noise = 0.6; });
    rejected([](SynthSpec& s) { s.valence_high_fraction = 1.5; });
    rejected([](SynthSpec& s) { s.rsa_depth = 0.2; });
    rejected([](SynthSpec& s) { s.beat_jitter_s = 0.2; });
    rejected([](SynthSpec& s) { s.noise_scale = -0.5; });
}

TEST_CASE("specs parse from config keys") {
    KvFile kv = parse_kv_text(
        "synth.subjects = 9\n"
        "synth.trials = 12\n"
        "synth.duration_s = 45\n"
        "synth.hr_lo_bpm = 58\n"
        "synth.hr_hi_bpm = 92\n"
        "synth.arousal.hr_offset_bpm = 10\n"
        "synth.valence.eda_level_offset = 0.4\n"
        "synth.label_noise = 0.1\n"
        "synth.style = deap\n",
        "inline");
    SynthSpec spec = synth_spec_from_kv(kv);
    CHECK(spec.subjects == 9);
    CHECK(spec.trials_per_subject == 12);
    CHECK(spec.duration_s == doctest::Approx(45.0));
    CHECK(spec.hr_lo_bpm == doctest::Approx(58.0));
    CHECK(spec.hr_hi_bpm == doctest::Approx(92.0));
    CHECK(spec.arousal.hr_offset_bpm == doctest::Approx(10.0));
    CHECK(spec.valence.eda_level_offset == doctest::Approx(0.4));
    CHECK(spec.label_noise == doctest::Approx(0.1));
    CHECK(spec.style == DatasetStyle::Deap);

    // Untouched keys keep their defaults.
    SynthSpec defaults;
    CHECK(spec.breath_lo_hz == defaults.breath_lo_hz);
    CHECK(spec.rsa_depth == defaults.rsa_depth);

    KvFile bad = parse_kv_text("synth.style = parquet\n", "inline");
    CHECK_THROWS_AS((void)synth_spec_from_kv(bad), Error);
}

TEST_CASE("the truth sidecar writes one row per trial") {
    SynthSpec spec;
    spec.subjects = 2;
    spec.trials_per_subject = 3;
    spec.duration_s = 30.0;
    SynthResult r = generate_synthetic_dataset(spec, 77);

    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "emosig_synth_tests";
    fs::create_directories(dir);
    std::string path = (dir / "truth.tsv").string();
    write_truth(path, r.truth);

    Table t = read_table(path);
    CHECK(t.columns == std::vector<std::string>{"subject_id", "video_id", "hr_bpm", "breath_hz",
                                                "n_beats", "n_breaths", "valence", "arousal"});
    REQUIRE(t.rows.size() == 6);
    CHECK(t.rows[0][0] == "s01");
    CHECK(t.rows[0][1] == "v01");
    CHECK(std::stod(t.rows[0][2]) == r.truth[0].hr_bpm);  // full-precision round trip
    CHECK(t.rows[0][6] == (r.truth[0].valence == BinaryLabel::High ? "High" : "Low"));
    CHECK(std::stoul(t.rows[0][4]) == r.truth[0].n_beats);
}
