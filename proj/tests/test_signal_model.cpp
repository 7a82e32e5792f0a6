// Scenario rules, rating binarization, trial validation findings, and the
// exclusion screening pass.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "emosig/signal_model.hpp"

using namespace emosig;

namespace {

UniformSignal flat(double rate, double seconds, double value = 1.0) {
    UniformSignal s;
    s.rate = rate;
    s.samples.assign(static_cast<std::size_t>(rate * seconds), value);
    return s;
}

IrregularSignal flat_irregular(double step, double seconds, double value = 9.81) {
    IrregularSignal s;
    for (double t = 0.0; t < seconds; t += step) {
        s.timestamps.push_back(t);
        s.values.push_back(value);
    }
    return s;
}

TrialRecord make_trial(const std::string& sid, const std::string& vid, double valence,
                       double arousal) {
    TrialRecord t;
    t.subject_id = sid;
    t.video_id = vid;
    t.channels[Channel::Ecg] = flat(256.0, 30.0);
    t.channels[Channel::Bvp] = flat(64.0, 30.0);
    t.channels[Channel::AccZ] = flat_irregular(0.005, 30.0);
    t.channels[Channel::Rsp] = flat(32.0, 30.0);
    t.channels[Channel::Eda] = flat(32.0, 30.0);
    t.channels[Channel::Skt] = flat(4.0, 30.0);
    t.ratings.valence = valence;
    t.ratings.arousal = arousal;
    return t;
}

}  // namespace

TEST_CASE("scenario names cover the cardiac/peripheral grid") {
    CHECK(scenario_name({CardiacSource::Ecg, PeripheralSet::All, DatasetStyle::EmoWear}) ==
          "ecg+all");
    CHECK(scenario_name({CardiacSource::Scg, PeripheralSet::AdrOnly, DatasetStyle::EmoWear}) ==
          "scg+adr");
    CHECK(scenario_name({CardiacSource::Bvp, PeripheralSet::All, DatasetStyle::Deap}) ==
          "bvp+all@deap");
}

TEST_CASE("forbidden scenario combinations are rejected") {
    // ADR exists only for the SCG chain.
    CHECK_THROWS_AS(
        validate_scenario({CardiacSource::Ecg, PeripheralSet::AdrOnly, DatasetStyle::EmoWear}),
        Error);
    // The DEAP style has no accelerometer and is BVP-only.
    CHECK_THROWS_AS(
        validate_scenario({CardiacSource::Scg, PeripheralSet::All, DatasetStyle::Deap}), Error);
    CHECK_THROWS_AS(
        validate_scenario({CardiacSource::Ecg, PeripheralSet::All, DatasetStyle::Deap}), Error);
    CHECK_THROWS_AS(
        validate_scenario({CardiacSource::Bvp, PeripheralSet::AdrOnly, DatasetStyle::Deap}),
        Error);
    CHECK_NOTHROW(
        validate_scenario({CardiacSource::Bvp, PeripheralSet::All, DatasetStyle::Deap}));
}

TEST_CASE("required channels trace SCG and ADR back to the accelerometer") {
    auto req = required_channels({CardiacSource::Scg, PeripheralSet::AdrOnly,
                                  DatasetStyle::EmoWear});
    REQUIRE(req.size() == 1);
    CHECK(req[0] == Channel::AccZ);

    auto ecg_all = required_channels({CardiacSource::Ecg, PeripheralSet::All,
                                      DatasetStyle::EmoWear});
    CHECK(std::count(ecg_all.begin(), ecg_all.end(), Channel::Ecg) == 1);
    CHECK(std::count(ecg_all.begin(), ecg_all.end(), Channel::Rsp) == 1);
    CHECK(std::count(ecg_all.begin(), ecg_all.end(), Channel::Eda) == 1);
    CHECK(std::count(ecg_all.begin(), ecg_all.end(), Channel::Skt) == 1);
    CHECK(std::count(ecg_all.begin(), ecg_all.end(), Channel::AccZ) == 0);

    auto deap = required_channels({CardiacSource::Bvp, PeripheralSet::All, DatasetStyle::Deap});
    CHECK(std::count(deap.begin(), deap.end(), Channel::Emg) == 1);
    CHECK(std::count(deap.begin(), deap.end(), Channel::Eog) == 1);
}

TEST_CASE("rating binarization: strict threshold at 5, tie rule optional") {
    CHECK(binarize_rating(5.1, Dimension::Valence) == BinaryLabel::High);
    CHECK(binarize_rating(5.0, Dimension::Valence) == BinaryLabel::Low);
    CHECK(binarize_rating(5.0, Dimension::Valence, true) == BinaryLabel::High);
    CHECK(binarize_rating(1.0, Dimension::Arousal) == BinaryLabel::Low);
    CHECK(binarize_rating(9.0, Dimension::Arousal) == BinaryLabel::High);
}

TEST_CASE("ratings outside [1,9] or non-finite are invalid") {
    CHECK_THROWS_AS((void)binarize_rating(0.5, Dimension::Valence), Error);
    CHECK_THROWS_AS((void)binarize_rating(9.5, Dimension::Valence), Error);
    CHECK_THROWS_AS((void)binarize_rating(std::nan(""), Dimension::Valence), Error);
}

TEST_CASE("validate_trial flags missing channels and corrupt samples") {
    Scenario sc{CardiacSource::Ecg, PeripheralSet::All, DatasetStyle::EmoWear};
    TrialRecord good = make_trial("s01", "v01", 7.0, 3.0);
    CHECK(validate_trial(good, sc).ok());

    TrialRecord missing = good;
    missing.channels.erase(Channel::Rsp);
    CHECK_FALSE(validate_trial(missing, sc).ok());

    TrialRecord nan_sample = good;
    std::get<UniformSignal>(nan_sample.channels[Channel::Ecg]).samples[100] =
        std::numeric_limits<double>::quiet_NaN();
    ValidationReport rep = validate_trial(nan_sample, sc);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.findings.front().channel == Channel::Ecg);

    TrialRecord empty = good;
    std::get<UniformSignal>(empty.channels[Channel::Skt]).samples.clear();
    CHECK_FALSE(validate_trial(empty, sc).ok());
}

TEST_CASE("validate_trial flags non-monotone accelerometer timestamps") {
    Scenario sc{CardiacSource::Scg, PeripheralSet::AdrOnly, DatasetStyle::EmoWear};
    TrialRecord t = make_trial("s01", "v01", 6.0, 6.0);
    auto& acc = std::get<IrregularSignal>(t.channels[Channel::AccZ]);
    acc.timestamps[50] = acc.timestamps[49];  // stalled clock
    CHECK_FALSE(validate_trial(t, sc).ok());
}

TEST_CASE("exclusions: faulty trials drop first, then broken subjects") {
    std::vector<TrialRecord> ds;
    for (int v = 1; v <= 8; ++v)
        ds.push_back(make_trial("s01", "v0" + std::to_string(v), v <= 4 ? 3.0 : 7.0,
                                v % 2 ? 3.0 : 7.0));
    for (int v = 1; v <= 8; ++v)
        ds.push_back(make_trial("s02", "v0" + std::to_string(v), v <= 4 ? 3.0 : 7.0,
                                v % 2 ? 3.0 : 7.0));
    ds[2].faulty = true;  // s01/v03

    auto [kept, report] = apply_exclusions(
        ds, 0.10, required_channels({CardiacSource::Ecg, PeripheralSet::All,
                                     DatasetStyle::EmoWear}));
    CHECK(kept.size() == 15);
    CHECK(report.kept_subjects == 2);
    CHECK(report.kept_trials == 15);
    REQUIRE(report.removals.size() == 1);
    CHECK(report.removals[0].subject_id == "s01");
    CHECK(report.removals[0].video_id == "v03");
}

TEST_CASE("exclusions: a subject missing a required channel is removed whole") {
    std::vector<TrialRecord> ds;
    for (int v = 1; v <= 6; ++v)
        ds.push_back(make_trial("s01", "v0" + std::to_string(v), v <= 3 ? 3.0 : 7.0,
                                v <= 3 ? 7.0 : 3.0));
    for (int v = 1; v <= 6; ++v)
        ds.push_back(make_trial("s02", "v0" + std::to_string(v), v <= 3 ? 3.0 : 7.0,
                                v <= 3 ? 7.0 : 3.0));
    ds[3].channels.erase(Channel::Ecg);  // s01/v04

    auto [kept, report] = apply_exclusions(
        ds, 0.10, {Channel::Ecg, Channel::Rsp});
    CHECK(kept.size() == 6);
    for (const TrialRecord& t : kept) CHECK(t.subject_id == "s02");
    bool subject_level = false;
    for (const Removal& r : report.removals)
        if (r.subject_id == "s01" && r.video_id.empty()) subject_level = true;
    CHECK(subject_level);
}

TEST_CASE("exclusions: single-class subjects fall to the balance screen") {
    std::vector<TrialRecord> ds;
    // s01 rates everything low-valence: the High fraction is 0 < 0.10.
    for (int v = 1; v <= 6; ++v)
        ds.push_back(make_trial("s01", "v0" + std::to_string(v), 2.0, v <= 3 ? 2.0 : 8.0));
    for (int v = 1; v <= 6; ++v)
        ds.push_back(make_trial("s02", "v0" + std::to_string(v), v <= 3 ? 2.0 : 8.0,
                                v <= 3 ? 8.0 : 2.0));

    auto [kept, report] = apply_exclusions(ds, 0.10, {Channel::Ecg});
    CHECK(kept.size() == 6);
    for (const TrialRecord& t : kept) CHECK(t.subject_id == "s02");
}

TEST_CASE("exclusions validate the min_class_fraction domain") {
    std::vector<TrialRecord> ds{make_trial("s01", "v01", 3.0, 7.0)};
    CHECK_THROWS_AS((void)apply_exclusions(ds, 0.0, {Channel::Ecg}), Error);
    CHECK_THROWS_AS((void)apply_exclusions(ds, 0.75, {Channel::Ecg}), Error);
}
