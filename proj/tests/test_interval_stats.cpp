// Interval-series indices (RMSSD, SDSD, pNNx, HTI, TINN, ApEn, tachogram
// bands) checked against direct-definition brute force and hand-built
// histograms.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "emosig/interval_stats.hpp"
#include "emosig/numeric.hpp"
#include "emosig/rng.hpp"

using namespace emosig;

namespace {

std::vector<double> alternating(double a, double b, std::size_t n) {
    std::vector<double> iv(n);
    for (std::size_t i = 0; i < n; ++i) iv[i] = (i % 2 == 0) ? a : b;
    return iv;
}

double rel_diff(double a, double b) {
    double scale = std::max({std::fabs(a), std::fabs(b), 1e-30});
    return std::fabs(a - b) / scale;
}

}  // namespace

TEST_CASE("successive-difference indices match brute force on random lists") {
    Rng rng(20240915);
    for (int rep = 0; rep < 60; ++rep) {
        std::size_t n = 10 + rng.below(190);
        std::vector<double> iv(n);
        for (double& v : iv) v = rng.uniform(0.6, 1.4);

        std::vector<double> d;
        for (std::size_t i = 1; i < n; ++i) d.push_back(iv[i] - iv[i - 1]);

        double sq = 0.0;
        for (double v : d) sq += v * v;
        double rmssd_ref = std::sqrt(sq / static_cast<double>(d.size()));
        CHECK(rel_diff(rmssd(iv), rmssd_ref) < 1e-9);
        CHECK(rel_diff(sdsd(iv), sd_samp(d)) < 1e-9);

        for (double thr : {0.02, 0.05}) {
            double over = 0.0;
            for (double v : d)
                if (std::fabs(v) > thr) over += 1.0;
            CHECK(rel_diff(pnn(iv, thr), over / static_cast<double>(d.size())) < 1e-9);
        }
    }
}

TEST_CASE("alternating 0.8/1.2 s intervals give RMSSD 0.4 s") {
    std::vector<double> iv = alternating(0.8, 1.2, 40);
    CHECK(rmssd(iv) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(pnn(iv, 0.05) == 1.0);   // every jump is 0.4 s
    CHECK(pnn(iv, 0.41) == 0.0);   // threshold is strict
    CHECK(mean(iv) == doctest::Approx(1.0));
}

TEST_CASE("constant intervals have no variability") {
    std::vector<double> iv(60, 1.0);
    CHECK(rmssd(iv) == 0.0);
    CHECK(pnn(iv, 0.05) == 0.0);
    CHECK(hti(iv) == 1.0);  // all 60 in the modal bin
}

TEST_CASE("triangular index counts modal-bin occupancy") {
    // Two adjacent 1/128 s bins, 30 intervals each: HTI = 60 / 30.
    std::vector<double> iv = alternating(1.0, 1.0 + 1.0 / 128.0, 60);
    CHECK(hti(iv) == doctest::Approx(2.0));
}

TEST_CASE("TINN recovers the base width of an exactly triangular histogram") {
    // Counts 1,2,3,2,1 across five adjacent bins: the least-squares triangle
    // touches zero one bin beyond each end, base = 6 bins.
    std::vector<double> iv;
    auto center = [](long b) { return (static_cast<double>(b) + 0.5) / 128.0; };
    long b0 = 128;  // ~1.0 s
    for (long k = 0; k < 5; ++k)
        for (long c = 0; c < (k < 3 ? k + 1 : 5 - k); ++c) iv.push_back(center(b0 + k));
    REQUIRE(iv.size() == 9);
    CHECK(tinn(iv) == doctest::Approx(6.0 / 128.0).epsilon(1e-12));
}

TEST_CASE("approximate entropy ranks regular below irregular series") {
    std::vector<double> regular = alternating(0.45, 0.55, 300);
    Rng rng(7);
    std::vector<double> irregular(300);
    for (double& v : irregular) v = rng.uniform(0.45, 0.55);

    CHECK(apen(regular) < 0.05);      // period-2 pattern is fully predictable
    CHECK(apen(irregular) > 0.5);
    CHECK(apen(std::vector<double>(50, 1.0)) == 0.0);  // constant: exact matches
}

TEST_CASE("tachogram spectrum isolates an in-band oscillation") {
    // 1.0 + 0.05 sin(2*pi*0.25 t): respiratory-band (HF) modulation.
    std::vector<double> iv, onsets;
    double t = 0.0;
    while (t < 240.0) {
        double v = 1.0 + 0.05 * std::sin(2.0 * M_PI * 0.25 * t);
        iv.push_back(v);
        onsets.push_back(t);
        t += v;
    }
    TachogramSpectrum ts = tachogram_spectrum(iv, onsets);
    CHECK(ts.hf > 10.0 * ts.lf);
    CHECK(ts.tp >= ts.hf);
}

TEST_CASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS((void)rmssd({1.0}), Error);
    CHECK_THROWS_AS((void)sdsd({1.0, 1.1}), Error);
    CHECK_THROWS_AS((void)apen({1.0, 2.0, 3.0}), Error);
    CHECK_THROWS_AS((void)tachogram_spectrum({1.0, 1.0}, {0.0}), Error);
}

TEST_CASE("percentile follows linear interpolation between order statistics") {
    std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    CHECK(percentile(x, 25.0) == doctest::Approx(1.75));
    CHECK(percentile(x, 0.0) == 1.0);
    CHECK(percentile(x, 100.0) == 4.0);
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
    CHECK(mad({1.0, 2.0, 3.0, 4.0, 5.0, 100.0}) == doctest::Approx(1.5));
}
