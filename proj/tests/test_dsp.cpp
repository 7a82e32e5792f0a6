// DSP layer: Butterworth band-pass design, zero-phase filtering, Hilbert
// envelopes, Welch spectra with edge-interpolated band powers, resampling,
// and moving-average detrending.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "emosig/dsp.hpp"
#include "emosig/numeric.hpp"
#include "emosig/rng.hpp"

using namespace emosig;

namespace {

std::vector<double> sine(double f, double fs, double seconds, double amp = 1.0,
                         double phase = 0.0) {
    auto n = static_cast<std::size_t>(seconds * fs);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = amp * std::sin(2.0 * M_PI * f * static_cast<double>(i) / fs + phase);
    return x;
}

}  // namespace

TEST_CASE("band-pass response: unity at center, strong stop-band rejection") {
    Sos sos = butter_bandpass(4, 10.0, 20.0, 256.0);
    double fc = std::sqrt(10.0 * 20.0);
    CHECK(sos_response(sos, fc, 256.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sos_response(sos, 10.0, 256.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.01));
    CHECK(sos_response(sos, 20.0, 256.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.01));
    CHECK(sos_response(sos, 1.0, 256.0) < 1e-4);
    CHECK(sos_response(sos, 80.0, 256.0) < 1e-4);
}

TEST_CASE("narrow respiratory band stays numerically healthy") {
    // 0.15-0.35 Hz at 200 Hz: the normalized band where direct transfer-
    // function realizations lose the filter entirely.
    Sos sos = butter_bandpass(2, 0.15, 0.35, 200.0);
    double fc = std::sqrt(0.15 * 0.35);
    CHECK(sos_response(sos, fc, 200.0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(sos_response(sos, 0.01, 200.0) < 0.01);
    CHECK(sos_response(sos, 5.0, 200.0) < 0.01);

    // Impulse response must decay (stability).
    std::vector<double> impulse(4000, 0.0);
    impulse[0] = 1.0;
    std::vector<double> h = sosfilt(sos, impulse);
    double tail = 0.0;
    for (std::size_t i = 3500; i < h.size(); ++i) tail = std::max(tail, std::fabs(h[i]));
    CHECK(tail < 0.05);
}

TEST_CASE("low-pass has unity DC gain and attenuates above the cut") {
    Sos sos = butter_lowpass(4, 0.2, 32.0);
    CHECK(sos_response(sos, 0.0, 32.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sos_response(sos, 0.2, 32.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.01));
    CHECK(sos_response(sos, 2.0, 32.0) < 1e-3);
}

TEST_CASE("sosfiltfilt is zero-phase and amplitude-faithful in the pass band") {
    double fs = 256.0, f = 14.0;
    std::vector<double> x = sine(f, fs, 8.0);
    Sos sos = butter_bandpass(4, 10.0, 20.0, fs);
    std::vector<double> y = sosfiltfilt(sos, x);
    REQUIRE(y.size() == x.size());
    // Compare away from the edges: same phase (zero lag), unit gain squared.
    double err = 0.0;
    for (std::size_t i = 512; i + 512 < x.size(); ++i)
        err = std::max(err, std::fabs(y[i] - x[i]));
    CHECK(err < 0.02);
}

TEST_CASE("sosfiltfilt suppresses out-of-band components symmetrically") {
    double fs = 256.0;
    std::vector<double> in_band = sine(14.0, fs, 6.0);
    std::vector<double> drift = sine(0.3, fs, 6.0, 3.0);
    std::vector<double> x(in_band.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = in_band[i] + drift[i];

    std::vector<double> y = sosfiltfilt(butter_bandpass(4, 10.0, 20.0, fs), x);
    double err = 0.0;
    for (std::size_t i = 512; i + 512 < x.size(); ++i)
        err = std::max(err, std::fabs(y[i] - in_band[i]));
    CHECK(err < 0.03);
}

TEST_CASE("hilbert envelope recovers the modulation of an AM tone") {
    double fs = 200.0;
    auto n = static_cast<std::size_t>(20.0 * fs);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / fs;
        double am = 1.0 + 0.5 * std::sin(2.0 * M_PI * 0.25 * t);
        x[i] = am * std::sin(2.0 * M_PI * 15.0 * t);
    }
    std::vector<double> env = hilbert_envelope(x);
    REQUIRE(env.size() == n);
    double err = 0.0;
    for (std::size_t i = n / 10; i + n / 10 < n; ++i) {
        double t = static_cast<double>(i) / fs;
        double am = 1.0 + 0.5 * std::sin(2.0 * M_PI * 0.25 * t);
        err = std::max(err, std::fabs(env[i] - am));
    }
    CHECK(err < 0.02);
}

TEST_CASE("hilbert envelope needs at least 8 samples") {
    std::vector<double> x(7, 1.0);
    CHECK_THROWS_AS((void)hilbert_envelope(x), Error);
}

TEST_CASE("welch psd puts a sinusoid's power in the right bin") {
    double fs = 64.0, f = 4.0, amp = 2.0;
    std::vector<double> x = sine(f, fs, 30.0, amp);
    PowerSpectrum ps = welch_psd(x, fs, 256);

    std::size_t peak = 0;
    for (std::size_t i = 1; i < ps.psd.size(); ++i)
        if (ps.psd[i] > ps.psd[peak]) peak = i;
    CHECK(ps.freqs[peak] == doctest::Approx(f).epsilon(0.01));

    // One-sided density: total band power equals the tone power amp^2/2.
    double total = band_power(ps, {0.0, fs / 2.0});
    CHECK(total == doctest::Approx(amp * amp / 2.0).epsilon(0.03));
}

TEST_CASE("welch psd falls back to one segment for short inputs") {
    std::vector<double> x = sine(2.0, 32.0, 3.0);
    PowerSpectrum ps = welch_psd(x, 32.0, 4096);
    CHECK(ps.freqs.size() == x.size() / 2 + 1);
}

TEST_CASE("welch overlap fraction changes segmentation, not total power") {
    Rng rng(11);
    std::vector<double> x(4096);
    for (double& v : x) v = rng.normal();
    PowerSpectrum a = welch_psd(x, 128.0, 512, 0.5);
    PowerSpectrum b = welch_psd(x, 128.0, 512, 0.0);
    double pa = band_power(a, {0.0, 64.0});
    double pb = band_power(b, {0.0, 64.0});
    CHECK(pa == doctest::Approx(pb).epsilon(0.1));
    CHECK(pa == doctest::Approx(1.0).epsilon(0.1));  // unit-variance noise
}

TEST_CASE("band powers tile: adjacent bands sum to the enclosing band") {
    Rng rng(3);
    std::vector<double> x(2048);
    for (double& v : x) v = rng.normal();
    PowerSpectrum ps = welch_psd(x, 4.0, 256);
    double lf = band_power(ps, {0.04, 0.15});
    double hf = band_power(ps, {0.15, 0.5});
    double lo = band_power(ps, {0.0, 0.04});
    double tp = band_power(ps, {0.0, 0.5});
    CHECK(lo + lf + hf == doctest::Approx(tp).epsilon(1e-9));
}

TEST_CASE("band_power rejects inverted bands") {
    PowerSpectrum ps;
    ps.freqs = {0.0, 1.0, 2.0};
    ps.psd = {1.0, 1.0, 1.0};
    CHECK_THROWS_AS((void)band_power(ps, {2.0, 1.0}), Error);
}

TEST_CASE("interp_linear interpolates inside and clamps outside") {
    std::vector<double> ts{0.0, 1.0, 3.0};
    std::vector<double> vs{0.0, 2.0, 6.0};
    std::vector<double> q{-1.0, 0.5, 2.0, 3.0, 9.0};
    std::vector<double> out = interp_linear(ts, vs, q);
    CHECK(out[0] == doctest::Approx(0.0));
    CHECK(out[1] == doctest::Approx(1.0));
    CHECK(out[2] == doctest::Approx(4.0));
    CHECK(out[3] == doctest::Approx(6.0));
    CHECK(out[4] == doctest::Approx(6.0));
}

TEST_CASE("resample_uniform reconstructs a slow wave from jittered samples") {
    Rng rng(17);
    IrregularSignal sig;
    double t = 0.0;
    while (t < 30.0) {
        sig.timestamps.push_back(t);
        sig.values.push_back(std::sin(2.0 * M_PI * 0.25 * t));
        t += 0.005 * (1.0 + 0.2 * (rng.uniform() - 0.5));
    }
    UniformSignal u = resample_uniform(sig, 200.0);
    CHECK(u.rate == doctest::Approx(200.0));
    CHECK(u.start_time == doctest::Approx(sig.timestamps.front()));
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        err = std::max(err, std::fabs(u.samples[i] - std::sin(2.0 * M_PI * 0.25 * u.time_at(i))));
    CHECK(err < 1e-3);
}

TEST_CASE("moving average: constants pass through, edges stay unbiased") {
    std::vector<double> x(100, 3.5);
    std::vector<double> y = moving_average(x, 21);
    for (double v : y) CHECK(v == doctest::Approx(3.5));

    // A linear ramp is reproduced exactly by a symmetric window.
    std::vector<double> ramp(50);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
    std::vector<double> r = moving_average(ramp, 9);
    for (std::size_t i = 0; i < ramp.size(); ++i) CHECK(r[i] == doctest::Approx(ramp[i]));
}

TEST_CASE("moving-average detrend removes drift, keeps fast oscillation") {
    double fs = 32.0;
    std::vector<double> fast = sine(1.0, fs, 20.0);
    std::vector<double> x(fast.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = fast[i] + 5.0 + 0.05 * static_cast<double>(i) / fs;
    auto window = static_cast<std::size_t>(10.0 * fs);
    std::vector<double> y = moving_average_detrend(x, window);
    double err = 0.0;
    for (std::size_t i = x.size() / 4; i + x.size() / 4 < x.size(); ++i)
        err = std::max(err, std::fabs(y[i] - fast[i]));
    CHECK(err < 0.05);
}
