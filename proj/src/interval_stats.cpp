#include "emosig/interval_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emosig/dsp.hpp"
#include "emosig/numeric.hpp"

namespace emosig {

namespace {

std::vector<double> successive_diffs(const std::vector<double>& iv) {
    if (iv.size() < 2)
        throw Error(ErrorCode::InsufficientData, "successive differences need >= 2 intervals");
    std::vector<double> d(iv.size() - 1);
    for (std::size_t i = 1; i < iv.size(); ++i) d[i - 1] = iv[i] - iv[i - 1];
    return d;
}

constexpr double kBinWidth = 1.0 / 128.0;

// Histogram on a fixed 1/128 s lattice spanning the data.
struct Histogram {
    long first_bin = 0;
    std::vector<double> counts;

    double center(std::size_t i) const {
        return (static_cast<double>(first_bin) + static_cast<double>(i) + 0.5) * kBinWidth;
    }
};

Histogram histogram_128(const std::vector<double>& iv) {
    if (iv.empty()) throw Error(ErrorCode::InsufficientData, "histogram of empty series");
    long lo = std::numeric_limits<long>::max();
    long hi = std::numeric_limits<long>::min();
    for (double v : iv) {
        long b = static_cast<long>(std::floor(v / kBinWidth));
        lo = std::min(lo, b);
        hi = std::max(hi, b);
    }
    Histogram h;
    h.first_bin = lo;
    h.counts.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (double v : iv) {
        long b = static_cast<long>(std::floor(v / kBinWidth));
        h.counts[static_cast<std::size_t>(b - lo)] += 1.0;
    }
    return h;
}

}  // namespace

double rmssd(const std::vector<double>& iv) {
    std::vector<double> d = successive_diffs(iv);
    double s = 0.0;
    for (double v : d) s += v * v;
    return std::sqrt(s / static_cast<double>(d.size()));
}

double sdsd(const std::vector<double>& iv) {
    std::vector<double> d = successive_diffs(iv);
    if (d.size() < 2) throw Error(ErrorCode::InsufficientData, "SDSD needs >= 3 intervals");
    return sd_samp(d);
}

double pnn(const std::vector<double>& iv, double threshold_s) {
    std::vector<double> d = successive_diffs(iv);
    std::size_t count = 0;
    for (double v : d)
        if (std::fabs(v) > threshold_s) ++count;
    return static_cast<double>(count) / static_cast<double>(d.size());
}

double hti(const std::vector<double>& iv) {
    Histogram h = histogram_128(iv);
    double modal = *std::max_element(h.counts.begin(), h.counts.end());
    return static_cast<double>(iv.size()) / modal;
}

double tinn(const std::vector<double>& iv) {
    Histogram h = histogram_128(iv);
    std::size_t nbins = h.counts.size();
    std::size_t m = static_cast<std::size_t>(
        std::max_element(h.counts.begin(), h.counts.end()) - h.counts.begin());
    double peak = h.counts[m];

    // Best triangle rising from zero at bin n to the modal height at m and
    // back to zero at bin p, least squares over the whole histogram. The
    // search includes one empty bin beyond each end so a strictly triangular
    // histogram is fit exactly.
    double best_err = std::numeric_limits<double>::infinity();
    double best_width = 0.0;
    for (long n = static_cast<long>(m); n >= -1; --n) {
        for (long p = static_cast<long>(m); p <= static_cast<long>(nbins); ++p) {
            if (n == static_cast<long>(m) && p == static_cast<long>(m)) continue;
            double err = 0.0;
            for (long b = -1; b <= static_cast<long>(nbins); ++b) {
                double target = 0.0;
                if (b >= n && b <= static_cast<long>(m) && n != static_cast<long>(m))
                    target = peak * static_cast<double>(b - n) / static_cast<double>(m - n);
                else if (b == static_cast<long>(m))
                    target = peak;
                else if (b > static_cast<long>(m) && b <= p && p != static_cast<long>(m))
                    target = peak * static_cast<double>(p - b) / static_cast<double>(p - m);
                double actual =
                    (b >= 0 && b < static_cast<long>(nbins)) ? h.counts[static_cast<std::size_t>(b)] : 0.0;
                err += (actual - target) * (actual - target);
            }
            if (err < best_err) {
                best_err = err;
                best_width = static_cast<double>(p - n) * kBinWidth;
            }
        }
    }
    return best_width;
}

double apen(const std::vector<double>& x, int m, double r_frac) {
    auto n = static_cast<long>(x.size());
    if (n < m + 2) throw Error(ErrorCode::InsufficientData, "ApEn needs more samples than m+1");
    double r = r_frac * sd_pop(x);

    auto phi = [&](int mm) {
        long count_vecs = n - mm + 1;
        double total = 0.0;
        for (long i = 0; i < count_vecs; ++i) {
            long matches = 0;
            for (long j = 0; j < count_vecs; ++j) {
                double dist = 0.0;
                for (int k = 0; k < mm; ++k)
                    dist = std::max(dist, std::fabs(x[static_cast<std::size_t>(i + k)] -
                                                    x[static_cast<std::size_t>(j + k)]));
                if (dist <= r) ++matches;
            }
            total += std::log(static_cast<double>(matches) / static_cast<double>(count_vecs));
        }
        return total / static_cast<double>(count_vecs);
    };

    return phi(m) - phi(m + 1);
}

TachogramSpectrum tachogram_spectrum(const std::vector<double>& intervals,
                                     const std::vector<double>& onset_times,
                                     double resample_hz) {
    if (intervals.size() != onset_times.size() || intervals.size() < 2)
        throw Error(ErrorCode::InsufficientData, "tachogram needs >= 2 intervals");

    IrregularSignal tach;
    tach.timestamps = onset_times;
    tach.values = intervals;
    UniformSignal uni = resample_uniform(tach, resample_hz);
    if (uni.size() < 2) throw Error(ErrorCode::InsufficientData, "tachogram span too short");

    PowerSpectrum ps = welch_psd(uni, 256);
    TachogramSpectrum out;
    out.lf = band_power(ps, {0.04, 0.15});
    out.hf = band_power(ps, {0.15, 0.5});
    out.tp = band_power(ps, {0.0, 0.5});
    return out;
}

}  // namespace emosig
