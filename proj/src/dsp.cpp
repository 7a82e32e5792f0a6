#include "emosig/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

namespace emosig {

namespace {

using cplx = std::complex<double>;

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex g_fftw_mutex;

// In-place complex DFT of arbitrary length. sign = FFTW_FORWARD/BACKWARD.
void fft_inplace(std::vector<cplx>& buf, int sign) {
    auto n = static_cast<int>(buf.size());
    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        plan = fftw_plan_dft_1d(n, data, data, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        fftw_destroy_plan(plan);
    }
}

// Butterworth analog prototype poles, unit cutoff, left half-plane.
std::vector<cplx> butter_prototype(int order) {
    std::vector<cplx> poles;
    poles.reserve(order);
    for (int k = 0; k < order; ++k) {
        double theta = M_PI * (2.0 * k + order + 1.0) / (2.0 * order);
        poles.emplace_back(std::cos(theta), std::sin(theta));
    }
    return poles;
}

double prewarp(double f_hz, double fs) { return 2.0 * fs * std::tan(M_PI * f_hz / fs); }

cplx bilinear_pole(cplx s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

// Group a conjugate-closed pole set into biquad denominators.
std::vector<std::pair<double, double>> pole_pairs(const std::vector<cplx>& zpoles) {
    constexpr double kImagTol = 1e-10;
    std::vector<std::pair<double, double>> pairs;  // (a1, a2)
    std::vector<double> reals;
    for (const cplx& p : zpoles) {
        if (std::fabs(p.imag()) > kImagTol) {
            if (p.imag() > 0)  // conjugate partner contributes implicitly
                pairs.emplace_back(-2.0 * p.real(), std::norm(p));
        } else {
            reals.push_back(p.real());
        }
    }
    std::sort(reals.begin(), reals.end());
    for (std::size_t i = 0; i + 1 < reals.size(); i += 2)
        pairs.emplace_back(-(reals[i] + reals[i + 1]), reals[i] * reals[i + 1]);
    if (reals.size() % 2 != 0)
        throw Error(ErrorCode::DegenerateFit, "unpaired real pole in filter design");
    return pairs;
}

}  // namespace

Sos butter_bandpass(int order, double lo_hz, double hi_hz, double fs) {
    if (order < 1) throw Error(ErrorCode::InvalidBand, "filter order must be >= 1");
    if (!(lo_hz > 0.0) || !(lo_hz < hi_hz) || !(hi_hz < fs / 2.0))
        throw Error(ErrorCode::InvalidBand, "band edges must satisfy 0 < lo < hi < fs/2");

    double w1 = prewarp(lo_hz, fs);
    double w2 = prewarp(hi_hz, fs);
    double bw = w2 - w1;
    double w0 = std::sqrt(w1 * w2);

    // Low-pass prototype -> band-pass: each pole splits in two; the n
    // prototype zeros at infinity become n at s=0 plus n at infinity, which
    // the bilinear transform maps to n zeros at z=+1 and n at z=-1.
    std::vector<cplx> zpoles;
    zpoles.reserve(2 * static_cast<std::size_t>(order));
    for (const cplx& p : butter_prototype(order)) {
        cplx q = p * (bw / 2.0);
        cplx d = std::sqrt(q * q - w0 * w0);
        zpoles.push_back(bilinear_pole(q + d, fs));
        zpoles.push_back(bilinear_pole(q - d, fs));
    }

    Sos sos;
    for (auto [a1, a2] : pole_pairs(zpoles)) {
        Biquad s;
        s.b0 = 1.0;
        s.b1 = 0.0;
        s.b2 = -1.0;  // one zero at z=+1, one at z=-1
        s.a1 = a1;
        s.a2 = a2;
        sos.push_back(s);
    }

    // Normalize numerically to unit gain at the warped center frequency.
    double f_center = fs / M_PI * std::atan(w0 / (2.0 * fs));
    double g = sos_response(sos, f_center, fs);
    if (!(g > 0.0)) throw Error(ErrorCode::DegenerateFit, "degenerate band-pass gain");
    sos[0].b0 /= g;
    sos[0].b1 /= g;
    sos[0].b2 /= g;
    return sos;
}

Sos butter_lowpass(int order, double cut_hz, double fs) {
    if (order < 1) throw Error(ErrorCode::InvalidBand, "filter order must be >= 1");
    if (!(cut_hz > 0.0) || !(cut_hz < fs / 2.0))
        throw Error(ErrorCode::InvalidBand, "cutoff must satisfy 0 < fc < fs/2");

    double wc = prewarp(cut_hz, fs);
    std::vector<cplx> zpoles;
    for (const cplx& p : butter_prototype(order)) zpoles.push_back(bilinear_pole(p * wc, fs));

    constexpr double kImagTol = 1e-10;
    Sos sos;
    double real_pole = 0.0;
    bool have_real = false;
    for (const cplx& p : zpoles) {
        if (std::fabs(p.imag()) > kImagTol) {
            if (p.imag() > 0) {
                Biquad s;
                s.b0 = 1.0;
                s.b1 = 2.0;
                s.b2 = 1.0;  // two zeros at z=-1
                s.a1 = -2.0 * p.real();
                s.a2 = std::norm(p);
                sos.push_back(s);
            }
        } else {
            real_pole = p.real();
            have_real = true;
        }
    }
    if (have_real) {
        Biquad s;
        s.b0 = 1.0;
        s.b1 = 1.0;
        s.b2 = 0.0;  // single zero at z=-1
        s.a1 = -real_pole;
        s.a2 = 0.0;
        sos.push_back(s);
    }

    double g = sos_response(sos, 0.0, fs);
    if (!(g > 0.0)) throw Error(ErrorCode::DegenerateFit, "degenerate low-pass gain");
    sos[0].b0 /= g;
    sos[0].b1 /= g;
    sos[0].b2 /= g;
    return sos;
}

double sos_response(const Sos& sos, double f, double fs) {
    cplx z_inv = std::exp(cplx(0.0, -2.0 * M_PI * f / fs));
    cplx h(1.0, 0.0);
    for (const Biquad& s : sos) {
        cplx num = s.b0 + s.b1 * z_inv + s.b2 * z_inv * z_inv;
        cplx den = 1.0 + s.a1 * z_inv + s.a2 * z_inv * z_inv;
        h *= num / den;
    }
    return std::abs(h);
}

namespace {

// Direct form II transposed, one section, explicit state.
void sosfilt_section(const Biquad& s, std::vector<double>& x, double& z1, double& z2) {
    for (double& v : x) {
        double y = s.b0 * v + z1;
        z1 = s.b1 * v - s.a1 * y + z2;
        z2 = s.b2 * v - s.a2 * y;
        v = y;
    }
}

// Steady-state section states for a unit-amplitude constant input to the
// cascade. Each section sees the previous sections' DC gain.
std::vector<std::pair<double, double>> sos_steady_state(const Sos& sos) {
    std::vector<std::pair<double, double>> zi;
    double scale = 1.0;  // cumulative DC gain of preceding sections
    for (const Biquad& s : sos) {
        double den = 1.0 + s.a1 + s.a2;
        double h1 = (s.b0 + s.b1 + s.b2) / den;
        double x = scale;
        double y = h1 * x;
        double z2 = s.b2 * x - s.a2 * y;
        double z1 = s.b1 * x - s.a1 * y + z2;
        zi.emplace_back(z1, z2);
        scale *= h1;
    }
    return zi;
}

std::vector<double> sosfilt_zi(const Sos& sos, std::vector<double> x,
                               std::vector<std::pair<double, double>> zi) {
    for (std::size_t k = 0; k < sos.size(); ++k)
        sosfilt_section(sos[k], x, zi[k].first, zi[k].second);
    return x;
}

}  // namespace

std::vector<double> sosfilt(const Sos& sos, const std::vector<double>& x) {
    std::vector<double> y = x;
    for (const Biquad& s : sos) {
        double z1 = 0.0, z2 = 0.0;
        sosfilt_section(s, y, z1, z2);
    }
    return y;
}

std::vector<double> sosfiltfilt(const Sos& sos, const std::vector<double>& x) {
    if (sos.empty()) throw Error(ErrorCode::InvalidBand, "empty filter cascade");
    // Effective tap count of the cascade, discounting trailing zero
    // coefficients (first-order sections).
    std::size_t nb0 = 0, na0 = 0;
    for (const Biquad& s : sos) {
        if (s.b2 == 0.0) ++nb0;
        if (s.a2 == 0.0) ++na0;
    }
    std::size_t ntaps = 2 * sos.size() + 1 - std::min(nb0, na0);
    std::size_t padlen = 3 * ntaps;
    if (x.size() <= padlen)
        throw Error(ErrorCode::InsufficientData,
                    "signal too short for zero-phase filtering (need > " +
                        std::to_string(padlen) + " samples, got " + std::to_string(x.size()) + ")");

    // Odd reflection about the end samples suppresses edge transients.
    std::size_t n = x.size();
    std::vector<double> ext;
    ext.reserve(n + 2 * padlen);
    for (std::size_t i = padlen; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= padlen; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

    auto zi_unit = sos_steady_state(sos);

    auto zi = zi_unit;
    for (auto& z : zi) {
        z.first *= ext.front();
        z.second *= ext.front();
    }
    std::vector<double> fwd = sosfilt_zi(sos, std::move(ext), std::move(zi));

    std::reverse(fwd.begin(), fwd.end());
    zi = zi_unit;
    for (auto& z : zi) {
        z.first *= fwd.front();
        z.second *= fwd.front();
    }
    std::vector<double> bwd = sosfilt_zi(sos, std::move(fwd), std::move(zi));
    std::reverse(bwd.begin(), bwd.end());

    return std::vector<double>(bwd.begin() + static_cast<std::ptrdiff_t>(padlen),
                               bwd.begin() + static_cast<std::ptrdiff_t>(padlen + n));
}

UniformSignal bandpass(const UniformSignal& sig, const BandSpec& band, int order) {
    Sos sos = butter_bandpass(order, band.lo, band.hi, sig.rate);
    UniformSignal out = sig;
    out.samples = sosfiltfilt(sos, sig.samples);
    return out;
}

std::vector<double> hilbert_envelope(const std::vector<double>& x) {
    if (x.size() < 8) throw Error(ErrorCode::InsufficientData, "envelope needs >= 8 samples");
    std::size_t n = x.size();
    std::vector<cplx> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = cplx(x[i], 0.0);
    fft_inplace(buf, FFTW_FORWARD);

    // Analytic-signal weights: keep DC (and Nyquist when n is even), double
    // positive frequencies, zero negative ones.
    std::size_t half = n / 2;
    if (n % 2 == 0) {
        for (std::size_t k = 1; k < half; ++k) buf[k] *= 2.0;
        for (std::size_t k = half + 1; k < n; ++k) buf[k] = 0.0;
    } else {
        for (std::size_t k = 1; k <= half; ++k) buf[k] *= 2.0;
        for (std::size_t k = half + 1; k < n; ++k) buf[k] = 0.0;
    }

    fft_inplace(buf, FFTW_BACKWARD);
    std::vector<double> env(n);
    for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(buf[i]) / static_cast<double>(n);
    return env;
}

UniformSignal hilbert_envelope(const UniformSignal& sig) {
    UniformSignal out = sig;
    out.samples = hilbert_envelope(sig.samples);
    return out;
}

PowerSpectrum welch_psd(const std::vector<double>& x, double fs, std::size_t nperseg,
                        double overlap_fraction) {
    if (x.size() < 2) throw Error(ErrorCode::InsufficientData, "PSD needs >= 2 samples");
    if (nperseg < 2) throw Error(ErrorCode::InvalidBand, "nperseg must be >= 2");
    if (!(overlap_fraction >= 0.0) || !(overlap_fraction < 1.0))
        throw Error(ErrorCode::InvalidBand, "overlap fraction must be in [0, 1)");
    if (nperseg > x.size()) nperseg = x.size();  // single full-length segment

    std::vector<double> window(nperseg);
    double wsq = 0.0;
    for (std::size_t i = 0; i < nperseg; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                                         static_cast<double>(nperseg));
        wsq += window[i] * window[i];
    }

    auto step = static_cast<std::size_t>(
        std::llround(static_cast<double>(nperseg) * (1.0 - overlap_fraction)));
    step = std::max<std::size_t>(1, step);
    std::size_t nfreq = nperseg / 2 + 1;
    std::vector<double> acc(nfreq, 0.0);
    std::size_t nseg = 0;

    std::vector<cplx> buf(nperseg);
    for (std::size_t start = 0; start + nperseg <= x.size(); start += step) {
        double m = 0.0;
        for (std::size_t i = 0; i < nperseg; ++i) m += x[start + i];
        m /= static_cast<double>(nperseg);
        for (std::size_t i = 0; i < nperseg; ++i) buf[i] = cplx((x[start + i] - m) * window[i], 0.0);
        fft_inplace(buf, FFTW_FORWARD);
        for (std::size_t k = 0; k < nfreq; ++k) acc[k] += std::norm(buf[k]);
        ++nseg;
    }

    PowerSpectrum ps;
    ps.freqs.resize(nfreq);
    ps.psd.resize(nfreq);
    double scale = 1.0 / (fs * wsq * static_cast<double>(nseg));
    for (std::size_t k = 0; k < nfreq; ++k) {
        ps.freqs[k] = static_cast<double>(k) * fs / static_cast<double>(nperseg);
        double v = acc[k] * scale;
        bool is_dc = (k == 0);
        bool is_nyquist = (nperseg % 2 == 0 && k == nfreq - 1);
        if (!is_dc && !is_nyquist) v *= 2.0;  // fold negative frequencies
        ps.psd[k] = v;
    }
    return ps;
}

PowerSpectrum welch_psd(const UniformSignal& sig, std::size_t nperseg, double overlap_fraction) {
    return welch_psd(sig.samples, sig.rate, nperseg, overlap_fraction);
}

double band_power(const PowerSpectrum& ps, const BandSpec& band) {
    if (!(band.lo >= 0.0) || !(band.lo < band.hi))
        throw Error(ErrorCode::InvalidBand, "band must satisfy 0 <= lo < hi");
    if (ps.freqs.size() < 2) throw Error(ErrorCode::InsufficientData, "PSD too short");

    double a = std::max(band.lo, ps.freqs.front());
    double b = std::min(band.hi, ps.freqs.back());
    if (!(a < b)) return 0.0;

    auto value_at = [&](double f) {
        auto it = std::lower_bound(ps.freqs.begin(), ps.freqs.end(), f);
        if (it == ps.freqs.begin()) return ps.psd.front();
        if (it == ps.freqs.end()) return ps.psd.back();
        std::size_t hi = static_cast<std::size_t>(it - ps.freqs.begin());
        std::size_t lo = hi - 1;
        double t = (f - ps.freqs[lo]) / (ps.freqs[hi] - ps.freqs[lo]);
        return ps.psd[lo] * (1.0 - t) + ps.psd[hi] * t;
    };

    // Trapezoid over the grid points strictly inside (a, b), plus
    // interpolated endpoints, so adjacent bands sum exactly.
    std::vector<double> fk{a};
    std::vector<double> vk{value_at(a)};
    for (std::size_t i = 0; i < ps.freqs.size(); ++i) {
        if (ps.freqs[i] > a && ps.freqs[i] < b) {
            fk.push_back(ps.freqs[i]);
            vk.push_back(ps.psd[i]);
        }
    }
    fk.push_back(b);
    vk.push_back(value_at(b));

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < fk.size(); ++i)
        total += 0.5 * (vk[i] + vk[i + 1]) * (fk[i + 1] - fk[i]);
    return total;
}

std::vector<double> interp_linear(const std::vector<double>& ts, const std::vector<double>& vs,
                                  const std::vector<double>& query) {
    if (ts.size() != vs.size() || ts.empty())
        throw Error(ErrorCode::ShapeMismatch, "interpolation support mismatch");
    std::vector<double> out;
    out.reserve(query.size());
    for (double q : query) {
        if (q <= ts.front()) {
            out.push_back(vs.front());
        } else if (q >= ts.back()) {
            out.push_back(vs.back());
        } else {
            auto it = std::upper_bound(ts.begin(), ts.end(), q);
            std::size_t hi = static_cast<std::size_t>(it - ts.begin());
            std::size_t lo = hi - 1;
            double t = (q - ts[lo]) / (ts[hi] - ts[lo]);
            out.push_back(vs[lo] * (1.0 - t) + vs[hi] * t);
        }
    }
    return out;
}

UniformSignal resample_uniform(const IrregularSignal& sig, double rate) {
    if (!(rate > 0.0)) throw Error(ErrorCode::InvalidBand, "resample rate must be positive");
    if (sig.timestamps.size() != sig.values.size() || sig.timestamps.size() < 2)
        throw Error(ErrorCode::InsufficientData, "resampling needs >= 2 points");
    for (std::size_t i = 1; i < sig.timestamps.size(); ++i)
        if (!(sig.timestamps[i] > sig.timestamps[i - 1]))
            throw Error(ErrorCode::ParseError, "timestamps must be strictly increasing");

    double t0 = sig.timestamps.front();
    double span = sig.timestamps.back() - t0;
    auto count = static_cast<std::size_t>(std::floor(span * rate)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = t0 + static_cast<double>(i) / rate;

    UniformSignal out;
    out.samples = interp_linear(sig.timestamps, sig.values, grid);
    out.rate = rate;
    out.start_time = t0;
    return out;
}

std::vector<double> moving_average(const std::vector<double>& x, std::size_t window) {
    if (x.empty()) return {};
    if (window == 0) throw Error(ErrorCode::InvalidBand, "window must be positive");
    std::size_t n = x.size();
    std::vector<double> csum(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) csum[i + 1] = csum[i] + x[i];

    std::size_t r = window / 2;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rad = std::min({r, i, n - 1 - i});
        double s = csum[i + rad + 1] - csum[i - rad];
        out[i] = s / static_cast<double>(2 * rad + 1);
    }
    return out;
}

std::vector<double> moving_average_detrend(const std::vector<double>& x, std::size_t window) {
    std::vector<double> ma = moving_average(x, window);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - ma[i];
    return out;
}

UniformSignal moving_average_detrend(const UniformSignal& sig, std::size_t window) {
    UniformSignal out = sig;
    out.samples = moving_average_detrend(sig.samples, window);
    return out;
}

}  // namespace emosig
