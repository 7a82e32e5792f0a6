#include "emosig/stats.hpp"

#include <cmath>
#include <limits>

#include "emosig/numeric.hpp"

namespace emosig {

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-14;
    constexpr double kTiny = 1e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw Error(ErrorCode::InsufficientData, "incomplete beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, double df) {
    if (!(df > 0.0)) throw Error(ErrorCode::InsufficientData, "t distribution needs df > 0");
    if (t == 0.0) return 0.5;
    double x = df / (df + t * t);
    double tail = 0.5 * reg_inc_beta(df / 2.0, 0.5, x);  // P(|T| > |t|) / 2
    return t > 0.0 ? tail : 1.0 - tail;
}

TTestResult one_sample_t_test(const std::vector<double>& scores, double mu0, Sidedness side) {
    if (scores.size() < 2)
        throw Error(ErrorCode::InsufficientData, "t-test needs >= 2 scores");

    TTestResult res;
    res.df = static_cast<double>(scores.size()) - 1.0;
    double m = mean(scores);
    double s = sd_samp(scores);
    if (s == 0.0) {
        res.t = std::numeric_limits<double>::quiet_NaN();
        res.p = 0.5;
        res.zero_variance = true;
        return res;
    }
    res.t = (m - mu0) / (s / std::sqrt(static_cast<double>(scores.size())));
    if (side == Sidedness::Greater)
        res.p = student_t_sf(res.t, res.df);
    else
        res.p = 2.0 * student_t_sf(std::fabs(res.t), res.df);
    return res;
}

std::string stars_for(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

}  // namespace emosig
