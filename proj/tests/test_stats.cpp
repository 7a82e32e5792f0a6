// One-sample t-test, incomplete beta, Student-t tails, and significance
// stars against closed forms and reference values.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "emosig/rng.hpp"
#include "emosig/stats.hpp"

using namespace emosig;

TEST_CASE("incomplete beta matches reference values") {
    // betainc(a, b, x) references computed independently.
    CHECK(reg_inc_beta(2.0, 3.0, 0.5) == doctest::Approx(0.6875).epsilon(1e-10));
    CHECK(reg_inc_beta(0.5, 0.5, 0.3) == doctest::Approx(0.36901011956554536).epsilon(1e-10));
    CHECK(reg_inc_beta(5.0, 2.0, 0.7) == doctest::Approx(0.4201749999999999).epsilon(1e-10));
    CHECK(reg_inc_beta(1.5, 4.5, 0.2) == doctest::Approx(0.45069550712572004).epsilon(1e-10));
    CHECK(reg_inc_beta(10.0, 10.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(reg_inc_beta(0.5, 8.0, 0.01) == doctest::Approx(0.30700785029418753).epsilon(1e-10));
}

TEST_CASE("incomplete beta edge behaviour and symmetry") {
    CHECK(reg_inc_beta(3.0, 4.0, 0.0) == 0.0);
    CHECK(reg_inc_beta(3.0, 4.0, 1.0) == 1.0);
    CHECK(reg_inc_beta(3.0, 4.0, -0.2) == 0.0);
    CHECK(reg_inc_beta(3.0, 4.0, 1.2) == 1.0);

    // I_x(a, b) = 1 - I_{1-x}(b, a) across a parameter sweep.
    Rng rng(77);
    for (int i = 0; i < 50; ++i) {
        double a = 0.2 + 5.0 * rng.uniform();
        double b = 0.2 + 5.0 * rng.uniform();
        double x = rng.uniform();
        CHECK(reg_inc_beta(a, b, x) ==
              doctest::Approx(1.0 - reg_inc_beta(b, a, 1.0 - x)).epsilon(1e-9));
    }

    CHECK_THROWS_AS((void)reg_inc_beta(0.0, 1.0, 0.5), Error);
    CHECK_THROWS_AS((void)reg_inc_beta(1.0, -2.0, 0.5), Error);
}

TEST_CASE("Student-t tail matches closed forms") {
    // df = 1 is Cauchy: P(T > t) = 1/2 - atan(t)/pi.
    CHECK(student_t_sf(1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(student_t_sf(0.0, 5.0) == doctest::Approx(0.5).epsilon(1e-12));
    // df = 2 closed form: P(T > t) = (1 - t / sqrt(2 + t^2)) / 2.
    CHECK(student_t_sf(1.0, 2.0) == doctest::Approx(0.21132486540518713).epsilon(1e-10));
    CHECK(student_t_sf(2.5, 7.0) == doctest::Approx(0.020496109292876437).epsilon(1e-10));
    CHECK(student_t_sf(-1.3, 9.0) == doctest::Approx(0.8870468136634754).epsilon(1e-10));
}

TEST_CASE("Student-t tail symmetry and monotonicity") {
    for (double df : {1.0, 3.0, 9.0, 30.0}) {
        double prev = 1.0;
        for (double t = -4.0; t <= 4.0; t += 0.5) {
            double sf = student_t_sf(t, df);
            CHECK(sf < prev);
            CHECK(sf == doctest::Approx(1.0 - student_t_sf(-t, df)).epsilon(1e-10));
            prev = sf;
        }
    }
    CHECK_THROWS_AS((void)student_t_sf(1.0, 0.0), Error);
}

TEST_CASE("t-test on the exact constructed sample") {
    // mean 0.10, sample sd 0.05, n = 5: t = 0.10 / (0.05 / sqrt(5)) = 2 sqrt(5).
    double r2 = 0.05 * std::sqrt(2.0);
    std::vector<double> scores{0.1 - r2, 0.1, 0.1, 0.1, 0.1 + r2};
    TTestResult res = one_sample_t_test(scores, 0.0, Sidedness::Greater);
    CHECK(res.t == doctest::Approx(2.0 * std::sqrt(5.0)).epsilon(1e-12));
    CHECK(res.df == 4.0);
    CHECK(res.p == doctest::Approx(0.0055282466967250385).epsilon(1e-8));
    CHECK_FALSE(res.zero_variance);

    TTestResult two = one_sample_t_test(scores, 0.0, Sidedness::TwoSided);
    CHECK(two.p == doctest::Approx(2.0 * res.p).epsilon(1e-12));
}

TEST_CASE("t-test centering and degenerate samples") {
    // Testing against the sample's own mean gives t = 0, p = 0.5 one-sided.
    std::vector<double> sym{1.0, 2.0, 3.0, 4.0, 5.0};
    TTestResult centered = one_sample_t_test(sym, 3.0, Sidedness::Greater);
    CHECK(centered.t == doctest::Approx(0.0));
    CHECK(centered.p == doctest::Approx(0.5).epsilon(1e-12));

    std::vector<double> flat{0.7, 0.7, 0.7, 0.7};
    TTestResult z = one_sample_t_test(flat, 0.5, Sidedness::Greater);
    CHECK(z.zero_variance);
    CHECK(std::isnan(z.t));
    CHECK(z.p == 0.5);

    CHECK_THROWS_AS((void)one_sample_t_test({0.4}, 0.0, Sidedness::Greater), Error);
}

TEST_CASE("t-test agrees with the tail function on random samples") {
    Rng rng(2024);
    for (int rep = 0; rep < 30; ++rep) {
        std::size_t n = 4 + rng.below(12);
        std::vector<double> s(n);
        for (auto& v : s) v = 0.5 + 0.1 * rng.normal();
        TTestResult res = one_sample_t_test(s, 0.5, Sidedness::Greater);

        double m = 0.0;
        for (double v : s) m += v;
        m /= static_cast<double>(n);
        double ss = 0.0;
        for (double v : s) ss += (v - m) * (v - m);
        double sd = std::sqrt(ss / (static_cast<double>(n) - 1.0));
        double t = (m - 0.5) / (sd / std::sqrt(static_cast<double>(n)));
        CHECK(res.t == doctest::Approx(t).epsilon(1e-12));
        CHECK(res.p == doctest::Approx(student_t_sf(t, static_cast<double>(n) - 1.0))
                           .epsilon(1e-12));
        CHECK(res.p > 0.0);
        CHECK(res.p < 1.0);
    }
}

TEST_CASE("significance stars use strict thresholds") {
    CHECK(stars_for(0.0009) == "***");
    CHECK(stars_for(0.001) == "**");
    CHECK(stars_for(0.0099) == "**");
    CHECK(stars_for(0.01) == "*");
    CHECK(stars_for(0.049) == "*");
    CHECK(stars_for(0.05) == "");
    CHECK(stars_for(0.5) == "");
    CHECK(stars_for(1.0) == "");
}
