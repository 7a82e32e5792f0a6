// One-sample t-test machinery: regularized incomplete beta, Student-t tail
// probabilities, significance stars.
#pragma once

#include <string>
#include <vector>

#include "emosig/types.hpp"

namespace emosig {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation,
// absolute accuracy ~1e-10.
double reg_inc_beta(double a, double b, double x);

// P(T > t) for Student's t with df degrees of freedom.
double student_t_sf(double t, double df);

enum class Sidedness { Greater, TwoSided };

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    double df = 0.0;
    bool zero_variance = false;  // degenerate sample; p fixed at 0.5
};

// t = (mean - mu0) / (s / sqrt(n)) with sample (n-1) standard deviation.
TTestResult one_sample_t_test(const std::vector<double>& scores, double mu0,
                              Sidedness side = Sidedness::Greater);

// "***" p < 0.001, "**" p < 0.01, "*" p < 0.05, "" otherwise.
std::string stars_for(double p);

}  // namespace emosig
