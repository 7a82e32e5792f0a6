// Cross-setup Pearson correlation of per-subject F1 scores.
#pragma once

#include <cstddef>
#include <vector>

#include "emosig/types.hpp"

namespace emosig {

struct CorrelationCell {
    double r = 0.0;
    double p = 1.0;
    std::size_t n = 0;
    bool undefined = false;  // a zero-variance score list is involved
};

// Pearson r of two equal-length lists. Throws on zero variance.
double pearson_r(const std::vector<double>& a, const std::vector<double>& b);

// Pairwise correlations with two-sided p via t = r*sqrt((n-2)/(1-r^2)).
// Symmetric, unit diagonal. Cells touching a zero-variance list (off the
// diagonal) carry the undefined marker.
std::vector<std::vector<CorrelationCell>> pearson_matrix(
    const std::vector<std::vector<double>>& per_setup_scores);

}  // namespace emosig
