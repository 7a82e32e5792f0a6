// Fisher-score feature selection, fitted on training folds only.
#pragma once

#include <cstddef>
#include <vector>

#include "emosig/types.hpp"

namespace emosig {

struct SelectionRule {
    double threshold = 0.3;
    std::size_t min_count = 15;    // 0 for the replication-style runs
    bool sample_variance = false;  // Bessel-corrected class variances
};

// J = |mu1 - mu2| / (sigma1^2 + sigma2^2) with population class variances
// (sample variances behind the toggle). Missing (NaN) values are excluded
// pairwise. Zero denominator: +inf when the means differ (perfect
// separator), 0 when they coincide.
double fisher_score(const std::vector<double>& values, const std::vector<BinaryLabel>& labels,
                    bool sample_variance = false);

// Columns with J > threshold; topped up to min_count by score when too few
// survive. Result ordered by descending score, ties by original index.
// `scores_out`, when given, receives every column's score.
std::vector<std::size_t> select_features(const std::vector<std::vector<double>>& rows,
                                         const std::vector<BinaryLabel>& labels,
                                         const SelectionRule& rule,
                                         std::vector<double>* scores_out = nullptr);

// Score every column (0 for columns whose finite subset loses a class).
std::vector<double> score_columns(const std::vector<std::vector<double>>& rows,
                                  const std::vector<BinaryLabel>& labels,
                                  bool sample_variance = false);

}  // namespace emosig
