#include "emosig/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace emosig {

double fisher_score(const std::vector<double>& values, const std::vector<BinaryLabel>& labels,
                    bool sample_variance) {
    if (values.size() != labels.size())
        throw Error(ErrorCode::ShapeMismatch, "values/labels length mismatch");

    double sum[2] = {0, 0}, sumsq[2] = {0, 0};
    std::size_t n[2] = {0, 0};
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) continue;  // pairwise deletion
        int c = labels[i] == BinaryLabel::High ? 1 : 0;
        sum[c] += values[i];
        sumsq[c] += values[i] * values[i];
        ++n[c];
    }
    if (n[0] == 0 || n[1] == 0)
        throw Error(ErrorCode::UndefinedScore, "Fisher score needs both classes present");
    if (sample_variance && (n[0] < 2 || n[1] < 2))
        throw Error(ErrorCode::UndefinedScore, "sample variance needs two values per class");

    double mu[2], var[2];
    for (int c = 0; c < 2; ++c) {
        mu[c] = sum[c] / static_cast<double>(n[c]);
        var[c] = sumsq[c] / static_cast<double>(n[c]) - mu[c] * mu[c];
        var[c] = std::max(var[c], 0.0);  // guard tiny negative rounding
        if (sample_variance)
            var[c] *= static_cast<double>(n[c]) / static_cast<double>(n[c] - 1);
    }

    double num = std::fabs(mu[0] - mu[1]);
    double den = var[0] + var[1];
    if (den == 0.0)
        return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

std::vector<double> score_columns(const std::vector<std::vector<double>>& rows,
                                  const std::vector<BinaryLabel>& labels,
                                  bool sample_variance) {
    if (rows.empty()) throw Error(ErrorCode::InsufficientData, "empty training matrix");
    bool any_high = false, any_low = false;
    for (BinaryLabel l : labels) (l == BinaryLabel::High ? any_high : any_low) = true;
    if (!any_high || !any_low)
        throw Error(ErrorCode::UndefinedScore, "single-class training fold");

    std::size_t ncols = rows.front().size();
    std::vector<double> scores(ncols, 0.0);
    std::vector<double> column(rows.size());
    for (std::size_t j = 0; j < ncols; ++j) {
        for (std::size_t i = 0; i < rows.size(); ++i) column[i] = rows[i][j];
        try {
            scores[j] = fisher_score(column, labels, sample_variance);
        } catch (const Error&) {
            scores[j] = 0.0;  // a class lost all finite values for this column
        }
    }
    return scores;
}

std::vector<std::size_t> select_features(const std::vector<std::vector<double>>& rows,
                                         const std::vector<BinaryLabel>& labels,
                                         const SelectionRule& rule,
                                         std::vector<double>* scores_out) {
    if (rule.threshold < 0.0) throw Error(ErrorCode::ConfigError, "threshold must be >= 0");
    std::vector<double> scores = score_columns(rows, labels, rule.sample_variance);
    if (scores_out) *scores_out = scores;

    std::vector<std::size_t> order(scores.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    std::size_t above = 0;
    for (double s : scores)
        if (s > rule.threshold) ++above;
    std::size_t keep = std::max<std::size_t>(above, std::min(rule.min_count, scores.size()));

    return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep)};
}

}  // namespace emosig
