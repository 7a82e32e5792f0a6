#include "emosig/pearson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emosig/numeric.hpp"
#include "emosig/stats.hpp"

namespace emosig {

double pearson_r(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 3)
        throw Error(ErrorCode::InsufficientData, "Pearson needs >= 3 paired samples");
    double ma = mean(a), mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        throw Error(ErrorCode::UndefinedScore, "zero-variance score list");
    double r = sab / std::sqrt(saa * sbb);
    return std::clamp(r, -1.0, 1.0);
}

std::vector<std::vector<CorrelationCell>> pearson_matrix(
    const std::vector<std::vector<double>>& per_setup_scores) {
    std::size_t k = per_setup_scores.size();
    if (k == 0) throw Error(ErrorCode::InsufficientData, "no setups to correlate");
    std::size_t n = per_setup_scores.front().size();
    if (n < 3) throw Error(ErrorCode::InsufficientData, "Pearson needs >= 3 subjects");
    for (const auto& s : per_setup_scores)
        if (s.size() != n)
            throw Error(ErrorCode::ShapeMismatch, "setups must share the subject ordering");

    constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<CorrelationCell>> m(k, std::vector<CorrelationCell>(k));
    for (std::size_t i = 0; i < k; ++i) {
        m[i][i] = {1.0, 0.0, n, false};
        for (std::size_t j = i + 1; j < k; ++j) {
            CorrelationCell cell;
            cell.n = n;
            try {
                cell.r = pearson_r(per_setup_scores[i], per_setup_scores[j]);
                double df = static_cast<double>(n) - 2.0;
                if (std::fabs(cell.r) >= 1.0) {
                    cell.p = 0.0;
                } else {
                    double t = cell.r * std::sqrt(df / (1.0 - cell.r * cell.r));
                    cell.p = 2.0 * student_t_sf(std::fabs(t), df);
                }
            } catch (const Error&) {
                cell.r = kNan;
                cell.p = kNan;
                cell.undefined = true;
            }
            m[i][j] = cell;
            m[j][i] = cell;
        }
    }
    return m;
}

}  // namespace emosig
