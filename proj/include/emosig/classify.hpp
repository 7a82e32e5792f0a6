// Gaussian naive Bayes, linear SVM, logistic regression, baseline voting,
// and train-fold standardization/imputation plumbing.
#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

#include "emosig/types.hpp"

namespace emosig {

enum class ClassifierKind { NB, SVM, LR };

std::string classifier_name(ClassifierKind k);

struct ClassifierConfig {
    ClassifierKind kind = ClassifierKind::NB;
    double c_param = 1.0;
    bool balanced_weights = true;  // SVM/LR only; NB keeps empirical priors
    int max_iterations = 1000;
    double tolerance = 1e-6;
    std::uint64_t rng_seed = 0;
};

struct Standardization {
    std::vector<double> mean;
    std::vector<double> std;  // population; 0 marks a constant feature
};

Standardization standardize_fit(const std::vector<std::vector<double>>& rows);

// z-scores; constant features map to 0.
std::vector<std::vector<double>> standardize_apply(const Standardization& stats,
                                                   const std::vector<std::vector<double>>& rows);

struct FittedModel {
    ClassifierKind kind = ClassifierKind::NB;
    std::vector<std::size_t> selected;     // column indices into the full matrix
    std::vector<double> impute_values;     // train means, per selected column

    // NB parameters.
    std::vector<double> mean_high, var_high, mean_low, var_low;
    double log_prior_high = 0.0, log_prior_low = 0.0;

    // SVM/LR parameters on standardized features.
    std::vector<double> weights;
    double bias = 0.0;
    Standardization standardization;

    bool converged = true;
    int iterations = 0;
    std::vector<double> objective_trace;  // one entry per optimizer pass
};

// Trains on the selected columns of the raw rows: impute with train means,
// then (SVM/LR) standardize. Both classes must be present.
FittedModel fit(const std::vector<std::vector<double>>& rows,
                const std::vector<BinaryLabel>& labels,
                const std::vector<std::size_t>& selected, const ClassifierConfig& config);

std::vector<BinaryLabel> predict(const FittedModel& model,
                                 const std::vector<std::vector<double>>& rows);

// Raw decision values (log-posterior difference for NB, signed margin for
// SVM/LR); > 0 means High.
std::vector<double> decision_values(const FittedModel& model,
                                    const std::vector<std::vector<double>>& rows);

// L2-penalized weighted logistic loss at params = [weights..., bias] (bias
// unpenalized) and its analytic gradient. The Newton solver consumes these,
// so finite-difference checks exercise the exact production derivatives.
double lr_objective(const std::vector<std::vector<double>>& rows,
                    const std::vector<BinaryLabel>& labels, const ClassifierConfig& config,
                    const std::vector<double>& params);
std::vector<double> lr_gradient(const std::vector<std::vector<double>>& rows,
                                const std::vector<BinaryLabel>& labels,
                                const ClassifierConfig& config,
                                const std::vector<double>& params);

// Stable digest of the fitted parameters (leakage/determinism checks).
std::uint64_t model_hash(const FittedModel& model);

enum class BaselineStrategy { Random, Majority, Ratio };

std::string baseline_name(BaselineStrategy s);

// Random: fair coin. Majority: constant majority label, tie -> High.
// Ratio: independent draws with P(High) = training High fraction.
std::vector<BinaryLabel> baseline_vote(BaselineStrategy strategy,
                                       const std::vector<BinaryLabel>& train_labels,
                                       std::size_t n_predictions, std::uint64_t rng_seed);

}  // namespace emosig
