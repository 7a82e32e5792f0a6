// Leave-one-video-out evaluation, confusion metrics, subject aggregation,
// baselines, and significance.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emosig/classify.hpp"
#include "emosig/features.hpp"
#include "emosig/selection.hpp"
#include "emosig/stats.hpp"
#include "emosig/types.hpp"

namespace emosig {

struct ConfusionMatrix {
    long tp = 0, fp = 0, fn = 0, tn = 0;  // High is the reference positive class
    long total() const { return tp + fp + fn + tn; }
};

ConfusionMatrix confusion(const std::vector<BinaryLabel>& preds,
                          const std::vector<BinaryLabel>& labels);

double accuracy(const ConfusionMatrix& cm);

// Unweighted mean of per-class F1. A class with no predicted and no actual
// instances is excluded; predicted-empty but actual-nonempty scores 0.
double macro_f1(const ConfusionMatrix& cm);

struct Fold {
    std::size_t test_index;
    std::vector<std::size_t> train_indices;
};

// One fold per trial, ordered by video_id. Indices refer to the input order.
std::vector<Fold> lovo_folds(const std::vector<TrialRecord>& subject_trials);

struct SubjectResult {
    std::string subject_id;
    Dimension dimension = Dimension::Valence;
    std::string scenario;
    std::string classifier;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    ConfusionMatrix confusion;
    std::size_t fold_failures = 0;
};

// Feature rows for one subject in fold order (already sorted by video_id).
struct SubjectMatrix {
    std::string subject_id;
    std::vector<std::string> video_ids;
    std::vector<std::vector<double>> rows;
    std::vector<BinaryLabel> labels;
};

// What feature selection decided on one training fold (for reports).
struct FoldSelection {
    std::string video_id;               // held-out trial
    std::vector<double> scores;         // per feature column
    std::vector<std::size_t> selected;  // kept columns, score-descending
    std::uint64_t model_digest = 0;     // model_hash of the fold's fitted model
};

// LOVO over a precomputed per-subject feature matrix: per fold select on the
// training rows, fit, predict the held-out trial; pool the confusion matrix.
// Single-class (or otherwise unfittable) folds fall back to the
// train-majority label and count as failures. `capture`, when given, receives
// one FoldSelection per fold whose selection and fit both succeeded.
SubjectResult run_subject_matrix(const SubjectMatrix& data, Dimension dim,
                                 const std::string& scenario_name,
                                 const ClassifierConfig& config, const SelectionRule& rule,
                                 std::vector<FoldSelection>* capture = nullptr);

// Convenience wrapper: assembles features from the raw trials first.
SubjectResult run_subject(const std::vector<TrialRecord>& subject_trials, Dimension dim,
                          const Scenario& scenario, bool extended,
                          const ClassifierConfig& config, const SelectionRule& rule,
                          bool tie_high = false, const FeatureOptions& options = {});

struct AggregateResult {
    double mean_accuracy = 0.0;
    double mean_macro_f1 = 0.0;
    std::vector<double> per_subject_f1;       // ordered by subject_id
    std::vector<double> per_subject_accuracy;
    std::vector<std::string> subject_ids;
    double t_statistic = 0.0;
    double p_value = 1.0;
    bool zero_variance = false;
    std::string stars;
    double baseline_reference = 0.0;
};

// Unweighted subject means plus a one-sample t-test against the reference.
AggregateResult aggregate(const std::vector<SubjectResult>& results, double baseline_reference,
                          Sidedness side = Sidedness::Greater);

struct BaselineOutcome {
    BaselineStrategy strategy = BaselineStrategy::Random;
    double mean_accuracy = 0.0;
    double mean_macro_f1 = 0.0;
    std::vector<double> per_subject_f1;
    std::vector<double> per_subject_accuracy;
    std::vector<std::string> subject_ids;
};

// Per subject: constant/majority or seeded draws over the subject's own
// labels, one prediction per trial. Seeds derive from (master, subject,
// strategy, dimension) so parallel schedules agree.
std::vector<BaselineOutcome> run_baselines(
    const std::vector<std::pair<std::string, std::vector<BinaryLabel>>>& subject_labels,
    Dimension dim, std::uint64_t master_seed);

}  // namespace emosig
