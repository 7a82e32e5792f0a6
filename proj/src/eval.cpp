#include "emosig/eval.hpp"

#include <algorithm>
#include <cmath>

#include "emosig/numeric.hpp"
#include "emosig/rng.hpp"
#include "emosig/signal_model.hpp"

namespace emosig {

ConfusionMatrix confusion(const std::vector<BinaryLabel>& preds,
                          const std::vector<BinaryLabel>& labels) {
    if (preds.empty() || preds.size() != labels.size())
        throw Error(ErrorCode::EmptyEval, "confusion needs equal non-empty sequences");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        bool p = preds[i] == BinaryLabel::High;
        bool a = labels[i] == BinaryLabel::High;
        if (p && a)
            ++cm.tp;
        else if (p && !a)
            ++cm.fp;
        else if (!p && a)
            ++cm.fn;
        else
            ++cm.tn;
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw Error(ErrorCode::EmptyEval, "empty confusion matrix");
    return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

double macro_f1(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw Error(ErrorCode::EmptyEval, "empty confusion matrix");

    double sum = 0.0;
    int classes = 0;

    // High as positive: predicted = tp+fp, actual = tp+fn.
    if (cm.tp + cm.fp + cm.fn > 0) {
        sum += 2.0 * cm.tp / static_cast<double>(2 * cm.tp + cm.fp + cm.fn);
        ++classes;
    }
    // Low as positive: predicted = tn+fn, actual = tn+fp.
    if (cm.tn + cm.fn + cm.fp > 0) {
        sum += 2.0 * cm.tn / static_cast<double>(2 * cm.tn + cm.fn + cm.fp);
        ++classes;
    }
    return classes > 0 ? sum / classes : 0.0;
}

std::vector<Fold> lovo_folds(const std::vector<TrialRecord>& subject_trials) {
    if (subject_trials.size() < 2)
        throw Error(ErrorCode::InsufficientTrials, "LOVO needs >= 2 trials");

    std::vector<std::size_t> order(subject_trials.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return subject_trials[a].video_id < subject_trials[b].video_id;
    });

    std::vector<Fold> folds;
    folds.reserve(order.size());
    for (std::size_t test : order) {
        Fold f;
        f.test_index = test;
        for (std::size_t other : order)
            if (other != test) f.train_indices.push_back(other);
        folds.push_back(std::move(f));
    }
    return folds;
}

namespace {

BinaryLabel majority_label(const std::vector<BinaryLabel>& labels) {
    std::size_t n_high = 0;
    for (BinaryLabel l : labels)
        if (l == BinaryLabel::High) ++n_high;
    return n_high * 2 >= labels.size() ? BinaryLabel::High : BinaryLabel::Low;
}

}  // namespace

SubjectResult run_subject_matrix(const SubjectMatrix& data, Dimension dim,
                                 const std::string& scenario_name,
                                 const ClassifierConfig& config, const SelectionRule& rule,
                                 std::vector<FoldSelection>* capture) {
    std::size_t n = data.rows.size();
    if (n < 2) throw Error(ErrorCode::InsufficientTrials, "LOVO needs >= 2 trials");
    if (data.labels.size() != n)
        throw Error(ErrorCode::ShapeMismatch, "rows/labels mismatch");

    std::vector<BinaryLabel> preds(n, BinaryLabel::Low);
    std::size_t failures = 0;

    for (std::size_t test = 0; test < n; ++test) {
        std::vector<std::vector<double>> train_rows;
        std::vector<BinaryLabel> train_labels;
        train_rows.reserve(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == test) continue;
            train_rows.push_back(data.rows[i]);
            train_labels.push_back(data.labels[i]);
        }

        try {
            std::vector<double> scores;
            std::vector<std::size_t> sel = select_features(train_rows, train_labels, rule,
                                                           capture ? &scores : nullptr);
            FittedModel model = fit(train_rows, train_labels, sel, config);
            if (capture) {
                FoldSelection fs;
                fs.video_id = test < data.video_ids.size() ? data.video_ids[test] : "";
                fs.scores = std::move(scores);
                fs.selected = sel;
                fs.model_digest = model_hash(model);
                capture->push_back(std::move(fs));
            }
            preds[test] = predict(model, {data.rows[test]}).front();
        } catch (const Error&) {
            // Degenerate fold (single-class train set, empty selection, ...):
            // fall back to the train majority and record the failure.
            preds[test] = majority_label(train_labels);
            ++failures;
        }
    }

    if (failures == n)
        throw Error(ErrorCode::SubjectEval,
                    "all LOVO folds failed for subject " + data.subject_id);

    SubjectResult res;
    res.subject_id = data.subject_id;
    res.dimension = dim;
    res.scenario = scenario_name;
    res.classifier = classifier_name(config.kind);
    res.confusion = confusion(preds, data.labels);
    res.accuracy = accuracy(res.confusion);
    res.macro_f1 = macro_f1(res.confusion);
    res.fold_failures = failures;
    return res;
}

SubjectResult run_subject(const std::vector<TrialRecord>& subject_trials, Dimension dim,
                          const Scenario& scenario, bool extended,
                          const ClassifierConfig& config, const SelectionRule& rule,
                          bool tie_high, const FeatureOptions& options) {
    std::vector<Fold> folds = lovo_folds(subject_trials);

    SubjectMatrix data;
    data.subject_id = subject_trials.front().subject_id;
    for (const Fold& f : folds) {
        const TrialRecord& t = subject_trials[f.test_index];
        FeatureVector fv = assemble_features(t, scenario, extended, options);
        data.video_ids.push_back(t.video_id);
        data.rows.push_back(fv.values);
        data.labels.push_back(binarize_rating(rating_for(t.ratings, dim), dim, tie_high));
    }
    return run_subject_matrix(data, dim, scenario_name(scenario), config, rule);
}

AggregateResult aggregate(const std::vector<SubjectResult>& results, double baseline_reference,
                          Sidedness side) {
    if (results.size() < 2)
        throw Error(ErrorCode::InsufficientSubjects, "aggregation needs >= 2 subjects");

    std::vector<std::size_t> order(results.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return results[a].subject_id < results[b].subject_id;
    });

    AggregateResult agg;
    agg.baseline_reference = baseline_reference;
    for (std::size_t i : order) {
        agg.subject_ids.push_back(results[i].subject_id);
        agg.per_subject_f1.push_back(results[i].macro_f1);
        agg.per_subject_accuracy.push_back(results[i].accuracy);
        agg.mean_accuracy += results[i].accuracy;
        agg.mean_macro_f1 += results[i].macro_f1;
    }
    agg.mean_accuracy /= static_cast<double>(results.size());
    agg.mean_macro_f1 /= static_cast<double>(results.size());

    TTestResult tt = one_sample_t_test(agg.per_subject_f1, baseline_reference, side);
    agg.t_statistic = tt.t;
    agg.p_value = tt.p;
    agg.zero_variance = tt.zero_variance;
    agg.stars = tt.zero_variance ? "" : stars_for(tt.p);
    return agg;
}

std::vector<BaselineOutcome> run_baselines(
    const std::vector<std::pair<std::string, std::vector<BinaryLabel>>>& subject_labels,
    Dimension dim, std::uint64_t master_seed) {
    if (subject_labels.empty()) throw Error(ErrorCode::EmptyEval, "no subjects for baselines");

    std::vector<BaselineOutcome> outcomes;
    for (BaselineStrategy strategy :
         {BaselineStrategy::Random, BaselineStrategy::Majority, BaselineStrategy::Ratio}) {
        BaselineOutcome out;
        out.strategy = strategy;
        for (const auto& [subject, labels] : subject_labels) {
            std::uint64_t seed = derive_seed(
                master_seed, subject + "/" + baseline_name(strategy) + "/" + dimension_name(dim));
            std::vector<BinaryLabel> preds =
                baseline_vote(strategy, labels, labels.size(), seed);
            ConfusionMatrix cm = confusion(preds, labels);
            out.subject_ids.push_back(subject);
            out.per_subject_accuracy.push_back(accuracy(cm));
            out.per_subject_f1.push_back(macro_f1(cm));
        }
        out.mean_accuracy = mean(out.per_subject_accuracy);
        out.mean_macro_f1 = mean(out.per_subject_f1);
        outcomes.push_back(std::move(out));
    }
    return outcomes;
}

}  // namespace emosig
