// Config-driven experiment orchestration: exclusion screening, per-subject
// LOVO across every (scenario, classifier, dimension) setup, baselines,
// aggregation with significance, correlation matrices, and report emission.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emosig/dataset_io.hpp"
#include "emosig/eval.hpp"
#include "emosig/synthetic.hpp"

namespace emosig {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
    std::string dataset_path;  // empty + synthetic flavor: generate in-process
    DatasetFlavor flavor = DatasetFlavor::Synthetic;

    std::vector<Scenario> scenarios;
    std::vector<ClassifierKind> classifiers;
    std::vector<Dimension> dimensions;

    double classifier_c = 1.0;
    bool balanced_weights = true;
    std::size_t max_iterations = 1000;
    double tolerance = 1e-6;
    SelectionRule selection;  // carries the variance-convention toggle

    std::uint64_t seed = 0;
    std::string out_dir = "out";
    int jobs = 1;

    // Remaining ledger toggles.
    bool tie_high = false;         // rating of exactly 5 counts as High
    bool t_two_sided = false;      // two-sided significance instead of greater
    bool ibi_screen = true;        // plausibility screen on cardiac intervals
    bool extended_features = true; // extended HRV/BB indices on EmoWear-style runs

    double min_class_fraction = 0.10;
    bool selection_detail = false;  // also dump per-fold selections
    SynthSpec synth;                // used when flavor == Synthetic
};

// kv <-> config. `run.seed` is mandatory (ConfigError when absent); every
// other key falls back to its default. Unknown keys are ignored so manifests
// round-trip.
ExperimentConfig config_from_kv(const KvFile& kv);

// Canonical echo of everything that defines the experiment. Execution-only
// keys (run.jobs, run.out_dir) are deliberately absent so reruns with a
// different thread count or output directory stay byte-identical.
KvFile config_to_kv(const ExperimentConfig& config);

// Hash over exactly the ledger toggles (tie rule, t-test sidedness, IBI
// screening, variance convention, extended features): it changes iff one of
// those switches changes.
std::string config_hash(const ExperimentConfig& config);

Scenario parse_scenario(const std::string& text);  // "scg+adr", "bvp+all@deap"
ClassifierKind parse_classifier_kind(const std::string& text);
Dimension parse_dimension(const std::string& text);

// Channels a dataset flavor provides (synthetic delegates to the synth style).
std::vector<Channel> flavor_channels(DatasetFlavor flavor, DatasetStyle synth_style);

struct RunResults {
    std::vector<SubjectResult> subjects;        // one entry per finished setup run
    std::vector<BaselineOutcome> baselines[2];  // indexed by Dimension
    std::vector<std::string> subject_ids;       // kept subjects, sorted
    std::vector<std::string> failures;          // human-readable notes
};

struct RunOutcome {
    int exit_code = 0;  // 0 clean, 2 partial failures, 3 nothing succeeded
    RunResults results;
};

// Full pipeline. Artifacts written into config.out_dir:
//   manifest.txt                   version, config hash, config echo
//   exclusions.tsv                 screening removals
//   subjects.tsv                   per-(subject,setup) metrics, full precision
//   baselines.tsv                  per-(subject,strategy) baseline metrics
//   selection.tsv                  selection frequency/score summary
//   selection_detail.tsv           per-fold selections (opt-in)
//   failures.tsv                   per-item failure notes
//   results.tsv / results_full.tsv aggregate table, baseline rows first
//   f1_matrix_<dim>.tsv (+_full)   subjects x setups macro-F1 matrix
//   correlation_<dim>.tsv (+_full) setup correlation matrix with stars
RunOutcome run_experiment(const ExperimentConfig& config);

enum class ReportFormat { Table, Matrix, Manifest };

// Re-emits one artifact family from in-memory results into config.out_dir.
void emit_report(const RunResults& results, const ExperimentConfig& config, ReportFormat format);

// Reloads manifest + intermediates from a finished run directory and
// re-emits every report format there.
void emit_report_from_store(const std::string& out_dir);

}  // namespace emosig
