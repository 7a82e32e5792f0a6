#include "emosig/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include "emosig/numeric.hpp"
#include "emosig/pearson.hpp"
#include "emosig/rng.hpp"

namespace fs = std::filesystem;

namespace emosig {

namespace {

[[noreturn]] void config_fail(const std::string& msg) {
    throw Error(ErrorCode::ConfigError, msg);
}

std::string trim_copy(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t pos = s.find(',', start);
        std::string tok = trim_copy(pos == std::string::npos ? s.substr(start)
                                                             : s.substr(start, pos - start));
        if (!tok.empty()) out.push_back(tok);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
    return out;
}

std::string bool_text(bool v) { return v ? "true" : "false"; }

}  // namespace

Scenario parse_scenario(const std::string& text) {
    std::string t = trim_copy(text);
    for (char& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

    Scenario s;
    const std::string deap_suffix = "@deap";
    if (t.size() > deap_suffix.size() &&
        t.compare(t.size() - deap_suffix.size(), deap_suffix.size(), deap_suffix) == 0) {
        s.style = DatasetStyle::Deap;
        t.resize(t.size() - deap_suffix.size());
    }

    std::size_t plus = t.find('+');
    if (plus == std::string::npos)
        config_fail("scenario '" + text + "' must look like <cardiac>+<peripherals>[@deap]");
    std::string cardiac = t.substr(0, plus), periph = t.substr(plus + 1);

    if (cardiac == "ecg")
        s.cardiac = CardiacSource::Ecg;
    else if (cardiac == "bvp")
        s.cardiac = CardiacSource::Bvp;
    else if (cardiac == "scg")
        s.cardiac = CardiacSource::Scg;
    else
        config_fail("scenario '" + text + "': unknown cardiac source '" + cardiac + "'");

    if (periph == "all")
        s.peripherals = PeripheralSet::All;
    else if (periph == "rsp")
        s.peripherals = PeripheralSet::RspOnly;
    else if (periph == "adr")
        s.peripherals = PeripheralSet::AdrOnly;
    else
        config_fail("scenario '" + text + "': unknown peripheral set '" + periph + "'");

    validate_scenario(s);
    return s;
}

ClassifierKind parse_classifier_kind(const std::string& text) {
    std::string t = trim_copy(text);
    if (t == "nb") return ClassifierKind::NB;
    if (t == "svm") return ClassifierKind::SVM;
    if (t == "lr") return ClassifierKind::LR;
    config_fail("unknown classifier '" + text + "' (expected nb, svm or lr)");
}

Dimension parse_dimension(const std::string& text) {
    std::string t = trim_copy(text);
    if (t == "valence") return Dimension::Valence;
    if (t == "arousal") return Dimension::Arousal;
    config_fail("unknown dimension '" + text + "' (expected valence or arousal)");
}

std::vector<Channel> flavor_channels(DatasetFlavor flavor, DatasetStyle synth_style) {
    bool deapish = flavor == DatasetFlavor::DeapLike ||
                   (flavor == DatasetFlavor::Synthetic && synth_style == DatasetStyle::Deap);
    if (deapish)
        return {Channel::Bvp, Channel::Rsp, Channel::Eda, Channel::Skt, Channel::Emg,
                Channel::Eog};
    return {Channel::Ecg, Channel::Bvp, Channel::AccZ, Channel::Rsp, Channel::Eda, Channel::Skt};
}

ExperimentConfig config_from_kv(const KvFile& kv) {
    ExperimentConfig c;
    c.flavor = parse_flavor(kv.get("dataset.flavor", "synthetic"));
    c.dataset_path = kv.get("dataset.path", "");
    if (c.flavor != DatasetFlavor::Synthetic && c.dataset_path.empty())
        config_fail("dataset.path is required for non-synthetic flavors");

    if (!kv.has("run.seed")) config_fail("run.seed is mandatory");
    c.seed = static_cast<std::uint64_t>(kv_int(kv, "run.seed", 0));
    c.out_dir = kv.get("run.out_dir", "out");
    c.jobs = static_cast<int>(kv_int(kv, "run.jobs", 1));

    c.synth = synth_spec_from_kv(kv);

    std::string default_scenarios =
        flavor_channels(c.flavor, c.synth.style).front() == Channel::Bvp
            ? "bvp+all@deap"
            : "ecg+all,bvp+all,scg+all,ecg+rsp,bvp+rsp,scg+rsp,scg+adr";
    std::set<std::string> seen;
    for (const std::string& tok : split_list(kv.get("run.scenarios", default_scenarios))) {
        Scenario s = parse_scenario(tok);
        if (seen.insert(scenario_name(s)).second) c.scenarios.push_back(s);
    }
    for (const std::string& tok : split_list(kv.get("run.classifiers", "nb,svm,lr"))) {
        ClassifierKind k = parse_classifier_kind(tok);
        if (std::find(c.classifiers.begin(), c.classifiers.end(), k) == c.classifiers.end())
            c.classifiers.push_back(k);
    }
    for (const std::string& tok : split_list(kv.get("run.dimensions", "valence,arousal"))) {
        Dimension d = parse_dimension(tok);
        if (std::find(c.dimensions.begin(), c.dimensions.end(), d) == c.dimensions.end())
            c.dimensions.push_back(d);
    }

    c.classifier_c = kv_double(kv, "classifier.c", 1.0);
    c.balanced_weights = kv_bool(kv, "classifier.balanced_weights", true);
    c.max_iterations = static_cast<std::size_t>(kv_int(kv, "classifier.max_iterations", 1000));
    c.tolerance = kv_double(kv, "classifier.tolerance", 1e-6);

    c.selection.threshold = kv_double(kv, "selection.threshold", 0.3);
    c.selection.min_count = static_cast<std::size_t>(kv_int(kv, "selection.min_count", 15));
    c.selection.sample_variance = kv_bool(kv, "toggles.fisher_sample_variance", false);

    c.tie_high = kv_bool(kv, "toggles.tie_high", false);
    c.t_two_sided = kv_bool(kv, "toggles.t_two_sided", false);
    c.ibi_screen = kv_bool(kv, "toggles.ibi_screen", true);
    c.extended_features = kv_bool(kv, "toggles.extended_features", true);

    c.min_class_fraction = kv_double(kv, "exclusion.min_class_fraction", 0.10);
    c.selection_detail = kv_bool(kv, "report.selection_detail", false);

    // Structural validation.
    if (c.scenarios.empty()) config_fail("run.scenarios selected nothing");
    if (c.classifiers.empty()) config_fail("run.classifiers selected nothing");
    if (c.dimensions.empty()) config_fail("run.dimensions selected nothing");
    if (!(c.classifier_c > 0.0)) config_fail("classifier.c must be positive");
    if (!(c.tolerance > 0.0)) config_fail("classifier.tolerance must be positive");
    if (c.max_iterations < 1) config_fail("classifier.max_iterations must be >= 1");
    if (c.jobs < 1) config_fail("run.jobs must be >= 1");

    std::vector<Channel> avail = flavor_channels(c.flavor, c.synth.style);
    for (const Scenario& s : c.scenarios)
        for (Channel ch : required_channels(s))
            if (std::find(avail.begin(), avail.end(), ch) == avail.end())
                config_fail("scenario " + scenario_name(s) + " needs channel " +
                            channel_name(ch) + " which the " + flavor_name(c.flavor) +
                            " flavor does not provide");
    return c;
}

KvFile config_to_kv(const ExperimentConfig& c) {
    KvFile kv;
    kv.set("dataset.flavor", flavor_name(c.flavor));
    kv.set("dataset.path", c.dataset_path);
    kv.set("run.seed", std::to_string(c.seed));

    std::vector<std::string> names;
    for (const Scenario& s : c.scenarios) names.push_back(scenario_name(s));
    kv.set("run.scenarios", join_list(names));
    names.clear();
    for (ClassifierKind k : c.classifiers) names.push_back(classifier_name(k));
    kv.set("run.classifiers", join_list(names));
    names.clear();
    for (Dimension d : c.dimensions) names.push_back(dimension_name(d));
    kv.set("run.dimensions", join_list(names));

    kv.set("classifier.c", fmt_full(c.classifier_c));
    kv.set("classifier.balanced_weights", bool_text(c.balanced_weights));
    kv.set("classifier.max_iterations", std::to_string(c.max_iterations));
    kv.set("classifier.tolerance", fmt_full(c.tolerance));
    kv.set("selection.threshold", fmt_full(c.selection.threshold));
    kv.set("selection.min_count", std::to_string(c.selection.min_count));
    kv.set("exclusion.min_class_fraction", fmt_full(c.min_class_fraction));

    kv.set("toggles.tie_high", bool_text(c.tie_high));
    kv.set("toggles.t_two_sided", bool_text(c.t_two_sided));
    kv.set("toggles.ibi_screen", bool_text(c.ibi_screen));
    kv.set("toggles.fisher_sample_variance", bool_text(c.selection.sample_variance));
    kv.set("toggles.extended_features", bool_text(c.extended_features));

    kv.set("report.selection_detail", bool_text(c.selection_detail));

    if (c.flavor == DatasetFlavor::Synthetic) {
        const SynthSpec& s = c.synth;
        kv.set("synth.subjects", std::to_string(s.subjects));
        kv.set("synth.trials", std::to_string(s.trials_per_subject));
        kv.set("synth.duration_s", fmt_full(s.duration_s));
        kv.set("synth.hr_lo_bpm", fmt_full(s.hr_lo_bpm));
        kv.set("synth.hr_hi_bpm", fmt_full(s.hr_hi_bpm));
        kv.set("synth.breath_lo_hz", fmt_full(s.breath_lo_hz));
        kv.set("synth.breath_hi_hz", fmt_full(s.breath_hi_hz));
        kv.set("synth.valence_high_fraction", fmt_full(s.valence_high_fraction));
        kv.set("synth.arousal_high_fraction", fmt_full(s.arousal_high_fraction));
        kv.set("synth.valence.hr_offset_bpm", fmt_full(s.valence.hr_offset_bpm));
        kv.set("synth.valence.breath_offset_hz", fmt_full(s.valence.breath_offset_hz));
        kv.set("synth.valence.eda_level_offset", fmt_full(s.valence.eda_level_offset));
        kv.set("synth.valence.skt_level_offset", fmt_full(s.valence.skt_level_offset));
        kv.set("synth.arousal.hr_offset_bpm", fmt_full(s.arousal.hr_offset_bpm));
        kv.set("synth.arousal.breath_offset_hz", fmt_full(s.arousal.breath_offset_hz));
        kv.set("synth.arousal.eda_level_offset", fmt_full(s.arousal.eda_level_offset));
        kv.set("synth.arousal.skt_level_offset", fmt_full(s.arousal.skt_level_offset));
        kv.set("synth.label_noise", fmt_full(s.label_noise));
        kv.set("synth.rsa_depth", fmt_full(s.rsa_depth));
        kv.set("synth.beat_jitter_s", fmt_full(s.beat_jitter_s));
        kv.set("synth.noise_scale", fmt_full(s.noise_scale));
        kv.set("synth.style", s.style == DatasetStyle::Deap ? "deap" : "emowear");
    }
    return kv;
}

std::string config_hash(const ExperimentConfig& c) {
    std::string canon = std::string("tie_high=") + (c.tie_high ? "1" : "0") +
                        ";t_two_sided=" + (c.t_two_sided ? "1" : "0") +
                        ";ibi_screen=" + (c.ibi_screen ? "1" : "0") +
                        ";fisher_sample_variance=" + (c.selection.sample_variance ? "1" : "0") +
                        ";extended_features=" + (c.extended_features ? "1" : "0");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canon)));
    return buf;
}

// ---- run orchestration ----

namespace {

struct SubjectTrials {
    std::string id;
    std::vector<const TrialRecord*> trials;              // sorted by video_id
    std::vector<BinaryLabel> labels[2];                  // per Dimension
};

struct ItemSlot {
    std::string error;                                   // assembly-level failure
    std::vector<std::string> feature_names;
    // results[dim_idx][clf_idx]
    std::vector<std::vector<std::optional<SubjectResult>>> results;
    std::vector<std::vector<std::string>> setup_errors;
    std::vector<std::vector<FoldSelection>> selections;  // per dim_idx
};

void parallel_items(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    for (std::thread& t : pool) t.join();
}

ClassifierConfig make_clf_config(const ExperimentConfig& cfg, ClassifierKind kind) {
    ClassifierConfig c;
    c.kind = kind;
    c.c_param = cfg.classifier_c;
    c.balanced_weights = cfg.balanced_weights;
    c.max_iterations = static_cast<int>(cfg.max_iterations);
    c.tolerance = cfg.tolerance;
    c.rng_seed = derive_seed(cfg.seed, "classifier/" + classifier_name(kind));
    return c;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

double mean_or_nan(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return mean(v);
}

// Aggregate lookup key.
std::string setup_key(Dimension dim, const std::string& scenario, const std::string& classifier) {
    return dimension_name(dim) + "|" + scenario + "|" + classifier;
}

void write_exclusions_file(const ExperimentConfig& cfg, const ExclusionReport& report) {
    Table t;
    t.columns = {"subject_id", "video_id", "reason"};
    for (const Removal& r : report.removals) t.add_row({r.subject_id, r.video_id, r.reason});
    write_table(out_path(cfg, "exclusions.tsv"), t);
}

void write_subjects_file(const ExperimentConfig& cfg, const RunResults& rr) {
    Table t;
    t.columns = {"subject_id", "dimension", "scenario", "classifier", "accuracy",
                 "macro_f1",   "tp",        "fp",       "fn",         "tn",
                 "fold_failures"};
    for (const SubjectResult& r : rr.subjects)
        t.add_row({r.subject_id, dimension_name(r.dimension), r.scenario, r.classifier,
                   fmt_full(r.accuracy), fmt_full(r.macro_f1), std::to_string(r.confusion.tp),
                   std::to_string(r.confusion.fp), std::to_string(r.confusion.fn),
                   std::to_string(r.confusion.tn), std::to_string(r.fold_failures)});
    write_table(out_path(cfg, "subjects.tsv"), t);
}

void write_baselines_file(const ExperimentConfig& cfg, const RunResults& rr) {
    Table t;
    t.columns = {"dimension", "strategy", "subject_id", "accuracy", "macro_f1"};
    for (Dimension dim : cfg.dimensions) {
        for (const BaselineOutcome& b : rr.baselines[static_cast<int>(dim)]) {
            for (std::size_t i = 0; i < b.subject_ids.size(); ++i)
                t.add_row({dimension_name(dim), baseline_name(b.strategy), b.subject_ids[i],
                           fmt_full(b.per_subject_accuracy[i]), fmt_full(b.per_subject_f1[i])});
        }
    }
    write_table(out_path(cfg, "baselines.tsv"), t);
}

void write_failures_file(const ExperimentConfig& cfg, const RunResults& rr) {
    Table t;
    t.columns = {"detail"};
    for (const std::string& f : rr.failures) t.add_row({f});
    write_table(out_path(cfg, "failures.tsv"), t);
}

}  // namespace

void emit_report(const RunResults& rr, const ExperimentConfig& cfg, ReportFormat format) {
    fs::create_directories(cfg.out_dir);

    // Index subject results by setup.
    std::map<std::string, std::vector<SubjectResult>> by_setup;
    for (const SubjectResult& r : rr.subjects)
        by_setup[setup_key(r.dimension, r.scenario, r.classifier)].push_back(r);

    bool has_dim[2] = {false, false};
    for (Dimension d : cfg.dimensions) has_dim[static_cast<int>(d)] = true;

    double reference[2] = {0.0, 0.0};
    for (int d = 0; d < 2; ++d)
        for (const BaselineOutcome& b : rr.baselines[d])
            reference[d] = std::max(reference[d], b.mean_macro_f1);

    Sidedness side = cfg.t_two_sided ? Sidedness::TwoSided : Sidedness::Greater;

    if (format == ReportFormat::Table) {
        Table t, tf;
        t.columns = {"classifier",       "cardiac",    "peripherals",
                     "valence_accuracy", "valence_f1", "valence_stars",
                     "arousal_accuracy", "arousal_f1", "arousal_stars"};
        tf.columns = t.columns;
        tf.columns.insert(tf.columns.end(),
                          {"valence_t", "valence_p", "arousal_t", "arousal_p"});

        auto baseline_rows = [&](BaselineStrategy strategy) {
            std::vector<std::string> row{baseline_name(strategy), "-", "-"};
            std::vector<std::string> full = row;
            for (int d = 0; d < 2; ++d) {
                std::string acc, f1;
                if (has_dim[d]) {
                    for (const BaselineOutcome& b : rr.baselines[d])
                        if (b.strategy == strategy) {
                            acc = fmt_fixed(b.mean_accuracy);
                            f1 = fmt_fixed(b.mean_macro_f1);
                        }
                }
                row.insert(row.end(), {acc, f1, ""});
                full.insert(full.end(), {acc.empty() ? "" : acc, f1.empty() ? "" : f1, ""});
            }
            full.insert(full.end(), {"", "", "", ""});
            t.add_row(row);
            tf.add_row(full);
        };
        baseline_rows(BaselineStrategy::Random);
        baseline_rows(BaselineStrategy::Majority);
        baseline_rows(BaselineStrategy::Ratio);

        for (ClassifierKind k : cfg.classifiers) {
            for (const Scenario& sc : cfg.scenarios) {
                std::string name = scenario_name(sc);
                std::size_t plus = name.find('+');
                std::vector<std::string> row{classifier_name(k), name.substr(0, plus),
                                             name.substr(plus + 1)};
                std::vector<std::string> full = row;
                std::vector<std::string> tails;
                for (int d = 0; d < 2; ++d) {
                    std::string acc, f1, stars, tcell, pcell;
                    if (has_dim[d]) {
                        auto it = by_setup.find(setup_key(static_cast<Dimension>(d), name,
                                                          classifier_name(k)));
                        if (it != by_setup.end() && it->second.size() >= 2) {
                            AggregateResult agg = aggregate(it->second, reference[d], side);
                            acc = fmt_fixed(agg.mean_accuracy);
                            f1 = fmt_fixed(agg.mean_macro_f1);
                            stars = agg.stars;
                            tcell = fmt_full(agg.t_statistic);
                            pcell = fmt_full(agg.p_value);
                        } else if (it != by_setup.end() && it->second.size() == 1) {
                            acc = fmt_fixed(it->second.front().accuracy);
                            f1 = fmt_fixed(it->second.front().macro_f1);
                            tcell = "nan";
                            pcell = "nan";
                        } else {
                            acc = "nan";
                            f1 = "nan";
                            tcell = "nan";
                            pcell = "nan";
                        }
                    }
                    row.insert(row.end(), {acc, f1, stars});
                    full.insert(full.end(), {acc, f1, stars});
                    tails.insert(tails.end(), {tcell, pcell});
                }
                full.insert(full.end(), tails.begin(), tails.end());
                t.add_row(row);
                tf.add_row(full);
            }
        }
        write_table(out_path(cfg, "results.tsv"), t);
        write_table(out_path(cfg, "results_full.tsv"), tf);
        // Correlation matrices live with the aggregate table.
        for (Dimension dim : cfg.dimensions) {
            std::vector<std::string> setups;
            for (ClassifierKind k : cfg.classifiers)
                for (const Scenario& sc : cfg.scenarios)
                    setups.push_back(scenario_name(sc) + "/" + classifier_name(k));

            // Subjects present in every setup of this dimension.
            std::vector<std::string> common;
            for (const std::string& sid : rr.subject_ids) {
                bool everywhere = true;
                for (ClassifierKind k : cfg.classifiers) {
                    for (const Scenario& sc : cfg.scenarios) {
                        auto it = by_setup.find(
                            setup_key(dim, scenario_name(sc), classifier_name(k)));
                        bool found = false;
                        if (it != by_setup.end())
                            for (const SubjectResult& r : it->second)
                                if (r.subject_id == sid) found = true;
                        if (!found) everywhere = false;
                    }
                }
                if (everywhere) common.push_back(sid);
            }

            Table ct, cf;
            ct.columns = {"setup"};
            for (const std::string& s : setups) ct.columns.push_back(s);
            cf.columns = {"setup_a", "setup_b", "r", "p", "n"};

            if (common.size() >= 3 && setups.size() >= 2) {
                std::vector<std::vector<double>> lists(setups.size());
                std::size_t si = 0;
                for (ClassifierKind k : cfg.classifiers)
                    for (const Scenario& sc : cfg.scenarios) {
                        const auto& results =
                            by_setup[setup_key(dim, scenario_name(sc), classifier_name(k))];
                        for (const std::string& sid : common)
                            for (const SubjectResult& r : results)
                                if (r.subject_id == sid) lists[si].push_back(r.macro_f1);
                        ++si;
                    }
                auto matrix = pearson_matrix(lists);
                for (std::size_t a = 0; a < setups.size(); ++a) {
                    std::vector<std::string> row{setups[a]};
                    for (std::size_t b = 0; b < setups.size(); ++b) {
                        const CorrelationCell& cell = matrix[a][b];
                        row.push_back(cell.undefined ? "nan"
                                                     : fmt_fixed(cell.r) + stars_for(cell.p));
                        cf.add_row({setups[a], setups[b], fmt_full(cell.r), fmt_full(cell.p),
                                    std::to_string(cell.n)});
                    }
                    ct.add_row(row);
                }
            }
            std::string dn = dimension_name(dim);
            write_table(out_path(cfg, "correlation_" + dn + ".tsv"), ct);
            write_table(out_path(cfg, "correlation_" + dn + "_full.tsv"), cf);
        }
        return;
    }

    if (format == ReportFormat::Matrix) {
        for (Dimension dim : cfg.dimensions) {
            Table t, tf;
            t.columns = {"subject_id"};
            for (ClassifierKind k : cfg.classifiers)
                for (const Scenario& sc : cfg.scenarios)
                    t.columns.push_back(scenario_name(sc) + "/" + classifier_name(k));
            tf.columns = t.columns;

            for (const std::string& sid : rr.subject_ids) {
                std::vector<std::string> row{sid}, full{sid};
                for (ClassifierKind k : cfg.classifiers)
                    for (const Scenario& sc : cfg.scenarios) {
                        auto it = by_setup.find(
                            setup_key(dim, scenario_name(sc), classifier_name(k)));
                        double f1 = std::numeric_limits<double>::quiet_NaN();
                        if (it != by_setup.end())
                            for (const SubjectResult& r : it->second)
                                if (r.subject_id == sid) f1 = r.macro_f1;
                        row.push_back(fmt_fixed(f1));
                        full.push_back(fmt_full(f1));
                    }
                t.add_row(row);
                tf.add_row(full);
            }
            std::string dn = dimension_name(dim);
            write_table(out_path(cfg, "f1_matrix_" + dn + ".tsv"), t);
            write_table(out_path(cfg, "f1_matrix_" + dn + "_full.tsv"), tf);
        }
        return;
    }

    // Manifest.
    KvFile m;
    m.set("version", kVersion);
    m.set("config_hash", config_hash(cfg));
    for (const auto& [k, v] : config_to_kv(cfg).entries) m.set(k, v);
    write_kv_file(out_path(cfg, "manifest.txt"), m);
}

RunOutcome run_experiment(const ExperimentConfig& cfg) {
    if (cfg.scenarios.empty() || cfg.classifiers.empty() || cfg.dimensions.empty())
        config_fail("experiment needs scenarios, classifiers and dimensions");
    fs::create_directories(cfg.out_dir);

    // 1. Dataset.
    std::vector<TrialRecord> raw;
    if (cfg.flavor == DatasetFlavor::Synthetic && cfg.dataset_path.empty())
        raw = generate_synthetic_dataset(cfg.synth, cfg.seed).trials;
    else
        raw = load_dataset(cfg.dataset_path, cfg.flavor).trials;

    // 2. Exclusion screening against the union of scenario requirements.
    std::set<Channel> required_set;
    for (const Scenario& s : cfg.scenarios)
        for (Channel ch : required_channels(s)) required_set.insert(ch);
    std::vector<Channel> required(required_set.begin(), required_set.end());

    auto [kept, excl_report] =
        apply_exclusions(raw, cfg.min_class_fraction, required, cfg.tie_high);
    raw.clear();
    raw.shrink_to_fit();
    write_exclusions_file(cfg, excl_report);

    // 3. Group by subject (kept is sorted by subject/video already).
    std::vector<SubjectTrials> subjects;
    for (const TrialRecord& t : kept) {
        if (subjects.empty() || subjects.back().id != t.subject_id) {
            subjects.push_back({});
            subjects.back().id = t.subject_id;
        }
        subjects.back().trials.push_back(&t);
    }
    for (SubjectTrials& s : subjects) {
        for (int d = 0; d < 2; ++d) {
            Dimension dim = static_cast<Dimension>(d);
            for (const TrialRecord* t : s.trials)
                s.labels[d].push_back(
                    binarize_rating(rating_for(t->ratings, dim), dim, cfg.tie_high));
        }
    }

    RunResults rr;
    for (const SubjectTrials& s : subjects) rr.subject_ids.push_back(s.id);

    // 4. (scenario x subject) work items.
    std::size_t n_scen = cfg.scenarios.size(), n_subj = subjects.size();
    std::size_t n_dims = cfg.dimensions.size(), n_clf = cfg.classifiers.size();
    std::vector<ItemSlot> slots(n_scen * n_subj);

    FeatureOptions fopts;
    fopts.ibi_screen = cfg.ibi_screen;

    parallel_items(slots.size(), cfg.jobs, [&](std::size_t i) {
        std::size_t si = i / n_subj, ui = i % n_subj;
        const Scenario& sc = cfg.scenarios[si];
        const SubjectTrials& subj = subjects[ui];
        ItemSlot& slot = slots[i];
        slot.results.assign(n_dims, std::vector<std::optional<SubjectResult>>(n_clf));
        slot.setup_errors.assign(n_dims, std::vector<std::string>(n_clf));
        slot.selections.resize(n_dims);
        try {
            SubjectMatrix m;
            m.subject_id = subj.id;
            for (const TrialRecord* t : subj.trials) {
                FeatureVector fv = assemble_features(*t, sc, cfg.extended_features, fopts);
                if (slot.feature_names.empty()) slot.feature_names = fv.names;
                m.video_ids.push_back(t->video_id);
                m.rows.push_back(std::move(fv.values));
            }
            for (std::size_t di = 0; di < n_dims; ++di) {
                Dimension dim = cfg.dimensions[di];
                m.labels = subj.labels[static_cast<int>(dim)];
                for (std::size_t ci = 0; ci < n_clf; ++ci) {
                    try {
                        auto* capture = ci == 0 ? &slot.selections[di] : nullptr;
                        slot.results[di][ci] = run_subject_matrix(
                            m, dim, scenario_name(sc),
                            make_clf_config(cfg, cfg.classifiers[ci]), cfg.selection, capture);
                    } catch (const std::exception& e) {
                        slot.setup_errors[di][ci] = e.what();
                    }
                }
            }
        } catch (const std::exception& e) {
            slot.error = e.what();
        }
    });

    // 5. Deterministic collection.
    std::map<std::string, std::vector<std::string>> scenario_feature_names;
    for (std::size_t si = 0; si < n_scen; ++si) {
        std::string sname = scenario_name(cfg.scenarios[si]);
        for (std::size_t ui = 0; ui < n_subj; ++ui) {
            ItemSlot& slot = slots[si * n_subj + ui];
            if (!slot.error.empty()) {
                rr.failures.push_back("scenario=" + sname + " subject=" + subjects[ui].id +
                                      ": " + slot.error);
                continue;
            }
            if (!slot.feature_names.empty() && !scenario_feature_names.count(sname))
                scenario_feature_names[sname] = slot.feature_names;
            for (std::size_t di = 0; di < n_dims; ++di)
                for (std::size_t ci = 0; ci < n_clf; ++ci) {
                    if (slot.results[di][ci]) {
                        rr.subjects.push_back(*slot.results[di][ci]);
                    } else {
                        rr.failures.push_back(
                            "scenario=" + sname + " subject=" + subjects[ui].id +
                            " dimension=" + dimension_name(cfg.dimensions[di]) +
                            " classifier=" + classifier_name(cfg.classifiers[ci]) + ": " +
                            slot.setup_errors[di][ci]);
                    }
                }
        }
    }

    // 6. Baselines over every kept subject.
    std::vector<std::pair<std::string, std::vector<BinaryLabel>>> label_sets[2];
    for (const SubjectTrials& s : subjects)
        for (int d = 0; d < 2; ++d) label_sets[d].emplace_back(s.id, s.labels[d]);
    for (Dimension dim : cfg.dimensions) {
        int d = static_cast<int>(dim);
        rr.baselines[d] = run_baselines(label_sets[d], dim, cfg.seed);
    }

    // 7. Selection report: per (dimension, scenario, feature) frequency/score.
    {
        Table t;
        t.columns = {"dimension", "scenario",  "feature", "folds",
                     "selected",  "frequency", "mean_score"};
        Table detail;
        detail.columns = {"dimension", "scenario", "subject_id", "video_id",
                          "feature",   "score",    "selected"};
        for (std::size_t di = 0; di < n_dims; ++di) {
            Dimension dim = cfg.dimensions[di];
            for (std::size_t si = 0; si < n_scen; ++si) {
                std::string sname = scenario_name(cfg.scenarios[si]);
                auto names_it = scenario_feature_names.find(sname);
                if (names_it == scenario_feature_names.end()) continue;
                const auto& names = names_it->second;

                std::vector<std::size_t> folds(names.size(), 0), chosen(names.size(), 0);
                std::vector<double> score_sum(names.size(), 0.0);
                for (std::size_t ui = 0; ui < n_subj; ++ui) {
                    const ItemSlot& slot = slots[si * n_subj + ui];
                    if (!slot.error.empty()) continue;
                    for (const FoldSelection& fs : slot.selections[di]) {
                        if (fs.scores.size() != names.size()) continue;
                        std::vector<bool> sel(names.size(), false);
                        for (std::size_t j : fs.selected)
                            if (j < sel.size()) sel[j] = true;
                        for (std::size_t f = 0; f < names.size(); ++f) {
                            ++folds[f];
                            score_sum[f] += fs.scores[f];
                            if (sel[f]) ++chosen[f];
                            if (cfg.selection_detail)
                                detail.add_row({dimension_name(dim), sname, subjects[ui].id,
                                                fs.video_id, names[f], fmt_full(fs.scores[f]),
                                                sel[f] ? "1" : "0"});
                        }
                    }
                }
                for (std::size_t f = 0; f < names.size(); ++f) {
                    double freq = folds[f] ? static_cast<double>(chosen[f]) /
                                                 static_cast<double>(folds[f])
                                           : std::numeric_limits<double>::quiet_NaN();
                    double mean_score = folds[f] ? score_sum[f] / static_cast<double>(folds[f])
                                                 : std::numeric_limits<double>::quiet_NaN();
                    t.add_row({dimension_name(dim), sname, names[f], std::to_string(folds[f]),
                               std::to_string(chosen[f]), fmt_fixed(freq),
                               fmt_full(mean_score)});
                }
            }
        }
        write_table(out_path(cfg, "selection.tsv"), t);
        if (cfg.selection_detail) write_table(out_path(cfg, "selection_detail.tsv"), detail);
    }

    // 8. Intermediates + reports.
    write_subjects_file(cfg, rr);
    write_baselines_file(cfg, rr);
    write_failures_file(cfg, rr);
    emit_report(rr, cfg, ReportFormat::Table);
    emit_report(rr, cfg, ReportFormat::Matrix);
    emit_report(rr, cfg, ReportFormat::Manifest);

    RunOutcome outcome;
    outcome.exit_code = rr.subjects.empty() ? 3 : (rr.failures.empty() ? 0 : 2);
    outcome.results = std::move(rr);
    return outcome;
}

void emit_report_from_store(const std::string& out_dir) {
    KvFile manifest = load_kv_file((fs::path(out_dir) / "manifest.txt").string());
    ExperimentConfig cfg = config_from_kv(manifest);
    cfg.out_dir = out_dir;

    RunResults rr;

    Table subjects = read_table((fs::path(out_dir) / "subjects.tsv").string());
    auto col = [](const Table& t, const std::string& name) {
        for (std::size_t j = 0; j < t.columns.size(); ++j)
            if (t.columns[j] == name) return j;
        throw Error(ErrorCode::ParseError, "stored table misses column '" + name + "'");
    };
    std::size_t c_sid = col(subjects, "subject_id"), c_dim = col(subjects, "dimension"),
                c_sc = col(subjects, "scenario"), c_clf = col(subjects, "classifier"),
                c_acc = col(subjects, "accuracy"), c_f1 = col(subjects, "macro_f1"),
                c_tp = col(subjects, "tp"), c_fp = col(subjects, "fp"),
                c_fn = col(subjects, "fn"), c_tn = col(subjects, "tn"),
                c_ff = col(subjects, "fold_failures");
    for (const auto& row : subjects.rows) {
        SubjectResult r;
        r.subject_id = row[c_sid];
        r.dimension = parse_dimension(row[c_dim]);
        r.scenario = row[c_sc];
        r.classifier = row[c_clf];
        r.accuracy = std::stod(row[c_acc]);
        r.macro_f1 = std::stod(row[c_f1]);
        r.confusion.tp = std::stol(row[c_tp]);
        r.confusion.fp = std::stol(row[c_fp]);
        r.confusion.fn = std::stol(row[c_fn]);
        r.confusion.tn = std::stol(row[c_tn]);
        r.fold_failures = static_cast<std::size_t>(std::stoul(row[c_ff]));
        rr.subjects.push_back(std::move(r));
    }

    Table baselines = read_table((fs::path(out_dir) / "baselines.tsv").string());
    std::size_t b_dim = col(baselines, "dimension"), b_strat = col(baselines, "strategy"),
                b_sid = col(baselines, "subject_id"), b_acc = col(baselines, "accuracy"),
                b_f1 = col(baselines, "macro_f1");
    std::set<std::string> sid_set;
    for (const auto& row : baselines.rows) {
        int d = static_cast<int>(parse_dimension(row[b_dim]));
        BaselineStrategy strat;
        if (row[b_strat] == "random")
            strat = BaselineStrategy::Random;
        else if (row[b_strat] == "majority")
            strat = BaselineStrategy::Majority;
        else if (row[b_strat] == "ratio")
            strat = BaselineStrategy::Ratio;
        else
            throw Error(ErrorCode::ParseError, "unknown baseline strategy '" + row[b_strat] +
                                                   "'");
        auto& list = rr.baselines[d];
        if (list.empty() || list.back().strategy != strat) {
            BaselineOutcome b;
            b.strategy = strat;
            list.push_back(std::move(b));
        }
        BaselineOutcome& b = list.back();
        b.subject_ids.push_back(row[b_sid]);
        b.per_subject_accuracy.push_back(std::stod(row[b_acc]));
        b.per_subject_f1.push_back(std::stod(row[b_f1]));
        sid_set.insert(row[b_sid]);
    }
    for (auto& list : rr.baselines)
        for (BaselineOutcome& b : list) {
            b.mean_accuracy = mean_or_nan(b.per_subject_accuracy);
            b.mean_macro_f1 = mean_or_nan(b.per_subject_f1);
        }
    for (const SubjectResult& r : rr.subjects) sid_set.insert(r.subject_id);
    rr.subject_ids.assign(sid_set.begin(), sid_set.end());

    emit_report(rr, cfg, ReportFormat::Table);
    emit_report(rr, cfg, ReportFormat::Matrix);
    emit_report(rr, cfg, ReportFormat::Manifest);
}

}  // namespace emosig
