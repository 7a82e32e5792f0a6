// emosig command-line front end.
//
//   emosig validate --data DIR [--flavor F]           schema + plausibility check
//   emosig synth    --out DIR [--config F] [--seed N] write a synthetic dataset
//   emosig run      --config F [--seed N] [--out DIR] [--jobs N] full experiment
//   emosig report   --out DIR                         re-emit reports from a run dir
//
// Exit codes: 0 success, 1 config/usage/schema error, 2 run finished with
// partial failures, 3 run produced no results at all.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "emosig/dataset_io.hpp"
#include "emosig/experiment.hpp"
#include "emosig/signal_model.hpp"
#include "emosig/synthetic.hpp"

namespace {

int usage_error_code(const emosig::Error& e) {
    switch (e.code()) {
        case emosig::ErrorCode::ConfigError:
        case emosig::ErrorCode::ParseError:
        case emosig::ErrorCode::SynthSpecError:
        case emosig::ErrorCode::InvalidRating:
            return 1;
        default:
            return 3;
    }
}

emosig::KvFile load_config_or_empty(const std::string& path) {
    if (path.empty()) return emosig::KvFile{};
    return emosig::load_kv_file(path);
}

int cmd_validate(const std::string& data_dir, const std::string& flavor_text) {
    emosig::DatasetFlavor flavor = emosig::parse_flavor(flavor_text);
    emosig::Dataset ds = emosig::load_dataset(data_dir, flavor);

    // Check every trial against each scenario the flavor supports; findings
    // repeat across scenarios so dedupe on (channel, issue, index).
    bool deapish = flavor == emosig::DatasetFlavor::DeapLike;
    std::vector<emosig::Scenario> scenarios;
    if (deapish) {
        scenarios.push_back(emosig::parse_scenario("bvp+all@deap"));
    } else {
        for (const char* name :
             {"ecg+all", "bvp+all", "scg+all", "ecg+rsp", "bvp+rsp", "scg+rsp", "scg+adr"})
            scenarios.push_back(emosig::parse_scenario(name));
    }

    std::size_t bad_trials = 0, findings_total = 0;
    for (const emosig::TrialRecord& trial : ds.trials) {
        std::vector<std::string> lines;
        if (trial.faulty)
            lines.push_back("[-] marked faulty in exclusions.csv");
        for (const emosig::Scenario& sc : scenarios) {
            emosig::ValidationReport report = emosig::validate_trial(trial, sc);
            for (const emosig::ValidationFinding& f : report.findings) {
                std::string line = "[" + emosig::channel_name(f.channel) + "] " + f.issue;
                if (f.index >= 0) line += " (sample " + std::to_string(f.index) + ")";
                if (std::find(lines.begin(), lines.end(), line) == lines.end())
                    lines.push_back(line);
            }
        }
        if (lines.empty()) continue;
        ++bad_trials;
        for (const std::string& line : lines) {
            ++findings_total;
            std::printf("%s/%s: %s\n", trial.subject_id.c_str(), trial.video_id.c_str(),
                        line.c_str());
        }
    }
    std::printf("validate: %zu trials checked, %zu with findings (%zu findings)\n",
                ds.trials.size(), bad_trials, findings_total);
    return 0;
}

int cmd_synth(const std::string& out_dir, const std::string& config_path,
              std::optional<std::uint64_t> seed_override) {
    emosig::KvFile kv = load_config_or_empty(config_path);
    emosig::SynthSpec spec = emosig::synth_spec_from_kv(kv);
    std::uint64_t seed = seed_override ? *seed_override
                                       : static_cast<std::uint64_t>(
                                             emosig::kv_int(kv, "run.seed", 1));
    emosig::SynthResult result = emosig::generate_synthetic_dataset(spec, seed);
    emosig::write_dataset(out_dir, result.trials);
    emosig::write_truth((std::filesystem::path(out_dir) / "truth.tsv").string(), result.truth);
    std::printf("synth: wrote %zu trials for %zu subjects to %s\n", result.trials.size(),
                static_cast<std::size_t>(spec.subjects), out_dir.c_str());
    return 0;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed_override,
            const std::string& out_override, int jobs_override,
            const std::vector<std::string>& scenario_filter,
            const std::vector<std::string>& classifier_filter) {
    emosig::KvFile kv = load_config_or_empty(config_path);
    if (seed_override) kv.set("run.seed", std::to_string(*seed_override));
    if (!kv.has("run.seed")) {
        std::fprintf(stderr, "run: a seed is required (run.seed in the config or --seed)\n");
        return 1;
    }
    if (!scenario_filter.empty()) {
        std::string joined;
        for (const std::string& s : scenario_filter) joined += (joined.empty() ? "" : ",") + s;
        kv.set("run.scenarios", joined);
    }
    if (!classifier_filter.empty()) {
        std::string joined;
        for (const std::string& s : classifier_filter) joined += (joined.empty() ? "" : ",") + s;
        kv.set("run.classifiers", joined);
    }
    emosig::ExperimentConfig cfg = emosig::config_from_kv(kv);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (jobs_override > 0) cfg.jobs = jobs_override;

    emosig::RunOutcome outcome = emosig::run_experiment(cfg);
    std::printf("run: %zu subject results, %zu failures -> %s\n",
                outcome.results.subjects.size(), outcome.results.failures.size(),
                cfg.out_dir.c_str());
    for (const std::string& f : outcome.results.failures)
        std::fprintf(stderr, "run: failure: %s\n", f.c_str());
    return outcome.exit_code;
}

int cmd_report(const std::string& out_dir) {
    emosig::emit_report_from_store(out_dir);
    std::printf("report: refreshed reports in %s\n", out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"emosig: single-trial emotion classification from chest-worn signals"};
    app.require_subcommand(1);

    // validate
    std::string v_data, v_flavor = "emowear";
    CLI::App* validate = app.add_subcommand("validate", "check a dataset directory");
    validate->add_option("--data", v_data, "dataset root directory")->required();
    validate->add_option("--flavor", v_flavor, "dataset flavor (emowear|deap|synthetic)");

    // synth
    std::string s_out, s_config;
    std::optional<std::uint64_t> s_seed;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--out", s_out, "output directory")->required();
    synth->add_option("--config", s_config, "key = value config file with synth.* keys");
    synth->add_option("--seed", s_seed, "master seed (overrides run.seed)");

    // run
    std::string r_config, r_out;
    std::optional<std::uint64_t> r_seed;
    int r_jobs = 0;
    std::vector<std::string> r_scenarios, r_classifiers;
    CLI::App* run = app.add_subcommand("run", "run the full experiment");
    run->add_option("--config", r_config, "key = value config file");
    run->add_option("--seed", r_seed, "master seed (overrides run.seed)");
    run->add_option("--out", r_out, "output directory (overrides run.out_dir)");
    run->add_option("--jobs", r_jobs, "worker threads (overrides run.jobs)");
    run->add_option("--scenario", r_scenarios, "restrict to these scenarios");
    run->add_option("--classifier", r_classifiers, "restrict to these classifiers");

    // report
    std::string p_out;
    CLI::App* report = app.add_subcommand("report", "re-emit reports from a run directory");
    report->add_option("--out", p_out, "run output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (validate->parsed()) return cmd_validate(v_data, v_flavor);
        if (synth->parsed()) return cmd_synth(s_out, s_config, s_seed);
        if (run->parsed())
            return cmd_run(r_config, r_seed, r_out, r_jobs, r_scenarios, r_classifiers);
        if (report->parsed()) return cmd_report(p_out);
    } catch (const emosig::Error& e) {
        std::fprintf(stderr, "emosig: %s\n", e.what());
        return usage_error_code(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "emosig: %s\n", e.what());
        return 3;
    }
    return 1;
}
