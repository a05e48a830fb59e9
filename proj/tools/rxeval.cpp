// rxeval: evaluation harness and dataset toolkit for handwritten-prescription
// information extraction. Every pipeline stage is a subcommand; reports are
// always written to files and runs are deterministic given inputs and seeds.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rxeval/corpus_io.hpp"
#include "rxeval/errors.hpp"
#include "rxeval/infer.hpp"
#include "rxeval/profiles.hpp"
#include "rxeval/reports.hpp"
#include "rxeval/scorer.hpp"
#include "rxeval/spam.hpp"
#include "rxeval/stats.hpp"
#include "rxeval/synth.hpp"
#include "rxeval/topn.hpp"
#include "rxeval/transcription.hpp"

namespace fs = std::filesystem;
using namespace rxeval;

namespace {

std::ofstream open_report(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path.string());
    return out;
}

void print_issues(const std::vector<LoadIssue>& issues) {
    for (const auto& issue : issues) {
        std::cout << "line " << issue.line << ": " << issue.message << "\n";
    }
}

struct ValidateArgs {
    std::string corpus_path;
    bool strict = false;
    std::string out_path;
};

int cmd_validate(const ValidateArgs& args) {
    const auto result =
        load_corpus(args.corpus_path, args.strict ? LoadMode::strict : LoadMode::lenient);
    print_issues(result.issues);
    std::cout << result.corpus.size() << " records, " << result.issues.size()
              << " errors\n";
    if (!args.out_path.empty()) {
        auto out = open_report(args.out_path);
        out << "records: " << result.corpus.size() << "\n";
        out << "errors: " << result.issues.size() << "\n";
        for (const auto& issue : result.issues) {
            out << "line " << issue.line << ": " << issue.message << "\n";
        }
    }
    return result.issues.empty() ? 0 : 1;
}

struct ScoreArgs {
    std::string corpus_path;
    std::string predictions_path;
    std::string mode = "exact";
    double tau_name = 0.8;
    double tau_dosage = 0.8;
    std::string out_dir = "score-out";
    std::string model_label = "model";
    bool strict = false;
};

int cmd_score(const ScoreArgs& args) {
    const auto mode = args.strict ? LoadMode::strict : LoadMode::lenient;
    const auto corpus = load_corpus(args.corpus_path, mode);
    print_issues(corpus.issues);
    const auto predictions = load_predictions(args.predictions_path, mode);
    print_issues(predictions.issues);

    MatchMode match_mode = args.mode == "fuzzy"
                               ? MatchMode::fuzzy(args.tau_name, args.tau_dosage)
                               : MatchMode::exact();

    const CorpusScore score =
        score_corpus(predictions.predictions, corpus.corpus, match_mode);
    const auto frequency = frequency_comparison(predictions.predictions, corpus.corpus);

    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);
    const ModelScore model{args.model_label, score};
    {
        auto out = open_report(out_dir / "score.json");
        out << score_report_json(model, match_mode);
    }
    {
        auto out = open_report(out_dir / "results.csv");
        write_results_csv(out, std::vector<ModelScore>{model});
    }
    {
        auto out = open_report(out_dir / "categories.csv");
        write_category_csv(out, std::vector<ModelScore>{model});
    }
    {
        auto out = open_report(out_dir / "frequency.csv");
        write_frequency_csv(out, frequency);
    }

    std::cout << args.model_label << ": P=" << format_fixed(score.precision * 100, 2)
              << "% R=" << format_fixed(score.recall * 100, 2)
              << "% F1=" << format_fixed(score.f1 * 100, 2) << "% (tp=" << score.tp
              << " fp=" << score.fp << " fn=" << score.fn << ")\n";
    return 0;
}

struct StatsArgs {
    std::string corpus_path;
    std::string out_dir = "stats-out";
    bool log_scale = false;
};

int cmd_stats(const StatsArgs& args) {
    const auto corpus = load_corpus(args.corpus_path);
    print_issues(corpus.issues);
    const CorpusSummary summary = summarize(corpus.corpus);

    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);
    {
        auto out = open_report(out_dir / "summary.json");
        out << "{\n"
            << "  \"records\": " << summary.record_count << ",\n"
            << "  \"doctors\": " << summary.doctor_count << ",\n"
            << "  \"specialties\": " << summary.specialty_count << ",\n"
            << "  \"unique_medicines\": " << summary.unique_medicine_count << ",\n"
            << "  \"medication_instances\": " << summary.medication_instance_count
            << "\n}\n";
    }
    {
        auto out = open_report(out_dir / "specialties.csv");
        write_specialty_csv(out, summary.specialty_histogram);
    }
    {
        auto out = open_report(out_dir / "medicine_frequency.csv");
        if (summary.medication_instance_count > 0) {
            const auto rows = frequency_table(corpus.corpus, args.log_scale);
            write_medicine_frequency_csv(out, rows, args.log_scale);
        } else {
            write_medicine_frequency_csv(out, {}, args.log_scale);
        }
    }
    std::cout << summary.record_count << " records, " << summary.doctor_count
              << " doctors, " << summary.unique_medicine_count << " medicines, "
              << summary.medication_instance_count << " instances\n";
    return 0;
}

struct TopnArgs {
    std::string corpus_path;
    std::size_t n_max = 15;
    std::string out_path = "topn.csv";
};

int cmd_topn(const TopnArgs& args) {
    const auto corpus = load_corpus(args.corpus_path);
    print_issues(corpus.issues);
    const auto profiles = build_doctor_profiles(corpus.corpus);
    const TopNCurve curve = topn_curve(corpus.corpus, profiles, args.n_max);
    auto out = open_report(args.out_path);
    write_topn_csv(out, curve);
    std::cout << "coverage at N=" << args.n_max << ": "
              << format_fixed(curve.points.back().coverage, 4) << " over "
              << curve.total_instances << " instances\n";
    return 0;
}

struct CerArgs {
    std::vector<std::string> pairs;  // label=path or path
    std::string corpus_path;
    std::string predictions_path;
    std::string label = "model";
    bool fold_case = false;
    std::string out_path = "rates.csv";
};

// The corpus/prediction pairing renders each record's medication list as a
// transcript: one NAME - DOSAGE line per medication, in record order.
std::string transcript_of(std::span<const Medication> meds) {
    std::string text;
    for (const auto& med : meds) {
        if (!text.empty()) text += '\n';
        text += med.name;
        if (!med.dosage.empty()) {
            text += " - ";
            text += med.dosage;
        }
    }
    return text;
}

int cmd_cer(const CerArgs& args) {
    const TranscriptionConfig cfg{args.fold_case};
    std::vector<LabeledRates> rows;

    for (const auto& spec : args.pairs) {
        std::string label = spec;
        std::string path = spec;
        if (const auto eq = spec.find('='); eq != std::string::npos) {
            label = spec.substr(0, eq);
            path = spec.substr(eq + 1);
        } else {
            label = fs::path(spec).stem().string();
        }
        const auto loaded = load_line_pairs(path);
        print_issues(loaded.issues);
        rows.push_back({label, aggregate_rates(loaded.pairs, cfg)});
    }

    if (!args.corpus_path.empty() && !args.predictions_path.empty()) {
        const auto corpus = load_corpus(args.corpus_path);
        const auto predictions = load_predictions(args.predictions_path);
        std::vector<LinePair> pairs;
        for (const auto& pred : predictions.predictions) {
            const auto* rec = corpus.corpus.find(pred.record_id);
            if (rec == nullptr) {
                throw InputError("prediction references unknown record_id: " +
                                 pred.record_id);
            }
            pairs.push_back({pred.record_id, transcript_of(rec->medications),
                             pred.raw_output.value_or(transcript_of(pred.medications))});
        }
        rows.push_back({args.label, aggregate_rates(pairs, cfg)});
    }

    if (rows.empty()) throw InputError("nothing to evaluate: pass --pairs or --corpus");

    auto out = open_report(args.out_path);
    write_rates_csv(out, rows);
    for (const auto& row : rows) {
        std::cout << row.label << ": CER=" << format_fixed(row.rates.cer, 4)
                  << " WER=" << format_fixed(row.rates.wer, 4);
        if (!row.rates.excluded_ids.empty()) {
            std::cout << " (" << row.rates.excluded_ids.size() << " pairs excluded)";
        }
        std::cout << "\n";
    }
    return 0;
}

struct SynthArgs {
    SynthConfig cfg;
    std::string out_path = "synth_corpus.jsonl";
    std::string predictions_path;
    ErrorModel em;
    std::uint64_t pred_seed = 2;
};

int cmd_synth(const SynthArgs& args) {
    const Corpus corpus = generate_corpus(args.cfg);
    save_corpus(corpus, args.out_path);
    std::cout << "wrote " << corpus.size() << " records to " << args.out_path << "\n";
    if (!args.predictions_path.empty()) {
        const auto predictions = generate_predictions(corpus, args.em, args.pred_seed);
        save_predictions(predictions, args.predictions_path);
        std::cout << "wrote " << predictions.size() << " predictions to "
                  << args.predictions_path << "\n";
    }
    return 0;
}

struct InferArgs {
    std::string corpus_path;
    InferenceRun run;
    std::string variant = "A";
    std::string out_path;
    std::string ledger_path;
    std::string prompt_dir;
    bool strict = false;
};

int cmd_infer(InferArgs& args) {
    const auto corpus = load_corpus(args.corpus_path,
                                    args.strict ? LoadMode::strict : LoadMode::lenient);
    print_issues(corpus.issues);
    const auto variant = prompt_variant_from_string(args.variant);
    if (!variant) throw InputError("unknown prompt variant: " + args.variant);
    args.run.variant = *variant;
    args.run.output_path = args.out_path;
    args.run.prompt_dir = args.prompt_dir;
    args.run.ledger_path =
        args.ledger_path.empty() ? args.out_path + ".progress" : args.ledger_path;

    const InferenceSummary summary = run_inference(corpus.corpus, args.run);
    std::cout << summary.succeeded << "/" << summary.total << " succeeded, "
              << summary.failed << " failed, " << summary.resumed
              << " reused from a previous run\n";
    if (summary.failed > 0) {
        std::cout << "rerun with the same --ledger to retry failed records\n";
        return static_cast<int>(ExitCode::endpoint);
    }
    return 0;
}

struct ReportArgs {
    std::vector<std::string> score_paths;
    std::string out_dir = "report-out";
};

int cmd_report(const ReportArgs& args) {
    std::vector<ModelScore> models;
    for (const auto& path : args.score_paths) {
        std::ifstream in(path);
        if (!in) throw InputError("cannot read file: " + path);
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        models.push_back(score_report_from_json(text));
    }
    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);
    {
        auto out = open_report(out_dir / "table1.csv");
        write_results_csv(out, models);
    }
    {
        auto out = open_report(out_dir / "table3.csv");
        write_category_csv(out, models);
    }
    std::cout << "wrote table1.csv and table3.csv for " << models.size()
              << " model(s) to " << args.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Handwritten-prescription extraction evaluation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config");
    int jobs = 0;
    app.add_option("--jobs", jobs, "Global worker cap (0 = per-module default)");

    ValidateArgs validate_args;
    auto* validate = app.add_subcommand("validate", "Validate a corpus file");
    validate->add_option("corpus", validate_args.corpus_path, "Corpus file (JSONL)")
        ->required();
    validate->add_flag("--strict", validate_args.strict, "Fail on the first bad line");
    validate->add_option("--out", validate_args.out_path, "Optional report file");

    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "Score predictions against a corpus");
    score->add_option("--corpus", score_args.corpus_path)->required();
    score->add_option("--predictions", score_args.predictions_path)->required();
    score->add_option("--mode", score_args.mode, "exact or fuzzy")
        ->check(CLI::IsMember({"exact", "fuzzy"}));
    score->add_option("--tau-name", score_args.tau_name, "Fuzzy name threshold");
    score->add_option("--tau-dosage", score_args.tau_dosage, "Fuzzy dosage threshold");
    score->add_option("--out", score_args.out_dir, "Report directory");
    score->add_option("--model-label", score_args.model_label, "Label in reports");
    score->add_flag("--strict", score_args.strict);

    StatsArgs stats_args;
    auto* stats = app.add_subcommand("stats", "Corpus summary statistics");
    stats->add_option("--corpus", stats_args.corpus_path)->required();
    stats->add_option("--out", stats_args.out_dir, "Report directory");
    stats->add_flag("--log-scale", stats_args.log_scale,
                    "Emit log10 of percentage frequencies");

    TopnArgs topn_args;
    auto* topn = app.add_subcommand(
        "topn", "Coverage of each doctor's top-N medicines");
    topn->add_option("--corpus", topn_args.corpus_path)->required();
    topn->add_option("--n-max", topn_args.n_max, "Largest N to evaluate");
    topn->add_option("--out", topn_args.out_path, "Output CSV");

    CerArgs cer_args;
    auto* cer = app.add_subcommand("cer", "Character/word error rates");
    cer->add_option("--pairs", cer_args.pairs,
                    "TSV file id<TAB>ref<TAB>hyp, as LABEL=PATH (repeatable)");
    cer->add_option("--corpus", cer_args.corpus_path,
                    "Score a prediction file as transcripts instead");
    cer->add_option("--predictions", cer_args.predictions_path);
    cer->add_option("--model-label", cer_args.label);
    cer->add_flag("--fold-case", cer_args.fold_case, "Case-insensitive rates");
    cer->add_option("--out", cer_args.out_path, "Output CSV");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
    synth->add_option("--seed", synth_args.cfg.seed);
    synth->add_option("--doctors", synth_args.cfg.n_doctors);
    synth->add_option("--records", synth_args.cfg.n_records);
    synth->add_option("--lexicon", synth_args.cfg.lexicon_size);
    synth->add_option("--zipf-s", synth_args.cfg.zipf_s);
    synth->add_option("--meds-min", synth_args.cfg.meds_min);
    synth->add_option("--meds-max", synth_args.cfg.meds_max);
    synth->add_option("--out", synth_args.out_path, "Corpus output file");
    synth->add_option("--predictions", synth_args.predictions_path,
                      "Also derive a prediction file");
    synth->add_option("--drop-rate", synth_args.em.drop_rate);
    synth->add_option("--name-corrupt-rate", synth_args.em.name_corrupt_rate);
    synth->add_option("--dosage-corrupt-rate", synth_args.em.dosage_corrupt_rate);
    synth->add_option("--hallucinate-rate", synth_args.em.hallucinate_rate);
    synth->add_option("--pred-seed", synth_args.pred_seed);

    InferArgs infer_args;
    auto* infer = app.add_subcommand("infer", "Drive an inference endpoint");
    infer->add_option("--corpus", infer_args.corpus_path)->required();
    infer->add_option("--endpoint", infer_args.run.endpoint.base_url,
                      "Base URL, e.g. http://127.0.0.1:8080")
        ->required();
    infer->add_option("--model", infer_args.run.endpoint.model_name)->required();
    infer->add_option("--variant", infer_args.variant, "Prompt variant: A, B or D");
    infer->add_option("--out", infer_args.out_path, "Prediction output file")
        ->required();
    infer->add_option("--ledger", infer_args.ledger_path,
                      "Progress ledger (default: <out>.progress)");
    infer->add_option("--run-id", infer_args.run.run_id);
    infer->add_option("--auth-env", infer_args.run.endpoint.auth_token_env,
                      "Env var holding the bearer token");
    infer->add_option("--timeout", infer_args.run.endpoint.request_timeout);
    infer->add_option("--max-in-flight", infer_args.run.endpoint.max_in_flight);
    infer->add_option("--retries", infer_args.run.endpoint.retry.max_attempts,
                      "Total attempts per record");
    infer->add_option("--backoff", infer_args.run.endpoint.retry.backoff_base);
    infer->add_option("--backoff-mult", infer_args.run.endpoint.retry.backoff_multiplier);
    infer->add_option("--prompt-dir", infer_args.prompt_dir,
                      "Directory with prompt template files");
    infer->add_flag("--strict", infer_args.strict);

    ReportArgs report_args;
    auto* report = app.add_subcommand(
        "report", "Merge score.json files into result tables");
    report->add_option("--score", report_args.score_paths, "score.json (repeatable)")
        ->required();
    report->add_option("--out", report_args.out_dir, "Report directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::input);
    }

    try {
        if (*validate) return cmd_validate(validate_args);
        if (*score) return cmd_score(score_args);
        if (*stats) return cmd_stats(stats_args);
        if (*topn) return cmd_topn(topn_args);
        if (*cer) return cmd_cer(cer_args);
        if (*synth) return cmd_synth(synth_args);
        if (*infer) {
            if (jobs > 0) {
                infer_args.run.endpoint.max_in_flight =
                    std::min(infer_args.run.endpoint.max_in_flight, jobs);
            }
            return cmd_infer(infer_args);
        }
        if (*report) return cmd_report(report_args);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::validation);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::input);
    } catch (const EndpointError& e) {
        std::cerr << "endpoint error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::endpoint);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::internal);
    }
    return 0;
}
