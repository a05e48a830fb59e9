#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rxeval/profiles.hpp"
#include "rxeval/record.hpp"
#include "rxeval/scorer.hpp"

namespace rxeval {

struct RetryPolicy {
    int max_attempts = 3;
    double backoff_base = 0.5;       // seconds before the first retry
    double backoff_multiplier = 2.0; // growth per attempt; +/-20% jitter applied
};

struct EndpointConfig {
    std::string base_url;        // e.g. http://127.0.0.1:8080
    std::string auth_token_env;  // env var holding the bearer token; empty = no auth
    std::string model_name;
    double request_timeout = 60.0;  // seconds
    int max_in_flight = 4;
    RetryPolicy retry;
};

/// Prompt ablation arms. A sends instructions only; B adds the doctor's
/// specialty; D adds patient age, gender and the doctor's 15 most frequent
/// medicines. (The second-epoch arm is B's prompt under a different run
/// label, so it needs no variant of its own.)
enum class PromptVariant { a, b, d };

std::string_view to_string(PromptVariant variant);
std::optional<PromptVariant> prompt_variant_from_string(std::string_view s);

inline constexpr std::size_t kTopMedicinesInPrompt = 15;

/// Prompt text lives in template files so ablations stay diffable; the
/// compiled-in defaults mirror the files shipped under prompts/.
/// Context-line templates substitute "{}" with the value.
struct PromptTemplates {
    std::string header;
    std::string specialty_line;
    std::string age_line;
    std::string gender_line;
    std::string top_medicines_line;

    static PromptTemplates builtin();
    /// Loads header.txt, context_specialty.txt, context_age.txt,
    /// context_gender.txt, context_top_medicines.txt from a directory.
    /// Throws InputError when a file is missing.
    static PromptTemplates load(const std::filesystem::path& dir);
};

/// Deterministic prompt text for one record: the instruction header plus
/// the variant's context lines. Absent fields are omitted, not
/// placeholdered. Variant D requires a profile with at least one ranked
/// medicine; throws std::invalid_argument otherwise.
std::string build_prompt(const MedicalRecordAnnotation& record, PromptVariant variant,
                         const DoctorProfile* profile,
                         const PromptTemplates& templates = PromptTemplates::builtin());

/// Durable per-record outcome, one JSON line per completion, append-only.
/// The latest line for a record wins, so a resumed run re-attempts only
/// records that never succeeded.
struct RecordOutcome {
    std::string record_id;
    bool succeeded = false;
    std::string reason;        // failure reason, empty on success
    std::string raw_response;  // model output, empty on failure
    int attempts = 0;
};

std::map<std::string, RecordOutcome> read_progress_ledger(
    const std::filesystem::path& path);

struct InferenceRun {
    std::string run_id;
    EndpointConfig endpoint;
    PromptVariant variant = PromptVariant::a;
    std::filesystem::path ledger_path;
    std::filesystem::path output_path;
    std::filesystem::path prompt_dir;  // empty = builtin templates
};

struct InferenceSummary {
    std::size_t total = 0;
    std::size_t attempted = 0;   // requested this run
    std::size_t succeeded = 0;   // cumulative, including prior runs
    std::size_t failed = 0;
    std::size_t resumed = 0;     // skipped because already succeeded
};

/// Drive the endpoint over every record that has not yet succeeded, with at
/// most max_in_flight requests outstanding, then write the prediction file
/// ordered by record_id. Progress is persisted after every record, so a
/// killed run loses at most in-flight work. Throws EndpointError when the
/// configured credential is missing; per-record failures are recorded in
/// the ledger and do not abort the run.
InferenceSummary run_inference(const Corpus& corpus, const InferenceRun& run);

struct ParsedOutput {
    std::vector<Medication> medications;
    std::size_t skipped_lines = 0;  // lines that yielded no medication
};

/// Parse a free-form model response into medications. Structured JSON
/// responses ({"medications": [...]}) are taken as-is; otherwise one
/// medication per line, name and dosage split on the first " - " or tab,
/// enumeration markers stripped, character-spaced parts collapsed. Total:
/// never throws, unparseable lines are counted and skipped.
ParsedOutput parse_model_output(std::string_view raw);

}  // namespace rxeval
