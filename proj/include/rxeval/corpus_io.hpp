#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rxeval/record.hpp"
#include "rxeval/scorer.hpp"
#include "rxeval/transcription.hpp"

namespace rxeval {

enum class LoadMode { lenient, strict };

struct LoadIssue {
    std::size_t line = 0;  // 1-based
    std::string message;
};

struct CorpusLoadResult {
    Corpus corpus;
    std::vector<LoadIssue> issues;  // skipped lines (lenient mode only)
};

/// Parse one corpus line. Throws ValidationError on a malformed record.
MedicalRecordAnnotation record_from_json_line(std::string_view line);

/// Serialize one record to a single JSON line (no trailing newline).
/// Unknown fields captured at load time are re-emitted.
std::string record_to_json_line(const MedicalRecordAnnotation& record);

/// Load a line-delimited corpus file. In lenient mode malformed lines are
/// skipped and reported; in strict mode the first malformed line throws
/// ValidationError. A duplicate record_id is fatal in both modes.
/// Throws InputError if the file cannot be read.
CorpusLoadResult load_corpus(const std::filesystem::path& path,
                             LoadMode mode = LoadMode::lenient);
CorpusLoadResult parse_corpus(std::istream& in, LoadMode mode = LoadMode::lenient);

void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

struct PredictionLoadResult {
    std::vector<PredictionRecord> predictions;
    std::vector<LoadIssue> issues;
};

PredictionRecord prediction_from_json_line(std::string_view line);
std::string prediction_to_json_line(const PredictionRecord& prediction);

PredictionLoadResult load_predictions(const std::filesystem::path& path,
                                      LoadMode mode = LoadMode::lenient);
void save_predictions(std::span<const PredictionRecord> predictions,
                      const std::filesystem::path& path);

struct LinePairsLoadResult {
    std::vector<LinePair> pairs;
    std::vector<LoadIssue> issues;
};

/// Load tab-separated transcription pairs: id<TAB>reference<TAB>hypothesis.
/// Anything after the second tab, tabs included, belongs to the hypothesis.
LinePairsLoadResult load_line_pairs(const std::filesystem::path& path,
                                    LoadMode mode = LoadMode::lenient);

}  // namespace rxeval
