#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rxeval/scorer.hpp"
#include "rxeval/stats.hpp"
#include "rxeval/topn.hpp"
#include "rxeval/transcription.hpp"

namespace rxeval {

/// RFC-4180-style escaping: quote when the value contains a comma, quote
/// or newline; embedded quotes are doubled.
std::string csv_escape(std::string_view value);
void csv_row(std::ostream& out, std::span<const std::string> cells);

/// Fixed-point formatting used in all report files, e.g. format_fixed(2.0/3, 4)
/// -> "0.6667".
std::string format_fixed(double value, int decimals);
/// Shortest round-trip formatting for full-precision columns.
std::string format_full(double value);

/// One scored model as read back from a score report file.
struct ModelScore {
    std::string label;
    CorpusScore score;
};

std::string score_report_json(const ModelScore& model, const MatchMode& mode);
ModelScore score_report_from_json(const std::string& text);

/// Model / Precision % / Recall % / F1 % rows, one per model.
void write_results_csv(std::ostream& out, std::span<const ModelScore> models);

/// Category rows in canonical order, one F1 % column per model.
void write_category_csv(std::ostream& out, std::span<const ModelScore> models);

/// medicine, target_pct, predicted_pct rows (fractions, full precision).
void write_frequency_csv(std::ostream& out, std::span<const FrequencyRow> rows);

/// N, coverage rows.
void write_topn_csv(std::ostream& out, const TopNCurve& curve);

/// Specialty histogram rows.
void write_specialty_csv(std::ostream& out, std::span<const SpecialtyCount> rows);

/// rank, medicine, share rows; the value column is log10 of the percentage
/// when log_scale was requested.
void write_medicine_frequency_csv(std::ostream& out,
                                  std::span<const FrequencyTableRow> rows,
                                  bool log_scale);

/// model, cer, wer rows.
struct LabeledRates {
    std::string label;
    ErrorRates rates;
};
void write_rates_csv(std::ostream& out, std::span<const LabeledRates> rows);

}  // namespace rxeval
