#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rxeval/normalize.hpp"
#include "rxeval/record.hpp"

namespace rxeval {

/// One model output for one record.
struct PredictionRecord {
    std::string record_id;
    std::vector<Medication> medications;
    std::optional<std::string> raw_output;  // verbatim model response
    CategoryValues categories;
};

/// How predicted medications are compared against targets. A medication
/// matches only if BOTH its name and its dosage clear the mode's bar
/// (the whole-medication rule).
struct MatchMode {
    enum class Kind { exact, fuzzy };

    Kind kind = Kind::exact;
    double tau_name = 1.0;
    double tau_dosage = 1.0;

    static MatchMode exact() { return {}; }
    static MatchMode fuzzy(double tau_name, double tau_dosage) {
        return {Kind::fuzzy, tau_name, tau_dosage};
    }
};

/// Outcome of matching one record. Every prediction index and every target
/// index appears exactly once across the three lists.
struct MatchResult {
    std::vector<std::pair<std::size_t, std::size_t>> matched;  // (pred, target)
    std::vector<std::size_t> false_positives;  // unmatched prediction indices
    std::vector<std::size_t> false_negatives;  // unmatched target indices
};

struct CategoryScore {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;
    bool zero_support = true;  // no values on either side anywhere
};

/// Per-medicine tallies for the predicted-vs-target frequency comparison.
/// correct_count counts matched pairs whose normalized names agree exactly,
/// so it never exceeds either side's tally.
struct MedicineTally {
    std::int64_t target_count = 0;
    std::int64_t predicted_count = 0;
    std::int64_t correct_count = 0;
};

struct CorpusScore {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    double precision = 1.0;  // tp/(tp+fp), 1.0 when no positives asserted
    double recall = 1.0;     // tp/(tp+fn), 1.0 when no targets
    double f1 = 0.0;         // harmonic mean, 0 when p+r = 0

    // Macro (per-record average) values, reported alongside the micro ones.
    double macro_precision = 1.0;
    double macro_recall = 1.0;
    double macro_f1 = 0.0;

    std::map<CategoryKind, CategoryScore> per_category;
    std::map<std::string, MedicineTally> per_medicine;

    std::size_t records_scored = 0;
    std::size_t records_without_prediction = 0;
};

struct FrequencyRow {
    std::string medicine;
    double target_pct = 0.0;     // share of all target instances, in [0,1]
    double predicted_pct = 0.0;  // share of all predicted instances
};

/// precision/recall with the boundary conventions above, f1 from them.
void precision_recall_f1(std::int64_t tp, std::int64_t fp, std::int64_t fn,
                         double& precision, double& recall, double& f1);

/// Match one record's predictions against its targets.
///
/// Exact mode pairs medications whose normalized names AND normalized
/// dosages are equal (maximum multiset matching). Fuzzy mode computes a
/// maximum-cardinality matching over pairs with name similarity >= tau_name
/// and dosage similarity >= tau_dosage; cardinality ties are broken by
/// maximum total name similarity, then by lexicographically smallest
/// (prediction, target) index pairing. A correct name with a wrong dosage
/// yields one false positive and one false negative.
MatchResult match_record(std::span<const Medication> predictions,
                         std::span<const Medication> targets,
                         const MatchMode& mode,
                         const NormalizationConfig& cfg = {});

/// Micro-averaged corpus score: tp/fp/fn are summed over records, then
/// P/R/F1 are computed once. Corpus records without a prediction score as
/// all-false-negative. Throws InputError on an unknown or duplicated
/// prediction record_id.
CorpusScore score_corpus(std::span<const PredictionRecord> predictions,
                         const Corpus& corpus,
                         const MatchMode& mode,
                         const NormalizationConfig& cfg = {});

/// Per-category micro-averaged P/R/F1 over normalized-text multisets.
/// The Medicine Name multiset is derived from medication names and the
/// Medicine Properties multiset from dosages (plus any explicit
/// medicine_properties values); the other categories come from the
/// categories map.
std::map<CategoryKind, CategoryScore> score_categories(
    std::span<const PredictionRecord> predictions,
    const Corpus& corpus,
    const NormalizationConfig& cfg = {});

/// Target vs predicted share per medicine, sorted by descending target
/// share then name. Identity predictions put every row on the diagonal.
std::vector<FrequencyRow> frequency_comparison(
    std::span<const PredictionRecord> predictions,
    const Corpus& corpus,
    const NormalizationConfig& cfg = {});

}  // namespace rxeval
