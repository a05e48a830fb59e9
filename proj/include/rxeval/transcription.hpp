#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rxeval {

/// One reference/hypothesis transcript pair for a handwriting line.
struct LinePair {
    std::string id;
    std::string reference;
    std::string hypothesis;
};

struct TranscriptionConfig {
    bool fold_case = false;  // compare case-insensitively (ASCII)
};

/// Micro-aggregated character and word error rates. Rates can exceed 1.0
/// when hypotheses are much longer than references.
struct ErrorRates {
    double cer = 0.0;  // char_edits / char_ref_len
    double wer = 0.0;  // word_edits / word_ref_len
    std::uint64_t char_edits = 0;
    std::uint64_t char_ref_len = 0;
    std::uint64_t word_edits = 0;
    std::uint64_t word_ref_len = 0;
    std::vector<std::string> excluded_ids;  // pairs with an empty reference
};

/// Character error rate for one line: code-point edit distance over the
/// reference length. Throws std::invalid_argument on an empty reference.
double line_cer(std::string_view reference, std::string_view hypothesis,
                const TranscriptionConfig& cfg = {});

/// Word error rate for one line: token edit distance over the reference
/// token count (whitespace tokenization). Throws std::invalid_argument when
/// the reference has no tokens.
double line_wer(std::string_view reference, std::string_view hypothesis,
                const TranscriptionConfig& cfg = {});

/// Micro aggregation: sums of edit counts over sums of reference lengths.
/// Pairs whose reference is empty or tokenless are excluded and reported by
/// id. Throws InputError when no valid pair remains.
ErrorRates aggregate_rates(std::span<const LinePair> pairs,
                           const TranscriptionConfig& cfg = {});

}  // namespace rxeval
