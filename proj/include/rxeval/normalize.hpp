#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rxeval {

struct NormalizationConfig {
    bool case_fold = true;            // fold ASCII letters to uppercase
    bool collapse_whitespace = true;  // squeeze whitespace runs to one space
    std::string strip_punctuation = ".,;:()";
    double fuzzy_threshold = 1.0;     // 1.0 = exact comparison
};

/// Canonicalize a medicine name: trim, uppercase, drop punctuation from the
/// configured set, collapse whitespace. Idempotent on its own output.
std::string normalize_name(std::string_view raw, const NormalizationConfig& cfg = {});

/// Canonicalize a dosage string: trim, collapse whitespace, uppercase tokens
/// and unify unit aliases (mg/Mg -> MG, ml/mL -> ML, mcg/µg -> MCG, g -> G,
/// iu -> IU). Numeric tokens pass through verbatim. Idempotent.
std::string normalize_dosage(std::string_view raw, const NormalizationConfig& cfg = {});

/// Character-spacing encoding: one space between the letters of a word, two
/// spaces between words ("MONTAIR FX" -> "M O N T A I R  F X").
/// The input must be in canonical whitespace form (no double spaces, no
/// leading/trailing space); throws std::invalid_argument otherwise.
std::string space_out(std::string_view text);

/// Inverse of space_out. Throws std::invalid_argument on a malformed
/// encoding (a run of three or more spaces, or leading/trailing space).
std::string unspace(std::string_view spaced);

/// Decode UTF-8 into code points. Invalid bytes are passed through one byte
/// per code point rather than rejected.
std::vector<std::uint32_t> utf8_codepoints(std::string_view text);

/// Unit-cost Levenshtein distance over any equality-comparable sequence.
template <typename T>
std::size_t edit_distance_seq(std::span<const T> a, std::span<const T> b) {
    if (a.size() < b.size()) return edit_distance_seq(b, a);
    if (b.empty()) return a.size();

    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;

    for (std::size_t i = 0; i < a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i + 1;
        for (std::size_t j = 0; j < b.size(); ++j) {
            const std::size_t up = row[j + 1];
            if (a[i] == b[j]) {
                row[j + 1] = diag;
            } else {
                row[j + 1] = 1 + std::min(diag, std::min(up, row[j]));
            }
            diag = up;
        }
    }
    return row[b.size()];
}

/// Levenshtein distance between two strings, computed over code points.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// 1 - edit_distance / max length, in [0,1]; 1.0 when both strings are empty.
double similarity(std::string_view a, std::string_view b);

}  // namespace rxeval
