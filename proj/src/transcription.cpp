#include "rxeval/transcription.hpp"

#include <cctype>
#include <stdexcept>

#include "rxeval/errors.hpp"
#include "rxeval/normalize.hpp"

namespace rxeval {

namespace {

std::string fold(std::string_view text, bool fold_case) {
    std::string out(text);
    if (fold_case) {
        for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
}

struct PairCounts {
    std::uint64_t char_edits = 0, char_ref_len = 0;
    std::uint64_t word_edits = 0, word_ref_len = 0;
};

PairCounts count_pair(std::string_view reference, std::string_view hypothesis,
                      const TranscriptionConfig& cfg) {
    const std::string ref = fold(reference, cfg.fold_case);
    const std::string hyp = fold(hypothesis, cfg.fold_case);

    PairCounts counts;
    const auto ref_cps = utf8_codepoints(ref);
    const auto hyp_cps = utf8_codepoints(hyp);
    counts.char_edits = edit_distance_seq<std::uint32_t>(ref_cps, hyp_cps);
    counts.char_ref_len = ref_cps.size();

    const auto ref_tokens = tokenize(ref);
    const auto hyp_tokens = tokenize(hyp);
    counts.word_edits = edit_distance_seq<std::string>(ref_tokens, hyp_tokens);
    counts.word_ref_len = ref_tokens.size();
    return counts;
}

}  // namespace

double line_cer(std::string_view reference, std::string_view hypothesis,
                const TranscriptionConfig& cfg) {
    if (reference.empty()) {
        throw std::invalid_argument("line_cer: empty reference");
    }
    const PairCounts counts = count_pair(reference, hypothesis, cfg);
    return static_cast<double>(counts.char_edits) /
           static_cast<double>(counts.char_ref_len);
}

double line_wer(std::string_view reference, std::string_view hypothesis,
                const TranscriptionConfig& cfg) {
    const PairCounts counts = count_pair(reference, hypothesis, cfg);
    if (counts.word_ref_len == 0) {
        throw std::invalid_argument("line_wer: reference has no tokens");
    }
    return static_cast<double>(counts.word_edits) /
           static_cast<double>(counts.word_ref_len);
}

ErrorRates aggregate_rates(std::span<const LinePair> pairs,
                           const TranscriptionConfig& cfg) {
    ErrorRates rates;
    for (const auto& pair : pairs) {
        if (pair.reference.empty() || tokenize(pair.reference).empty()) {
            rates.excluded_ids.push_back(pair.id);
            continue;
        }
        const PairCounts counts = count_pair(pair.reference, pair.hypothesis, cfg);
        rates.char_edits += counts.char_edits;
        rates.char_ref_len += counts.char_ref_len;
        rates.word_edits += counts.word_edits;
        rates.word_ref_len += counts.word_ref_len;
    }
    if (rates.char_ref_len == 0) {
        throw InputError("aggregate_rates: no pair with a non-empty reference");
    }
    rates.cer = static_cast<double>(rates.char_edits) /
                static_cast<double>(rates.char_ref_len);
    rates.wer = static_cast<double>(rates.word_edits) /
                static_cast<double>(rates.word_ref_len);
    return rates;
}

}  // namespace rxeval
