#include "rxeval/spam.hpp"

#include <cmath>
#include <unordered_map>

namespace rxeval {

namespace {

// Content fingerprint covering every field except record_id.
std::string content_key(const MedicalRecordAnnotation& rec) {
    std::string key = rec.doctor_id;
    key += '\x1f';
    key += rec.specialty.value_or("\x1e");
    key += '\x1f';
    key += rec.patient_age ? std::to_string(*rec.patient_age) : "\x1e";
    key += '\x1f';
    key += rec.patient_gender ? to_string(*rec.patient_gender) : "\x1e";
    for (const auto& med : rec.medications) {
        key += '\x1f';
        key += med.name;
        key += '\x1f';
        key += med.dosage;
    }
    for (const auto& [kind, values] : rec.categories) {
        key += '\x1f';
        key += category_key(kind);
        for (const auto& v : values) {
            key += '\x1f';
            key += v;
        }
    }
    key += '\x1f';
    key += rec.image_ref.value_or("\x1e");
    return key;
}

std::size_t trimmed_length(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return e - b;
}

}  // namespace

SpamFilterResult filter_spam(const Corpus& corpus, const SpamPolicy& policy) {
    const auto& records = corpus.records();
    std::vector<std::string> reasons(records.size());

    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (policy.require_medications && rec.medications.empty()) {
            reasons[i] = "no medications";
            continue;
        }
        if (policy.min_name_length > 1) {
            for (const auto& med : rec.medications) {
                if (trimmed_length(med.name) <
                    static_cast<std::size_t>(policy.min_name_length)) {
                    reasons[i] = "medicine name shorter than " +
                                 std::to_string(policy.min_name_length);
                    break;
                }
            }
        }
    }

    if (policy.max_duplicate_fraction < 1.0) {
        // Size each duplicate group over the records that survived the
        // per-record checks, then cap it.
        std::unordered_map<std::string, std::size_t> group_sizes;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (reasons[i].empty()) ++group_sizes[content_key(records[i])];
        }
        std::unordered_map<std::string, std::size_t> kept_so_far;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (!reasons[i].empty()) continue;
            const std::string key = content_key(records[i]);
            const std::size_t group = group_sizes[key];
            const auto cap = static_cast<std::size_t>(
                std::ceil(policy.max_duplicate_fraction * static_cast<double>(group)));
            if (kept_so_far[key] >= cap) {
                reasons[i] = "duplicate content beyond allowed fraction";
            } else {
                ++kept_so_far[key];
            }
        }
    }

    SpamFilterResult result;
    std::vector<MedicalRecordAnnotation> kept;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (reasons[i].empty()) {
            kept.push_back(records[i]);
        } else {
            result.rejected.push_back({records[i].record_id, reasons[i]});
        }
    }
    result.kept = Corpus(std::move(kept));
    return result;
}

}  // namespace rxeval
