#include "rxeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace rxeval {

namespace {

std::map<std::string, std::int64_t> medicine_counts(const Corpus& corpus,
                                                    const NormalizationConfig& cfg) {
    std::map<std::string, std::int64_t> counts;
    for (const auto& rec : corpus.records()) {
        for (const auto& med : rec.medications) {
            ++counts[normalize_name(med.name, cfg)];
        }
    }
    return counts;
}

const std::string& row_label(const SpecialtyCount& row) { return row.label; }
const std::string& row_label(const MedicineFrequency& row) { return row.name; }

template <typename Row>
void sort_count_desc(std::vector<Row>& rows) {
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.count != b.count) return a.count > b.count;
        return row_label(a) < row_label(b);
    });
}

}  // namespace

CorpusSummary summarize(const Corpus& corpus, const NormalizationConfig& cfg) {
    CorpusSummary summary;
    summary.record_count = static_cast<std::int64_t>(corpus.size());

    std::set<std::string> doctors;
    std::set<std::string> specialties;
    std::map<std::string, std::int64_t> specialty_counts;
    for (const auto& rec : corpus.records()) {
        doctors.insert(rec.doctor_id);
        if (rec.specialty) specialties.insert(*rec.specialty);
        ++specialty_counts[rec.specialty.value_or(std::string(kNotMentionedSpecialty))];
    }
    summary.doctor_count = static_cast<std::int64_t>(doctors.size());
    summary.specialty_count = static_cast<std::int64_t>(specialties.size());

    for (const auto& [label, count] : specialty_counts) {
        summary.specialty_histogram.push_back({label, count});
    }
    sort_count_desc(summary.specialty_histogram);

    const auto counts = medicine_counts(corpus, cfg);
    summary.unique_medicine_count = static_cast<std::int64_t>(counts.size());
    for (const auto& [_, count] : counts) summary.medication_instance_count += count;
    for (const auto& [name, count] : counts) {
        summary.medicine_frequency.push_back(
            {name, count,
             static_cast<double>(count) /
                 static_cast<double>(summary.medication_instance_count)});
    }
    sort_count_desc(summary.medicine_frequency);
    return summary;
}

std::vector<FrequencyTableRow> frequency_table(const Corpus& corpus, bool log_scale,
                                               const NormalizationConfig& cfg) {
    const auto counts = medicine_counts(corpus, cfg);
    std::int64_t total = 0;
    for (const auto& [_, count] : counts) total += count;
    if (total == 0) {
        throw std::invalid_argument("corpus has no medication instances");
    }

    std::vector<MedicineFrequency> ordered;
    ordered.reserve(counts.size());
    for (const auto& [name, count] : counts) {
        ordered.push_back({name, count, static_cast<double>(count) / static_cast<double>(total)});
    }
    sort_count_desc(ordered);

    std::vector<FrequencyTableRow> rows;
    rows.reserve(ordered.size());
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const double fraction = ordered[i].pct;
        rows.push_back({i + 1, ordered[i].name,
                        log_scale ? std::log10(fraction * 100.0) : fraction});
    }
    return rows;
}

}  // namespace rxeval
