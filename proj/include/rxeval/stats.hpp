#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rxeval/normalize.hpp"
#include "rxeval/record.hpp"

namespace rxeval {

struct SpecialtyCount {
    std::string label;  // "Not Mentioned" for records without a specialty
    std::int64_t count = 0;
};

struct MedicineFrequency {
    std::string name;
    std::int64_t count = 0;
    double pct = 0.0;  // fraction of all instances, sums to 1
};

/// Corpus-level headline counts and distributions. Medicine tallies use
/// normalized names; specialty_count excludes the "Not Mentioned" bucket.
struct CorpusSummary {
    std::int64_t record_count = 0;
    std::int64_t doctor_count = 0;
    std::int64_t specialty_count = 0;
    std::int64_t unique_medicine_count = 0;
    std::int64_t medication_instance_count = 0;
    std::vector<SpecialtyCount> specialty_histogram;   // count desc, label asc
    std::vector<MedicineFrequency> medicine_frequency; // count desc, name asc
};

CorpusSummary summarize(const Corpus& corpus, const NormalizationConfig& cfg = {});

struct FrequencyTableRow {
    std::size_t rank = 0;  // 1 = most frequent
    std::string name;
    double value = 0.0;  // share as a fraction, or log10 of the percentage
};

/// Rank/frequency table for the medicine distribution. With log_scale the
/// value column is log10 of the percentage (percent units, not fractions).
/// Throws std::invalid_argument when the corpus has no medication instances.
std::vector<FrequencyTableRow> frequency_table(const Corpus& corpus, bool log_scale,
                                               const NormalizationConfig& cfg = {});

}  // namespace rxeval
