#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rxeval/normalize.hpp"
#include "rxeval/record.hpp"

namespace rxeval {

/// Per-doctor medicine-frequency ranking over normalized names. Ranking is
/// by descending count with lexicographic tie-break, so it is deterministic
/// for a given corpus.
struct DoctorProfile {
    std::string doctor_id;
    std::optional<std::string> specialty;  // first one seen in record order
    std::map<std::string, std::int64_t> medicine_counts;
    std::vector<std::string> ranked_medicines;
    std::int64_t total_instances = 0;

    /// Position of a normalized medicine name in ranked_medicines.
    std::unordered_map<std::string, std::size_t> rank_by_name;

    /// The doctor's n most frequent medicines (all of them when fewer).
    std::vector<std::string> top_medicines(std::size_t n) const;
};

std::map<std::string, DoctorProfile> build_doctor_profiles(
    const Corpus& corpus, const NormalizationConfig& cfg = {});

}  // namespace rxeval
