#include "rxeval/profiles.hpp"

#include <algorithm>

namespace rxeval {

std::vector<std::string> DoctorProfile::top_medicines(std::size_t n) const {
    const std::size_t count = std::min(n, ranked_medicines.size());
    return {ranked_medicines.begin(), ranked_medicines.begin() + count};
}

std::map<std::string, DoctorProfile> build_doctor_profiles(
    const Corpus& corpus, const NormalizationConfig& cfg) {
    std::map<std::string, DoctorProfile> profiles;

    for (const auto& rec : corpus.records()) {
        auto& profile = profiles[rec.doctor_id];
        if (profile.doctor_id.empty()) profile.doctor_id = rec.doctor_id;
        if (!profile.specialty && rec.specialty) profile.specialty = rec.specialty;
        for (const auto& med : rec.medications) {
            ++profile.medicine_counts[normalize_name(med.name, cfg)];
            ++profile.total_instances;
        }
    }

    for (auto& [_, profile] : profiles) {
        profile.ranked_medicines.reserve(profile.medicine_counts.size());
        for (const auto& [name, count] : profile.medicine_counts) {
            profile.ranked_medicines.push_back(name);
        }
        // medicine_counts iterates name-ascending; a stable sort on count
        // alone leaves ties lexicographic.
        std::stable_sort(profile.ranked_medicines.begin(),
                         profile.ranked_medicines.end(),
                         [&](const std::string& a, const std::string& b) {
                             return profile.medicine_counts.at(a) >
                                    profile.medicine_counts.at(b);
                         });
        profile.rank_by_name.reserve(profile.ranked_medicines.size());
        for (std::size_t i = 0; i < profile.ranked_medicines.size(); ++i) {
            profile.rank_by_name.emplace(profile.ranked_medicines[i], i);
        }
    }
    return profiles;
}

}  // namespace rxeval
