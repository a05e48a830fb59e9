#include "rxeval/topn.hpp"

#include <stdexcept>

namespace rxeval {

namespace {

// Covered/total instance counts for one N over the whole corpus.
std::pair<std::int64_t, std::int64_t> coverage_counts(
    const Corpus& corpus, const std::map<std::string, DoctorProfile>& profiles,
    std::size_t n, const NormalizationConfig& cfg) {
    std::int64_t covered = 0, total = 0;
    for (const auto& rec : corpus.records()) {
        const auto it = profiles.find(rec.doctor_id);
        if (it == profiles.end()) {
            throw std::invalid_argument("no profile for doctor " + rec.doctor_id);
        }
        const auto& profile = it->second;
        for (const auto& med : rec.medications) {
            ++total;
            const auto rank = profile.rank_by_name.find(normalize_name(med.name, cfg));
            if (rank != profile.rank_by_name.end() && rank->second < n) ++covered;
        }
    }
    return {covered, total};
}

}  // namespace

double topn_coverage(const Corpus& corpus,
                     const std::map<std::string, DoctorProfile>& profiles,
                     std::size_t n, const NormalizationConfig& cfg) {
    const auto [covered, total] = coverage_counts(corpus, profiles, n, cfg);
    if (total == 0) {
        throw std::invalid_argument("corpus has no medication instances");
    }
    return static_cast<double>(covered) / static_cast<double>(total);
}

TopNCurve topn_curve(const Corpus& corpus,
                     const std::map<std::string, DoctorProfile>& profiles,
                     std::size_t n_max, const NormalizationConfig& cfg) {
    TopNCurve curve;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const auto [covered, total] = coverage_counts(corpus, profiles, n, cfg);
        if (total == 0) {
            throw std::invalid_argument("corpus has no medication instances");
        }
        curve.total_instances = total;
        curve.points.push_back(
            {n, static_cast<double>(covered) / static_cast<double>(total)});
    }
    return curve;
}

}  // namespace rxeval
