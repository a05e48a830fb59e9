#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rxeval/normalize.hpp"
#include "rxeval/profiles.hpp"
#include "rxeval/record.hpp"

namespace rxeval {

/// Coverage of a hypothesized model that recognizes a medication iff it is
/// among the prescribing doctor's N most frequent medicines. Coverage is
/// non-decreasing in N and reaches 1.0 once N covers every doctor's unique
/// medicines.
struct TopNCurve {
    struct Point {
        std::size_t n = 0;
        double coverage = 0.0;
    };
    std::vector<Point> points;
    std::int64_t total_instances = 0;
};

/// Fraction of all medication instances whose normalized name is in the
/// prescribing doctor's top N. Throws std::invalid_argument when a doctor
/// has no profile or the corpus has no medication instances.
double topn_coverage(const Corpus& corpus,
                     const std::map<std::string, DoctorProfile>& profiles,
                     std::size_t n, const NormalizationConfig& cfg = {});

TopNCurve topn_curve(const Corpus& corpus,
                     const std::map<std::string, DoctorProfile>& profiles,
                     std::size_t n_max, const NormalizationConfig& cfg = {});

}  // namespace rxeval
