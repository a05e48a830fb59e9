#pragma once

#include <string>
#include <vector>

#include "rxeval/record.hpp"

namespace rxeval {

/// Spam-filter knobs. The default policy rejects only records with no
/// medications; the duplicate and name-length checks are off.
struct SpamPolicy {
    bool require_medications = true;
    double max_duplicate_fraction = 1.0;  // fraction of a duplicate group kept; 1.0 disables
    int min_name_length = 1;              // shortest allowed medicine name
};

struct SpamRejection {
    std::string record_id;
    std::string reason;  // exactly one primary reason per record
};

struct SpamFilterResult {
    Corpus kept;
    std::vector<SpamRejection> rejected;
};

/// Partition a corpus into kept and rejected records. Never fails; a
/// pathological policy simply yields an empty kept set. Relative order is
/// preserved on both sides.
///
/// Duplicate groups are records with identical content (everything except
/// record_id) from the same doctor; at most ceil(fraction * group size)
/// of each group survive, earliest first.
SpamFilterResult filter_spam(const Corpus& corpus, const SpamPolicy& policy = {});

}  // namespace rxeval
