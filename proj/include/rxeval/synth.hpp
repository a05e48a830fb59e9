#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rxeval/record.hpp"
#include "rxeval/scorer.hpp"

namespace rxeval {

/// Seeded synthetic-corpus shape. Outputs are pure functions of this
/// config: the same seed always yields byte-identical files.
struct SynthConfig {
    std::uint64_t seed = 1;
    int n_doctors = 10;
    int n_records = 100;
    int lexicon_size = 50;
    double zipf_s = 1.1;  // rank-frequency skew, > 0
    int meds_min = 1;
    int meds_max = 5;
    std::vector<std::string> specialty_pool = {
        "Physician",     "Pediatrician", "Neurologist",
        "Gynecologist",  "Not Mentioned", "Cardiologist",
    };
};

/// Prediction corruption rates; the analytic oracle behind scorer
/// calibration. Corruption is a single random character substitution, so a
/// corrupted name of length L has similarity exactly 1 - 1/L.
struct ErrorModel {
    double drop_rate = 0.0;            // target medication omitted
    double name_corrupt_rate = 0.0;
    double dosage_corrupt_rate = 0.0;  // empty dosages stay empty
    double hallucinate_rate = 0.0;     // Poisson mean of spurious meds per record
};

/// The synthetic brand-name lexicon ("MED0001"...); index order is the
/// global popularity order.
std::vector<std::string> synth_lexicon(int size);

/// Generate a corpus: doctors take specialties round-robin from the pool,
/// each record's doctor is drawn uniformly, and medicines are drawn from a
/// Zipf(zipf_s) distribution over a per-doctor block-shuffled ordering of
/// the lexicon (so doctors rank medicines differently while the global
/// rank-frequency shape stays Zipf). Throws std::invalid_argument on a
/// config that violates its own invariants.
Corpus generate_corpus(const SynthConfig& cfg);

/// Derive predictions from targets under the error model. Spurious
/// medications are drawn from the corpus's own name pool. Deterministic per
/// (corpus, error model, seed).
std::vector<PredictionRecord> generate_predictions(const Corpus& corpus,
                                                   const ErrorModel& em,
                                                   std::uint64_t seed);

}  // namespace rxeval
