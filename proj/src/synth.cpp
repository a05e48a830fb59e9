#include "rxeval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "rxeval/normalize.hpp"

namespace rxeval {

namespace {

// Deterministic sampling helpers on top of mt19937_64. Standard library
// distributions are implementation-defined, so they are avoided here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

    double next_unit() {  // uniform in [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool chance(double p) { return next_unit() < p; }

    // Knuth's product-of-uniforms method; fine for small means.
    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_unit();
        } while (p > limit);
        return k - 1;
    }

private:
    std::mt19937_64 engine_;
};

// Zipf(s) over ranks 1..n via CDF inversion.
class ZipfSampler {
public:
    ZipfSampler(int n, double s) : cdf_(static_cast<std::size_t>(n)) {
        double sum = 0.0;
        for (int i = 1; i <= n; ++i) {
            sum += 1.0 / std::pow(static_cast<double>(i), s);
            cdf_[static_cast<std::size_t>(i - 1)] = sum;
        }
        for (double& v : cdf_) v /= sum;
    }

    // Returns a 0-based rank.
    std::size_t sample(double unit) const {
        const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), unit);
        return static_cast<std::size_t>(std::min<std::ptrdiff_t>(
            it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
    }

private:
    std::vector<double> cdf_;
};

constexpr std::size_t kShuffleBlock = 16;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Per-doctor medicine ordering: the global lexicon order with each
// kShuffleBlock-sized block permuted by a doctor-specific stream. Computed
// on demand so no per-doctor permutation is materialized.
std::size_t doctor_medicine_at(std::uint64_t seed, std::size_t doctor,
                               std::size_t rank, std::size_t lexicon_size) {
    const std::size_t block = rank / kShuffleBlock;
    const std::size_t begin = block * kShuffleBlock;
    const std::size_t size = std::min(kShuffleBlock, lexicon_size - begin);

    std::size_t perm[kShuffleBlock];
    for (std::size_t i = 0; i < size; ++i) perm[i] = begin + i;
    Rng rng(splitmix64(seed ^ splitmix64(doctor * 0x10001 + block)));
    for (std::size_t i = size; i > 1; --i) {  // Fisher-Yates
        std::swap(perm[i - 1], perm[rng.below(i)]);
    }
    return perm[rank - begin];
}

std::string zero_padded(std::int64_t value, std::size_t width) {
    std::string digits = std::to_string(value);
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    return digits;
}

std::size_t digits_for(int max_value) {
    return std::to_string(std::max(max_value, 1)).size();
}

constexpr const char* kDoseAmounts[] = {"5",   "10",  "25",  "50", "100",
                                        "250", "500", "650", "1000"};
constexpr const char* kDoseUnits[] = {"MG", "ML", "MCG"};
constexpr const char* kDoseSchedules[] = {"1-0-1", "1-1-1", "0-0-1",
                                          "1-0-0", "2-0-2", ""};

std::string random_dosage(Rng& rng) {
    std::string dosage = kDoseAmounts[rng.below(std::size(kDoseAmounts))];
    dosage += kDoseUnits[rng.below(std::size(kDoseUnits))];
    const char* schedule = kDoseSchedules[rng.below(std::size(kDoseSchedules))];
    if (*schedule != '\0') {
        dosage += ' ';
        dosage += schedule;
    }
    return dosage;
}

constexpr std::string_view kCorruptAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

// Replace one character with a different one from the alphabet, so the
// corrupted string's similarity to the original is exactly 1 - 1/len.
std::string corrupt(const std::string& text, Rng& rng) {
    if (text.empty()) return text;
    std::string out = text;
    const std::size_t pos = rng.below(out.size());
    char replacement = out[pos];
    while (replacement == out[pos]) {
        replacement = kCorruptAlphabet[rng.below(kCorruptAlphabet.size())];
    }
    out[pos] = replacement;
    return out;
}

void validate(const SynthConfig& cfg) {
    if (cfg.n_doctors < 1) throw std::invalid_argument("n_doctors must be >= 1");
    if (cfg.n_records < 0) throw std::invalid_argument("n_records must be >= 0");
    if (cfg.lexicon_size < 1) throw std::invalid_argument("lexicon_size must be >= 1");
    if (cfg.zipf_s <= 0.0) throw std::invalid_argument("zipf_s must be > 0");
    if (cfg.meds_min < 1 || cfg.meds_min > cfg.meds_max) {
        throw std::invalid_argument("need 1 <= meds_min <= meds_max");
    }
    if (cfg.lexicon_size < cfg.meds_max) {
        throw std::invalid_argument("lexicon_size must be >= meds_max");
    }
    if (cfg.specialty_pool.empty()) {
        throw std::invalid_argument("specialty_pool must not be empty");
    }
}

}  // namespace

std::vector<std::string> synth_lexicon(int size) {
    const std::size_t width = digits_for(size);
    std::vector<std::string> lexicon;
    lexicon.reserve(static_cast<std::size_t>(size));
    for (int i = 1; i <= size; ++i) {
        lexicon.push_back("MED" + zero_padded(i, width));
    }
    return lexicon;
}

Corpus generate_corpus(const SynthConfig& cfg) {
    validate(cfg);

    const auto lexicon = synth_lexicon(cfg.lexicon_size);
    const ZipfSampler zipf(cfg.lexicon_size, cfg.zipf_s);
    Rng rng(cfg.seed);

    const std::size_t doctor_width = digits_for(cfg.n_doctors);
    const std::size_t record_width = digits_for(cfg.n_records);

    std::vector<MedicalRecordAnnotation> records;
    records.reserve(static_cast<std::size_t>(cfg.n_records));
    for (int r = 0; r < cfg.n_records; ++r) {
        MedicalRecordAnnotation rec;
        rec.record_id = "R" + zero_padded(r + 1, record_width);

        const auto doctor = static_cast<std::size_t>(
            rng.below(static_cast<std::uint64_t>(cfg.n_doctors)));
        rec.doctor_id = "D" + zero_padded(static_cast<std::int64_t>(doctor) + 1,
                                          doctor_width);
        const std::string& specialty =
            cfg.specialty_pool[doctor % cfg.specialty_pool.size()];
        if (specialty != kNotMentionedSpecialty) rec.specialty = specialty;

        if (rng.chance(0.9)) rec.patient_age = static_cast<int>(1 + rng.below(90));
        if (rng.chance(0.9)) {
            rec.patient_gender = static_cast<Gender>(rng.below(3));
        }

        const auto n_meds = static_cast<std::size_t>(
            cfg.meds_min + static_cast<int>(rng.below(
                               static_cast<std::uint64_t>(cfg.meds_max - cfg.meds_min + 1))));
        rec.medications.reserve(n_meds);
        for (std::size_t k = 0; k < n_meds; ++k) {
            const std::size_t rank = zipf.sample(rng.next_unit());
            const std::size_t med = doctor_medicine_at(
                cfg.seed, doctor, rank, static_cast<std::size_t>(cfg.lexicon_size));
            rec.medications.push_back({lexicon[med], random_dosage(rng)});
        }
        records.push_back(std::move(rec));
    }
    return Corpus(std::move(records));
}

std::vector<PredictionRecord> generate_predictions(const Corpus& corpus,
                                                   const ErrorModel& em,
                                                   std::uint64_t seed) {
    // Hallucinations draw from the corpus's own normalized name pool.
    std::set<std::string> name_set;
    for (const auto& rec : corpus.records()) {
        for (const auto& med : rec.medications) {
            name_set.insert(normalize_name(med.name));
        }
    }
    const std::vector<std::string> name_pool(name_set.begin(), name_set.end());

    Rng rng(seed);
    std::vector<PredictionRecord> predictions;
    predictions.reserve(corpus.size());
    for (const auto& rec : corpus.records()) {
        PredictionRecord pred;
        pred.record_id = rec.record_id;
        for (const auto& med : rec.medications) {
            if (rng.chance(em.drop_rate)) continue;
            Medication out = med;
            if (rng.chance(em.name_corrupt_rate)) out.name = corrupt(out.name, rng);
            if (rng.chance(em.dosage_corrupt_rate)) out.dosage = corrupt(out.dosage, rng);
            pred.medications.push_back(std::move(out));
        }
        if (!name_pool.empty()) {
            const int spurious = rng.poisson(em.hallucinate_rate);
            for (int s = 0; s < spurious; ++s) {
                pred.medications.push_back(
                    {name_pool[rng.below(name_pool.size())], random_dosage(rng)});
            }
        }
        predictions.push_back(std::move(pred));
    }
    return predictions;
}

}  // namespace rxeval
