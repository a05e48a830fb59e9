#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "rxeval/errors.hpp"
#include "rxeval/profiles.hpp"
#include "rxeval/stats.hpp"
#include "rxeval/synth.hpp"
#include "rxeval/topn.hpp"
#include "rxeval/transcription.hpp"

using namespace rxeval;

namespace {

MedicalRecordAnnotation record_for(std::string id, std::string doctor,
                                   std::vector<Medication> meds,
                                   std::optional<std::string> specialty = {}) {
    MedicalRecordAnnotation rec;
    rec.record_id = std::move(id);
    rec.doctor_id = std::move(doctor);
    rec.specialty = std::move(specialty);
    rec.medications = std::move(meds);
    return rec;
}

}  // namespace

// --- transcription ----------------------------------------------------------

TEST_CASE("line_cer on the canonical examples") {
    CHECK(line_cer("hello", "hello") == doctest::Approx(0.0));
    CHECK(line_cer("kitten", "sitting") == doctest::Approx(0.5));
    CHECK(line_cer("abc", "") == doctest::Approx(1.0));
    CHECK_THROWS_AS(line_cer("", "x"), std::invalid_argument);
}

TEST_CASE("line_wer on the canonical examples") {
    CHECK(line_wer("the cat sat", "the cat sat") == doctest::Approx(0.0));
    CHECK(line_wer("the cat sat", "the cat sit") == doctest::Approx(1.0 / 3.0));
    CHECK(line_wer("a b", "") == doctest::Approx(1.0));
    CHECK_THROWS_AS(line_wer("   ", "x"), std::invalid_argument);
}

TEST_CASE("rates can exceed 1.0 for long hypotheses") {
    CHECK(line_cer("ab", "abcdef") == doctest::Approx(2.0));
}

TEST_CASE("fold_case compares case-insensitively") {
    TranscriptionConfig cfg{true};
    CHECK(line_cer("Hello", "hELLO", cfg) == doctest::Approx(0.0));
    CHECK(line_cer("Hello", "hELLO") > 0.0);
}

TEST_CASE("aggregate over a singleton equals the line metrics") {
    const std::vector<LinePair> pairs{{"p1", "kitten", "sitting"}};
    const auto rates = aggregate_rates(pairs);
    CHECK(rates.cer == doctest::Approx(line_cer("kitten", "sitting")));
    CHECK(rates.wer == doctest::Approx(line_wer("kitten", "sitting")));
}

TEST_CASE("aggregation is micro: sums of edits over sums of lengths") {
    const std::vector<LinePair> pairs{
        {"a", "0123456789", "0123456789"},  // 0 edits of 10
        {"b", "abcdefghij", "abcdefghij"},
    };
    std::vector<LinePair> modified = pairs;
    modified[0].hypothesis = "x123456789";                  // 1 edit
    modified[1].hypothesis = "xyzdefghij";                  // 3 edits
    const auto rates = aggregate_rates(modified);
    CHECK(rates.char_edits == 4);
    CHECK(rates.char_ref_len == 20);
    CHECK(rates.cer == doctest::Approx(0.2));
}

TEST_CASE("empty references are excluded and reported") {
    const std::vector<LinePair> pairs{
        {"good", "ref text", "ref text"},
        {"empty", "", "whatever"},
        {"blank", "   ", "whatever"},
    };
    const auto rates = aggregate_rates(pairs);
    CHECK(rates.excluded_ids == std::vector<std::string>{"empty", "blank"});
    CHECK(rates.cer == doctest::Approx(0.0));

    const std::vector<LinePair> all_bad{{"x", "", ""}};
    CHECK_THROWS_AS(aggregate_rates(all_bad), InputError);
}

TEST_CASE("aggregation is order-invariant and concatenation-additive") {
    std::mt19937 rng(37);
    std::vector<LinePair> pairs;
    for (int i = 0; i < 24; ++i) {
        std::string ref, hyp;
        for (int w = 0; w <= i % 4; ++w) {
            ref += (w ? " " : "");
            hyp += (w ? " " : "");
            for (int c = 0; c < 3 + (i + w) % 3; ++c) {
                ref += static_cast<char>('a' + (rng() % 6));
                hyp += static_cast<char>('a' + (rng() % 6));
            }
        }
        pairs.push_back({"p" + std::to_string(i), ref, hyp});
    }

    const auto whole = aggregate_rates(pairs);
    std::vector<LinePair> shuffled = pairs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto reordered = aggregate_rates(shuffled);
    CHECK(whole.cer == doctest::Approx(reordered.cer));
    CHECK(whole.wer == doctest::Approx(reordered.wer));

    for (std::size_t split : {std::size_t(1), std::size_t(7), std::size_t(12)}) {
        const std::vector<LinePair> left(pairs.begin(), pairs.begin() + split);
        const std::vector<LinePair> right(pairs.begin() + split, pairs.end());
        const auto l = aggregate_rates(left);
        const auto r = aggregate_rates(right);
        CHECK(l.char_edits + r.char_edits == whole.char_edits);
        CHECK(l.char_ref_len + r.char_ref_len == whole.char_ref_len);
        CHECK(l.word_edits + r.word_edits == whole.word_edits);
        CHECK(l.word_ref_len + r.word_ref_len == whole.word_ref_len);
    }
}

// --- top-N ------------------------------------------------------------------

TEST_CASE("topn coverage on the worked fixture") {
    std::vector<MedicalRecordAnnotation> records;
    std::vector<Medication> meds;
    for (int i = 0; i < 5; ++i) meds.push_back({"A", ""});
    for (int i = 0; i < 3; ++i) meds.push_back({"B", ""});
    for (int i = 0; i < 2; ++i) meds.push_back({"C", ""});
    records.push_back(record_for("r1", "doc", std::move(meds)));
    const Corpus corpus(std::move(records));
    const auto profiles = build_doctor_profiles(corpus);

    CHECK(topn_coverage(corpus, profiles, 1) == doctest::Approx(0.5));
    CHECK(topn_coverage(corpus, profiles, 3) == doctest::Approx(1.0));

    const auto curve = topn_curve(corpus, profiles, 3);
    REQUIRE(curve.points.size() == 3);
    CHECK(curve.points[0].coverage == doctest::Approx(0.5));
    CHECK(curve.points[1].coverage == doctest::Approx(0.8));
    CHECK(curve.points[2].coverage == doctest::Approx(1.0));
    CHECK(curve.total_instances == 10);
}

TEST_CASE("tie in counts resolves lexicographically") {
    std::vector<MedicalRecordAnnotation> records;
    records.push_back(record_for("r1", "d1",
                                 {{"A", ""}, {"A", ""}, {"A", ""}, {"A", ""}}));
    records.push_back(record_for("r2", "d2", {{"B", ""}, {"C", ""}}));
    const Corpus corpus(std::move(records));
    const auto profiles = build_doctor_profiles(corpus);
    // doctor 2's top-1 is B by the tie rule: covered = 4 (A) + 1 (B) of 6
    CHECK(topn_coverage(corpus, profiles, 1) == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("single doctor with a single medicine is constant 1.0") {
    std::vector<MedicalRecordAnnotation> records;
    records.push_back(record_for("r1", "d", {{"ONLY", ""}}));
    const Corpus corpus(std::move(records));
    const auto curve = topn_curve(corpus, build_doctor_profiles(corpus), 4);
    for (const auto& point : curve.points) {
        CHECK(point.coverage == doctest::Approx(1.0));
    }
}

TEST_CASE("missing doctor profile is fatal") {
    std::vector<MedicalRecordAnnotation> records;
    records.push_back(record_for("r1", "d", {{"A", ""}}));
    const Corpus corpus(std::move(records));
    CHECK_THROWS_AS(topn_coverage(corpus, {}, 1), std::invalid_argument);
}

TEST_CASE("coverage is monotone and saturates on synthetic corpora") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SynthConfig cfg;
        cfg.seed = seed;
        cfg.n_doctors = 4;
        cfg.n_records = 60;
        cfg.lexicon_size = 30;
        cfg.meds_min = 1;
        cfg.meds_max = 4;
        const Corpus corpus = generate_corpus(cfg);
        const auto profiles = build_doctor_profiles(corpus);

        std::size_t max_unique = 0;
        for (const auto& [_, profile] : profiles) {
            max_unique = std::max(max_unique, profile.ranked_medicines.size());
        }
        const auto curve = topn_curve(corpus, profiles, max_unique + 2);
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            CHECK(curve.points[i].coverage >= curve.points[i - 1].coverage);
        }
        CHECK(curve.points[max_unique - 1].coverage == doctest::Approx(1.0));
        if (max_unique >= 2) {
            // strictly below 1.0 before every doctor's list is covered only
            // when some doctor actually uses more medicines than N; at least
            // the terminal point must be exactly 1.0.
            CHECK(curve.points.back().coverage == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("per-doctor covered instances add up to the total") {
    SynthConfig cfg;
    cfg.seed = 5;
    cfg.n_doctors = 5;
    cfg.n_records = 80;
    cfg.lexicon_size = 40;
    const Corpus corpus = generate_corpus(cfg);
    const auto profiles = build_doctor_profiles(corpus);
    const std::size_t n = 3;

    // recount coverage per doctor with a brute-force pass
    std::int64_t covered = 0, total = 0;
    for (const auto& rec : corpus.records()) {
        const auto& profile = profiles.at(rec.doctor_id);
        const auto top = profile.top_medicines(n);
        for (const auto& med : rec.medications) {
            ++total;
            const std::string name = normalize_name(med.name);
            if (std::find(top.begin(), top.end(), name) != top.end()) ++covered;
        }
    }
    CHECK(topn_coverage(corpus, profiles, n) ==
          doctest::Approx(static_cast<double>(covered) / static_cast<double>(total)));
}

// --- corpus stats -----------------------------------------------------------

TEST_CASE("summarize counts records, doctors, specialties and medicines") {
    std::vector<MedicalRecordAnnotation> records;
    records.push_back(record_for("r1", "d1", {{"A", ""}, {"B", ""}}, "Physician"));
    records.push_back(record_for("r2", "d1", {{"A", ""}}, "Physician"));
    records.push_back(record_for("r3", "d2", {{"a", ""}}));  // no specialty
    const auto summary = summarize(Corpus(std::move(records)));

    CHECK(summary.record_count == 3);
    CHECK(summary.doctor_count == 2);
    CHECK(summary.specialty_count == 1);  // "Not Mentioned" is not a specialty
    CHECK(summary.unique_medicine_count == 2);
    CHECK(summary.medication_instance_count == 4);

    REQUIRE(summary.specialty_histogram.size() == 2);
    CHECK(summary.specialty_histogram[0].label == "Physician");
    CHECK(summary.specialty_histogram[0].count == 2);
    CHECK(summary.specialty_histogram[1].label == "Not Mentioned");
    CHECK(summary.specialty_histogram[1].count == 1);

    REQUIRE(summary.medicine_frequency.size() == 2);
    CHECK(summary.medicine_frequency[0].name == "A");
    CHECK(summary.medicine_frequency[0].count == 3);
    CHECK(summary.medicine_frequency[0].pct == doctest::Approx(0.75));

    double pct_sum = 0.0;
    for (const auto& row : summary.medicine_frequency) pct_sum += row.pct;
    CHECK(pct_sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("histogram reproduces synthetic specialty counts in order") {
    std::vector<MedicalRecordAnnotation> records;
    int next = 0;
    const auto add = [&](const char* specialty, int count) {
        for (int i = 0; i < count; ++i) {
            std::optional<std::string> s;
            if (std::string(specialty) != "Not Mentioned") s = specialty;
            records.push_back(record_for("r" + std::to_string(next++),
                                         "d" + std::to_string(next % 7),
                                         {{"X", ""}}, s));
        }
    };
    // scaled-down shape of the specialty table
    add("Physician", 79);
    add("Pediatrician", 68);
    add("Neurologist", 49);
    add("Gynecologist", 48);
    add("Not Mentioned", 43);
    add("Cardiologist", 37);

    const auto summary = summarize(Corpus(std::move(records)));
    REQUIRE(summary.specialty_histogram.size() == 6);
    const std::vector<std::string> expected{"Physician",    "Pediatrician",
                                            "Neurologist",  "Gynecologist",
                                            "Not Mentioned", "Cardiologist"};
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(summary.specialty_histogram[i].label == expected[i]);
    }
    std::int64_t total = 0;
    for (const auto& row : summary.specialty_histogram) total += row.count;
    CHECK(total == summary.record_count);
}

TEST_CASE("empty corpus summarizes to zeros") {
    const auto summary = summarize(Corpus());
    CHECK(summary.record_count == 0);
    CHECK(summary.medication_instance_count == 0);
    CHECK(summary.specialty_histogram.empty());
    CHECK(summary.medicine_frequency.empty());
}

TEST_CASE("a dominant medicine ranks first with its share") {
    std::vector<MedicalRecordAnnotation> records;
    std::vector<Medication> meds;
    for (int i = 0; i < 9; ++i) meds.push_back({"BIG", ""});
    meds.push_back({"SMALL", ""});
    records.push_back(record_for("r1", "d", std::move(meds)));
    const auto summary = summarize(Corpus(std::move(records)));
    CHECK(summary.medicine_frequency[0].name == "BIG");
    CHECK(summary.medicine_frequency[0].pct == doctest::Approx(0.9));
}

TEST_CASE("frequency_table emits ranks with linear or log values") {
    std::vector<MedicalRecordAnnotation> records;
    records.push_back(record_for(
        "r1", "d", {{"A", ""}, {"A", ""}, {"A", ""}, {"B", ""}}));
    const Corpus corpus(std::move(records));

    const auto linear = frequency_table(corpus, false);
    REQUIRE(linear.size() == 2);
    CHECK(linear[0].rank == 1);
    CHECK(linear[0].name == "A");
    CHECK(linear[0].value == doctest::Approx(0.75));
    CHECK(linear[1].value == doctest::Approx(0.25));

    const auto logged = frequency_table(corpus, true);
    CHECK(logged[0].value == doctest::Approx(std::log10(75.0)));
    CHECK(logged[1].value == doctest::Approx(std::log10(25.0)));

    CHECK_THROWS_AS(frequency_table(Corpus(), false), std::invalid_argument);
}

TEST_CASE("summaries are invariant under record permutation") {
    std::mt19937 rng(41);
    std::vector<MedicalRecordAnnotation> records;
    for (int i = 0; i < 25; ++i) {
        records.push_back(record_for("r" + std::to_string(i), "d" + std::to_string(i % 4),
                                     {{"M" + std::to_string(i % 6), ""}},
                                     i % 2 ? std::optional<std::string>("Physician")
                                           : std::nullopt));
    }
    auto shuffled = records;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);

    const auto a = summarize(Corpus(std::move(records)));
    const auto b = summarize(Corpus(std::move(shuffled)));
    CHECK(a.record_count == b.record_count);
    CHECK(a.doctor_count == b.doctor_count);
    REQUIRE(a.medicine_frequency.size() == b.medicine_frequency.size());
    for (std::size_t i = 0; i < a.medicine_frequency.size(); ++i) {
        CHECK(a.medicine_frequency[i].name == b.medicine_frequency[i].name);
        CHECK(a.medicine_frequency[i].count == b.medicine_frequency[i].count);
    }
}
