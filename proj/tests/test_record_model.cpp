#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "rxeval/corpus_io.hpp"
#include "rxeval/errors.hpp"
#include "rxeval/profiles.hpp"
#include "rxeval/spam.hpp"

using namespace rxeval;

namespace {

const char* kThreeGoodLines =
    R"({"record_id":"r1","doctor_id":"d1","specialty":"Cardiologist","patient_age":42,"patient_gender":"male","medications":[{"name":"DOLO 650","dosage":"650MG 1-0-1"}],"categories":{"diagnosis":["FEVER"]},"image_ref":null})"
    "\n"
    R"({"record_id":"r2","doctor_id":"d1","specialty":null,"patient_age":null,"patient_gender":null,"medications":[],"categories":{},"image_ref":"img/r2.png"})"
    "\n"
    R"({"record_id":"r3","doctor_id":"d2","specialty":"Not Mentioned","medications":[{"name":"MONTAIR FX","dosage":""}],"custom_tag":{"a":1}})"
    "\n";

Corpus make_corpus(const std::string& text, LoadMode mode = LoadMode::lenient) {
    std::istringstream in(text);
    return parse_corpus(in, mode).corpus;
}

MedicalRecordAnnotation make_record(std::string id, std::string doctor,
                                    std::vector<Medication> meds) {
    MedicalRecordAnnotation rec;
    rec.record_id = std::move(id);
    rec.doctor_id = std::move(doctor);
    rec.medications = std::move(meds);
    return rec;
}

}  // namespace

TEST_CASE("empty input yields an empty corpus") {
    std::istringstream in("");
    const auto result = parse_corpus(in, LoadMode::strict);
    CHECK(result.corpus.empty());
    CHECK(result.issues.empty());
}

TEST_CASE("well-formed lines load with every field intact") {
    std::istringstream in(kThreeGoodLines);
    const auto result = parse_corpus(in, LoadMode::strict);
    REQUIRE(result.corpus.size() == 3);
    CHECK(result.issues.empty());

    const auto& r1 = result.corpus.records()[0];
    CHECK(r1.record_id == "r1");
    CHECK(r1.doctor_id == "d1");
    CHECK(r1.specialty == "Cardiologist");
    CHECK(r1.patient_age == 42);
    CHECK(r1.patient_gender == Gender::male);
    REQUIRE(r1.medications.size() == 1);
    CHECK(r1.medications[0] == Medication{"DOLO 650", "650MG 1-0-1"});
    CHECK(r1.categories.at(CategoryKind::diagnosis) ==
          std::vector<std::string>{"FEVER"});
    CHECK(!r1.image_ref);

    const auto& r2 = result.corpus.records()[1];
    CHECK(!r2.specialty);
    CHECK(!r2.patient_age);
    CHECK(r2.medications.empty());
    CHECK(r2.image_ref == "img/r2.png");

    // "Not Mentioned" is stored as an absent specialty.
    const auto& r3 = result.corpus.records()[2];
    CHECK(!r3.specialty);
    CHECK(r3.extras.count("custom_tag") == 1);

    // index covers every record
    for (const auto& rec : result.corpus.records()) {
        REQUIRE(result.corpus.find(rec.record_id) != nullptr);
        CHECK(result.corpus.find(rec.record_id)->record_id == rec.record_id);
    }
    CHECK(result.corpus.find("missing") == nullptr);
}

TEST_CASE("a line without medications is an error in strict mode, skipped in lenient") {
    const std::string text =
        R"({"record_id":"a","doctor_id":"d","medications":[]})"
        "\n"
        R"({"record_id":"b","doctor_id":"d"})"
        "\n"
        R"({"record_id":"c","doctor_id":"d","medications":[]})"
        "\n";

    std::istringstream strict_in(text);
    CHECK_THROWS_WITH_AS(parse_corpus(strict_in, LoadMode::strict),
                         doctest::Contains("line 2"), ValidationError);

    std::istringstream lenient_in(text);
    const auto result = parse_corpus(lenient_in, LoadMode::lenient);
    CHECK(result.corpus.size() == 2);
    REQUIRE(result.issues.size() == 1);
    CHECK(result.issues[0].line == 2);
}

TEST_CASE("malformed content is reported with its line number") {
    const std::string bad_lines[] = {
        "not json",
        R"(["array"])",
        R"({"doctor_id":"d","medications":[]})",
        R"({"record_id":"a","doctor_id":"d","medications":[{"name":"  "}]})",
        R"({"record_id":"a","doctor_id":"d","medications":[],"patient_age":-1})",
        R"({"record_id":"a","doctor_id":"d","medications":[],"patient_gender":"x"})",
        R"({"record_id":"a","doctor_id":"d","medications":[],"categories":{"bogus":[]}})",
        R"({"record_id":"a","doctor_id":"d","medications":[],"categories":{"medicine_name":[]}})",
    };
    for (const auto* line : bad_lines) {
        std::istringstream in(line);
        const auto result = parse_corpus(in, LoadMode::lenient);
        CHECK(result.corpus.empty());
        REQUIRE(result.issues.size() == 1);
        CHECK(result.issues[0].line == 1);
    }
}

TEST_CASE("duplicate record_id is fatal in both modes") {
    const std::string text =
        R"({"record_id":"a","doctor_id":"d","medications":[]})"
        "\n"
        R"({"record_id":"a","doctor_id":"d","medications":[]})"
        "\n";
    std::istringstream in1(text);
    CHECK_THROWS_AS(parse_corpus(in1, LoadMode::lenient), ValidationError);
    std::istringstream in2(text);
    CHECK_THROWS_AS(parse_corpus(in2, LoadMode::strict), ValidationError);
}

TEST_CASE("corpus round-trips through the line format") {
    std::istringstream in(kThreeGoodLines);
    const auto first = parse_corpus(in, LoadMode::strict);

    std::string serialized;
    for (const auto& rec : first.corpus.records()) {
        serialized += record_to_json_line(rec) + "\n";
    }
    std::istringstream again(serialized);
    const auto second = parse_corpus(again, LoadMode::strict);

    REQUIRE(second.corpus.size() == first.corpus.size());
    for (std::size_t i = 0; i < first.corpus.size(); ++i) {
        const auto& a = first.corpus.records()[i];
        const auto& b = second.corpus.records()[i];
        CHECK(a.record_id == b.record_id);
        CHECK(a.doctor_id == b.doctor_id);
        CHECK(a.specialty == b.specialty);
        CHECK(a.patient_age == b.patient_age);
        CHECK(a.patient_gender == b.patient_gender);
        CHECK(a.medications == b.medications);
        CHECK(a.categories == b.categories);
        CHECK(a.image_ref == b.image_ref);
        CHECK(a.extras == b.extras);
    }
}

TEST_CASE("filter_spam rejects records without medications by default") {
    std::vector<MedicalRecordAnnotation> records;
    records.push_back(make_record("a", "d1", {{"X", ""}}));
    records.push_back(make_record("b", "d1", {}));
    const auto result = filter_spam(Corpus(std::move(records)));
    CHECK(result.kept.size() == 1);
    CHECK(result.kept.records()[0].record_id == "a");
    REQUIRE(result.rejected.size() == 1);
    CHECK(result.rejected[0].record_id == "b");
    CHECK(result.rejected[0].reason == "no medications");
}

TEST_CASE("a disabled policy keeps everything") {
    std::vector<MedicalRecordAnnotation> records;
    records.push_back(make_record("a", "d1", {}));
    records.push_back(make_record("b", "d1", {{"X", ""}}));
    SpamPolicy policy;
    policy.require_medications = false;
    const auto result = filter_spam(Corpus(std::move(records)), policy);
    CHECK(result.kept.size() == 2);
    CHECK(result.rejected.empty());
}

TEST_CASE("duplicate groups are capped by the configured fraction") {
    std::vector<MedicalRecordAnnotation> records;
    for (int i = 0; i < 10; ++i) {
        records.push_back(make_record("r" + std::to_string(i), "d1",
                                      {{"SAME MED", "5MG"}}));
    }
    SpamPolicy policy;
    policy.max_duplicate_fraction = 0.5;
    const auto result = filter_spam(Corpus(std::move(records)), policy);
    CHECK(result.kept.size() == 5);
    CHECK(result.rejected.size() == 5);
    // earliest records survive
    CHECK(result.kept.records()[0].record_id == "r0");
    CHECK(result.kept.records()[4].record_id == "r4");
}

TEST_CASE("partition law holds for assorted policies") {
    std::vector<MedicalRecordAnnotation> records;
    for (int i = 0; i < 20; ++i) {
        std::vector<Medication> meds;
        if (i % 3 != 0) meds.push_back({"M" + std::to_string(i % 4), ""});
        records.push_back(make_record("r" + std::to_string(i),
                                      "d" + std::to_string(i % 2), std::move(meds)));
    }
    const Corpus corpus(std::move(records));
    for (const auto& policy :
         {SpamPolicy{}, SpamPolicy{false, 0.3, 1}, SpamPolicy{true, 0.0, 4}}) {
        const auto result = filter_spam(corpus, policy);
        CHECK(result.kept.size() + result.rejected.size() == corpus.size());
    }
}

TEST_CASE("min_name_length rejects short names") {
    std::vector<MedicalRecordAnnotation> records;
    records.push_back(make_record("a", "d", {{"AB", ""}}));
    records.push_back(make_record("b", "d", {{"ABCD", ""}}));
    SpamPolicy policy;
    policy.min_name_length = 3;
    const auto result = filter_spam(Corpus(std::move(records)), policy);
    CHECK(result.kept.size() == 1);
    CHECK(result.kept.records()[0].record_id == "b");
}

TEST_CASE("doctor profiles tally and rank normalized names") {
    std::vector<MedicalRecordAnnotation> records;
    records.push_back(make_record("1", "doc", {{"a", ""}, {"A ", "5MG"}}));
    records.push_back(make_record("2", "doc", {{"B", ""}}));
    const auto profiles = build_doctor_profiles(Corpus(std::move(records)));
    REQUIRE(profiles.size() == 1);
    const auto& profile = profiles.at("doc");
    CHECK(profile.medicine_counts.at("A") == 2);
    CHECK(profile.medicine_counts.at("B") == 1);
    CHECK(profile.ranked_medicines == std::vector<std::string>{"A", "B"});
    CHECK(profile.total_instances == 3);
}

TEST_CASE("profile ranking breaks count ties lexicographically") {
    std::vector<MedicalRecordAnnotation> records;
    records.push_back(make_record("1", "doc", {{"B", ""}, {"A", ""}}));
    const auto profiles = build_doctor_profiles(Corpus(std::move(records)));
    CHECK(profiles.at("doc").ranked_medicines == std::vector<std::string>{"A", "B"});
}

TEST_CASE("empty corpus yields no profiles") {
    CHECK(build_doctor_profiles(Corpus()).empty());
}

TEST_CASE("profile counts conserve the corpus total") {
    std::vector<MedicalRecordAnnotation> records;
    std::size_t total = 0;
    for (int i = 0; i < 30; ++i) {
        std::vector<Medication> meds;
        for (int k = 0; k <= i % 4; ++k) {
            meds.push_back({"M" + std::to_string((i + k) % 7), ""});
            ++total;
        }
        records.push_back(make_record("r" + std::to_string(i),
                                      "d" + std::to_string(i % 5), std::move(meds)));
    }
    const auto profiles = build_doctor_profiles(Corpus(std::move(records)));
    std::int64_t sum = 0;
    for (const auto& [_, profile] : profiles) sum += profile.total_instances;
    CHECK(sum == static_cast<std::int64_t>(total));
}
