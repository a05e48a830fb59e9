#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "rxeval/normalize.hpp"

using namespace rxeval;

TEST_CASE("normalize_name applies the canonicalization rules") {
    CHECK(normalize_name("  montair   fx. ") == "MONTAIR FX");
    CHECK(normalize_name("DOLO 650") == "DOLO 650");
    CHECK(normalize_name("") == "");
    CHECK(normalize_name("dolo-650") == "DOLO-650");  // hyphen is not stripped
    CHECK(normalize_name("a.b,c;d:e(f)g") == "ABCDEFG");
}

TEST_CASE("normalize_name honors the config") {
    NormalizationConfig cfg;
    cfg.case_fold = false;
    CHECK(normalize_name("montair  fx", cfg) == "montair fx");
    cfg.collapse_whitespace = false;
    CHECK(normalize_name(" a  b ", cfg) == "a  b");
    cfg.strip_punctuation = "";
    CHECK(normalize_name("a.b", cfg) == "a.b");
}

TEST_CASE("normalize_dosage unifies units and keeps numbers verbatim") {
    CHECK(normalize_dosage("500 mg  1-0-1") == "500 MG 1-0-1");
    CHECK(normalize_dosage("") == "");
    CHECK(normalize_dosage("5ML") == "5ML");
    CHECK(normalize_dosage("2 ml") == "2 ML");
    CHECK(normalize_dosage("10 Mg") == "10 MG");
    CHECK(normalize_dosage("50 \xc2\xb5g daily") == "50 MCG DAILY");
    CHECK(normalize_dosage("3 iu") == "3 IU");
    CHECK(normalize_dosage("0.5 g") == "0.5 G");  // dosage keeps the decimal point
}

TEST_CASE("normalizers are idempotent on random strings") {
    std::mt19937 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const std::string raw = oracle::random_word(
            rng, 0, 16, "abcXYZ 019.,;:()-\xc2\xb5" "g\t");
        const std::string name1 = normalize_name(raw);
        CHECK(normalize_name(name1) == name1);
        const std::string dose1 = normalize_dosage(raw);
        CHECK(normalize_dosage(dose1) == dose1);
    }
}

TEST_CASE("space_out matches the published encoding") {
    CHECK(space_out("MONTAIR FX") == "M O N T A I R  F X");
    CHECK(space_out("A") == "A");
    CHECK(space_out("AB CD") == "A B  C D");
    CHECK(space_out("") == "");
}

TEST_CASE("space_out rejects non-canonical whitespace") {
    CHECK_THROWS_AS(space_out("A  B"), std::invalid_argument);
    CHECK_THROWS_AS(space_out(" A"), std::invalid_argument);
    CHECK_THROWS_AS(space_out("A "), std::invalid_argument);
}

TEST_CASE("unspace inverts the encoding and rejects malformed input") {
    CHECK(unspace("M O N T A I R  F X") == "MONTAIR FX");
    CHECK(unspace("A") == "A");
    CHECK(unspace("A B  C D") == "AB CD");
    CHECK_THROWS_AS(unspace("A   B"), std::invalid_argument);
    CHECK_THROWS_AS(unspace(" A"), std::invalid_argument);
}

TEST_CASE("space_out/unspace round-trip on random canonical strings") {
    std::mt19937 rng(11);
    for (int i = 0; i < 10000; ++i) {
        const std::string text = oracle::random_spaceable_text(rng, 4);
        CHECK(unspace(space_out(text)) == text);
    }
}

TEST_CASE("space_out keeps multi-byte characters whole") {
    CHECK(space_out("\xc2\xb5g") == "\xc2\xb5 g");
    CHECK(unspace("\xc2\xb5 g") == "\xc2\xb5g");
}

TEST_CASE("edit_distance basics") {
    CHECK(edit_distance("kitten", "sitting") == 3);
    CHECK(edit_distance("", "abc") == 3);
    CHECK(edit_distance("abc", "") == 3);
    CHECK(edit_distance("same", "same") == 0);
}

TEST_CASE("edit_distance agrees with the naive recursion oracle") {
    std::mt19937 rng(13);
    for (int i = 0; i < 1500; ++i) {
        const std::string a = oracle::random_word(rng, 0, 8);
        const std::string b = oracle::random_word(rng, 0, 8);
        CHECK(edit_distance(a, b) == oracle::naive_edit_distance(a, b));
    }
}

TEST_CASE("edit_distance metric axioms") {
    std::mt19937 rng(17);
    for (int i = 0; i < 1500; ++i) {
        const std::string a = oracle::random_word(rng, 0, 12);
        const std::string b = oracle::random_word(rng, 0, 12);
        const std::string c = oracle::random_word(rng, 0, 12);
        const auto dab = edit_distance(a, b);
        CHECK(dab == edit_distance(b, a));
        CHECK(edit_distance(a, a) == 0);
        CHECK((dab == 0) == (a == b));
        CHECK(edit_distance(a, c) <= dab + edit_distance(b, c));
    }
}

TEST_CASE("similarity definition and bounds") {
    CHECK(similarity("ABCD", "ABCD") == doctest::Approx(1.0));
    CHECK(similarity("ABCD", "ABXD") == doctest::Approx(0.75));
    CHECK(similarity("", "") == doctest::Approx(1.0));
    CHECK(similarity("", "XY") == doctest::Approx(0.0));
    std::mt19937 rng(19);
    for (int i = 0; i < 500; ++i) {
        const std::string a = oracle::random_word(rng, 0, 10);
        const std::string b = oracle::random_word(rng, 0, 10);
        const double s = similarity(a, b);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        CHECK(s == doctest::Approx(similarity(b, a)));
    }
}
