#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rxeval {

/// One prescribed (name, dosage) pair; the atomic unit of scoring.
/// The name is non-empty after trimming. An empty dosage means "no dosage
/// recorded" and is never represented as an absent field.
struct Medication {
    std::string name;
    std::string dosage;

    bool operator==(const Medication&) const = default;
};

/// The six annotation categories, in canonical reporting order.
enum class CategoryKind {
    pii,
    vitals,
    medicine_name,
    medicine_properties,
    diagnostic_test,
    diagnosis,
};

inline constexpr std::array<CategoryKind, 6> kCategoryKinds = {
    CategoryKind::pii,           CategoryKind::vitals,
    CategoryKind::medicine_name, CategoryKind::medicine_properties,
    CategoryKind::diagnostic_test, CategoryKind::diagnosis,
};

/// Human-readable label ("Medicine Name").
std::string_view category_label(CategoryKind kind);

/// Snake-case key used in the line format ("medicine_properties").
std::string_view category_key(CategoryKind kind);

/// Reverse of category_key. "medicine_name" is intentionally not accepted:
/// medicine names live in the medications list, never in the categories map.
std::optional<CategoryKind> category_from_key(std::string_view key);

enum class Gender { male, female, other };

std::string_view to_string(Gender g);
std::optional<Gender> gender_from_string(std::string_view s);

/// Label under which records with no recorded specialty are reported.
inline constexpr std::string_view kNotMentionedSpecialty = "Not Mentioned";

using CategoryValues = std::map<CategoryKind, std::vector<std::string>>;

/// One ground-truth annotated record.
struct MedicalRecordAnnotation {
    std::string record_id;
    std::string doctor_id;
    std::optional<std::string> specialty;  // absent when not mentioned
    std::optional<int> patient_age;        // years, non-negative
    std::optional<Gender> patient_gender;
    std::vector<Medication> medications;
    CategoryValues categories;
    std::optional<std::string> image_ref;  // opaque pass-through

    /// Unknown top-level fields, preserved on round-trip: key -> compact
    /// JSON text of the original value.
    std::map<std::string, std::string> extras;
};

/// An immutable, indexed set of records. Record order is preserved; the
/// index maps record_id to position. Safe to share across threads after
/// construction.
class Corpus {
public:
    Corpus() = default;

    /// Throws ValidationError on a duplicate record_id.
    explicit Corpus(std::vector<MedicalRecordAnnotation> records);

    const std::vector<MedicalRecordAnnotation>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    const MedicalRecordAnnotation* find(std::string_view record_id) const;
    std::optional<std::size_t> position(std::string_view record_id) const;

private:
    std::vector<MedicalRecordAnnotation> records_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace rxeval
