#include "rxeval/record.hpp"

#include "rxeval/errors.hpp"

namespace rxeval {

std::string_view category_label(CategoryKind kind) {
    switch (kind) {
        case CategoryKind::pii: return "PII";
        case CategoryKind::vitals: return "Vitals";
        case CategoryKind::medicine_name: return "Medicine Name";
        case CategoryKind::medicine_properties: return "Medicine Properties";
        case CategoryKind::diagnostic_test: return "Diagnostic Test";
        case CategoryKind::diagnosis: return "Diagnosis";
    }
    return "?";
}

std::string_view category_key(CategoryKind kind) {
    switch (kind) {
        case CategoryKind::pii: return "pii";
        case CategoryKind::vitals: return "vitals";
        case CategoryKind::medicine_name: return "medicine_name";
        case CategoryKind::medicine_properties: return "medicine_properties";
        case CategoryKind::diagnostic_test: return "diagnostic_test";
        case CategoryKind::diagnosis: return "diagnosis";
    }
    return "?";
}

std::optional<CategoryKind> category_from_key(std::string_view key) {
    for (CategoryKind kind : kCategoryKinds) {
        if (kind == CategoryKind::medicine_name) continue;
        if (key == category_key(kind)) return kind;
    }
    return std::nullopt;
}

std::string_view to_string(Gender g) {
    switch (g) {
        case Gender::male: return "male";
        case Gender::female: return "female";
        case Gender::other: return "other";
    }
    return "?";
}

std::optional<Gender> gender_from_string(std::string_view s) {
    if (s == "male") return Gender::male;
    if (s == "female") return Gender::female;
    if (s == "other") return Gender::other;
    return std::nullopt;
}

Corpus::Corpus(std::vector<MedicalRecordAnnotation> records)
    : records_(std::move(records)) {
    index_.reserve(records_.size());
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto [it, inserted] = index_.emplace(records_[i].record_id, i);
        if (!inserted) {
            throw ValidationError("duplicate record_id: " + records_[i].record_id);
        }
    }
}

const MedicalRecordAnnotation* Corpus::find(std::string_view record_id) const {
    const auto it = index_.find(std::string(record_id));
    return it == index_.end() ? nullptr : &records_[it->second];
}

std::optional<std::size_t> Corpus::position(std::string_view record_id) const {
    const auto it = index_.find(std::string(record_id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

}  // namespace rxeval
