#include "rxeval/corpus_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rxeval/errors.hpp"

namespace rxeval {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kGenderValues = "\"male\", \"female\" or \"other\"";

std::string trimmed(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string require_string(const ordered_json& obj, const char* field) {
    const auto it = obj.find(field);
    if (it == obj.end()) {
        throw ValidationError(std::string("missing field '") + field + "'");
    }
    if (!it->is_string()) {
        throw ValidationError(std::string("field '") + field + "' must be a string");
    }
    return it->get<std::string>();
}

std::vector<Medication> parse_medications(const ordered_json& obj) {
    const auto it = obj.find("medications");
    if (it == obj.end()) throw ValidationError("missing field 'medications'");
    if (!it->is_array()) throw ValidationError("field 'medications' must be an array");

    std::vector<Medication> meds;
    meds.reserve(it->size());
    for (const auto& entry : *it) {
        if (!entry.is_object()) {
            throw ValidationError("medication entries must be objects");
        }
        Medication med;
        const auto name_it = entry.find("name");
        if (name_it == entry.end() || !name_it->is_string()) {
            throw ValidationError("medication missing string field 'name'");
        }
        med.name = name_it->get<std::string>();
        if (trimmed(med.name).empty()) {
            throw ValidationError("medication name is empty");
        }
        const auto dose_it = entry.find("dosage");
        if (dose_it != entry.end() && !dose_it->is_null()) {
            if (!dose_it->is_string()) {
                throw ValidationError("medication field 'dosage' must be a string");
            }
            med.dosage = dose_it->get<std::string>();
        }
        meds.push_back(std::move(med));
    }
    return meds;
}

CategoryValues parse_categories(const ordered_json& obj) {
    CategoryValues categories;
    const auto it = obj.find("categories");
    if (it == obj.end() || it->is_null()) return categories;
    if (!it->is_object()) throw ValidationError("field 'categories' must be an object");

    for (const auto& [key, values] : it->items()) {
        const auto kind = category_from_key(key);
        if (!kind) {
            throw ValidationError("unknown category key '" + key + "'");
        }
        if (!values.is_array()) {
            throw ValidationError("category '" + key + "' must be an array of strings");
        }
        std::vector<std::string> parsed;
        parsed.reserve(values.size());
        for (const auto& v : values) {
            if (!v.is_string()) {
                throw ValidationError("category '" + key + "' must be an array of strings");
            }
            parsed.push_back(v.get<std::string>());
        }
        categories.emplace(*kind, std::move(parsed));
    }
    return categories;
}

constexpr const char* kKnownRecordFields[] = {
    "record_id", "doctor_id",  "specialty", "patient_age",
    "patient_gender", "medications", "categories", "image_ref",
};

bool is_known_record_field(const std::string& key) {
    for (const char* f : kKnownRecordFields) {
        if (key == f) return true;
    }
    return false;
}

ordered_json parse_line_object(std::string_view line) {
    ordered_json obj = ordered_json::parse(line, nullptr, false);
    if (obj.is_discarded()) throw ValidationError("not valid JSON");
    if (!obj.is_object()) throw ValidationError("line is not a JSON object");
    return obj;
}

ordered_json categories_to_json(const CategoryValues& categories) {
    ordered_json out = ordered_json::object();
    for (const auto& [kind, values] : categories) {
        out[std::string(category_key(kind))] = values;
    }
    return out;
}

ordered_json medications_to_json(std::span<const Medication> meds) {
    ordered_json arr = ordered_json::array();
    for (const auto& med : meds) {
        arr.push_back({{"name", med.name}, {"dosage", med.dosage}});
    }
    return arr;
}

template <typename ParseLine, typename Sink>
std::vector<LoadIssue> parse_lines(std::istream& in, LoadMode mode,
                                   ParseLine&& parse, Sink&& sink) {
    std::vector<LoadIssue> issues;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) continue;
        try {
            sink(parse(line));
        } catch (const ValidationError& err) {
            if (mode == LoadMode::strict) {
                throw ValidationError("line " + std::to_string(line_no) + ": " +
                                      err.what());
            }
            issues.push_back({line_no, err.what()});
        }
    }
    return issues;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read file: " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path.string());
    return out;
}

}  // namespace

MedicalRecordAnnotation record_from_json_line(std::string_view line) {
    const ordered_json obj = parse_line_object(line);

    MedicalRecordAnnotation rec;
    rec.record_id = require_string(obj, "record_id");
    if (rec.record_id.empty()) throw ValidationError("record_id is empty");
    rec.doctor_id = require_string(obj, "doctor_id");
    if (rec.doctor_id.empty()) throw ValidationError("doctor_id is empty");

    if (const auto it = obj.find("specialty"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw ValidationError("field 'specialty' must be a string or null");
        const std::string value = it->get<std::string>();
        if (value != kNotMentionedSpecialty) rec.specialty = value;
    }

    if (const auto it = obj.find("patient_age"); it != obj.end() && !it->is_null()) {
        if (!it->is_number_integer()) {
            throw ValidationError("field 'patient_age' must be an integer or null");
        }
        const auto age = it->get<std::int64_t>();
        if (age < 0) throw ValidationError("patient_age is negative");
        rec.patient_age = static_cast<int>(age);
    }

    if (const auto it = obj.find("patient_gender"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) {
            throw ValidationError(std::string("field 'patient_gender' must be ") + kGenderValues);
        }
        const auto gender = gender_from_string(it->get<std::string>());
        if (!gender) {
            throw ValidationError(std::string("field 'patient_gender' must be ") + kGenderValues);
        }
        rec.patient_gender = *gender;
    }

    rec.medications = parse_medications(obj);
    rec.categories = parse_categories(obj);

    if (const auto it = obj.find("image_ref"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw ValidationError("field 'image_ref' must be a string or null");
        rec.image_ref = it->get<std::string>();
    }

    for (const auto& [key, value] : obj.items()) {
        if (!is_known_record_field(key)) {
            rec.extras.emplace(key, value.dump());
        }
    }
    return rec;
}

std::string record_to_json_line(const MedicalRecordAnnotation& rec) {
    ordered_json obj;
    obj["record_id"] = rec.record_id;
    obj["doctor_id"] = rec.doctor_id;
    obj["specialty"] = rec.specialty ? ordered_json(*rec.specialty) : ordered_json(nullptr);
    obj["patient_age"] = rec.patient_age ? ordered_json(*rec.patient_age) : ordered_json(nullptr);
    obj["patient_gender"] = rec.patient_gender
                                ? ordered_json(std::string(to_string(*rec.patient_gender)))
                                : ordered_json(nullptr);
    obj["medications"] = medications_to_json(rec.medications);
    obj["categories"] = categories_to_json(rec.categories);
    obj["image_ref"] = rec.image_ref ? ordered_json(*rec.image_ref) : ordered_json(nullptr);
    for (const auto& [key, raw] : rec.extras) {
        obj[key] = ordered_json::parse(raw);
    }
    return obj.dump();
}

CorpusLoadResult parse_corpus(std::istream& in, LoadMode mode) {
    std::vector<MedicalRecordAnnotation> records;
    auto issues = parse_lines(
        in, mode, [](const std::string& line) { return record_from_json_line(line); },
        [&records](MedicalRecordAnnotation rec) { records.push_back(std::move(rec)); });
    return {Corpus(std::move(records)), std::move(issues)};
}

CorpusLoadResult load_corpus(const std::filesystem::path& path, LoadMode mode) {
    auto in = open_input(path);
    return parse_corpus(in, mode);
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    auto out = open_output(path);
    for (const auto& rec : corpus.records()) {
        out << record_to_json_line(rec) << '\n';
    }
}

PredictionRecord prediction_from_json_line(std::string_view line) {
    const ordered_json obj = parse_line_object(line);

    PredictionRecord pred;
    pred.record_id = require_string(obj, "record_id");
    if (pred.record_id.empty()) throw ValidationError("record_id is empty");
    pred.medications = parse_medications(obj);
    pred.categories = parse_categories(obj);
    if (const auto it = obj.find("raw_output"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw ValidationError("field 'raw_output' must be a string");
        pred.raw_output = it->get<std::string>();
    }
    return pred;
}

std::string prediction_to_json_line(const PredictionRecord& pred) {
    ordered_json obj;
    obj["record_id"] = pred.record_id;
    obj["medications"] = medications_to_json(pred.medications);
    if (pred.raw_output) obj["raw_output"] = *pred.raw_output;
    if (!pred.categories.empty()) obj["categories"] = categories_to_json(pred.categories);
    return obj.dump();
}

PredictionLoadResult load_predictions(const std::filesystem::path& path, LoadMode mode) {
    auto in = open_input(path);
    PredictionLoadResult result;
    result.issues = parse_lines(
        in, mode, [](const std::string& line) { return prediction_from_json_line(line); },
        [&result](PredictionRecord pred) { result.predictions.push_back(std::move(pred)); });
    return result;
}

void save_predictions(std::span<const PredictionRecord> predictions,
                      const std::filesystem::path& path) {
    auto out = open_output(path);
    for (const auto& pred : predictions) {
        out << prediction_to_json_line(pred) << '\n';
    }
}

LinePairsLoadResult load_line_pairs(const std::filesystem::path& path, LoadMode mode) {
    auto in = open_input(path);
    LinePairsLoadResult result;
    result.issues = parse_lines(
        in, mode,
        [](const std::string& line) {
            const std::size_t first = line.find('\t');
            if (first == std::string::npos) {
                throw ValidationError("expected id<TAB>reference<TAB>hypothesis");
            }
            const std::size_t second = line.find('\t', first + 1);
            if (second == std::string::npos) {
                throw ValidationError("expected id<TAB>reference<TAB>hypothesis");
            }
            LinePair pair;
            pair.id = line.substr(0, first);
            pair.reference = line.substr(first + 1, second - first - 1);
            pair.hypothesis = line.substr(second + 1);
            return pair;
        },
        [&result](LinePair pair) { result.pairs.push_back(std::move(pair)); });
    return result;
}

}  // namespace rxeval
