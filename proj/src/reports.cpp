#include "rxeval/reports.hpp"

#include <cstdio>
#include <cstdlib>
#include <ostream>

#include "json.hpp"
#include "rxeval/errors.hpp"

namespace rxeval {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string percent(double fraction) { return format_fixed(fraction * 100.0, 2); }

ordered_json block(std::int64_t tp, std::int64_t fp, std::int64_t fn, double p,
                   double r, double f1) {
    ordered_json obj;
    obj["tp"] = tp;
    obj["fp"] = fp;
    obj["fn"] = fn;
    obj["precision"] = p;
    obj["recall"] = r;
    obj["f1"] = f1;
    return obj;
}

}  // namespace

std::string csv_escape(std::string_view value) {
    if (value.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(value);
    }
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

void csv_row(std::ostream& out, std::span<const std::string> cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out << ',';
        out << csv_escape(cells[i]);
    }
    out << '\n';
}

std::string format_fixed(double value, int decimals) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
    return buffer;
}

std::string format_full(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    // Prefer the shortest representation that round-trips.
    for (int precision = 1; precision < 17; ++precision) {
        char candidate[64];
        std::snprintf(candidate, sizeof(candidate), "%.*g", precision, value);
        if (std::strtod(candidate, nullptr) == value) return candidate;
    }
    return buffer;
}

std::string score_report_json(const ModelScore& model, const MatchMode& mode) {
    const CorpusScore& s = model.score;
    ordered_json obj;
    obj["model"] = model.label;
    obj["mode"] = mode.kind == MatchMode::Kind::exact ? "exact" : "fuzzy";
    if (mode.kind == MatchMode::Kind::fuzzy) {
        obj["tau_name"] = mode.tau_name;
        obj["tau_dosage"] = mode.tau_dosage;
    }
    obj["micro"] = block(s.tp, s.fp, s.fn, s.precision, s.recall, s.f1);
    obj["macro"] = {{"precision", s.macro_precision},
                    {"recall", s.macro_recall},
                    {"f1", s.macro_f1}};
    obj["records_scored"] = s.records_scored;
    obj["records_without_prediction"] = s.records_without_prediction;

    ordered_json categories;
    for (const auto& [kind, cs] : s.per_category) {
        ordered_json entry = block(cs.tp, cs.fp, cs.fn, cs.precision, cs.recall, cs.f1);
        entry["zero_support"] = cs.zero_support;
        categories[std::string(category_key(kind))] = std::move(entry);
    }
    obj["per_category"] = std::move(categories);

    ordered_json medicines = ordered_json::array();
    for (const auto& [name, tally] : s.per_medicine) {
        medicines.push_back({{"medicine", name},
                             {"target_count", tally.target_count},
                             {"predicted_count", tally.predicted_count},
                             {"correct_count", tally.correct_count}});
    }
    obj["per_medicine"] = std::move(medicines);
    return obj.dump(2) + "\n";
}

ModelScore score_report_from_json(const std::string& text) {
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("micro")) {
        throw InputError("not a score report");
    }
    ModelScore model;
    model.label = doc.value("model", "model");
    const auto& micro = doc.at("micro");
    model.score.tp = micro.value("tp", 0);
    model.score.fp = micro.value("fp", 0);
    model.score.fn = micro.value("fn", 0);
    model.score.precision = micro.value("precision", 0.0);
    model.score.recall = micro.value("recall", 0.0);
    model.score.f1 = micro.value("f1", 0.0);
    if (const auto it = doc.find("per_category"); it != doc.end() && it->is_object()) {
        for (CategoryKind kind : kCategoryKinds) {
            const auto entry = it->find(std::string(category_key(kind)));
            if (entry == it->end()) continue;
            CategoryScore cs;
            cs.tp = entry->value("tp", 0);
            cs.fp = entry->value("fp", 0);
            cs.fn = entry->value("fn", 0);
            cs.precision = entry->value("precision", 0.0);
            cs.recall = entry->value("recall", 0.0);
            cs.f1 = entry->value("f1", 0.0);
            cs.zero_support = entry->value("zero_support", false);
            model.score.per_category[kind] = cs;
        }
    }
    return model;
}

void write_results_csv(std::ostream& out, std::span<const ModelScore> models) {
    csv_row(out, std::vector<std::string>{"Model", "Precision %", "Recall %", "F1 %"});
    for (const auto& model : models) {
        csv_row(out, std::vector<std::string>{model.label, percent(model.score.precision),
                                              percent(model.score.recall),
                                              percent(model.score.f1)});
    }
}

void write_category_csv(std::ostream& out, std::span<const ModelScore> models) {
    std::vector<std::string> header{"Category"};
    for (const auto& model : models) header.push_back(model.label);
    csv_row(out, header);
    for (CategoryKind kind : kCategoryKinds) {
        std::vector<std::string> row{std::string(category_label(kind))};
        for (const auto& model : models) {
            const auto it = model.score.per_category.find(kind);
            row.push_back(it == model.score.per_category.end()
                              ? "0.00"
                              : percent(it->second.f1));
        }
        csv_row(out, row);
    }
}

void write_frequency_csv(std::ostream& out, std::span<const FrequencyRow> rows) {
    csv_row(out, std::vector<std::string>{"medicine", "target_pct", "predicted_pct"});
    for (const auto& row : rows) {
        csv_row(out, std::vector<std::string>{row.medicine, format_full(row.target_pct),
                                              format_full(row.predicted_pct)});
    }
}

void write_topn_csv(std::ostream& out, const TopNCurve& curve) {
    csv_row(out, std::vector<std::string>{"N", "coverage"});
    for (const auto& point : curve.points) {
        csv_row(out, std::vector<std::string>{std::to_string(point.n),
                                              format_full(point.coverage)});
    }
}

void write_specialty_csv(std::ostream& out, std::span<const SpecialtyCount> rows) {
    csv_row(out, std::vector<std::string>{"Specialty", "Number of Prescriptions"});
    for (const auto& row : rows) {
        csv_row(out, std::vector<std::string>{row.label, std::to_string(row.count)});
    }
}

void write_medicine_frequency_csv(std::ostream& out,
                                  std::span<const FrequencyTableRow> rows,
                                  bool log_scale) {
    csv_row(out, std::vector<std::string>{
                     "rank", "medicine", log_scale ? "log10_pct" : "share"});
    for (const auto& row : rows) {
        csv_row(out, std::vector<std::string>{std::to_string(row.rank), row.name,
                                              format_full(row.value)});
    }
}

void write_rates_csv(std::ostream& out, std::span<const LabeledRates> rows) {
    csv_row(out, std::vector<std::string>{"model", "cer", "wer"});
    for (const auto& row : rows) {
        csv_row(out, std::vector<std::string>{row.label, format_fixed(row.rates.cer, 6),
                                              format_fixed(row.rates.wer, 6)});
    }
}

}  // namespace rxeval
