#include "rxeval/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "rxeval/errors.hpp"

namespace rxeval {

namespace {

// Similarities are compared as integer millionths so that the cardinality /
// total-similarity / lexicographic tie-break chain is exact and
// schedule-independent.
constexpr std::int64_t kSimScale = 1'000'000;
// One extra matched pair must outweigh any redistribution of similarity.
constexpr std::int64_t kCardinalityBonus = 1'000'000'000'000;

struct NormalizedMed {
    std::string name;
    std::string dosage;
};

std::vector<NormalizedMed> normalize_meds(std::span<const Medication> meds,
                                          const NormalizationConfig& cfg) {
    std::vector<NormalizedMed> out;
    out.reserve(meds.size());
    for (const auto& med : meds) {
        out.push_back({normalize_name(med.name, cfg), normalize_dosage(med.dosage, cfg)});
    }
    return out;
}

// Maximum-weight assignment (rows to columns, weights >= 0, 0 = leave the
// row unmatched) via the Jonker-Volgenant variant of the Hungarian
// algorithm on a rectangular matrix. Returns the column matched to each
// row, or npos.
class Assignment {
public:
    Assignment(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), weights_(rows * (cols + rows), 0) {}

    void set_weight(std::size_t row, std::size_t col, std::int64_t w) {
        weights_[row * (cols_ + rows_) + col] = w;
    }

    std::int64_t solve(std::vector<std::size_t>* row_to_col = nullptr) const {
        // Columns cols_..cols_+rows_-1 are zero-weight dummies, so every row
        // can always be "assigned"; dummy or zero-weight assignments are
        // reported as unmatched.
        const std::size_t n = rows_;
        const std::size_t m = cols_ + rows_;
        constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;

        // Standard shortest-augmenting-path formulation over costs
        // (cost = -weight), with 1-based potentials.
        std::vector<std::int64_t> u(n + 1, 0), v(m + 1, 0);
        std::vector<std::size_t> match(m + 1, 0);  // column -> row (1-based)
        std::vector<std::size_t> way(m + 1, 0);

        for (std::size_t i = 1; i <= n; ++i) {
            match[0] = i;
            std::size_t j0 = 0;
            std::vector<std::int64_t> minv(m + 1, inf);
            std::vector<char> used(m + 1, false);
            do {
                used[j0] = true;
                const std::size_t i0 = match[j0];
                std::int64_t delta = inf;
                std::size_t j1 = 0;
                for (std::size_t j = 1; j <= m; ++j) {
                    if (used[j]) continue;
                    const std::int64_t cost =
                        -weights_[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
                    if (cost < minv[j]) {
                        minv[j] = cost;
                        way[j] = j0;
                    }
                    if (minv[j] < delta) {
                        delta = minv[j];
                        j1 = j;
                    }
                }
                for (std::size_t j = 0; j <= m; ++j) {
                    if (used[j]) {
                        u[match[j]] += delta;
                        v[j] -= delta;
                    } else {
                        minv[j] -= delta;
                    }
                }
                j0 = j1;
            } while (match[j0] != 0);
            do {
                const std::size_t j1 = way[j0];
                match[j0] = match[j1];
                j0 = j1;
            } while (j0 != 0);
        }

        std::int64_t total = 0;
        if (row_to_col) row_to_col->assign(n, npos);
        for (std::size_t j = 1; j <= m; ++j) {
            if (match[j] == 0) continue;
            const std::size_t row = match[j] - 1;
            const std::size_t col = j - 1;
            const std::int64_t w = weights_[row * m + col];
            if (col >= cols_ || w <= 0) continue;
            total += w;
            if (row_to_col) (*row_to_col)[row] = col;
        }
        return total;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::int64_t> weights_;
};

std::int64_t solve_subproblem(const std::vector<std::vector<std::int64_t>>& weight,
                              const std::vector<char>& row_used,
                              const std::vector<char>& col_used) {
    std::vector<std::size_t> rows, cols;
    for (std::size_t i = 0; i < row_used.size(); ++i) {
        if (!row_used[i]) rows.push_back(i);
    }
    for (std::size_t j = 0; j < col_used.size(); ++j) {
        if (!col_used[j]) cols.push_back(j);
    }
    Assignment assignment(rows.size(), cols.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b < cols.size(); ++b) {
            assignment.set_weight(a, b, weight[rows[a]][cols[b]]);
        }
    }
    return assignment.solve();
}

MatchResult finalize(std::size_t n_pred, std::size_t n_target,
                     std::vector<std::pair<std::size_t, std::size_t>> matched) {
    std::sort(matched.begin(), matched.end());
    std::vector<char> pred_used(n_pred, false), target_used(n_target, false);
    for (const auto& [p, t] : matched) {
        pred_used[p] = true;
        target_used[t] = true;
    }
    MatchResult result;
    result.matched = std::move(matched);
    for (std::size_t i = 0; i < n_pred; ++i) {
        if (!pred_used[i]) result.false_positives.push_back(i);
    }
    for (std::size_t j = 0; j < n_target; ++j) {
        if (!target_used[j]) result.false_negatives.push_back(j);
    }
    return result;
}

MatchResult match_exact(const std::vector<NormalizedMed>& preds,
                        const std::vector<NormalizedMed>& targets) {
    std::unordered_map<std::string, std::vector<std::size_t>> target_buckets;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        target_buckets[targets[j].name + '\x1f' + targets[j].dosage].push_back(j);
    }

    std::vector<std::pair<std::size_t, std::size_t>> matched;
    std::unordered_map<std::string, std::size_t> consumed;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const std::string key = preds[i].name + '\x1f' + preds[i].dosage;
        const auto it = target_buckets.find(key);
        if (it == target_buckets.end()) continue;
        std::size_t& used = consumed[key];
        if (used >= it->second.size()) continue;
        matched.emplace_back(i, it->second[used]);
        ++used;
    }
    return finalize(preds.size(), targets.size(), std::move(matched));
}

MatchResult match_fuzzy(const std::vector<NormalizedMed>& preds,
                        const std::vector<NormalizedMed>& targets,
                        double tau_name, double tau_dosage) {
    const std::size_t n = preds.size();
    const std::size_t m = targets.size();

    // weight = 0 marks an incompatible pair.
    std::vector<std::vector<std::int64_t>> weight(n, std::vector<std::int64_t>(m, 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double name_sim = similarity(preds[i].name, targets[j].name);
            if (name_sim < tau_name) continue;
            if (similarity(preds[i].dosage, targets[j].dosage) < tau_dosage) continue;
            weight[i][j] = kCardinalityBonus +
                           static_cast<std::int64_t>(std::llround(name_sim * kSimScale));
        }
    }

    std::vector<char> row_used(n, false), col_used(m, false);
    std::int64_t remaining = solve_subproblem(weight, row_used, col_used);

    // Fix pairs in lexicographic order whenever doing so preserves the
    // optimal (cardinality, total name similarity) value; the result is the
    // lexicographically smallest optimal matching.
    std::vector<std::pair<std::size_t, std::size_t>> matched;
    for (std::size_t i = 0; i < n && remaining > 0; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (weight[i][j] == 0 || row_used[i] || col_used[j]) continue;
            row_used[i] = true;
            col_used[j] = true;
            const std::int64_t rest = solve_subproblem(weight, row_used, col_used);
            if (weight[i][j] + rest == remaining) {
                matched.emplace_back(i, j);
                remaining = rest;
                break;
            }
            row_used[i] = false;
            col_used[j] = false;
        }
    }
    return finalize(n, m, std::move(matched));
}

void accumulate_category(std::unordered_map<std::string, std::int64_t>& counts,
                         const std::vector<std::string>& values,
                         bool dosage_like, const NormalizationConfig& cfg) {
    for (const auto& value : values) {
        const std::string norm =
            dosage_like ? normalize_dosage(value, cfg) : normalize_name(value, cfg);
        if (!norm.empty()) ++counts[norm];
    }
}

// Normalized multiset of one record side for one category. Medicine Name
// comes from medication names, Medicine Properties from dosages plus any
// explicit values; the rest from the categories map.
std::unordered_map<std::string, std::int64_t> category_multiset(
    CategoryKind kind, std::span<const Medication> medications,
    const CategoryValues& categories, const NormalizationConfig& cfg) {
    std::unordered_map<std::string, std::int64_t> counts;
    if (kind == CategoryKind::medicine_name) {
        for (const auto& med : medications) {
            const std::string norm = normalize_name(med.name, cfg);
            if (!norm.empty()) ++counts[norm];
        }
        return counts;
    }
    if (kind == CategoryKind::medicine_properties) {
        for (const auto& med : medications) {
            const std::string norm = normalize_dosage(med.dosage, cfg);
            if (!norm.empty()) ++counts[norm];
        }
    }
    if (const auto it = categories.find(kind); it != categories.end()) {
        accumulate_category(counts, it->second,
                            kind == CategoryKind::medicine_properties, cfg);
    }
    return counts;
}

// Maps record position -> prediction, verifying resolution and uniqueness.
std::vector<const PredictionRecord*> align_predictions(
    std::span<const PredictionRecord> predictions, const Corpus& corpus) {
    std::vector<const PredictionRecord*> aligned(corpus.size(), nullptr);
    for (const auto& pred : predictions) {
        const auto pos = corpus.position(pred.record_id);
        if (!pos) {
            throw InputError("prediction references unknown record_id: " +
                             pred.record_id);
        }
        if (aligned[*pos] != nullptr) {
            throw InputError("duplicate prediction for record_id: " + pred.record_id);
        }
        aligned[*pos] = &pred;
    }
    return aligned;
}

double safe_ratio(std::int64_t num, std::int64_t den) {
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 1.0;
}

}  // namespace

void precision_recall_f1(std::int64_t tp, std::int64_t fp, std::int64_t fn,
                         double& precision, double& recall, double& f1) {
    precision = safe_ratio(tp, tp + fp);
    recall = safe_ratio(tp, tp + fn);
    f1 = (precision + recall > 0.0)
             ? 2.0 * precision * recall / (precision + recall)
             : 0.0;
}

MatchResult match_record(std::span<const Medication> predictions,
                         std::span<const Medication> targets,
                         const MatchMode& mode, const NormalizationConfig& cfg) {
    const auto preds_norm = normalize_meds(predictions, cfg);
    const auto targets_norm = normalize_meds(targets, cfg);
    if (mode.kind == MatchMode::Kind::exact) {
        return match_exact(preds_norm, targets_norm);
    }
    return match_fuzzy(preds_norm, targets_norm, mode.tau_name, mode.tau_dosage);
}

CorpusScore score_corpus(std::span<const PredictionRecord> predictions,
                         const Corpus& corpus, const MatchMode& mode,
                         const NormalizationConfig& cfg) {
    const auto aligned = align_predictions(predictions, corpus);

    CorpusScore score;
    double macro_p_sum = 0.0, macro_r_sum = 0.0, macro_f1_sum = 0.0;
    static const std::vector<Medication> kNoMeds;

    for (std::size_t pos = 0; pos < corpus.size(); ++pos) {
        const auto& rec = corpus.records()[pos];
        const PredictionRecord* pred = aligned[pos];
        const auto& pred_meds = pred ? pred->medications : kNoMeds;
        if (!pred) ++score.records_without_prediction;

        const MatchResult match = match_record(pred_meds, rec.medications, mode, cfg);
        const auto tp = static_cast<std::int64_t>(match.matched.size());
        const auto fp = static_cast<std::int64_t>(match.false_positives.size());
        const auto fn = static_cast<std::int64_t>(match.false_negatives.size());
        score.tp += tp;
        score.fp += fp;
        score.fn += fn;

        double p = 0, r = 0, f1 = 0;
        precision_recall_f1(tp, fp, fn, p, r, f1);
        macro_p_sum += p;
        macro_r_sum += r;
        macro_f1_sum += f1;

        for (const auto& med : rec.medications) {
            ++score.per_medicine[normalize_name(med.name, cfg)].target_count;
        }
        for (const auto& med : pred_meds) {
            ++score.per_medicine[normalize_name(med.name, cfg)].predicted_count;
        }
        for (const auto& [pi, ti] : match.matched) {
            const std::string pred_name = normalize_name(pred_meds[pi].name, cfg);
            const std::string target_name = normalize_name(rec.medications[ti].name, cfg);
            if (pred_name == target_name) {
                ++score.per_medicine[target_name].correct_count;
            }
        }
        ++score.records_scored;
    }

    precision_recall_f1(score.tp, score.fp, score.fn, score.precision,
                        score.recall, score.f1);
    if (score.records_scored > 0) {
        const auto n = static_cast<double>(score.records_scored);
        score.macro_precision = macro_p_sum / n;
        score.macro_recall = macro_r_sum / n;
        score.macro_f1 = macro_f1_sum / n;
    }
    score.per_category = score_categories(predictions, corpus, cfg);
    return score;
}

std::map<CategoryKind, CategoryScore> score_categories(
    std::span<const PredictionRecord> predictions, const Corpus& corpus,
    const NormalizationConfig& cfg) {
    const auto aligned = align_predictions(predictions, corpus);

    std::map<CategoryKind, CategoryScore> scores;
    for (CategoryKind kind : kCategoryKinds) scores[kind] = {};

    static const std::vector<Medication> kNoMeds;
    static const CategoryValues kNoCategories;

    for (std::size_t pos = 0; pos < corpus.size(); ++pos) {
        const auto& rec = corpus.records()[pos];
        const PredictionRecord* pred = aligned[pos];
        for (CategoryKind kind : kCategoryKinds) {
            const auto target = category_multiset(kind, rec.medications,
                                                  rec.categories, cfg);
            const auto predicted = category_multiset(
                kind, pred ? pred->medications : kNoMeds,
                pred ? pred->categories : kNoCategories, cfg);

            std::int64_t tp = 0, target_total = 0, predicted_total = 0;
            for (const auto& [value, count] : target) {
                target_total += count;
                const auto it = predicted.find(value);
                if (it != predicted.end()) tp += std::min(count, it->second);
            }
            for (const auto& [_, count] : predicted) predicted_total += count;

            auto& cs = scores[kind];
            cs.tp += tp;
            cs.fp += predicted_total - tp;
            cs.fn += target_total - tp;
        }
    }

    for (auto& [_, cs] : scores) {
        cs.zero_support = (cs.tp + cs.fp + cs.fn) == 0;
        precision_recall_f1(cs.tp, cs.fp, cs.fn, cs.precision, cs.recall, cs.f1);
    }
    return scores;
}

std::vector<FrequencyRow> frequency_comparison(
    std::span<const PredictionRecord> predictions, const Corpus& corpus,
    const NormalizationConfig& cfg) {
    align_predictions(predictions, corpus);  // validate ids

    std::map<std::string, std::pair<std::int64_t, std::int64_t>> counts;
    std::int64_t target_total = 0, predicted_total = 0;
    for (const auto& rec : corpus.records()) {
        for (const auto& med : rec.medications) {
            ++counts[normalize_name(med.name, cfg)].first;
            ++target_total;
        }
    }
    for (const auto& pred : predictions) {
        for (const auto& med : pred.medications) {
            ++counts[normalize_name(med.name, cfg)].second;
            ++predicted_total;
        }
    }

    std::vector<FrequencyRow> rows;
    rows.reserve(counts.size());
    for (const auto& [name, pair] : counts) {
        FrequencyRow row;
        row.medicine = name;
        row.target_pct = target_total > 0
                             ? static_cast<double>(pair.first) / static_cast<double>(target_total)
                             : 0.0;
        row.predicted_pct =
            predicted_total > 0
                ? static_cast<double>(pair.second) / static_cast<double>(predicted_total)
                : 0.0;
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const FrequencyRow& a, const FrequencyRow& b) {
        if (a.target_pct != b.target_pct) return a.target_pct > b.target_pct;
        return a.medicine < b.medicine;
    });
    return rows;
}

}  // namespace rxeval
