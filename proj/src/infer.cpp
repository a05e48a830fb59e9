#include "rxeval/infer.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "rxeval/corpus_io.hpp"
#include "rxeval/errors.hpp"
#include "rxeval/normalize.hpp"

namespace rxeval {

namespace {

using nlohmann::json;

constexpr const char* kChatCompletionsPath = "/v1/chat/completions";

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::string base64_encode(std::string_view bytes) {
    static constexpr char alphabet[] =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= bytes.size()) {
        const auto b0 = static_cast<unsigned char>(bytes[i]);
        const auto b1 = static_cast<unsigned char>(bytes[i + 1]);
        const auto b2 = static_cast<unsigned char>(bytes[i + 2]);
        out.push_back(alphabet[b0 >> 2]);
        out.push_back(alphabet[((b0 & 0x03) << 4) | (b1 >> 4)]);
        out.push_back(alphabet[((b1 & 0x0F) << 2) | (b2 >> 6)]);
        out.push_back(alphabet[b2 & 0x3F]);
        i += 3;
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const auto b0 = static_cast<unsigned char>(bytes[i]);
        out.push_back(alphabet[b0 >> 2]);
        out.push_back(alphabet[(b0 & 0x03) << 4]);
        out.append("==");
    } else if (rest == 2) {
        const auto b0 = static_cast<unsigned char>(bytes[i]);
        const auto b1 = static_cast<unsigned char>(bytes[i + 1]);
        out.push_back(alphabet[b0 >> 2]);
        out.push_back(alphabet[((b0 & 0x03) << 4) | (b1 >> 4)]);
        out.push_back(alphabet[(b1 & 0x0F) << 2]);
        out.push_back('=');
    }
    return out;
}

std::string media_type_for(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".png") return "image/png";
    if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
    if (ext == ".webp") return "image/webp";
    return "application/octet-stream";
}

std::string substitute(std::string_view tmpl, std::string_view value) {
    const std::size_t pos = tmpl.find("{}");
    if (pos == std::string_view::npos) return std::string(tmpl);
    std::string out(tmpl.substr(0, pos));
    out += value;
    out += tmpl.substr(pos + 2);
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return text;
}

// --- model output parsing -------------------------------------------------

std::string_view strip_code_fence(std::string_view raw) {
    std::string_view s = trim(raw);
    if (!s.starts_with("```")) return raw;
    const std::size_t first_newline = s.find('\n');
    if (first_newline == std::string_view::npos) return raw;
    s.remove_prefix(first_newline + 1);
    const std::size_t closing = s.rfind("```");
    if (closing != std::string_view::npos) s = s.substr(0, closing);
    return trim(s);
}

bool try_parse_structured(std::string_view text, std::vector<Medication>& out) {
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return false;
    const auto it = doc.find("medications");
    if (it == doc.end() || !it->is_array()) return false;
    std::vector<Medication> meds;
    for (const auto& entry : *it) {
        if (!entry.is_object()) return false;
        const auto name_it = entry.find("name");
        if (name_it == entry.end() || !name_it->is_string()) return false;
        Medication med;
        med.name = name_it->get<std::string>();
        if (const auto dose_it = entry.find("dosage");
            dose_it != entry.end() && dose_it->is_string()) {
            med.dosage = dose_it->get<std::string>();
        }
        if (std::string_view(trim(med.name)).empty()) continue;
        meds.push_back(std::move(med));
    }
    out = std::move(meds);
    return true;
}

std::string_view strip_enumeration_marker(std::string_view line) {
    if (line.starts_with("- ") || line.starts_with("* ")) {
        return trim(line.substr(2));
    }
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
        return trim(line.substr(i + 1));
    }
    return line;
}

// A part is in the spaced encoding when no three letters run together.
bool looks_spaced(std::string_view part) {
    int letter_run = 0;
    for (unsigned char c : part) {
        if (std::isalpha(c)) {
            if (++letter_run >= 3) return false;
        } else {
            letter_run = 0;
        }
    }
    return !part.empty();
}

std::string collapse_if_spaced(std::string_view part) {
    if (!looks_spaced(part)) return std::string(part);
    try {
        return unspace(part);
    } catch (const std::invalid_argument&) {
        return std::string(part);
    }
}

}  // namespace

std::string_view to_string(PromptVariant variant) {
    switch (variant) {
        case PromptVariant::a: return "A";
        case PromptVariant::b: return "B";
        case PromptVariant::d: return "D";
    }
    return "?";
}

std::optional<PromptVariant> prompt_variant_from_string(std::string_view s) {
    if (s == "A" || s == "a") return PromptVariant::a;
    if (s == "B" || s == "b") return PromptVariant::b;
    if (s == "D" || s == "d") return PromptVariant::d;
    return std::nullopt;
}

PromptTemplates PromptTemplates::builtin() {
    PromptTemplates t;
    t.header =
        "Read the handwritten medical record in the image and list every "
        "prescribed medication.\n"
        "Write one medication per line in the form: NAME - DOSAGE.\n"
        "Copy names and dosages exactly as written. If no dosage is written "
        "for a medication, leave the dosage blank.";
    t.specialty_line = "Doctor's specialty: {}";
    t.age_line = "Patient age: {}";
    t.gender_line = "Patient gender: {}";
    t.top_medicines_line = "Medicines this doctor prescribes most often: {}";
    return t;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
    PromptTemplates t;
    t.header = read_text_file(dir / "header.txt");
    t.specialty_line = read_text_file(dir / "context_specialty.txt");
    t.age_line = read_text_file(dir / "context_age.txt");
    t.gender_line = read_text_file(dir / "context_gender.txt");
    t.top_medicines_line = read_text_file(dir / "context_top_medicines.txt");
    return t;
}

std::string build_prompt(const MedicalRecordAnnotation& record, PromptVariant variant,
                         const DoctorProfile* profile, const PromptTemplates& templates) {
    std::vector<std::string> context;
    switch (variant) {
        case PromptVariant::a:
            break;
        case PromptVariant::b:
            if (record.specialty) {
                context.push_back(substitute(templates.specialty_line, *record.specialty));
            }
            break;
        case PromptVariant::d: {
            if (profile == nullptr || profile->ranked_medicines.empty()) {
                throw std::invalid_argument(
                    "variant D requires a doctor profile with ranked medicines");
            }
            if (record.patient_age) {
                context.push_back(
                    substitute(templates.age_line, std::to_string(*record.patient_age)));
            }
            if (record.patient_gender) {
                context.push_back(
                    substitute(templates.gender_line, to_string(*record.patient_gender)));
            }
            std::string meds;
            for (const auto& name : profile->top_medicines(kTopMedicinesInPrompt)) {
                if (!meds.empty()) meds += ", ";
                meds += name;
            }
            context.push_back(substitute(templates.top_medicines_line, meds));
            break;
        }
    }

    std::string prompt = templates.header;
    for (const auto& line : context) {
        prompt += '\n';
        prompt += line;
    }
    return prompt;
}

ParsedOutput parse_model_output(std::string_view raw) {
    ParsedOutput out;
    const std::string_view body = strip_code_fence(raw);
    if (try_parse_structured(body, out.medications)) return out;

    std::size_t start = 0;
    while (start <= body.size()) {
        const std::size_t end = std::min(body.find('\n', start), body.size());
        std::string_view line = trim(body.substr(start, end - start));
        start = end + 1;
        if (line.empty()) continue;

        line = strip_enumeration_marker(line);
        std::string_view name_part = line;
        std::string_view dosage_part;
        std::size_t sep = line.find(" - ");
        std::size_t sep_len = 3;
        if (sep == std::string_view::npos) {
            sep = line.find('\t');
            sep_len = 1;
        }
        if (sep != std::string_view::npos) {
            name_part = trim(line.substr(0, sep));
            dosage_part = trim(line.substr(sep + sep_len));
        }

        Medication med;
        med.name = collapse_if_spaced(name_part);
        med.dosage = collapse_if_spaced(dosage_part);
        if (std::string_view(trim(med.name)).empty()) {
            ++out.skipped_lines;
            continue;
        }
        out.medications.push_back(std::move(med));
    }
    return out;
}

// --- progress ledger --------------------------------------------------------

namespace {

json outcome_to_json(const RecordOutcome& outcome) {
    json obj;
    obj["record_id"] = outcome.record_id;
    obj["status"] = outcome.succeeded ? "succeeded" : "failed";
    if (!outcome.reason.empty()) obj["reason"] = outcome.reason;
    if (outcome.succeeded) obj["raw_response"] = outcome.raw_response;
    obj["attempts"] = outcome.attempts;
    return obj;
}

}  // namespace

std::map<std::string, RecordOutcome> read_progress_ledger(
    const std::filesystem::path& path) {
    std::map<std::string, RecordOutcome> outcomes;
    std::ifstream in(path);
    if (!in) return outcomes;  // no ledger yet: fresh run

    std::string line;
    while (std::getline(in, line)) {
        if (std::string_view(trim(line)).empty()) continue;
        const json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("record_id")) {
            continue;  // torn write from a killed run
        }
        RecordOutcome outcome;
        outcome.record_id = obj["record_id"].get<std::string>();
        outcome.succeeded = obj.value("status", "") == "succeeded";
        outcome.reason = obj.value("reason", "");
        outcome.raw_response = obj.value("raw_response", "");
        outcome.attempts = obj.value("attempts", 0);
        outcomes[outcome.record_id] = std::move(outcome);
    }
    return outcomes;
}

// --- endpoint client --------------------------------------------------------

namespace {

struct HostAndPath {
    std::string host;  // scheme://host:port for httplib
    std::string path_prefix;
};

HostAndPath split_base_url(const std::string& base_url) {
    const std::size_t scheme = base_url.find("://");
    const std::size_t path_start =
        base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) return {base_url, ""};
    std::string prefix = base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, path_start), prefix};
}

std::string request_body(const EndpointConfig& endpoint, const std::string& prompt,
                         const std::string& image_bytes, const std::string& media_type) {
    json content = json::array();
    content.push_back({{"type", "text"}, {"text", prompt}});
    content.push_back(
        {{"type", "image_url"},
         {"image_url",
          {{"url", "data:" + media_type + ";base64," + base64_encode(image_bytes)}}}});
    json body;
    body["model"] = endpoint.model_name;
    body["temperature"] = 0;
    body["messages"] = json::array({{{"role", "user"}, {"content", std::move(content)}}});
    return body.dump();
}

// Extracts choices[0].message.content; empty optional on a malformed body.
std::optional<std::string> response_content(const std::string& body) {
    const json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
    const auto choices = doc.find("choices");
    if (choices == doc.end() || !choices->is_array() || choices->empty()) {
        return std::nullopt;
    }
    const auto& first = (*choices)[0];
    if (!first.is_object()) return std::nullopt;
    const auto message = first.find("message");
    if (message == first.end() || !message->is_object()) return std::nullopt;
    const auto content = message->find("content");
    if (content == message->end() || !content->is_string()) return std::nullopt;
    return content->get<std::string>();
}

class EndpointClient {
public:
    EndpointClient(const EndpointConfig& endpoint, std::string auth_token)
        : endpoint_(endpoint),
          target_(split_base_url(endpoint.base_url)),
          auth_token_(std::move(auth_token)) {}

    // One attempt; returns the model text or a failure reason.
    struct Attempt {
        bool ok = false;
        std::string content_or_reason;
    };

    Attempt post(const std::string& body) const {
        httplib::Client client(target_.host);
        const auto timeout =
            std::chrono::milliseconds(static_cast<long>(endpoint_.request_timeout * 1000));
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        httplib::Headers headers;
        if (!auth_token_.empty()) {
            headers.emplace("Authorization", "Bearer " + auth_token_);
        }
        const auto result = client.Post(target_.path_prefix + kChatCompletionsPath,
                                        headers, body, "application/json");
        if (!result) {
            return {false, "transport error: " + httplib::to_string(result.error())};
        }
        if (result->status != 200) {
            return {false, "http status " + std::to_string(result->status)};
        }
        auto content = response_content(result->body);
        if (!content) return {false, "malformed response body"};
        return {true, std::move(*content)};
    }

private:
    const EndpointConfig& endpoint_;
    HostAndPath target_;
    std::string auth_token_;
};

class LedgerWriter {
public:
    explicit LedgerWriter(const std::filesystem::path& path)
        : out_(path, std::ios::app) {
        if (!out_) throw InputError("cannot write ledger: " + path.string());
    }

    void append(const RecordOutcome& outcome) {
        const std::lock_guard<std::mutex> lock(mutex_);
        out_ << outcome_to_json(outcome).dump() << '\n';
        out_.flush();
    }

private:
    std::mutex mutex_;
    std::ofstream out_;
};

double jitter_factor(std::mt19937_64& rng) {
    // uniform in [0.8, 1.2]
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 0.8 + 0.4 * unit;
}

}  // namespace

InferenceSummary run_inference(const Corpus& corpus, const InferenceRun& run) {
    const EndpointConfig& endpoint = run.endpoint;
    if (endpoint.max_in_flight < 1) {
        throw std::invalid_argument("max_in_flight must be >= 1");
    }
    if (endpoint.retry.max_attempts < 1) {
        throw std::invalid_argument("max_attempts must be >= 1");
    }

    std::string auth_token;
    if (!endpoint.auth_token_env.empty()) {
        const char* token = std::getenv(endpoint.auth_token_env.c_str());
        if (token == nullptr || *token == '\0') {
            throw EndpointError("credential environment variable not set: " +
                                endpoint.auth_token_env);
        }
        auth_token = token;
    }

    const PromptTemplates templates = run.prompt_dir.empty()
                                          ? PromptTemplates::builtin()
                                          : PromptTemplates::load(run.prompt_dir);
    const auto profiles = build_doctor_profiles(corpus);

    auto ledger = read_progress_ledger(run.ledger_path);

    InferenceSummary summary;
    summary.total = corpus.size();

    std::vector<const MedicalRecordAnnotation*> pending;
    for (const auto& rec : corpus.records()) {
        const auto it = ledger.find(rec.record_id);
        if (it != ledger.end() && it->second.succeeded) {
            ++summary.resumed;
        } else {
            pending.push_back(&rec);
        }
    }

    if (!pending.empty()) {
        EndpointClient client(endpoint, auth_token);
        LedgerWriter writer(run.ledger_path);
        std::mutex ledger_mutex;

        std::atomic<std::size_t> next{0};
        const auto workers = static_cast<std::size_t>(
            std::min<std::size_t>(endpoint.max_in_flight, pending.size()));

        auto worker = [&](std::size_t worker_idx) {
            std::mt19937_64 jitter_rng(std::hash<std::string>{}(run.run_id) + worker_idx);
            while (true) {
                const std::size_t idx = next.fetch_add(1);
                if (idx >= pending.size()) break;
                const auto& rec = *pending[idx];

                RecordOutcome outcome;
                outcome.record_id = rec.record_id;

                std::string body;
                if (!rec.image_ref) {
                    outcome.reason = "record has no image_ref";
                } else {
                    std::ifstream image(*rec.image_ref, std::ios::binary);
                    if (!image) {
                        outcome.reason = "cannot read image: " + *rec.image_ref;
                    } else {
                        std::ostringstream bytes;
                        bytes << image.rdbuf();
                        const DoctorProfile* profile = nullptr;
                        if (const auto it = profiles.find(rec.doctor_id);
                            it != profiles.end()) {
                            profile = &it->second;
                        }
                        const std::string prompt =
                            build_prompt(rec, run.variant, profile, templates);
                        body = request_body(endpoint, prompt, bytes.str(),
                                            media_type_for(*rec.image_ref));
                    }
                }

                if (body.empty()) {  // unresolvable image: fail without a request
                    writer.append(outcome);
                    const std::lock_guard<std::mutex> lock(ledger_mutex);
                    ledger[outcome.record_id] = outcome;
                    continue;
                }

                for (int attempt = 1; attempt <= endpoint.retry.max_attempts; ++attempt) {
                    if (attempt > 1) {
                        const double delay =
                            endpoint.retry.backoff_base *
                            std::pow(endpoint.retry.backoff_multiplier, attempt - 2) *
                            jitter_factor(jitter_rng);
                        std::this_thread::sleep_for(std::chrono::duration<double>(delay));
                    }
                    outcome.attempts = attempt;
                    const auto result = client.post(body);
                    if (result.ok) {
                        outcome.succeeded = true;
                        outcome.raw_response = result.content_or_reason;
                        outcome.reason.clear();
                        break;
                    }
                    outcome.reason = result.content_or_reason;
                }

                writer.append(outcome);
                const std::lock_guard<std::mutex> lock(ledger_mutex);
                ledger[outcome.record_id] = outcome;
            }
        };

        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker, w);
        for (auto& t : threads) t.join();

        summary.attempted = pending.size();
    }

    // Final file: succeeded records only, ordered by record_id, rebuilt in
    // full on every run so repeat runs are byte-identical.
    std::vector<PredictionRecord> predictions;
    for (const auto& rec : corpus.records()) {
        const auto it = ledger.find(rec.record_id);
        if (it == ledger.end()) continue;
        if (!it->second.succeeded) {
            ++summary.failed;
            continue;
        }
        PredictionRecord pred;
        pred.record_id = rec.record_id;
        pred.raw_output = it->second.raw_response;
        pred.medications = parse_model_output(it->second.raw_response).medications;
        predictions.push_back(std::move(pred));
        ++summary.succeeded;
    }
    std::sort(predictions.begin(), predictions.end(),
              [](const PredictionRecord& a, const PredictionRecord& b) {
                  return a.record_id < b.record_id;
              });
    save_predictions(predictions, run.output_path);
    return summary;
}

}  // namespace rxeval
