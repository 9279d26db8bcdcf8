#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "bioverify/assoc.hpp"
#include "bioverify/cooccur.hpp"
#include "bioverify/sha256.hpp"
#include "bioverify/util.hpp"

namespace bioverify {

/// Error text mirrored into rejection reasons when a response body is not
/// parseable JSON.
inline constexpr const char* kInvalidJsonError = "Invalid JSON format in response.";

struct PromptSpec {
  AssociationKind kind = AssociationKind::DiseaseSymptom;
  int batch_size = 10;
  std::string one_shot_example;  // verbatim JSON exemplar
  std::string system_preamble;

  void validate() const {
    if (batch_size < 1) throw std::invalid_argument("prompt spec: batch_size must be >= 1");
    if (!nlohmann::json::accept(one_shot_example))
      throw std::invalid_argument("prompt spec: one-shot example is not valid JSON");
  }
};

/// Ontology-pair naming used in the generation instruction.
inline const char* kind_pair_name(AssociationKind k) {
  switch (k) {
    case AssociationKind::DiseaseDrug: return "DOID-CHEBI";
    case AssociationKind::DiseaseSymptom: return "DOID-SYMPTOM";
    case AssociationKind::DiseaseGene: return "DOID-GO";
    default: return "GO-GENE";
  }
}

inline std::string default_one_shot_example(AssociationKind k) {
  switch (k) {
    case AssociationKind::DiseaseSymptom:
      return R"({"DOID:11734": "Epistaxis", "SYMPTOM:1080": "Nosebleed"})";
    case AssociationKind::DiseaseDrug:
      return R"({"DOID:2841": "Asthma", "ChEBI:10177": "Zidovudine"})";
    case AssociationKind::DiseaseGene:
      return R"({"disease_id": "DOID:9351", "disease": "Hypertension", "go_id": "GO:0002027", "go_process": "Blood Pressure Regulation", "gene": "ACE"})";
    default:
      return R"({"go_id": "GO:0002027", "go_process": "Blood Pressure Regulation", "gene": "ACE"})";
  }
}

/// Deterministic concatenation; identical specs produce byte-identical
/// prompts.
inline std::string build_prompt(const PromptSpec& spec) {
  spec.validate();
  std::string prompt;
  if (!spec.system_preamble.empty()) {
    prompt += spec.system_preamble;
    prompt += "\n\n";
  }
  prompt += "You are an assistant that generates ";
  prompt += std::to_string(spec.batch_size);
  prompt += " ";
  prompt += kind_pair_name(spec.kind);
  prompt +=
      " term associations in a structured JSON format. Ensure the JSON is valid and correctly "
      "formatted for parsing. Provide one example in the following format:\n";
  prompt += spec.one_shot_example;
  return prompt;
}

struct TransportResult {
  bool ok = false;      // transport-level success (a response was received)
  int status = 0;       // HTTP-style status code
  std::string body;
  std::string error;    // transport-level failure description
};

/// Anything that can answer a chat-completion request body: a live HTTP
/// endpoint, a scripted stub, or a recorded fixture file.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual TransportResult send(const std::string& request_body) = 0;
};

/// Replays a fixed result sequence; the last entry repeats.
class ScriptedTransport final : public Transport {
 public:
  explicit ScriptedTransport(std::vector<TransportResult> script) : script_(std::move(script)) {
    if (script_.empty()) throw std::invalid_argument("scripted transport: empty script");
  }

  TransportResult send(const std::string&) override {
    const TransportResult& r = script_[std::min(next_, script_.size() - 1)];
    ++next_;
    return r;
  }

  std::size_t calls() const { return next_; }

 private:
  std::vector<TransportResult> script_;
  std::size_t next_ = 0;
};

/// Offline transport backed by a JSON fixture mapping sha256(request body) to
/// canned responses. "*" is the fallback key. A value may be a single
/// response or an array consumed in order (last repeats); each entry is
/// either a body string, an envelope object, or {"status": N, "body": ...}.
class FixtureTransport final : public Transport {
 public:
  explicit FixtureTransport(const std::filesystem::path& fixture_file) {
    nlohmann::json doc = nlohmann::json::parse(read_file(fixture_file));
    if (!doc.is_object())
      throw std::runtime_error("mock fixture must be a JSON object: " + fixture_file.string());
    for (const auto& [key, value] : doc.items()) {
      auto& seq = canned_[key];
      if (value.is_array())
        for (const auto& entry : value) seq.push_back(to_result(entry));
      else
        seq.push_back(to_result(value));
    }
  }

  TransportResult send(const std::string& request_body) override {
    const std::string hash = sha256_hex(request_body);
    auto it = canned_.find(hash);
    if (it == canned_.end()) it = canned_.find("*");
    if (it == canned_.end() || it->second.empty())
      return {false, 0, "", "no fixture response for request " + hash};
    auto& cursor = cursor_[it->first];
    const TransportResult& r = it->second[std::min(cursor, it->second.size() - 1)];
    ++cursor;
    return r;
  }

 private:
  static TransportResult to_result(const nlohmann::json& entry) {
    if (entry.is_string()) return {true, 200, entry.get<std::string>(), ""};
    if (entry.is_object() && entry.contains("status")) {
      TransportResult r;
      r.status = entry["status"].get<int>();
      r.ok = r.status != 0;
      if (entry.contains("body"))
        r.body = entry["body"].is_string() ? entry["body"].get<std::string>() : entry["body"].dump();
      if (entry.contains("error")) r.error = entry["error"].get<std::string>();
      return r;
    }
    return {true, 200, entry.dump(), ""};
  }

  std::map<std::string, std::vector<TransportResult>> canned_;
  std::map<std::string, std::size_t> cursor_;
};

struct GenerationSession {
  std::string model_name;
  std::string endpoint;
  std::size_t requests_sent = 0;       // attempts, including retries
  std::size_t records_accepted = 0;
  std::size_t records_rejected = 0;    // element-level rejects across responses
  std::size_t responses_rejected = 0;  // whole responses rejected
  std::size_t elements_seen = 0;       // top-level elements across parsed responses
  std::size_t retries = 0;
};

struct TransportError : std::runtime_error {
  int last_status = 0;
  TransportError(const std::string& msg, int status) : std::runtime_error(msg), last_status(status) {}
};

struct RetryPolicy {
  std::size_t retry_limit = 3;  // retries after the first attempt
  std::chrono::milliseconds base_backoff{0};
};

/// Chat-completion request body (messages convention). nlohmann serializes
/// object keys sorted, so identical inputs hash identically.
inline std::string make_chat_request(const std::string& model, const std::string& prompt,
                                     const nlohmann::json& sampling = nlohmann::json::object()) {
  nlohmann::json body;
  body["model"] = model;
  body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
  for (const auto& [key, value] : sampling.items()) body[key] = value;
  return body.dump();
}

/// Sends one request, retrying with exponential backoff up to the configured
/// limit. Exhausted retries raise a TransportError carrying the last status.
inline std::string request_batch(GenerationSession& session, const std::string& request_body,
                                 Transport& transport, const RetryPolicy& policy = {}) {
  TransportResult last;
  for (std::size_t attempt = 0;; ++attempt) {
    ++session.requests_sent;
    last = transport.send(request_body);
    if (last.ok && last.status >= 200 && last.status < 300) return last.body;
    if (attempt >= policy.retry_limit) break;
    ++session.retries;
    if (policy.base_backoff.count() > 0)
      std::this_thread::sleep_for(policy.base_backoff * (1LL << attempt));
  }
  throw TransportError("transport failed after " + std::to_string(policy.retry_limit) +
                           " retries (last status " + std::to_string(last.status) +
                           (last.error.empty() ? "" : ", " + last.error) + ")",
                       last.status);
}

/// Pulls choices[0].message.content out of a chat-completion envelope; when
/// the body is not such an envelope it is treated as the content itself.
inline std::string extract_content(const std::string& response_body) {
  const nlohmann::json doc = nlohmann::json::parse(response_body, nullptr, false);
  if (doc.is_object() && doc.contains("choices") && doc["choices"].is_array() &&
      !doc["choices"].empty()) {
    const auto& first = doc["choices"][0];
    if (first.is_object() && first.contains("message") && first["message"].is_object()) {
      const auto& content = first["message"]["content"];
      if (content.is_string()) return content.get<std::string>();
    }
  }
  return response_body;
}

/// Drops a leading/trailing markdown code fence if present.
inline std::string strip_code_fences(const std::string& raw) {
  std::string text = trim(raw);
  if (text.rfind("```", 0) != 0) return text;
  const auto first_newline = text.find('\n');
  if (first_newline == std::string::npos) return text;
  text = text.substr(first_newline + 1);
  const auto closing = text.rfind("```");
  if (closing != std::string::npos) text = text.substr(0, closing);
  return trim(text);
}

struct ResponseValidation {
  bool accepted = false;   // at least one record parsed
  std::string reason;      // set when !accepted
  ParseOutcome parsed;
};

/// Algorithm-level response check: fence stripping, JSON validity, element
/// parsing. A syntactically valid response with zero accepted records still
/// counts as rejected.
inline ResponseValidation validate_response(const std::string& raw, AssociationKind kind) {
  ResponseValidation v;
  const std::string body = strip_code_fences(raw);
  try {
    v.parsed = parse_associations(body, kind);
  } catch (const std::exception&) {
    v.reason = kInvalidJsonError;
    return v;
  }
  if (v.parsed.records.empty()) {
    v.reason = "response contained no accepted records";
    return v;
  }
  v.accepted = true;
  return v;
}

struct GenerationOptions {
  PromptSpec prompt;
  std::string model = "gpt-4o";
  std::string endpoint_label;        // recorded in the session
  std::size_t target_records = 50;
  std::size_t max_requests = 0;      // 0 -> derived from target and batch size
  RetryPolicy retry;
  double requests_per_minute = 0;    // 0 -> unlimited
  nlohmann::json sampling = nlohmann::json::object();  // pass-through (temperature, ...)
};

struct GenerationResult {
  GenerationSession session;
  std::vector<AssociationRecord> records;   // raw, duplicates kept
  std::vector<RejectedRecord> rejected;
  std::vector<std::string> raw_responses;
  bool target_reached = false;
};

/// Batch loop: keep requesting until the target record count is accepted or
/// the request budget runs out. Duplicates across batches are kept here and
/// removed only at verification time.
inline GenerationResult run_generation(const GenerationOptions& options, Transport& transport) {
  options.prompt.validate();
  GenerationResult result;
  result.session.model_name = options.model;
  result.session.endpoint = options.endpoint_label;

  const std::size_t batches_needed =
      (options.target_records + options.prompt.batch_size - 1) / options.prompt.batch_size;
  const std::size_t max_requests =
      options.max_requests > 0 ? options.max_requests : batches_needed * 4 + 4;

  const std::string prompt = build_prompt(options.prompt);
  const std::string request_body = make_chat_request(options.model, prompt, options.sampling);

  std::chrono::steady_clock::time_point last_send{};
  std::size_t issued = 0;
  while (result.records.size() < options.target_records && issued < max_requests) {
    if (options.requests_per_minute > 0 && issued > 0) {
      const auto interval =
          std::chrono::milliseconds(static_cast<long long>(60000.0 / options.requests_per_minute));
      const auto elapsed = std::chrono::steady_clock::now() - last_send;
      if (elapsed < interval)
        std::this_thread::sleep_for(interval - elapsed);
    }
    last_send = std::chrono::steady_clock::now();
    ++issued;
    const std::string body = request_batch(result.session, request_body, transport, options.retry);
    result.raw_responses.push_back(body);

    ResponseValidation v = validate_response(extract_content(body), options.prompt.kind);
    result.session.elements_seen += v.parsed.elements;
    result.session.records_accepted += v.parsed.records.size();
    result.session.records_rejected += v.parsed.rejected.size();
    for (auto& rej : v.parsed.rejected) result.rejected.push_back(std::move(rej));
    if (!v.accepted) {
      ++result.session.responses_rejected;
      continue;
    }
    const std::string batch_id = "batch-" + std::to_string(issued);
    const std::string stamp = utc_timestamp();
    for (auto& rec : v.parsed.records) {
      rec.provenance = {options.model, stamp, batch_id};
      result.records.push_back(std::move(rec));
    }
  }
  result.target_reached = result.records.size() >= options.target_records;
  return result;
}

/// One Table-5-shaped row of the cross-model consistency check.
struct ConsistencyRow {
  std::string model_name;
  AssociationKind kind = AssociationKind::DiseaseDrug;
  std::size_t hit_count = 0;
  std::size_t denominator = 0;           // deduplicated record count
  std::optional<double> percentage;      // undefined when denominator == 0
  bool flagged = false;                  // e.g. empty simulated corpus
  std::string note;
};

/// Checks how many generated associations co-occur inside independently
/// generated simulated abstracts. Same engine as the literature check.
inline ConsistencyRow consistency_check(const std::vector<AssociationRecord>& records,
                                        const Corpus& simulated, const std::string& model_name,
                                        const PatternResolver& resolve = raw_pattern_resolver(),
                                        unsigned workers = 1) {
  ConsistencyRow row;
  row.model_name = model_name;
  if (!records.empty()) row.kind = records.front().kind;
  const DedupResult dd = dedup(records);
  row.denominator = dd.unique.size();
  if (simulated.docs.empty()) {
    row.flagged = true;
    row.note = "simulated corpus is empty";
  }
  const OccurrenceIndex index = build_index(simulated, collect_patterns(dd.unique, resolve), workers);
  for (const auto& hit : verify_associations_indexed(dd.unique, resolve, index)) {
    if (hit.count > 0) ++row.hit_count;
  }
  if (row.denominator > 0)
    row.percentage = static_cast<double>(row.hit_count) / static_cast<double>(row.denominator);
  return row;
}

}  // namespace bioverify
