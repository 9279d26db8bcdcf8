#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bioverify/text.hpp"
#include "bioverify/util.hpp"

namespace bioverify {

using ojson = nlohmann::ordered_json;

enum class AssociationKind { DiseaseDrug, DiseaseSymptom, DiseaseGene, ProcessGene };

inline constexpr AssociationKind kAllKinds[] = {
    AssociationKind::DiseaseDrug,
    AssociationKind::DiseaseSymptom,
    AssociationKind::DiseaseGene,
    AssociationKind::ProcessGene,
};

inline const char* kind_name(AssociationKind k) {
  switch (k) {
    case AssociationKind::DiseaseDrug: return "disease-drug";
    case AssociationKind::DiseaseSymptom: return "disease-symptom";
    case AssociationKind::DiseaseGene: return "disease-gene";
    default: return "process-gene";
  }
}

/// Display form used in rendered report tables.
inline const char* kind_display(AssociationKind k) {
  switch (k) {
    case AssociationKind::DiseaseDrug: return "Disease-Drug";
    case AssociationKind::DiseaseSymptom: return "Disease-Symptom";
    case AssociationKind::DiseaseGene: return "Disease-Gene";
    default: return "GeneProcess-Gene";
  }
}

inline AssociationKind kind_from_string(std::string_view s) {
  for (const auto k : kAllKinds)
    if (s == kind_name(k)) return k;
  throw UsageError("unknown association kind: '" + std::string(s) +
                   "' (expected disease-drug, disease-symptom, disease-gene or process-gene)");
}

/// A term reference as generated. The id may be syntactically or
/// referentially invalid -- that is data to audit, not an error.
struct TermRef {
  std::string id;
  std::string label;

  bool operator==(const TermRef&) const = default;
};

struct Provenance {
  std::string model_name;
  std::string generated_at;
  std::string batch_id;

  bool empty() const { return model_name.empty() && generated_at.empty() && batch_id.empty(); }
  bool operator==(const Provenance&) const = default;
};

struct AssociationRecord {
  AssociationKind kind = AssociationKind::DiseaseDrug;
  TermRef source;  // disease, or GO process for ProcessGene
  TermRef target;  // drug / symptom / gene
  std::optional<std::string> gene_symbol;  // DiseaseGene only
  std::optional<TermRef> go_process;       // DiseaseGene only
  Provenance provenance;

  /// Dedup identity: labels, not IDs (generated IDs are unreliable).
  std::string identity_key() const {
    std::string key = kind_name(kind);
    key.push_back('\x1f');
    key += normalize(source.label);
    key.push_back('\x1f');
    key += normalize(target.label);
    return key;
  }

  bool operator==(const AssociationRecord&) const = default;
};

/// A malformed dataset element, kept verbatim for audit.
struct RejectedRecord {
  std::string raw;
  std::string reason;
};

struct ParseOutcome {
  std::vector<AssociationRecord> records;
  std::vector<RejectedRecord> rejected;
  std::size_t elements = 0;  // top-level array elements seen
};

namespace detail {

struct RecordError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string require_string(const ojson& obj, const char* field) {
  const auto it = obj.find(field);
  if (it == obj.end()) throw RecordError(std::string("missing field: ") + field);
  if (!it->is_string()) throw RecordError(std::string("wrong type: ") + field);
  auto value = it->get<std::string>();
  if (trim(value).empty()) throw RecordError(std::string("empty field: ") + field);
  return value;
}

inline std::string optional_string(const ojson& obj, const char* field) {
  const auto it = obj.find(field);
  if (it == obj.end()) return {};
  if (!it->is_string()) throw RecordError(std::string("wrong type: ") + field);
  return it->get<std::string>();
}

inline bool looks_like_term_id(std::string_view s) {
  const auto colon = s.find(':');
  if (colon == 0 || colon == std::string_view::npos || colon + 1 >= s.size()) return false;
  for (const char c : s.substr(0, colon))
    if (std::isalpha(static_cast<unsigned char>(c)) == 0) return false;
  for (const char c : s.substr(colon + 1))
    if (std::isspace(static_cast<unsigned char>(c)) != 0) return false;
  return true;
}

// The flat one-shot shape from the generation prompt: an object mapping
// term id -> label, one entry per side, e.g.
//   {"DOID:11734": "Epistaxis", "SYMPTOM:1080": "Nosebleed"}
inline bool is_flat_pair_object(const ojson& obj) {
  if (!obj.is_object() || obj.size() != 2) return false;
  for (const auto& [key, value] : obj.items())
    if (!value.is_string() || !looks_like_term_id(key)) return false;
  return true;
}

inline AssociationRecord parse_flat_pair(const ojson& obj, AssociationKind kind) {
  if (kind == AssociationKind::DiseaseGene)
    throw RecordError("missing field: gene");  // the flat shape cannot carry a gene symbol
  std::vector<TermRef> refs;
  for (const auto& [key, value] : obj.items()) {
    if (trim(value.get<std::string>()).empty()) throw RecordError("empty label for id " + key);
    refs.push_back(TermRef{key, value.get<std::string>()});
  }
  const std::string source_prefix = kind == AssociationKind::ProcessGene ? "GO:" : "DOID:";
  if (refs[1].id.rfind(source_prefix, 0) == 0 && refs[0].id.rfind(source_prefix, 0) != 0)
    std::swap(refs[0], refs[1]);
  AssociationRecord rec;
  rec.kind = kind;
  rec.source = refs[0];
  rec.target = refs[1];
  return rec;
}

inline Provenance parse_provenance(const ojson& obj) {
  Provenance p;
  const auto it = obj.find("_provenance");
  if (it == obj.end() || !it->is_object()) return p;
  p.model_name = optional_string(*it, "model_name");
  p.generated_at = optional_string(*it, "generated_at");
  p.batch_id = optional_string(*it, "batch_id");
  return p;
}

inline AssociationRecord parse_element(const ojson& el, AssociationKind kind) {
  if (!el.is_object()) throw RecordError("element is not an object");
  if (is_flat_pair_object(el)) return parse_flat_pair(el, kind);

  AssociationRecord rec;
  rec.kind = kind;
  switch (kind) {
    case AssociationKind::DiseaseDrug:
      rec.source = {optional_string(el, "disease_id"), require_string(el, "disease")};
      rec.target = {optional_string(el, "drug_id"), require_string(el, "drug")};
      break;
    case AssociationKind::DiseaseSymptom:
      rec.source = {optional_string(el, "disease_id"), require_string(el, "disease")};
      rec.target = {optional_string(el, "symptom_id"), require_string(el, "symptom")};
      break;
    case AssociationKind::DiseaseGene: {
      rec.source = {optional_string(el, "disease_id"), require_string(el, "disease")};
      auto gene = require_string(el, "gene");
      rec.target = {std::string(), gene};
      rec.gene_symbol = std::move(gene);
      rec.go_process = TermRef{optional_string(el, "go_id"), require_string(el, "go_process")};
      break;
    }
    case AssociationKind::ProcessGene:
      rec.source = {optional_string(el, "go_id"), require_string(el, "go_process")};
      rec.target = {std::string(), require_string(el, "gene")};
      break;
  }
  rec.provenance = parse_provenance(el);
  return rec;
}

}  // namespace detail

/// Accepts a JSON array of records, or an object carrying exactly one
/// array-valued field. Element-level faults never abort the parse; they
/// become RejectedRecord entries. A top-level syntax error is a hard error
/// naming the byte offset.
inline ParseOutcome parse_associations(std::string_view text, AssociationKind kind) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("association JSON: syntax error at byte " + std::to_string(e.byte) +
                             ": " + e.what());
  }
  const ojson* array = nullptr;
  if (doc.is_array()) {
    array = &doc;
  } else if (doc.is_object()) {
    for (const auto& [key, value] : doc.items()) {
      if (!value.is_array()) continue;
      if (array) throw std::runtime_error("association JSON: multiple array fields at top level");
      array = &value;
    }
    if (!array) {
      // a bare record object counts as a one-element dataset
      ParseOutcome out;
      out.elements = 1;
      try {
        out.records.push_back(detail::parse_element(doc, kind));
      } catch (const detail::RecordError& e) {
        out.rejected.push_back({doc.dump(), e.what()});
      }
      return out;
    }
  } else {
    throw std::runtime_error("association JSON: top level must be an array or object");
  }

  ParseOutcome out;
  out.elements = array->size();
  for (const auto& el : *array) {
    try {
      out.records.push_back(detail::parse_element(el, kind));
    } catch (const detail::RecordError& e) {
      out.rejected.push_back({el.dump(), e.what()});
    }
  }
  return out;
}

inline ojson serialize_record(const AssociationRecord& rec) {
  ojson el = ojson::object();
  switch (rec.kind) {
    case AssociationKind::DiseaseDrug:
      if (!rec.source.id.empty()) el["disease_id"] = rec.source.id;
      el["disease"] = rec.source.label;
      if (!rec.target.id.empty()) el["drug_id"] = rec.target.id;
      el["drug"] = rec.target.label;
      break;
    case AssociationKind::DiseaseSymptom:
      if (!rec.source.id.empty()) el["disease_id"] = rec.source.id;
      el["disease"] = rec.source.label;
      if (!rec.target.id.empty()) el["symptom_id"] = rec.target.id;
      el["symptom"] = rec.target.label;
      break;
    case AssociationKind::DiseaseGene:
      if (!rec.source.id.empty()) el["disease_id"] = rec.source.id;
      el["disease"] = rec.source.label;
      el["gene"] = rec.gene_symbol.value_or(rec.target.label);
      if (rec.go_process) {
        if (!rec.go_process->id.empty()) el["go_id"] = rec.go_process->id;
        el["go_process"] = rec.go_process->label;
      }
      break;
    case AssociationKind::ProcessGene:
      if (!rec.source.id.empty()) el["go_id"] = rec.source.id;
      el["go_process"] = rec.source.label;
      el["gene"] = rec.target.label;
      break;
  }
  if (!rec.provenance.empty()) {
    ojson p = ojson::object();
    p["model_name"] = rec.provenance.model_name;
    p["generated_at"] = rec.provenance.generated_at;
    p["batch_id"] = rec.provenance.batch_id;
    el["_provenance"] = std::move(p);
  }
  return el;
}

inline std::string serialize_associations(const std::vector<AssociationRecord>& records) {
  ojson arr = ojson::array();
  for (const auto& rec : records) arr.push_back(serialize_record(rec));
  ojson doc = ojson::object();
  doc["records"] = std::move(arr);
  return doc.dump(2) + "\n";
}

struct DedupResult {
  std::vector<AssociationRecord> unique;
  std::size_t duplicate_count = 0;
};

/// First occurrence by identity key wins; survivor order is input order.
inline DedupResult dedup(const std::vector<AssociationRecord>& records) {
  DedupResult result;
  if (records.empty()) return result;
  std::set<std::string> seen;
  for (const auto& rec : records) {
    if (rec.kind != records.front().kind)
      throw std::invalid_argument("dedup: mixed association kinds in one batch");
    if (seen.insert(rec.identity_key()).second)
      result.unique.push_back(rec);
    else
      ++result.duplicate_count;
  }
  return result;
}

struct DeriveResult {
  std::vector<AssociationRecord> records;
  std::size_t skipped = 0;
};

/// Projects DiseaseGene records onto (GO process, gene symbol) pairs.
/// Callers dedup the result; the same (process, gene) pair frequently backs
/// several diseases.
inline DeriveResult derive_process_gene_pairs(const std::vector<AssociationRecord>& records) {
  DeriveResult result;
  for (const auto& rec : records) {
    if (rec.kind != AssociationKind::DiseaseGene)
      throw std::invalid_argument("derive_process_gene_pairs: input must be disease-gene records");
    if (!rec.go_process || !rec.gene_symbol || trim(rec.go_process->label).empty() ||
        trim(*rec.gene_symbol).empty()) {
      ++result.skipped;
      continue;
    }
    AssociationRecord out;
    out.kind = AssociationKind::ProcessGene;
    out.source = *rec.go_process;
    out.target = TermRef{std::string(), *rec.gene_symbol};
    out.provenance = rec.provenance;
    result.records.push_back(std::move(out));
  }
  return result;
}

}  // namespace bioverify
